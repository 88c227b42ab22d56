//! Matrix Market coordinate format (`real`, `general` or `symmetric`).

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::CsrMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse {
        path: "<matrix market>".into(),
        msg: msg.into(),
    }
}

pub fn read<R: Read>(reader: R) -> Result<CsrMatrix> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines.next().ok_or_else(|| parse_err("empty input"))??;
    let h: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if h.len() < 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" || h[2] != "coordinate" {
        return Err(parse_err(format!("unsupported header `{header}`")));
    }
    if h[3] != "real" && h[3] != "integer" {
        return Err(parse_err(format!("unsupported field `{}`", h[3])));
    }
    let symmetry = match h[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        s => return Err(parse_err(format!("unsupported symmetry `{s}`"))),
    };
    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut it = t.split_whitespace();
        let mut next_num = |what: &str| -> Result<&str> {
            it.next()
                .ok_or_else(|| parse_err(format!("line {}: missing {what}", lineno + 2)))
        };
        match size {
            None => {
                let r = next_num("rows")?
                    .parse()
                    .map_err(|_| parse_err("bad row count"))?;
                let c = next_num("cols")?
                    .parse()
                    .map_err(|_| parse_err("bad column count"))?;
                let n = next_num("nnz")?
                    .parse()
                    .map_err(|_| parse_err("bad entry count"))?;
                size = Some((r, c, n));
                triplets.reserve(n);
            }
            Some((nr, nc, _)) => {
                let i: usize = next_num("row")?
                    .parse()
                    .map_err(|_| parse_err("bad row index"))?;
                let j: usize = next_num("col")?
                    .parse()
                    .map_err(|_| parse_err("bad column index"))?;
                let v: f64 = next_num("value")?
                    .parse()
                    .map_err(|_| parse_err("bad value"))?;
                if i == 0 || j == 0 || i > nr || j > nc {
                    return Err(parse_err(format!(
                        "line {}: index ({i}, {j}) out of range",
                        lineno + 2
                    )));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetry == Symmetry::Symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (nr, nc, _) = size.ok_or_else(|| parse_err("missing size line"))?;
    CsrMatrix::from_triplets(nr, nc, &triplets)
}

pub fn write<W: Write>(a: &CsrMatrix, symmetry: Symmetry, mut w: W) -> Result<()> {
    let mut out = String::new();
    let kind = match symmetry {
        Symmetry::General => "general",
        Symmetry::Symmetric => "symmetric",
    };
    writeln!(out, "%%MatrixMarket matrix coordinate real {kind}").unwrap();
    let entries: Vec<_> = a
        .triplets()
        .filter(|&(i, j, _)| symmetry == Symmetry::General || i >= j)
        .collect();
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), entries.len()).unwrap();
    for (i, j, v) in entries {
        writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v).unwrap();
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_file(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    read(std::fs::File::open(path)?).map_err(|e| match e {
        Error::Parse { msg, .. } => Error::Parse {
            path: path.to_path_buf(),
            msg,
        },
        e => e,
    })
}

pub fn write_file(a: &CsrMatrix, symmetry: Symmetry, path: impl AsRef<Path>) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write(a, symmetry, std::io::BufWriter::new(f))
}
