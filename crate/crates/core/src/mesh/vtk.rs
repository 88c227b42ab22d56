//! Legacy VTK text output.

use std::fmt::Write as _;
use std::path::Path;

use super::{CoarsePartition, Mesh};
use crate::Result;

const QUAD_ORDER: [usize; 4] = [0, 1, 3, 2];
const HEX_ORDER: [usize; 8] = [0, 1, 3, 2, 4, 5, 7, 6];

/// Unstructured-grid dataset with optional named cell and point scalars.
pub fn write_vtk(
    mesh: &Mesh,
    cell_data: &[(&str, &[f64])],
    point_data: &[(&str, &[f64])],
    path: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(path, render(mesh, cell_data, point_data))?;
    Ok(())
}

pub fn render(mesh: &Mesh, cell_data: &[(&str, &[f64])], point_data: &[(&str, &[f64])]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# vtk DataFile Version 3.0\nmsrsb mesh\nASCII\nDATASET UNSTRUCTURED_GRID"
    );
    let _ = writeln!(s, "POINTS {} double", mesh.num_nodes());
    for p in mesh.nodes() {
        let _ = writeln!(s, "{:e} {:e} {:e}", p[0], p[1], p[2]);
    }
    let (order, ctype): (&[usize], u8) = if mesh.dim() == 2 {
        (&QUAD_ORDER, 9)
    } else {
        (&HEX_ORDER, 12)
    };
    let nc = mesh.num_cells();
    let _ = writeln!(s, "CELLS {} {}", nc, nc * (order.len() + 1));
    for c in mesh.cells() {
        let _ = write!(s, "{}", order.len());
        for &k in order {
            let _ = write!(s, " {}", c.vertices[k]);
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {nc}");
    for _ in 0..nc {
        let _ = writeln!(s, "{ctype}");
    }
    write_scalars(&mut s, "CELL_DATA", nc, cell_data);
    write_scalars(&mut s, "POINT_DATA", mesh.num_nodes(), point_data);
    s
}

fn write_scalars(s: &mut String, section: &str, n: usize, data: &[(&str, &[f64])]) {
    if data.is_empty() {
        return;
    }
    let _ = writeln!(s, "{section} {n}");
    for (name, values) in data {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in values.iter() {
            let _ = writeln!(s, "{v:e}");
        }
    }
}

/// One block index per line, in fine-point order.
pub fn write_partition(partition: &CoarsePartition, path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::with_capacity(partition.num_fine() * 4);
    for b in &partition.block_of {
        let _ = writeln!(s, "{b}");
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, GridDistortion};

    #[test]
    fn quad_connectivity_is_counter_clockwise() {
        let m = build_structured_mesh(&[2, 1], &[2.0, 1.0], &GridDistortion::default()).unwrap();
        let text = render(&m, &[("p", &[1.0, 2.0])], &[]);
        assert!(text.contains("CELLS 2 10\n4 0 1 4 3\n4 1 2 5 4\n"));
        assert!(text.contains("CELL_DATA 2\nSCALARS p double 1"));
    }

    #[test]
    fn hex_connectivity() {
        let m = build_structured_mesh(&[1, 1, 1], &[1.0, 1.0, 1.0], &GridDistortion::default())
            .unwrap();
        let text = render(&m, &[], &[]);
        assert!(text.contains("8 0 1 3 2 4 5 7 6\n"));
        assert!(text.contains("CELL_TYPES 1\n12\n"));
    }
}
