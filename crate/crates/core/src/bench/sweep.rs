use std::fmt::Write as _;
use std::path::Path;

use super::config::CaseConfig;
use super::run::{run_case, RunReport};
use crate::Result;

/// Iteration counts, one row per case and one column per run; `None` marks a
/// run that did not converge.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub case: String,
    pub fine_unknowns: usize,
    pub coarse_unknowns: usize,
    pub iterations: Vec<Option<usize>>,
}

impl SweepTable {
    pub fn from_reports(reports: &[RunReport]) -> Self {
        let mut columns: Vec<String> = Vec::new();
        for r in reports {
            for run in &r.config.runs {
                let c = run.column();
                if !columns.contains(&c) {
                    columns.push(c);
                }
            }
        }
        let rows = reports
            .iter()
            .map(|r| SweepRow {
                case: r.case.clone(),
                fine_unknowns: r.fine_unknowns,
                coarse_unknowns: r.coarse_unknowns,
                iterations: columns
                    .iter()
                    .map(|c| {
                        r.config
                            .runs
                            .iter()
                            .zip(&r.runs)
                            .find(|(cfg, _)| &cfg.column() == c)
                            .and_then(|(_, s)| s.converged.then_some(s.iterations))
                    })
                    .collect(),
            })
            .collect();
        Self { columns, rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<usize>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.iterations[k]).collect())
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| case | fine | coarse |");
        for c in &self.columns {
            let _ = write!(s, " {c} |");
        }
        s.push_str("\n|---|---:|---:|");
        s.push_str(&"---:|".repeat(self.columns.len()));
        s.push('\n');
        for r in &self.rows {
            let _ = write!(
                s,
                "| {} | {} | {} |",
                r.case, r.fine_unknowns, r.coarse_unknowns
            );
            for it in &r.iterations {
                match it {
                    Some(n) => {
                        let _ = write!(s, " {n} |");
                    }
                    None => s.push_str(" - |"),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("case,fine,coarse");
        for c in &self.columns {
            let _ = write!(s, ",{c}");
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{},{}", r.case, r.fine_unknowns, r.coarse_unknowns);
            for it in &r.iterations {
                match it {
                    Some(n) => {
                        let _ = write!(s, ",{n}");
                    }
                    None => s.push_str(",-"),
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Runs every case (after sweep expansion) and tabulates iteration counts as
/// `{name}_table.md` and `{name}_table.csv` in `out_dir`.
pub fn run_sweep(
    configs: &[CaseConfig],
    name: &str,
    out_dir: &Path,
) -> Result<(SweepTable, Vec<RunReport>)> {
    let mut reports = Vec::new();
    for cfg in configs.iter().flat_map(|c| c.expand()) {
        reports.push(run_case(&cfg, out_dir)?);
    }
    let table = SweepTable::from_reports(&reports);
    std::fs::write(
        out_dir.join(format!("{name}_table.md")),
        table.to_markdown(),
    )?;
    std::fs::write(out_dir.join(format!("{name}_table.csv")), table.to_csv())?;
    Ok((table, reports))
}
