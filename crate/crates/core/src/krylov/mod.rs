//! Krylov solvers, smoothers and the one- and two-level preconditioners.

mod precond;
mod smoother;
mod solvers;

pub use precond::{apply_ms, IdentityPreconditioner, Preconditioner, TwoLevel};
pub use smoother::{Smoother, SmootherKind, SmootherSpec};
pub use solvers::{solve, Method, SolverSpec};

use std::io::Write;
use std::path::Path;
use std::time::Duration;

use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Converged,
    MaxIters,
    Breakdown(String),
}

#[derive(Clone, Debug)]
pub struct ConvergenceHistory {
    /// `||b - A x_k|| / ||b||`, entry 0 for the initial guess.
    pub residuals: Vec<f64>,
    pub status: Status,
    pub wall_time: Duration,
}

impl ConvergenceHistory {
    pub fn new(residuals: Vec<f64>, status: Status, wall_time: Duration) -> Self {
        Self {
            residuals,
            status,
            wall_time,
        }
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn iterations(&self) -> usize {
        self.residuals.len().saturating_sub(1)
    }

    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "iteration,relative_residual")?;
        for (k, r) in self.residuals.iter().enumerate() {
            writeln!(w, "{k},{r:e}")?;
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut buf = std::io::BufWriter::new(f);
        self.write_csv(&mut buf)?;
        buf.flush()?;
        Ok(())
    }
}
