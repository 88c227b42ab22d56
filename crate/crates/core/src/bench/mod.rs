//! Configuration-driven experiment runner.

mod config;
mod run;
mod sweep;

pub use config::{
    CaseConfig, Coarsening, ElasticBc, ElasticityConfig, FlowBc, FlowConfig, MeshConfig, Mobility,
    Physics, Reservoir, RunConfig, SweepConfig, Vary, Young,
};
pub use run::{
    build_mesh, build_multiscale, discretize, export_basis, initial_ms_error, ms_error, run_case,
    solve_with, Discretization, MsError, Multiscale, RunReport, RunSummary,
};
pub use sweep::{run_sweep, SweepRow, SweepTable};

use std::path::{Path, PathBuf};

use crate::Result;

/// Every `*.toml` case in `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<CaseConfig>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    paths.iter().map(CaseConfig::load).collect()
}
