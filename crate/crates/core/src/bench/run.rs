use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::config::{CaseConfig, ElasticBc, FlowBc, Mobility, Physics, Young};
use crate::basis::{
    build_basis, build_basis_vector, build_coarse_system, make_restriction, CoarseSystem,
    Prolongation,
};
use crate::fe::{
    apply_dirichlet_symmetric, assemble_elasticity, layered_young, reservoir_load, ElasticBoundary,
    ElasticMaterial,
};
use crate::fv::{
    assemble_mpfa_o, assemble_tpfa, diag, layered_lognormal, DiffusionField, FaceCondition,
    FlowBoundary,
};
use crate::krylov::{
    solve, ConvergenceHistory, IdentityPreconditioner, Method, Smoother, SmootherSpec, SolverSpec,
    TwoLevel,
};
use crate::mesh::{
    build_structured_mesh, build_support_regions, partition_agglomerate, partition_structured,
    partition_structured_nodes, CoarsePartition, Mesh, NodeCoarsening,
};
use crate::sparse::{market, CsrMatrix};
use crate::{Error, Result};

/// Mesh, fine system and coarse partition of a case.
pub struct Discretization {
    pub mesh: Mesh,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Cell partition (flow) or node partition (elasticity), with supports.
    pub partition: CoarsePartition,
    /// Unknowns per fine point.
    pub n_sd: usize,
}

pub fn build_mesh(cfg: &CaseConfig) -> Result<Mesh> {
    let mut mesh = build_structured_mesh(&cfg.mesh.cells, &cfg.mesh.extents, &cfg.mesh.distortion)?;
    if !cfg.mesh.origin.is_empty() {
        let mut o = [0.0; 3];
        o[..cfg.dim()].copy_from_slice(&cfg.mesh.origin);
        mesh.translate(o);
    }
    Ok(mesh)
}

fn pad(v: &[f64]) -> [f64; 3] {
    let mut o = [0.0; 3];
    o[..v.len()].copy_from_slice(v);
    o
}

pub fn discretize(cfg: &CaseConfig) -> Result<Discretization> {
    discretize_inner(cfg).map_err(|e| cfg.wrap(e))
}

fn discretize_inner(cfg: &CaseConfig) -> Result<Discretization> {
    cfg.validate()?;
    let mesh = build_mesh(cfg)?;
    let dim = mesh.dim();
    let (matrix, rhs, partition, n_sd) = match cfg.physics {
        Physics::FlowTpfa | Physics::FlowMpfa => {
            let flow = cfg.flow.as_ref().expect("validated");
            let n = mesh.num_cells();
            let field = match &flow.mobility {
                Mobility::Uniform { value, units } => {
                    DiffusionField::isotropic(&vec![*value; n], *units)
                }
                Mobility::Diagonal { values, units } => {
                    if values.len() != dim {
                        return Err(Error::invalid(
                            "diagonal mobility must match the mesh dimension",
                        ));
                    }
                    let mut v = [1.0; 3];
                    v[..dim].copy_from_slice(values);
                    DiffusionField::uniform(n, diag(v), *units)
                }
                Mobility::LayeredLognormal {
                    means,
                    sigma_log10,
                    seed,
                } => layered_lognormal(&mesh, means, *sigma_log10, *seed)?,
            };
            let mut bc = FlowBoundary::no_flow(&mesh);
            for b in &flow.bc {
                match *b {
                    FlowBc::Dirichlet { side, value } => {
                        bc.set_side(&mesh, side, FaceCondition::Dirichlet(value))
                    }
                    FlowBc::Neumann { side, value } => {
                        bc.set_side(&mesh, side, FaceCondition::Neumann(value))
                    }
                };
            }
            let sys = if cfg.physics == Physics::FlowTpfa {
                assemble_tpfa(&mesh, &field, &bc)?
            } else {
                assemble_mpfa_o(&mesh, &field, &bc)?
            };
            let c = &cfg.coarsening;
            let part = match (&c.ratio, c.agglomerate) {
                (Some(r), _) => partition_structured(&mesh, r)?,
                (None, Some(t)) => partition_agglomerate(&mesh, t)?,
                _ => unreachable!("validated"),
            };
            (sys.matrix, sys.rhs, part, 1)
        }
        Physics::Elasticity => {
            let el = cfg.elasticity.as_ref().expect("validated");
            let n = mesh.num_cells();
            let young = match &el.young {
                Young::Uniform { value } => vec![*value; n],
                Young::Layers { values } => {
                    let lat = mesh.cell_lattice();
                    let nv = lat.dims[dim - 1];
                    let nl = values.len();
                    (0..n)
                        .map(|c| values[((nv - 1 - lat.ijk(c)[dim - 1]) * nl / nv).min(nl - 1)])
                        .collect()
                }
                Young::DepthProfile {
                    params,
                    layer_offsets,
                } => layered_young(&mesh, el.poisson, params, layer_offsets)?,
            };
            let material = ElasticMaterial {
                young,
                poisson: vec![el.poisson; n],
            };
            let mut bc = ElasticBoundary::free(&mesh);
            for b in &el.bc {
                match b {
                    ElasticBc::Fixed {
                        side,
                        direction,
                        value,
                    } => bc.fix_side(&mesh, *side, *direction, *value),
                    ElasticBc::Roller { side } => bc.fix_side(&mesh, *side, side.axis(), 0.0),
                    ElasticBc::Traction { side, value } => {
                        bc.traction_side(&mesh, *side, pad(value))
                    }
                };
            }
            let sys = assemble_elasticity(&mesh, &material, &bc)?;
            let mut f = sys.rhs;
            for res in &el.reservoirs {
                let zone: Vec<usize> = (0..n)
                    .filter(|&c| {
                        let x = mesh.cells()[c].centroid;
                        (0..dim).all(|d| x[d] >= res.min[d] && x[d] <= res.max[d])
                    })
                    .collect();
                let load = reservoir_load(&mesh, &zone, res.dp_bar)?;
                f.iter_mut().zip(&load).for_each(|(a, b)| *a += b);
            }
            let (a, f) = apply_dirichlet_symmetric(&sys.matrix, &f, &bc.dirichlet)?;
            let c = &cfg.coarsening;
            let spec: Vec<NodeCoarsening> = match (&c.ratio, &c.count) {
                (Some(r), _) => r.iter().map(|&r| NodeCoarsening::Ratio(r)).collect(),
                (None, Some(m)) => m.iter().map(|&m| NodeCoarsening::Count(m)).collect(),
                _ => unreachable!("validated"),
            };
            (a, f, partition_structured_nodes(&mesh, &spec)?, dim)
        }
    };
    let partition = build_support_regions(&mesh, &partition)?;
    Ok(Discretization {
        mesh,
        matrix,
        rhs,
        partition,
        n_sd,
    })
}

/// Discretization plus basis and factorized coarse system.
pub struct Multiscale {
    pub disc: Discretization,
    pub prolongation: Prolongation,
    pub coarse: CoarseSystem,
    pub basis_seconds: f64,
    pub coarse_seconds: f64,
}

pub fn build_multiscale(cfg: &CaseConfig, disc: Discretization) -> Result<Multiscale> {
    let t = Instant::now();
    let pr = if disc.n_sd == 1 {
        build_basis(&disc.matrix, &disc.partition, &cfg.basis)
    } else {
        build_basis_vector(&disc.matrix, &disc.partition, &cfg.basis, disc.n_sd)
    }
    .map_err(|e| cfg.wrap(e))?;
    let basis_seconds = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let r = make_restriction(&pr.p, &disc.partition, cfg.restriction, disc.n_sd)
        .map_err(|e| cfg.wrap(e))?;
    let coarse = build_coarse_system(&disc.matrix, &pr.p, &r).map_err(|e| cfg.wrap(e))?;
    Ok(Multiscale {
        disc,
        prolongation: pr,
        coarse,
        basis_seconds,
        coarse_seconds: t.elapsed().as_secs_f64(),
    })
}

/// Solves with the two-level preconditioner built from `pre`, `coarse` and
/// `post`; `n_sd` is the number of unknowns per fine point.
pub fn solve_with(
    a: &CsrMatrix,
    b: &[f64],
    coarse: Option<&CoarseSystem>,
    pre: SmootherSpec,
    post: SmootherSpec,
    spec: &SolverSpec,
    n_sd: usize,
) -> Result<(Vec<f64>, ConvergenceHistory)> {
    let m = TwoLevel::new(
        a,
        Smoother::for_vector(pre, a, n_sd)?,
        coarse,
        Smoother::for_vector(post, a, n_sd)?,
    );
    solve(a, b, &m, spec)
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub iterations: usize,
    pub converged: bool,
    pub status: String,
    pub final_residual: f64,
    pub solve_seconds: f64,
    pub csv: String,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MsError {
    /// `||p - p_ms||_1 / ||p||_1`.
    pub rel_l1: f64,
    pub max_abs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub case: String,
    pub fine_unknowns: usize,
    pub coarse_unknowns: usize,
    pub basis_iterations: usize,
    pub basis_converged: bool,
    pub setup_seconds: f64,
    pub basis_seconds: f64,
    pub coarse_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ms_error: Option<MsError>,
    pub runs: Vec<RunSummary>,
    pub config: CaseConfig,
}

impl RunReport {
    pub fn run(&self, label: &str) -> Option<&RunSummary> {
        self.runs.iter().find(|r| r.label == label)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("{}_report.toml", self.case));
        let text = toml::to_string(self)
            .map_err(|e| Error::invalid(format!("report serialization: {e}")))?;
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// Builds the case, runs every configured solve, writes one CSV per run and
/// the report into `out_dir`.
pub fn run_case(cfg: &CaseConfig, out_dir: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(out_dir)?;
    let t = Instant::now();
    let disc = discretize(cfg)?;
    let setup_seconds = t.elapsed().as_secs_f64();
    let ms = build_multiscale(cfg, disc)?;
    let a = &ms.disc.matrix;
    let b = &ms.disc.rhs;
    let mut runs = Vec::with_capacity(cfg.runs.len());
    for run in &cfg.runs {
        let coarse = run.multiscale.then_some(&ms.coarse);
        let (_, hist) = solve_with(a, b, coarse, run.pre, run.post, &run.solver(), ms.disc.n_sd)
            .map_err(|e| cfg.wrap(e))?;
        let label = run.label();
        let csv = format!("{}_{}.csv", cfg.id, label);
        hist.write_csv_file(out_dir.join(&csv))?;
        runs.push(RunSummary {
            iterations: hist.iterations(),
            converged: hist.converged(),
            status: format!("{:?}", hist.status),
            final_residual: hist.final_residual(),
            solve_seconds: hist.wall_time.as_secs_f64(),
            label,
            csv,
        });
    }
    let ms_error = if cfg.reference {
        Some(initial_ms_error(&ms).map_err(|e| cfg.wrap(e))?)
    } else {
        None
    };
    let report = RunReport {
        case: cfg.id.clone(),
        fine_unknowns: a.nrows(),
        coarse_unknowns: ms.coarse.dim(),
        basis_iterations: ms.prolongation.iterations,
        basis_converged: ms.prolongation.converged,
        setup_seconds,
        basis_seconds: ms.basis_seconds,
        coarse_seconds: ms.coarse_seconds,
        ms_error,
        runs,
        config: cfg.clone(),
    };
    report.write(out_dir)?;
    Ok(report)
}

/// Error of the uniterated multiscale solution `P A_c^{-1} R f` against a
/// fine-scale reference solved to 1e-12.
pub fn initial_ms_error(ms: &Multiscale) -> Result<MsError> {
    let a = &ms.disc.matrix;
    let f = &ms.disc.rhs;
    let p_ms = ms.coarse.correct(f);
    let spec = SolverSpec::new(Method::Gmres, 1e-12, 2000);
    let post = SmootherSpec::new(crate::krylov::SmootherKind::Ilu0, 1);
    let (mut p, hist) = solve_with(
        a,
        f,
        Some(&ms.coarse),
        SmootherSpec::none(),
        post,
        &spec,
        ms.disc.n_sd,
    )?;
    if !hist.converged() {
        let (p2, h2) = solve(a, f, &IdentityPreconditioner, &spec)?;
        if !h2.converged() {
            return Err(Error::invalid("reference solve did not reach 1e-12"));
        }
        p = p2;
    }
    Ok(ms_error(&p, &p_ms))
}

pub fn ms_error(p: &[f64], p_ms: &[f64]) -> MsError {
    let num: f64 = p.iter().zip(p_ms).map(|(a, b)| (a - b).abs()).sum();
    let den: f64 = p.iter().map(|a| a.abs()).sum();
    let max_abs = p
        .iter()
        .zip(p_ms)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    MsError {
        rel_l1: if den > 0.0 { num / den } else { num },
        max_abs,
    }
}

/// Writes the basis of `coarse_node` as VTK (cell data for flow, point data
/// per direction for elasticity) and the full prolongation as Matrix Market.
pub fn export_basis(cfg: &CaseConfig, coarse_node: usize, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let disc = discretize(cfg)?;
    let nb = disc.partition.num_blocks();
    if coarse_node >= nb {
        return Err(cfg.wrap(Error::invalid(format!(
            "coarse node {coarse_node} out of range (0..{nb})"
        ))));
    }
    let ms = build_multiscale(cfg, disc)?;
    let (mesh, n_sd) = (&ms.disc.mesh, ms.disc.n_sd);
    let nf = ms.disc.partition.num_fine();
    let cols: Vec<Vec<f64>> = (0..n_sd)
        .map(|l| {
            let c = ms.prolongation.column(l * nb + coarse_node);
            c[l * nf..(l + 1) * nf].to_vec()
        })
        .collect();
    let names: Vec<String> = (0..n_sd)
        .map(|l| format!("basis_{coarse_node}_{}", ["x", "y", "z"][l]))
        .collect();
    let data: Vec<(&str, &[f64])> = names
        .iter()
        .map(|s| s.as_str())
        .zip(cols.iter().map(|c| c.as_slice()))
        .collect();
    let block: Vec<f64> = ms
        .disc
        .partition
        .block_of
        .iter()
        .map(|&b| b as f64)
        .collect();
    let vtk = out_dir.join(format!("{}_basis_{coarse_node}.vtk", cfg.id));
    if n_sd == 1 {
        let name = format!("basis_{coarse_node}");
        crate::mesh::vtk::write_vtk(mesh, &[(&name, &cols[0]), ("block", &block)], &[], &vtk)?;
    } else {
        let mut pd = data;
        pd.push(("block", &block));
        crate::mesh::vtk::write_vtk(mesh, &[], &pd, &vtk)?;
    }
    let mtx = out_dir.join(format!("{}_prolongation.mtx", cfg.id));
    market::write_file(&ms.prolongation.p, market::Symmetry::General, &mtx)?;
    Ok(vec![vtk, mtx])
}
