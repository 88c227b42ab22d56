//! Acceptance criteria 1-10, one PASS/FAIL line each, plus the note on 11.
//!
//! Runs without the libtest harness so the verdicts show up in plain
//! `cargo test` output. Pass criterion numbers to run a subset:
//! `cargo test --test acceptance -- 3 5`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use msrsb::basis::{build_basis, build_basis_vector, BasisConfig, BasisSmoother};
use msrsb::bench::{discretize, load_dir, run_case, run_sweep, CaseConfig};
use msrsb::fe::{assemble_elasticity, ElasticBoundary, ElasticMaterial};
use msrsb::fv::{
    assemble_mpfa_o, assemble_tpfa, diag, DiffusionField, FaceCondition, FlowBoundary, Units,
};
use msrsb::krylov::SmootherKind;
use msrsb::mesh::{
    build_structured_mesh, build_support_regions, partition_structured, partition_structured_nodes,
    CoarsePartition, GridDistortion, Mesh, NodeCoarsening, Side,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion = (usize, &'static str, fn() -> Outcome);

fn cases_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../cases")
}

fn case(name: &str) -> CaseConfig {
    CaseConfig::load(cases_dir().join(format!("{name}.toml"))).expect("bundled case loads")
}

fn out_dir() -> tempfile::TempDir {
    tempfile::tempdir().expect("temp dir")
}

fn rel_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let d = a
        .iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    d / scale
}

fn supported(mesh: &Mesh, p: msrsb::Result<CoarsePartition>) -> CoarsePartition {
    build_support_regions(mesh, &p.unwrap()).unwrap()
}

fn unit_square(n: [usize; 2], d: GridDistortion) -> Mesh {
    build_structured_mesh(&n, &[1.0, 1.0], &d).unwrap()
}

// ---------------------------------------------------------------------------

/// Largest `|sum_j P_ij - 1|`, absolute and scaled by `max(1, sum_j |P_ij|)`.
fn unity_deviation(p: &msrsb::sparse::CsrMatrix) -> (f64, f64) {
    (0..p.nrows()).fold((0.0f64, 0.0f64), |(abs, rel), i| {
        let v = p.row(i).1;
        let dev = (v.iter().sum::<f64>() - 1.0).abs();
        let mag = v.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        (abs.max(dev), rel.max(dev / mag))
    })
}

fn c1_partition_of_unity() -> Outcome {
    let (mut worst_abs, mut worst_rel): (f64, f64) = (0.0, 0.0);
    let mut bounds_ok = true;
    let mut sweeps = 0;
    let mut notes = Vec::new();
    for cfg in load_dir(&cases_dir()).unwrap() {
        // first member of a sweep: the coarsest level or the fewest coarse elements
        let cfg = cfg.expand().remove(0);
        let d = discretize(&cfg).unwrap();
        let nf = d.partition.num_fine();
        let (mut case_abs, mut stop): (f64, Option<usize>) = (0.0, None);
        for l in 0..d.n_sd {
            let a = d.matrix.block(l * nf..(l + 1) * nf, l * nf..(l + 1) * nf);
            let mut sm = BasisSmoother::new(&a, &d.partition, &cfg.basis).unwrap();
            for k in 0..cfg.basis.max_iters {
                let Ok(info) = sm.sweep() else {
                    stop = Some(sm.iteration());
                    break;
                };
                sweeps += 1;
                let p = sm.prolongation();
                let (abs, rel) = unity_deviation(p);
                case_abs = case_abs.max(abs);
                worst_rel = worst_rel.max(rel);
                if cfg.basis.filter && p.values().iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                    bounds_ok = false;
                }
                if k % cfg.basis.check_every == 0 && info.interior_update < cfg.basis.tol {
                    break;
                }
            }
        }
        match stop {
            Some(k) => notes.push(format!("{} {case_abs:.1e} (diverged at sweep {k})", cfg.id)),
            None => notes.push(format!("{} {case_abs:.1e}", cfg.id)),
        }
        worst_abs = worst_abs.max(case_abs);
    }
    (
        worst_rel <= 1e-13 && bounds_ok,
        format!(
            "max |row sum - 1| / max(1, row l1 norm) = {worst_rel:.2e} over {sweeps} sweeps; filtered entries in [0,1]: \
             {bounds_ok}; absolute per case: {}",
            notes.join(", ")
        ),
    )
}

fn c2_m_matrix_noop() -> Outcome {
    let mesh = unit_square(
        [20, 20],
        GridDistortion {
            amplitude: 0.3,
            seed: 5,
            ..Default::default()
        },
    );
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let k: Vec<f64> = (0..mesh.num_cells())
        .map(|_| 10f64.powf(rng.gen_range(-2.0..2.0)))
        .collect();
    let mut bc = FlowBoundary::no_flow(&mesh);
    bc.set_side(&mesh, Side::XMin, FaceCondition::Dirichlet(1.0));
    let a = assemble_tpfa(&mesh, &DiffusionField::isotropic(&k, Units::Si), &bc)
        .unwrap()
        .matrix;
    let is_m = a.triplets().all(|(i, j, v)| i == j || v <= 0.0);
    let part = supported(&mesh, partition_structured(&mesh, &[4, 4]));
    let on = BasisConfig {
        filter: true,
        ..Default::default()
    };
    let off = BasisConfig {
        filter: false,
        ..Default::default()
    };
    let mut s_on = BasisSmoother::new(&a, &part, &on).unwrap();
    let mut s_off = BasisSmoother::new(&a, &part, &off).unwrap();
    let mut identical = true;
    for _ in 0..50 {
        s_on.sweep().unwrap();
        s_off.sweep().unwrap();
        let (p, q) = (s_on.prolongation(), s_off.prolongation());
        identical &= p.indices() == q.indices()
            && p.values()
                .iter()
                .zip(q.values())
                .all(|(x, y)| x.to_bits() == y.to_bits());
    }
    (
        is_m && identical,
        format!("TPFA is M-matrix: {is_m}; 50 sweeps bitwise identical: {identical}"),
    )
}

fn c3_divergence_and_fix() -> Outcome {
    // flow: the bundled demo case
    let demo = case("naive_divergence_demo");
    let d = discretize(&demo).unwrap();
    let off = BasisConfig {
        filter: false,
        ..demo.basis
    };
    let mut sm = BasisSmoother::new(&d.matrix, &d.partition, &off).unwrap();
    let mut flow_blowup = None;
    for _ in 0..11 {
        let u = sm.sweep().map(|i| i.max_update).unwrap_or(f64::INFINITY);
        if u > 1.0 {
            flow_blowup = Some(sm.iteration());
            break;
        }
    }
    let on = BasisConfig {
        filter: true,
        tol: 1e-12,
        max_iters: 5000,
        ..demo.basis
    };
    let fixed = build_basis(&d.matrix, &d.partition, &on).unwrap();
    let flow_final = *fixed.updates.last().unwrap();

    // elasticity: 12x12 with a 20x vertical stretch
    let mesh = unit_square(
        [12, 12],
        GridDistortion {
            stretch: [1.0, 20.0, 1.0],
            ..Default::default()
        },
    );
    let sys = assemble_elasticity(
        &mesh,
        &ElasticMaterial::uniform(mesh.num_cells(), 1.0, 0.25),
        &ElasticBoundary::free(&mesh),
    )
    .unwrap();
    let part = supported(
        &mesh,
        partition_structured_nodes(&mesh, &[NodeCoarsening::Count(4); 2]),
    );
    let nn = mesh.num_nodes();
    let mut el_blowup = None;
    for l in 0..2 {
        let a = sys.matrix.block(l * nn..(l + 1) * nn, l * nn..(l + 1) * nn);
        let mut sm = BasisSmoother::new(
            &a,
            &part,
            &BasisConfig {
                filter: false,
                ..Default::default()
            },
        )
        .unwrap();
        for _ in 0..20 {
            let u = sm.sweep().map(|i| i.max_update).unwrap_or(f64::INFINITY);
            if u > 1.0 {
                let k = sm.iteration();
                el_blowup = Some(el_blowup.map_or(k, |b: usize| b.min(k)));
                break;
            }
        }
    }
    let el = build_basis_vector(
        &sys.matrix,
        &part,
        &BasisConfig {
            tol: 1e-3,
            ..Default::default()
        },
        2,
    )
    .unwrap();
    let el_final = *el.updates.last().unwrap();

    let pass = flow_blowup.is_some()
        && el_blowup.is_some()
        && fixed.converged
        && flow_final < 1e-12
        && el.converged
        && el_final < 1e-3;
    (
        pass,
        format!(
            "filter off: max update > 1 at sweep {flow_blowup:?} (flow) / {el_blowup:?} (elasticity); \
             filter on: {} sweeps to {flow_final:.1e} (flow), {} sweeps to {el_final:.1e} (elasticity)",
            fixed.iterations, el.iterations
        ),
    )
}

fn c4_mpfa_equals_tpfa() -> Outcome {
    let mesh = build_structured_mesh(&[10, 10], &[2.0, 1.0], &GridDistortion::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tensors = (0..mesh.num_cells())
        .map(|_| diag([rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0), 1.0]))
        .collect();
    let field = DiffusionField::from_tensors(tensors, Units::Si);
    let mut bc = FlowBoundary::no_flow(&mesh);
    bc.set_side(&mesh, Side::XMin, FaceCondition::Dirichlet(1.0));
    bc.set_side(&mesh, Side::YMax, FaceCondition::Dirichlet(-0.5));
    let t = assemble_tpfa(&mesh, &field, &bc).unwrap();
    let m = assemble_mpfa_o(&mesh, &field, &bc).unwrap();
    let dm = rel_diff(&t.matrix.to_dense(), &m.matrix.to_dense());
    let dr = rel_diff(std::slice::from_ref(&t.rhs), std::slice::from_ref(&m.rhs));
    (
        dm <= 1e-12 && dr <= 1e-12,
        format!("max relative difference: matrix {dm:.1e}, rhs {dr:.1e}"),
    )
}

/// Tensor-product hat of coarse node `j` at `x`, with coordinates of the coarse
/// lattice per axis; constant beyond the outermost coarse nodes.
fn hat(x: [f64; 3], node: [f64; 3], axes: &[Vec<f64>]) -> f64 {
    let mut v = 1.0;
    for (d, ax) in axes.iter().enumerate() {
        let k = ax
            .iter()
            .position(|&c| (c - node[d]).abs() < 1e-12)
            .unwrap();
        let f = if x[d] < ax[k] {
            if k == 0 {
                1.0
            } else {
                (x[d] - ax[k - 1]) / (ax[k] - ax[k - 1])
            }
        } else if k + 1 == ax.len() {
            1.0
        } else {
            (ax[k + 1] - x[d]) / (ax[k + 1] - ax[k])
        };
        v *= f.clamp(0.0, 1.0);
    }
    v
}

fn coarse_axes(points: &[[f64; 3]], dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|d| {
            let mut c: Vec<f64> = points.iter().map(|p| p[d]).collect();
            c.sort_by(f64::total_cmp);
            c.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            c
        })
        .collect()
}

fn c5_bilinear_recovery() -> Outcome {
    let cfg = BasisConfig {
        tol: 1e-6,
        max_iters: 20000,
        ..Default::default()
    };

    let mesh = unit_square([15, 15], GridDistortion::default());
    let field = DiffusionField::uniform(mesh.num_cells(), diag([1.0; 3]), Units::Si);
    let a = assemble_tpfa(&mesh, &field, &FlowBoundary::no_flow(&mesh))
        .unwrap()
        .matrix;
    let part = supported(&mesh, partition_structured(&mesh, &[5, 5]));
    let p = build_basis(&a, &part, &cfg).unwrap();
    let centers: Vec<_> = part
        .coarse_nodes
        .iter()
        .map(|&c| mesh.cells()[c].centroid)
        .collect();
    let axes = coarse_axes(&centers, 2);
    let mut flow_err: f64 = 0.0;
    for (j, &node) in centers.iter().enumerate() {
        let col = p.column(j);
        for (c, cell) in mesh.cells().iter().enumerate() {
            flow_err = flow_err.max((col[c] - hat(cell.centroid, node, &axes)).abs());
        }
    }

    let mesh = unit_square([12, 12], GridDistortion::default());
    let sys = assemble_elasticity(
        &mesh,
        &ElasticMaterial::uniform(mesh.num_cells(), 1.0, 0.25),
        &ElasticBoundary::free(&mesh),
    )
    .unwrap();
    let part = supported(
        &mesh,
        partition_structured_nodes(&mesh, &[NodeCoarsening::Count(4); 2]),
    );
    let pv = build_basis_vector(&sys.matrix, &part, &cfg, 2).unwrap();
    let nodes: Vec<_> = part.coarse_nodes.iter().map(|&v| mesh.nodes()[v]).collect();
    let axes = coarse_axes(&nodes, 2);
    let (nn, nc) = (mesh.num_nodes(), nodes.len());
    let mut fe_err: f64 = 0.0;
    for l in 0..2 {
        for (j, &node) in nodes.iter().enumerate() {
            let col = pv.column(l * nc + j);
            for (i, v) in col.iter().enumerate() {
                let expect = if i / nn == l {
                    hat(mesh.nodes()[i % nn], node, &axes)
                } else {
                    0.0
                };
                fe_err = fe_err.max((v - expect).abs());
            }
        }
    }
    let pass = p.converged && pv.converged && flow_err <= 1e-3 && fe_err <= 1e-3;
    (
        pass,
        format!(
            "max-norm error vs tensor hats at basis tol 1e-6: flow {flow_err:.1e} ({} sweeps), elasticity {fe_err:.1e} ({} sweeps)",
            p.iterations, pv.iterations
        ),
    )
}

/// Q1 assembly of `-div(Λ_c grad u)` with per-cell tensors, 2x2(x2) Gauss on
/// the reference cell [-1,1]^d, vertices taken from the logical lattice.
fn q1_diffusion(mesh: &Mesh, lambda: impl Fn(usize) -> DMatrix<f64>) -> Vec<Vec<f64>> {
    let dim = mesh.dim();
    let nn = mesh.num_nodes();
    let (cl, nl) = (mesh.cell_lattice(), mesh.node_lattice());
    let g = 1.0 / 3f64.sqrt();
    let mut k = vec![vec![0.0; nn]; nn];
    for c in 0..mesh.num_cells() {
        let ijk = cl.ijk(c);
        let verts: Vec<usize> = (0..1usize << dim)
            .map(|b| {
                let mut v = ijk;
                for (d, x) in v.iter_mut().enumerate().take(dim) {
                    *x += (b >> d) & 1;
                }
                nl.index(v)
            })
            .collect();
        let lam = lambda(c);
        for q in 0..1usize << dim {
            let xi: Vec<f64> = (0..dim)
                .map(|d| if (q >> d) & 1 == 1 { g } else { -g })
                .collect();
            // dN_b/dxi_d
            let mut dn = DMatrix::zeros(dim, verts.len());
            for b in 0..verts.len() {
                let s = |d: usize| if (b >> d) & 1 == 1 { 1.0 } else { -1.0 };
                for d in 0..dim {
                    dn[(d, b)] = s(d) / 2.0
                        * (0..dim)
                            .filter(|&e| e != d)
                            .map(|e| (1.0 + s(e) * xi[e]) / 2.0)
                            .product::<f64>();
                }
            }
            let x = DMatrix::from_fn(verts.len(), dim, |b, e| mesh.nodes()[verts[b]][e]);
            let jac = &dn * &x;
            let det = jac.determinant();
            let grad = jac.try_inverse().unwrap() * &dn;
            let ke = grad.transpose() * &lam * &grad * det;
            for (a, &va) in verts.iter().enumerate() {
                for (b, &vb) in verts.iter().enumerate() {
                    k[va][vb] += ke[(a, b)];
                }
            }
        }
    }
    k
}

fn c6_directional_blocks() -> Outcome {
    let mut worst: f64 = 0.0;
    let meshes = [
        build_structured_mesh(
            &[7, 5],
            &[3.0, 1.0],
            &GridDistortion {
                amplitude: 0.4,
                seed: 9,
                ..Default::default()
            },
        )
        .unwrap(),
        build_structured_mesh(
            &[3, 3, 2],
            &[1.0, 1.0, 0.5],
            &GridDistortion {
                amplitude: 0.3,
                shear_x_by_z: 0.2,
                seed: 3,
                ..Default::default()
            },
        )
        .unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for mesh in &meshes {
        let dim = mesh.dim();
        let n = mesh.num_cells();
        let mat = ElasticMaterial {
            young: (0..n)
                .map(|_| 10f64.powf(rng.gen_range(0.0..4.0)))
                .collect(),
            poisson: (0..n).map(|_| rng.gen_range(0.05..0.45)).collect(),
        };
        let a = assemble_elasticity(mesh, &mat, &ElasticBoundary::free(mesh))
            .unwrap()
            .matrix;
        let nn = mesh.num_nodes();
        for l in 0..dim {
            let oracle = q1_diffusion(mesh, |c| {
                let (lam, g) = mat.lame(c);
                let mut m = DMatrix::identity(dim, dim) * g;
                m[(l, l)] += g + lam;
                m
            });
            let block = a
                .block(l * nn..(l + 1) * nn, l * nn..(l + 1) * nn)
                .to_dense();
            worst = worst.max(rel_diff(&oracle, &block));
        }
    }
    (
        worst <= 1e-12,
        format!(
            "max relative difference of A_ll vs anisotropic diffusion (2D and 3D): {worst:.1e}"
        ),
    )
}

fn fmt_run(r: Option<&msrsb::bench::RunSummary>) -> String {
    match r {
        Some(r) if r.converged => r.iterations.to_string(),
        Some(r) => format!("-({})", r.iterations),
        None => "missing".into(),
    }
}

fn its(r: Option<&msrsb::bench::RunSummary>) -> Option<usize> {
    r.filter(|r| r.converged).map(|r| r.iterations)
}

fn c7_mpfa_2d() -> Outcome {
    let dir = out_dir();
    let rep = run_case(&case("2d_mpfa"), dir.path()).unwrap();
    let ms_rich = rep.run("Richardson_multiscale_ILU0x1");
    let sm_rich = rep.run("Richardson_smoother_ILU0x1");
    let ms_gm = rep.run("GMRES_right_multiscale_ILU0x1");
    let sm_gm = rep.run("GMRES_right_smoother_ILU0x1");
    let pass = its(ms_rich).is_some_and(|n| n <= 60)
        && sm_rich.is_some_and(|r| !r.converged)
        && matches!((its(ms_gm), its(sm_gm)), (Some(a), Some(b)) if a as f64 <= 0.7 * b as f64);
    (
        pass,
        format!(
            "coarse blocks {}; Richardson MsRSB+ILU0 {} (<= 60), ILU0 only {} (must fail in 150); GMRES {} vs {} (<= 0.7x)",
            rep.coarse_unknowns,
            fmt_run(ms_rich),
            fmt_run(sm_rich),
            fmt_run(ms_gm),
            fmt_run(sm_gm)
        ),
    )
}

fn c8_field_3d() -> Outcome {
    let dir = out_dir();
    let rep = run_case(&case("3d_field"), dir.path()).unwrap();
    let ms_rich = rep.run("Richardson_multiscale_ILU0x1");
    let ms_gm = rep.run("GMRES_right_multiscale_ILU0x1");
    let ms_sgs = rep.run("GMRES_right_multiscale_SGSx1");
    let sm_sgs = rep.run("GMRES_right_smoother_SGSx1");
    let e = rep.ms_error.unwrap();
    let pass = its(ms_rich).is_some_and(|n| n <= 40)
        && its(ms_gm).is_some_and(|n| n <= 25)
        && its(ms_sgs).is_some()
        && sm_sgs.is_some_and(|r| !r.converged || r.iterations > 150)
        && e.rel_l1 <= 0.1
        && e.max_abs <= 0.3;
    (
        pass,
        format!(
            "MsRSB+ILU0 Richardson {} (<= 40), GMRES {} (<= 25); GMRES MsRSB+SGS {}, SGS only {}; \
             initial error rel l1 {:.4} (<= 0.1), max {:.4} (<= 0.3)",
            fmt_run(ms_rich),
            fmt_run(ms_gm),
            fmt_run(ms_sgs),
            fmt_run(sm_sgs),
            e.rel_l1,
            e.max_abs
        ),
    )
}

fn ic0_only(mut cfg: CaseConfig, multiscale_only: bool) -> CaseConfig {
    cfg.runs
        .retain(|r| r.pre.kind == SmootherKind::Ic0 && (r.multiscale || !multiscale_only));
    cfg
}

fn show(col: &[Option<usize>]) -> String {
    let s: Vec<String> = col
        .iter()
        .map(|c| c.map_or("-".into(), |n| n.to_string()))
        .collect();
    s.join("/")
}

fn c9_elasticity_refinement() -> Outcome {
    let dir = out_dir();
    let cfg = ic0_only(case("elasticity_refinement_sweep"), false);
    let (table, _) = run_sweep(&[cfg], "c9", dir.path()).unwrap();
    let ms = table.column("MsRSB+IC0").unwrap();
    let base = table.column("IC0").unwrap();
    let pass = match (
        ms.iter().copied().collect::<Option<Vec<_>>>(),
        base.first().copied().flatten(),
        base.last(),
    ) {
        (Some(m), Some(b0), Some(bl)) => {
            let (lo, hi) = (
                *m.iter().min().unwrap() as f64,
                *m.iter().max().unwrap() as f64,
            );
            // a failed finest baseline counts as growth
            hi <= 1.25 * lo && bl.is_none_or(|b| b as f64 >= 2.5 * b0 as f64)
        }
        _ => false,
    };
    (
        pass,
        format!(
            "PCG iterations over 4 levels: MsRSB+IC0 {} (spread <= 25%), IC0 only {} (finest >= 2.5x coarsest)",
            show(&ms),
            show(&base)
        ),
    )
}

fn c10_geomech_coarsening() -> Outcome {
    const REFERENCE: [usize; 4] = [24, 21, 17, 13];
    let dir = out_dir();
    let cfg = ic0_only(case("3d_geomech_cart"), true);
    let (table, _) = run_sweep(&[cfg], "c10", dir.path()).unwrap();
    let ms = table.column("MsRSB+IC0").unwrap();
    let pass = ms.len() == REFERENCE.len()
        && ms.iter().all(Option::is_some)
        && ms.windows(2).all(|w| w[1] <= w[0])
        && ms
            .iter()
            .zip(REFERENCE)
            .all(|(m, r)| m.is_some_and(|m| m <= 2 * r));
    (
        pass,
        format!(
            "35^3 elements, 5^3..14^3 coarse elements: MsRSB+IC0 CG {} (non-increasing, each <= 2x {REFERENCE:?})",
            show(&ms)
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "partition of unity", c1_partition_of_unity),
        (2, "M-matrix no-op", c2_m_matrix_noop),
        (3, "divergence and fix", c3_divergence_and_fix),
        (4, "MPFA-O equals TPFA", c4_mpfa_equals_tpfa),
        (5, "bilinear recovery", c5_bilinear_recovery),
        (6, "directional blocks", c6_directional_blocks),
        (7, "2D MPFA benchmark", c7_mpfa_2d),
        (8, "3D field benchmark", c8_field_3d),
        (9, "elasticity refinement", c9_elasticity_refinement),
        (10, "geomechanics coarsening", c10_geomech_coarsening),
    ];
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = Vec::new();
    for (n, name, f) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let (ok, detail) = f();
        println!(
            "criterion {n:>2} {} {name} ({:.1} s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        if !ok {
            failed.push(n);
        }
    }
    if only.is_empty() || only.contains(&11) {
        println!(
            "criterion 11 NOTE exact iteration counts of the layered 2D comparison are not reproduced; \
             the layer pattern and contrast are not defined here (see criteria 5, 6, 9)"
        );
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
