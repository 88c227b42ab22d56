//! Restriction-smoothed multiscale basis functions.
//!
//! The prolongation starts from the characteristic functions of the coarse
//! blocks and is smoothed with damped Jacobi on a zero row-sum operator,
//! confined to each basis' support and renormalized to a partition of unity
//! after every sweep.

mod coarse;

pub use coarse::{build_coarse_system, make_restriction, CoarseSystem, RestrictionMode};

use serde::{Deserialize, Serialize};

use crate::mesh::CoarsePartition;
use crate::sparse::{filter_to_m, filter_zero_rowsum, off_diagonal, CsrMatrix, ZeroRowSum};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasisConfig {
    pub omega: f64,
    pub tol: f64,
    /// Convergence is tested on iterations `k` with `k % check_every == 0`.
    pub check_every: usize,
    pub max_iters: usize,
    /// Remove positive off-diagonals before smoothing.
    pub filter: bool,
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self {
            omega: 2.0 / 3.0,
            tol: 1e-3,
            check_every: 5,
            max_iters: 1000,
            filter: true,
        }
    }
}

impl BasisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(Error::invalid(format!(
                "relaxation factor {} outside (0, 1)",
                self.omega
            )));
        }
        if !(self.tol > 0.0) || self.check_every == 0 {
            return Err(Error::invalid(
                "basis tolerance and check stride must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Prolongation {
    /// `n_fine x n_coarse`, pattern equal to the support pattern.
    pub p: CsrMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Max update over non-edge cells, one entry per iteration.
    pub updates: Vec<f64>,
}

impl Prolongation {
    pub fn nrows(&self) -> usize {
        self.p.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.p.ncols()
    }

    /// Dense column `j` (one basis function).
    pub fn column(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.p.nrows()];
        for (i, c, v) in self.p.triplets() {
            if c == j {
                out[i] = v;
            }
        }
        out
    }
}

/// Characteristic functions of the coarse blocks.
pub fn init_prolongation(partition: &CoarsePartition) -> CsrMatrix {
    let n = partition.num_fine();
    CsrMatrix::from_parts(
        n,
        partition.num_blocks(),
        (0..=n).collect(),
        partition.block_of.clone(),
        vec![1.0; n],
    )
}

/// Result of a single smoothing sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepInfo {
    pub iteration: usize,
    /// `max |δP|` over all rows.
    pub max_update: f64,
    /// `max |δP|` over rows that are not support-edge cells.
    pub interior_update: f64,
}

/// Step-wise basis smoother. [`build_basis`] drives it to convergence; the
/// step interface exists to observe individual sweeps.
pub struct BasisSmoother {
    g: ZeroRowSum,
    scale: Vec<f64>,
    p: CsrMatrix,
    edge: Vec<bool>,
    delta: Vec<f64>,
    acc: Vec<f64>,
    iteration: usize,
}

impl BasisSmoother {
    pub fn new(a: &CsrMatrix, partition: &CoarsePartition, config: &BasisConfig) -> Result<Self> {
        config.validate()?;
        if !partition.has_supports() {
            return Err(Error::invalid("partition has no support regions"));
        }
        if a.nrows() != partition.num_fine() || a.ncols() != a.nrows() {
            return Err(Error::dims(format!(
                "matrix is {}x{} but the partition has {} fine points",
                a.nrows(),
                a.ncols(),
                partition.num_fine()
            )));
        }
        let off = if config.filter {
            filter_to_m(a)?
        } else {
            for i in 0..a.nrows() {
                let d = a.get(i, i);
                if !(d > 0.0) {
                    return Err(Error::NonPositiveDiagonal { row: i, value: d });
                }
            }
            off_diagonal(a)
        };
        let g = filter_zero_rowsum(&off);
        let scale = g
            .diag()
            .iter()
            .zip(&g.isolated)
            .map(|(&d, &iso)| if iso { 0.0 } else { -config.omega / d })
            .collect();
        let p = support_pattern(partition)?;
        let nnz = p.nnz();
        Ok(Self {
            g,
            scale,
            p,
            edge: partition.edge_mask(),
            delta: vec![0.0; nnz],
            acc: vec![0.0; partition.num_blocks()],
            iteration: 0,
        })
    }

    pub fn prolongation(&self) -> &CsrMatrix {
        &self.p
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Rows with no off-diagonal coupling left after filtering.
    pub fn isolated(&self) -> &[bool] {
        &self.g.isolated
    }

    /// One Jacobi sweep followed by the row rescale.
    pub fn sweep(&mut self) -> Result<SweepInfo> {
        let n = self.p.nrows();
        let (gp, gi, gv) = (
            self.g.matrix.indptr(),
            self.g.matrix.indices(),
            self.g.matrix.values(),
        );
        let (pp, pi) = (self.p.indptr().to_vec(), self.p.indices().to_vec());
        let pv = self.p.values();
        let mut max_all = 0.0f64;
        let mut max_int = 0.0f64;
        for i in 0..n {
            let s = self.scale[i];
            if s == 0.0 {
                for k in pp[i]..pp[i + 1] {
                    self.delta[k] = 0.0;
                }
                continue;
            }
            for k in gp[i]..gp[i + 1] {
                let (row, w) = (gi[k], gv[k]);
                for q in pp[row]..pp[row + 1] {
                    self.acc[pi[q]] += w * pv[q];
                }
            }
            for k in pp[i]..pp[i + 1] {
                let d = s * self.acc[pi[k]];
                self.delta[k] = d;
                max_all = max_all.max(d.abs());
                if !self.edge[i] {
                    max_int = max_int.max(d.abs());
                }
            }
            // clear every column touched through the neighbours
            for k in gp[i]..gp[i + 1] {
                let row = gi[k];
                for q in pp[row]..pp[row + 1] {
                    self.acc[pi[q]] = 0.0;
                }
            }
        }
        let iteration = self.iteration;
        if !max_all.is_finite() {
            return Err(Error::BasisDiverged {
                iteration,
                max_update: max_all,
            });
        }
        let vals = self.p.values_mut();
        for i in 0..n {
            let (lo, hi) = (pp[i], pp[i + 1]);
            let mut sum = 0.0;
            for k in lo..hi {
                vals[k] += self.delta[k];
                sum += vals[k];
            }
            if !(sum.abs() > 0.0) || !sum.is_finite() {
                return Err(Error::BasisDiverged {
                    iteration,
                    max_update: max_all,
                });
            }
            for v in &mut vals[lo..hi] {
                *v /= sum;
            }
            if vals[lo..hi]
                .iter()
                .any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT)
            {
                return Err(Error::BasisDiverged {
                    iteration,
                    max_update: max_all,
                });
            }
        }
        self.iteration += 1;
        Ok(SweepInfo {
            iteration,
            max_update: max_all,
            interior_update: max_int,
        })
    }

    pub fn into_prolongation(self) -> CsrMatrix {
        self.p
    }
}

const DIVERGENCE_LIMIT: f64 = 1e100;

/// Support pattern of P with characteristic initial values.
fn support_pattern(partition: &CoarsePartition) -> Result<CsrMatrix> {
    let n = partition.num_fine();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, s) in partition.supports.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::EmptySupport(j));
        }
        for &c in s {
            rows[c].push(j);
        }
    }
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    indptr.push(0);
    for (i, r) in rows.iter().enumerate() {
        let own = partition.block_of[i];
        if r.binary_search(&own).is_err() {
            return Err(Error::invalid(format!(
                "cell {i} is outside the support of its own block {own}"
            )));
        }
        for &j in r {
            indices.push(j);
            values.push(if j == own { 1.0 } else { 0.0 });
        }
        indptr.push(indices.len());
    }
    Ok(CsrMatrix::from_parts(
        n,
        partition.num_blocks(),
        indptr,
        indices,
        values,
    ))
}

/// Smooths the basis of a scalar problem until the interior update drops
/// below `config.tol` (tested every `check_every` sweeps) or `max_iters`.
pub fn build_basis(
    a: &CsrMatrix,
    partition: &CoarsePartition,
    config: &BasisConfig,
) -> Result<Prolongation> {
    let mut sm = BasisSmoother::new(a, partition, config)?;
    let mut updates = Vec::new();
    let mut converged = false;
    for k in 0..config.max_iters {
        let info = sm.sweep()?;
        updates.push(info.interior_update);
        if k % config.check_every == 0 && info.interior_update < config.tol {
            converged = true;
            break;
        }
    }
    let iterations = sm.iteration();
    Ok(Prolongation {
        p: sm.into_prolongation(),
        iterations,
        converged,
        updates,
    })
}

/// One scalar basis per direction on the diagonal blocks of a direction-major
/// matrix, assembled block-diagonally (columns `direction * n_c + j`).
pub fn build_basis_vector(
    a: &CsrMatrix,
    partition: &CoarsePartition,
    config: &BasisConfig,
    n_sd: usize,
) -> Result<Prolongation> {
    let nf = partition.num_fine();
    if n_sd == 0 || a.nrows() != n_sd * nf || a.ncols() != a.nrows() {
        return Err(Error::dims(format!(
            "expected a {0}x{0} direction-major matrix for {n_sd} directions",
            n_sd * nf
        )));
    }
    let mut parts = Vec::with_capacity(n_sd);
    let mut updates = Vec::new();
    let mut iterations = 0;
    let mut converged = true;
    for l in 0..n_sd {
        let block = a.block(l * nf..(l + 1) * nf, l * nf..(l + 1) * nf);
        let pr = build_basis(&block, partition, config)?;
        iterations = iterations.max(pr.iterations);
        converged &= pr.converged;
        if updates.len() < pr.updates.len() {
            updates.resize(pr.updates.len(), 0.0);
        }
        for (u, v) in updates.iter_mut().zip(&pr.updates) {
            *u = f64::max(*u, *v);
        }
        parts.push(pr.p);
    }
    Ok(Prolongation {
        p: CsrMatrix::block_diag(&parts),
        iterations,
        converged,
        updates,
    })
}
