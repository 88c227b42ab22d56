use serde::{Deserialize, Serialize};

use crate::mesh::CoarsePartition;
use crate::sparse::{triple_product, CsrMatrix, DirectSolver};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestrictionMode {
    /// `R = P^T`.
    #[default]
    Galerkin,
    /// `R_jc = 1` iff cell `c` lies in block `j`. Scalar problems only.
    ControlVolume,
}

pub fn make_restriction(
    p: &CsrMatrix,
    partition: &CoarsePartition,
    mode: RestrictionMode,
    n_sd: usize,
) -> Result<CsrMatrix> {
    match mode {
        RestrictionMode::Galerkin => Ok(p.transpose()),
        RestrictionMode::ControlVolume => {
            if n_sd != 1 {
                return Err(Error::invalid(
                    "control-volume restriction is only defined for scalar problems",
                ));
            }
            if p.nrows() != partition.num_fine() || p.ncols() != partition.num_blocks() {
                return Err(Error::dims("prolongation does not match the partition"));
            }
            let t: Vec<_> = partition
                .block_of
                .iter()
                .enumerate()
                .map(|(c, &j)| (j, c, 1.0))
                .collect();
            CsrMatrix::from_triplets(partition.num_blocks(), partition.num_fine(), &t)
        }
    }
}

/// Factorized coarse operator `A_c = R A P`.
pub struct CoarseSystem {
    pub matrix: CsrMatrix,
    pub restriction: CsrMatrix,
    pub prolongation: CsrMatrix,
    solver: DirectSolver,
}

pub fn build_coarse_system(a: &CsrMatrix, p: &CsrMatrix, r: &CsrMatrix) -> Result<CoarseSystem> {
    let ac = triple_product(r, a, p)?;
    let solver = DirectSolver::new(&ac).map_err(|e| match e {
        Error::SingularCoarse(_) => e,
        other => Error::SingularCoarse(other.to_string()),
    })?;
    Ok(CoarseSystem {
        matrix: ac,
        restriction: r.clone(),
        prolongation: p.clone(),
        solver,
    })
}

impl CoarseSystem {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `P A_c^{-1} R v`.
    pub fn correct(&self, v: &[f64]) -> Vec<f64> {
        let mut rc = self.restriction.mul_vec(v);
        self.solver.solve_in_place(&mut rc);
        self.prolongation.mul_vec(&rc)
    }

    /// Coarse solve followed by prolongation, i.e. the multiscale approximation of `A^{-1} b`.
    pub fn solve_coarse(&self, b_coarse: &[f64]) -> Vec<f64> {
        self.solver.solve(b_coarse)
    }
}
