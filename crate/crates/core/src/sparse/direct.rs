use faer::sparse::linalg::solvers::{Cholesky, Lu, SpSolver};
use faer::sparse::SparseColMat;
use faer::Side;

use super::CsrMatrix;
use crate::{Error, Result};

enum Factor {
    Cholesky(Cholesky<usize, f64>),
    Lu(Box<Lu<usize, f64>>),
    Dense(Box<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>),
}

// Above this order the sparse LU is used for nonsymmetric systems.
const DENSE_LU_LIMIT: usize = 3000;

/// Sparse direct factorization used for coarse systems.
pub struct DirectSolver {
    n: usize,
    factor: Factor,
}

impl std::fmt::Debug for DirectSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.factor {
            Factor::Cholesky(_) => "cholesky",
            Factor::Lu(_) => "lu",
            Factor::Dense(_) => "dense lu",
        };
        f.debug_struct("DirectSolver")
            .field("n", &self.n)
            .field("kind", &kind)
            .finish()
    }
}

fn to_faer(a: &CsrMatrix) -> Result<SparseColMat<usize, f64>> {
    let t: Vec<(usize, usize, f64)> = a.triplets().collect();
    SparseColMat::try_new_from_triplets(a.nrows(), a.ncols(), &t)
        .map_err(|e| Error::SingularCoarse(format!("cannot build factorization input: {e:?}")))
}

impl DirectSolver {
    /// Cholesky when `a` is symmetric and the factorization succeeds, LU otherwise.
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        if a.is_symmetric(1e-12) {
            if let Ok(s) = Self::cholesky(a) {
                return Ok(s);
            }
        }
        Self::lu(a)
    }

    pub fn cholesky(a: &CsrMatrix) -> Result<Self> {
        check_square(a)?;
        let m = to_faer(a)?;
        let c = m
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::SingularCoarse(format!("cholesky failed: {e:?}")))?;
        Ok(Self {
            n: a.nrows(),
            factor: Factor::Cholesky(c),
        })
    }

    pub fn lu(a: &CsrMatrix) -> Result<Self> {
        check_square(a)?;
        let n = a.nrows();
        let factor = if n <= DENSE_LU_LIMIT {
            let mut d = nalgebra::DMatrix::<f64>::zeros(n, n);
            for (i, j, v) in a.triplets() {
                d[(i, j)] = v;
            }
            let lu = d.lu();
            if !lu.is_invertible() {
                return Err(Error::SingularCoarse(format!(
                    "matrix of order {n} has a zero pivot"
                )));
            }
            Factor::Dense(Box::new(lu))
        } else {
            let m = to_faer(a)?;
            // the sparse LU panics on structurally singular input
            let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| m.sp_lu()))
                .map_err(|_| Error::SingularCoarse(format!("lu of order {n} failed: singular")))?;
            Factor::Lu(Box::new(
                r.map_err(|e| Error::SingularCoarse(format!("lu failed: {e:?}")))?,
            ))
        };
        let s = Self { n, factor };
        s.probe(a)?;
        Ok(s)
    }

    pub fn is_cholesky(&self) -> bool {
        matches!(self.factor, Factor::Cholesky(_))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        match &self.factor {
            Factor::Cholesky(c) => c.solve_in_place(faer::col::from_slice_mut::<f64>(x)),
            Factor::Lu(l) => l.solve_in_place(faer::col::from_slice_mut::<f64>(x)),
            Factor::Dense(l) => {
                let mut v = nalgebra::DVector::from_column_slice(x);
                if l.solve_mut(&mut v) {
                    x.copy_from_slice(v.as_slice());
                } else {
                    x.iter_mut().for_each(|e| *e = f64::NAN);
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    // LU does not report singularity itself; reproduce a known vector instead.
    fn probe(&self, a: &CsrMatrix) -> Result<()> {
        if self.n == 0 {
            return Ok(());
        }
        let ones = vec![1.0; self.n];
        let x = self.solve(&a.mul_vec(&ones));
        let err = x.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        if !err.is_finite() || err > 1e-6 {
            return Err(Error::SingularCoarse(format!(
                "matrix of order {} is numerically singular (probe error {err:e})",
                self.n
            )));
        }
        Ok(())
    }
}

fn check_square(a: &CsrMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::dims(format!(
            "direct solve needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}
