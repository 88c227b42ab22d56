//! Compressed sparse row storage and the kernels the rest of the crate is
//! built on: products, the Galerkin triple product, M-matrix filtering,
//! no-fill incomplete factorizations and Matrix Market interchange.

mod csr;
mod direct;
mod filter;
mod ilu;
pub mod market;

pub use csr::CsrMatrix;
pub use direct::DirectSolver;
pub use filter::{filter_to_m, filter_zero_rowsum, off_diagonal, ZeroRowSum};
pub use ilu::{
    incomplete_factorize, incomplete_factorize_with, FactorKind, IncompleteFactorization,
    PivotPolicy,
};

use crate::{Error, Result};

/// `y = A x`.
pub fn spmv(a: &CsrMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if a.ncols() != x.len() {
        return Err(Error::dims(format!(
            "spmv: matrix has {} columns, vector has length {}",
            a.ncols(),
            x.len()
        )));
    }
    let mut y = vec![0.0; a.nrows()];
    a.mul_vec_into(x, &mut y);
    Ok(y)
}

/// `R A P`, formed as `(R A) P`.
pub fn triple_product(r: &CsrMatrix, a: &CsrMatrix, p: &CsrMatrix) -> Result<CsrMatrix> {
    if r.ncols() != a.nrows() || a.ncols() != p.nrows() {
        return Err(Error::dims(format!(
            "triple product: R is {}x{}, A is {}x{}, P is {}x{}",
            r.nrows(),
            r.ncols(),
            a.nrows(),
            a.ncols(),
            p.nrows(),
            p.ncols()
        )));
    }
    let ra = r.matmul(a)?;
    ra.matmul(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spmv_identity_and_zero() {
        let id = CsrMatrix::identity(3);
        assert_eq!(spmv(&id, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let a = CsrMatrix::from_dense(&[vec![2.0, -1.0], vec![-1.0, 2.0]]);
        assert_eq!(spmv(&a, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn spmv_hand_evaluated() {
        let a = CsrMatrix::from_dense(&[vec![2.0, -1.0], vec![-1.0, 2.0]]);
        assert_eq!(spmv(&a, &[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn spmv_rejects_bad_length() {
        let a = CsrMatrix::identity(3);
        assert!(matches!(
            spmv(&a, &[1.0, 2.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn triple_product_identity_returns_a() {
        let a = CsrMatrix::from_dense(&[
            vec![4.0, -1.0, 0.0],
            vec![-1.0, 4.0, -2.0],
            vec![0.0, -2.0, 5.0],
        ]);
        let id = CsrMatrix::identity(3);
        let c = triple_product(&id, &a, &id).unwrap();
        assert_eq!(c, a);
    }

    #[test]
    fn triple_product_column_of_ones_sums_entries() {
        let a = CsrMatrix::from_dense(&[vec![3.0, -1.0], vec![-1.0, 2.0]]);
        let p = CsrMatrix::from_dense(&[vec![1.0], vec![1.0]]);
        let r = p.transpose();
        let c = triple_product(&r, &a, &p).unwrap();
        assert_eq!(c.nrows(), 1);
        assert_eq!(c.get(0, 0), 3.0);
    }

    #[test]
    fn triple_product_dimension_mismatch() {
        let a = CsrMatrix::identity(3);
        let p = CsrMatrix::identity(2);
        assert!(triple_product(&p, &a, &p).is_err());
    }

    #[test]
    fn galerkin_product_of_spd_is_spd() {
        // 1D Laplacian with Dirichlet ends, piecewise-linear aggregation.
        let n = 12;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t).unwrap();
        let mut pt = Vec::new();
        for i in 0..n {
            pt.push((i, i / 4, 1.0));
            if i % 4 == 3 && i / 4 + 1 < 3 {
                pt.push((i, i / 4 + 1, 0.5));
            }
        }
        let p = CsrMatrix::from_triplets(n, 3, &pt).unwrap();
        let ac = triple_product(&p.transpose(), &a, &p).unwrap();
        assert!(ac.is_symmetric(1e-14));
        assert!(DirectSolver::cholesky(&ac).is_ok());
    }
}
