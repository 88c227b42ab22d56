use super::CsrMatrix;
use crate::{Error, Result};

/// Off-diagonal part with positive entries clipped to zero, `min(a_ij, 0)`.
///
/// The diagonal is dropped (it is rebuilt by [`filter_zero_rowsum`]) and
/// entries that end up exactly zero leave the pattern.
pub fn filter_to_m(a: &CsrMatrix) -> Result<CsrMatrix> {
    check_positive_diagonal(a)?;
    Ok(a.filter(|i, j, v| i != j && v < 0.0))
}

/// Off-diagonal part of `a` without any clipping. Used for the unfiltered
/// (naive) smoothing path.
pub fn off_diagonal(a: &CsrMatrix) -> CsrMatrix {
    a.filter(|i, j, v| i != j && v != 0.0)
}

fn check_positive_diagonal(a: &CsrMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::dims(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    for i in 0..a.nrows() {
        let d = a.get(i, i);
        if !(d > 0.0) {
            return Err(Error::NonPositiveDiagonal { row: i, value: d });
        }
    }
    Ok(())
}

/// Zero row-sum operator built from an off-diagonal pattern.
#[derive(Clone, Debug)]
pub struct ZeroRowSum {
    /// `G` with `G_ii = -sum_{j != i} G_ij`.
    pub matrix: CsrMatrix,
    /// Rows with no off-diagonal entries (their diagonal is zero).
    pub isolated: Vec<bool>,
}

impl ZeroRowSum {
    pub fn diag(&self) -> Vec<f64> {
        self.matrix.diag()
    }
}

/// Inserts the diagonal that makes every row of `off` sum to zero.
pub fn filter_zero_rowsum(off: &CsrMatrix) -> ZeroRowSum {
    let n = off.nrows();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(off.nnz() + n);
    let mut values = Vec::with_capacity(off.nnz() + n);
    let mut isolated = vec![false; n];
    indptr.push(0);
    for i in 0..n {
        let (cols, vals) = off.row(i);
        let mut d = 0.0;
        let mut any = false;
        for (&j, &v) in cols.iter().zip(vals) {
            if j != i {
                d -= v;
                any = true;
            }
        }
        isolated[i] = !any;
        let mut placed = false;
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i {
                continue;
            }
            if !placed && j > i {
                indices.push(i);
                values.push(d);
                placed = true;
            }
            indices.push(j);
            values.push(v);
        }
        if !placed {
            indices.push(i);
            values.push(d);
        }
        indptr.push(indices.len());
    }
    ZeroRowSum {
        matrix: CsrMatrix::from_parts(n, off.ncols(), indptr, indices, values),
        isolated,
    }
}
