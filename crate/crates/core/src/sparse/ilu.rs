//! No-fill incomplete factorizations, ILU(0) and IC(0), in natural row order.

use super::CsrMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FactorKind {
    Ilu0,
    Ic0,
}

/// What to do when a pivot vanishes (ILU) or turns non-positive (IC).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum PivotPolicy {
    #[default]
    Fail,
    /// Add `1e-8 * max|diag|` to the diagonal and refactorize once.
    Shift,
}

const SHIFT_FACTOR: f64 = 1e-8;

/// `lower * upper ≈ A` restricted to the pattern of `A`.
///
/// For ILU(0) `lower` is unit lower triangular (diagonal stored explicitly).
/// For IC(0) `upper` is the transpose of `lower`.
#[derive(Clone, Debug)]
pub struct IncompleteFactorization {
    pub kind: FactorKind,
    pub lower: CsrMatrix,
    pub upper: CsrMatrix,
    /// Diagonal shift that was applied, zero if none.
    pub shift: f64,
}

pub fn incomplete_factorize(a: &CsrMatrix, kind: FactorKind) -> Result<IncompleteFactorization> {
    incomplete_factorize_with(a, kind, PivotPolicy::Fail)
}

pub fn incomplete_factorize_with(
    a: &CsrMatrix,
    kind: FactorKind,
    policy: PivotPolicy,
) -> Result<IncompleteFactorization> {
    if a.nrows() != a.ncols() {
        return Err(Error::dims(
            "incomplete factorization needs a square matrix",
        ));
    }
    let attempt = |shift: f64| match kind {
        FactorKind::Ilu0 => ilu0(a, shift),
        FactorKind::Ic0 => ic0(a, shift),
    };
    match attempt(0.0) {
        Err(Error::ZeroPivot { .. }) if policy == PivotPolicy::Shift => {
            let dmax = a.diag().iter().fold(0.0f64, |m, d| m.max(d.abs()));
            attempt(SHIFT_FACTOR * dmax)
        }
        r => r,
    }
}

fn diag_positions(a: &CsrMatrix) -> Result<Vec<usize>> {
    (0..a.nrows())
        .map(|i| a.find(i, i).ok_or(Error::ZeroPivot { row: i, pivot: 0.0 }))
        .collect()
}

fn ilu0(a: &CsrMatrix, shift: f64) -> Result<IncompleteFactorization> {
    let n = a.nrows();
    let diag = diag_positions(a)?;
    let indptr = a.indptr();
    let indices = a.indices();
    let mut lu = a.values().to_vec();
    for &d in &diag {
        lu[d] += shift;
    }
    let mut pos = vec![usize::MAX; n];
    for i in 0..n {
        let (lo, hi) = (indptr[i], indptr[i + 1]);
        for k in lo..hi {
            pos[indices[k]] = k;
        }
        for kk in lo..diag[i] {
            let k = indices[kk];
            let pivot = lu[diag[k]];
            let lik = lu[kk] / pivot;
            lu[kk] = lik;
            for kj in diag[k] + 1..indptr[k + 1] {
                let j = indices[kj];
                let p = pos[j];
                if p != usize::MAX && p >= lo && p < hi {
                    lu[p] -= lik * lu[kj];
                }
            }
        }
        let piv = lu[diag[i]];
        if piv == 0.0 || !piv.is_finite() {
            return Err(Error::ZeroPivot { row: i, pivot: piv });
        }
        for k in lo..hi {
            pos[indices[k]] = usize::MAX;
        }
    }
    let mut lower_t = Vec::new();
    let mut upper_t = Vec::new();
    for i in 0..n {
        for k in indptr[i]..indptr[i + 1] {
            let j = indices[k];
            if j < i {
                lower_t.push((i, j, lu[k]));
            } else {
                upper_t.push((i, j, lu[k]));
            }
        }
        lower_t.push((i, i, 1.0));
    }
    Ok(IncompleteFactorization {
        kind: FactorKind::Ilu0,
        lower: CsrMatrix::from_triplets(n, n, &lower_t)?,
        upper: CsrMatrix::from_triplets(n, n, &upper_t)?,
        shift,
    })
}

fn ic0(a: &CsrMatrix, shift: f64) -> Result<IncompleteFactorization> {
    let n = a.nrows();
    // lower-triangular pattern of A, diagonal last in every row
    let lower_pattern = a.filter(|i, j, _| j <= i);
    let indptr = lower_pattern.indptr().to_vec();
    let indices = lower_pattern.indices().to_vec();
    let mut l = lower_pattern.values().to_vec();
    for i in 0..n {
        let hi = indptr[i + 1];
        if hi == indptr[i] || indices[hi - 1] != i {
            return Err(Error::ZeroPivot { row: i, pivot: 0.0 });
        }
        l[hi - 1] += shift;
    }
    for i in 0..n {
        let (lo, hi) = (indptr[i], indptr[i + 1]);
        for kk in lo..hi - 1 {
            let k = indices[kk];
            // sparse dot of row i and row k over columns < k
            let (klo, khi) = (indptr[k], indptr[k + 1] - 1);
            let (mut p, mut q) = (lo, klo);
            let mut s = 0.0;
            while p < kk && q < khi {
                match indices[p].cmp(&indices[q]) {
                    std::cmp::Ordering::Less => p += 1,
                    std::cmp::Ordering::Greater => q += 1,
                    std::cmp::Ordering::Equal => {
                        s += l[p] * l[q];
                        p += 1;
                        q += 1;
                    }
                }
            }
            l[kk] = (l[kk] - s) / l[khi];
        }
        let s: f64 = l[lo..hi - 1].iter().map(|v| v * v).sum();
        let d = l[hi - 1] - s;
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::ZeroPivot { row: i, pivot: d });
        }
        l[hi - 1] = d.sqrt();
    }
    let lower = CsrMatrix::from_parts(n, n, indptr, indices, l);
    let upper = lower.transpose();
    Ok(IncompleteFactorization {
        kind: FactorKind::Ic0,
        lower,
        upper,
        shift,
    })
}

impl IncompleteFactorization {
    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// Solves `lower * upper * w = v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut w = v.to_vec();
        self.apply_in_place(&mut w);
        w
    }

    pub fn apply_in_place(&self, w: &mut [f64]) {
        let n = self.dim();
        // forward: diagonal is the last entry of each lower row
        for i in 0..n {
            let (c, v) = self.lower.row(i);
            let last = c.len() - 1;
            let mut s = w[i];
            for k in 0..last {
                s -= v[k] * w[c[k]];
            }
            w[i] = s / v[last];
        }
        // backward: diagonal is the first entry of each upper row
        for i in (0..n).rev() {
            let (c, v) = self.upper.row(i);
            let mut s = w[i];
            for k in 1..c.len() {
                s -= v[k] * w[c[k]];
            }
            w[i] = s / v[0];
        }
    }
}
