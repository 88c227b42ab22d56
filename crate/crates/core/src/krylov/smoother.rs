use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sparse::{
    incomplete_factorize_with, CsrMatrix, FactorKind, IncompleteFactorization, PivotPolicy,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmootherKind {
    Jacobi,
    L1Jacobi,
    Sgs,
    Ilu0,
    Ic0,
    None,
}

impl SmootherKind {
    /// Short tag used in output file names.
    pub fn tag(self) -> &'static str {
        match self {
            SmootherKind::Jacobi => "JAC",
            SmootherKind::L1Jacobi => "L1JAC",
            SmootherKind::Sgs => "SGS",
            SmootherKind::Ilu0 => "ILU0",
            SmootherKind::Ic0 => "IC0",
            SmootherKind::None => "NONE",
        }
    }

    /// Whether the smoother operator is symmetric for symmetric `A`.
    pub fn is_symmetric(self) -> bool {
        !matches!(self, SmootherKind::Ilu0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmootherSpec {
    pub kind: SmootherKind,
    pub sweeps: usize,
    /// Weighted Jacobi only.
    pub damping: f64,
}

impl Default for SmootherSpec {
    fn default() -> Self {
        Self {
            kind: SmootherKind::None,
            sweeps: 1,
            damping: 2.0 / 3.0,
        }
    }
}

impl SmootherSpec {
    pub fn new(kind: SmootherKind, sweeps: usize) -> Self {
        Self {
            kind,
            sweeps,
            ..Default::default()
        }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind != SmootherKind::None && self.sweeps == 0 {
            return Err(Error::invalid("smoother needs at least one sweep"));
        }
        if self.kind == SmootherKind::Jacobi && !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::invalid(format!(
                "Jacobi damping {} outside (0, 1]",
                self.damping
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SmootherSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{}",
            self.kind.tag(),
            if self.kind == SmootherKind::None {
                0
            } else {
                self.sweeps
            }
        )
    }
}

enum Data {
    Diagonal(Vec<f64>),
    Sgs(Vec<f64>),
    /// Factorization of the node-major reordering for `n_sd > 1`.
    Incomplete(IncompleteFactorization, usize),
    None,
}

/// Position of direction-major dof `i` in node-major order.
fn interleave(i: usize, nn: usize, n_sd: usize) -> usize {
    n_sd * (i % nn) + i / nn
}

fn reorder(a: &CsrMatrix, n_sd: usize) -> Result<CsrMatrix> {
    let nn = a.nrows() / n_sd;
    let t: Vec<_> = a
        .triplets()
        .map(|(i, j, v)| (interleave(i, nn, n_sd), interleave(j, nn, n_sd), v))
        .collect();
    CsrMatrix::from_triplets(a.nrows(), a.ncols(), &t)
}

/// A smoother set up for one matrix. `apply` runs `sweeps` fixed-point
/// iterations `w += M^{-1}(v - A w)` from `w = 0`.
pub struct Smoother {
    spec: SmootherSpec,
    data: Data,
}

impl Smoother {
    pub fn new(spec: SmootherSpec, a: &CsrMatrix) -> Result<Self> {
        Self::for_vector(spec, a, 1)
    }

    /// For a direction-major system with `n_sd` unknowns per node. Incomplete
    /// factorizations are then computed with the unknowns of each node
    /// interleaved, which keeps the intra-node coupling in the factors.
    pub fn for_vector(spec: SmootherSpec, a: &CsrMatrix, n_sd: usize) -> Result<Self> {
        spec.validate()?;
        if a.nrows() != a.ncols() {
            return Err(Error::dims("smoother needs a square matrix"));
        }
        if n_sd == 0 || !a.nrows().is_multiple_of(n_sd) {
            return Err(Error::dims(format!(
                "{} unknowns do not split into {n_sd} directions",
                a.nrows()
            )));
        }
        let incomplete = |kind| -> Result<Data> {
            let f = if n_sd == 1 {
                incomplete_factorize_with(a, kind, PivotPolicy::Shift)?
            } else {
                incomplete_factorize_with(&reorder(a, n_sd)?, kind, PivotPolicy::Shift)?
            };
            Ok(Data::Incomplete(f, n_sd))
        };
        let diag = || -> Result<Vec<f64>> {
            let d = a.diag();
            match d.iter().position(|&x| x == 0.0) {
                Some(row) => Err(Error::ZeroPivot { row, pivot: 0.0 }),
                None => Ok(d),
            }
        };
        let data = match spec.kind {
            SmootherKind::Jacobi => {
                Data::Diagonal(diag()?.iter().map(|d| spec.damping / d).collect())
            }
            SmootherKind::L1Jacobi => {
                diag()?;
                let inv =
                    (0..a.nrows()).map(|i| 1.0 / a.row(i).1.iter().map(|v| v.abs()).sum::<f64>());
                Data::Diagonal(inv.collect())
            }
            SmootherKind::Sgs => Data::Sgs(diag()?),
            SmootherKind::Ilu0 => incomplete(FactorKind::Ilu0)?,
            SmootherKind::Ic0 => incomplete(FactorKind::Ic0)?,
            SmootherKind::None => Data::None,
        };
        Ok(Self { spec, data })
    }

    pub fn spec(&self) -> SmootherSpec {
        self.spec
    }

    pub fn is_none(&self) -> bool {
        matches!(self.data, Data::None)
    }

    /// One application of `M^{-1}`.
    pub fn apply_once(&self, a: &CsrMatrix, r: &[f64], out: &mut [f64]) {
        match &self.data {
            Data::Diagonal(inv) => {
                for ((o, x), s) in out.iter_mut().zip(r).zip(inv) {
                    *o = x * s;
                }
            }
            Data::Sgs(d) => sgs(a, d, r, out),
            Data::Incomplete(f, 1) => {
                out.copy_from_slice(r);
                f.apply_in_place(out);
            }
            Data::Incomplete(f, n_sd) => {
                let nn = r.len() / n_sd;
                let mut t = vec![0.0; r.len()];
                for (i, &x) in r.iter().enumerate() {
                    t[interleave(i, nn, *n_sd)] = x;
                }
                f.apply_in_place(&mut t);
                for (i, o) in out.iter_mut().enumerate() {
                    *o = t[interleave(i, nn, *n_sd)];
                }
            }
            Data::None => out.fill(0.0),
        }
    }

    pub fn apply(&self, a: &CsrMatrix, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut w = vec![0.0; n];
        if self.is_none() {
            return w;
        }
        let mut r = v.to_vec();
        let mut dw = vec![0.0; n];
        for s in 0..self.spec.sweeps {
            if s > 0 {
                a.residual_into(v, &w, &mut r);
            }
            self.apply_once(a, &r, &mut dw);
            for (x, d) in w.iter_mut().zip(&dw) {
                *x += d;
            }
        }
        w
    }
}

/// `M = (D + L) D^{-1} (D + U)`: forward then backward Gauss-Seidel from zero.
fn sgs(a: &CsrMatrix, d: &[f64], r: &[f64], out: &mut [f64]) {
    let n = r.len();
    for i in 0..n {
        let (cols, vals) = a.row(i);
        let mut s = r[i];
        for (&j, &v) in cols.iter().zip(vals) {
            if j >= i {
                break;
            }
            s -= v * out[j];
        }
        out[i] = s / d[i];
    }
    for i in (0..n).rev() {
        let (cols, vals) = a.row(i);
        let mut s = 0.0;
        for (&j, &v) in cols.iter().zip(vals).rev() {
            if j <= i {
                break;
            }
            s += v * out[j];
        }
        out[i] -= s / d[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lap1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t).unwrap()
    }

    fn dense_inverse_sgs(a: &CsrMatrix) -> Vec<Vec<f64>> {
        // M = (D+L) D^-1 (D+U), inverted column by column with nalgebra
        let n = a.nrows();
        let full = a.to_dense();
        let mut dl = nalgebra::DMatrix::zeros(n, n);
        let mut du = nalgebra::DMatrix::zeros(n, n);
        let mut dinv = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if j <= i {
                    dl[(i, j)] = full[i][j];
                }
                if j >= i {
                    du[(i, j)] = full[i][j];
                }
            }
            dinv[(i, i)] = 1.0 / full[i][i];
        }
        let m = dl * dinv * du;
        let inv = m.try_inverse().unwrap();
        (0..n)
            .map(|i| (0..n).map(|j| inv[(i, j)]).collect())
            .collect()
    }

    #[test]
    fn jacobi_solves_diagonal() {
        let a = CsrMatrix::diagonal(&[2.0, 4.0, 8.0]);
        let s = Smoother::new(
            SmootherSpec {
                kind: SmootherKind::Jacobi,
                sweeps: 1,
                damping: 1.0,
            },
            &a,
        )
        .unwrap();
        assert_eq!(s.apply(&a, &[2.0, 4.0, 8.0]), vec![1.0; 3]);
    }

    #[test]
    fn l1_diagonal_dominates() {
        let a = CsrMatrix::from_dense(&[
            vec![4.0, -1.0, 2.0],
            vec![-1.0, 3.0, 0.5],
            vec![2.0, 0.5, 5.0],
        ]);
        let s = Smoother::new(SmootherSpec::new(SmootherKind::L1Jacobi, 1), &a).unwrap();
        let w = s.apply(&a, &[1.0, 1.0, 1.0]);
        assert_eq!(w, vec![1.0 / 7.0, 1.0 / 4.5, 1.0 / 7.5]);
        let d = a.diag();
        for (wi, di) in w.iter().zip(d) {
            assert!(*wi <= 1.0 / di);
        }
    }

    #[test]
    fn sgs_matches_dense_formula() {
        let a = CsrMatrix::from_dense(&[
            vec![4.0, -1.0, 0.5],
            vec![-1.0, 3.0, -1.0],
            vec![0.5, -1.0, 5.0],
        ]);
        let s = Smoother::new(SmootherSpec::new(SmootherKind::Sgs, 1), &a).unwrap();
        let inv = dense_inverse_sgs(&a);
        let v = [1.0, -2.0, 0.5];
        let w = s.apply(&a, &v);
        for i in 0..3 {
            let e: f64 = (0..3).map(|j| inv[i][j] * v[j]).sum();
            assert!((w[i] - e).abs() < 1e-14);
        }
    }

    #[test]
    fn sgs_is_symmetric_operator() {
        let a = lap1d(20);
        let s = Smoother::new(SmootherSpec::new(SmootherKind::Sgs, 2), &a).unwrap();
        let u: Vec<f64> = (0..20).map(|i| ((i * 13) % 7) as f64 - 3.0).collect();
        let v: Vec<f64> = (0..20).map(|i| ((i * 5) % 11) as f64 * 0.3).collect();
        let mu = s.apply(&a, &u);
        let mv = s.apply(&a, &v);
        let l: f64 = mu.iter().zip(&v).map(|(x, y)| x * y).sum();
        let r: f64 = u.iter().zip(&mv).map(|(x, y)| x * y).sum();
        assert!((l - r).abs() < 1e-12 * l.abs().max(1.0));
    }

    #[test]
    fn sweeps_converge_to_solution() {
        let a = lap1d(8);
        let v = vec![1.0; 8];
        let s = Smoother::new(SmootherSpec::new(SmootherKind::Sgs, 200), &a).unwrap();
        let w = s.apply(&a, &v);
        let r = a.mul_vec(&w);
        assert!(r.iter().zip(&v).all(|(x, y)| (x - y).abs() < 1e-10));
    }

    #[test]
    fn none_and_tags() {
        let a = lap1d(3);
        let s = Smoother::new(SmootherSpec::none(), &a).unwrap();
        assert_eq!(s.apply(&a, &[1.0, 2.0, 3.0]), vec![0.0; 3]);
        assert_eq!(
            SmootherSpec::new(SmootherKind::Ilu0, 1).to_string(),
            "ILU0x1"
        );
        assert!(Smoother::new(SmootherSpec::new(SmootherKind::Sgs, 0), &a).is_err());
    }

    #[test]
    fn interleaved_factor_matches_reordered_system() {
        // 3 nodes x 2 directions, direction-major rows u0 u1 u2 v0 v1 v2
        let a = CsrMatrix::from_dense(&[
            vec![4.0, -1.0, 0.0, 0.5, 0.2, 0.0],
            vec![-1.0, 4.0, -1.0, 0.0, 0.5, 0.0],
            vec![0.0, -1.0, 4.0, 0.0, 0.0, 0.5],
            vec![0.5, 0.0, 0.0, 3.0, -1.0, 0.0],
            vec![0.2, 0.5, 0.0, -1.0, 3.0, -1.0],
            vec![0.0, 0.0, 0.5, 0.0, -1.0, 3.0],
        ]);
        // node-major rows u0 v0 u1 v1 u2 v2
        let perm = [0, 3, 1, 4, 2, 5];
        let d = a.to_dense();
        let b = CsrMatrix::from_dense(
            &perm
                .iter()
                .map(|&i| perm.iter().map(|&j| d[i][j]).collect())
                .collect::<Vec<_>>(),
        );
        let v = [1.0, -2.0, 3.0, 0.5, 4.0, -1.0];
        let f = incomplete_factorize_with(&b, FactorKind::Ilu0, PivotPolicy::Shift).unwrap();
        let expect = f.apply(&perm.iter().map(|&i| v[i]).collect::<Vec<_>>());

        let s = Smoother::for_vector(SmootherSpec::new(SmootherKind::Ilu0, 1), &a, 2).unwrap();
        let w = s.apply(&a, &v);
        for (k, &i) in perm.iter().enumerate() {
            assert!((w[i] - expect[k]).abs() < 1e-14);
        }
        assert!(Smoother::for_vector(SmootherSpec::new(SmootherKind::Ilu0, 1), &a, 4).is_err());
    }

    #[test]
    fn zero_diagonal_rejected() {
        let a = CsrMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 2.0]]);
        assert!(Smoother::new(SmootherSpec::new(SmootherKind::Jacobi, 1), &a).is_err());
    }
}
