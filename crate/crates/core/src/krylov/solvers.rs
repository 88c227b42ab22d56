use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{ConvergenceHistory, Preconditioner, Status};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Richardson,
    Cg,
    Gmres,
    Bicgstab,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Richardson => "Richardson",
            Method::Cg => "CG",
            Method::Gmres => "GMRES_right",
            Method::Bicgstab => "BiCGStab",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub method: Method,
    pub tol: f64,
    pub max_iters: usize,
    /// GMRES restart length; `None` keeps the full Krylov basis.
    pub restart: Option<usize>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            method: Method::Gmres,
            tol: 1e-8,
            max_iters: 500,
            restart: None,
        }
    }
}

impl SolverSpec {
    pub fn new(method: Method, tol: f64, max_iters: usize) -> Self {
        Self {
            method,
            tol,
            max_iters,
            restart: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid(format!(
                "solver tolerance {} must be positive",
                self.tol
            )));
        }
        if self.restart == Some(0) {
            return Err(Error::invalid("GMRES restart must be positive"));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Tracks the true relative residual of the current iterate.
struct Monitor<'a> {
    a: &'a CsrMatrix,
    b: &'a [f64],
    bnorm: f64,
    r: Vec<f64>,
    hist: Vec<f64>,
    tol: f64,
}

impl<'a> Monitor<'a> {
    /// Records `||b - A x|| / ||b||` and reports whether it meets the tolerance.
    fn record(&mut self, x: &[f64]) -> bool {
        self.a.residual_into(self.b, x, &mut self.r);
        let rel = norm(&self.r) / self.bnorm;
        self.hist.push(rel);
        rel <= self.tol
    }

    fn iterations(&self) -> usize {
        self.hist.len() - 1
    }
}

/// Solves `A x = b` from `x = 0`.
pub fn solve(
    a: &CsrMatrix,
    b: &[f64],
    m: &dyn Preconditioner,
    spec: &SolverSpec,
) -> Result<(Vec<f64>, ConvergenceHistory)> {
    spec.validate()?;
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::dims(format!(
            "system is {}x{} with rhs of length {}",
            n,
            a.ncols(),
            b.len()
        )));
    }
    let start = Instant::now();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        let hist = ConvergenceHistory::new(vec![0.0], Status::Converged, start.elapsed());
        return Ok((x, hist));
    }
    let mut mon = Monitor {
        a,
        b,
        bnorm,
        r: vec![0.0; n],
        hist: Vec::new(),
        tol: spec.tol,
    };
    let status = if mon.record(&x) {
        Status::Converged
    } else {
        match spec.method {
            Method::Richardson => richardson(&mut mon, m, &mut x, spec),
            Method::Cg => cg(&mut mon, m, &mut x, spec),
            Method::Gmres => gmres(&mut mon, m, &mut x, spec),
            Method::Bicgstab => bicgstab(&mut mon, m, &mut x, spec),
        }
    };
    Ok((
        x,
        ConvergenceHistory::new(mon.hist, status, start.elapsed()),
    ))
}

fn richardson(
    mon: &mut Monitor,
    m: &dyn Preconditioner,
    x: &mut [f64],
    spec: &SolverSpec,
) -> Status {
    while mon.iterations() < spec.max_iters {
        let z = m.apply(&mon.r);
        axpy(x, 1.0, &z);
        if mon.record(x) {
            return Status::Converged;
        }
        if !mon.hist.last().unwrap().is_finite() {
            return Status::Breakdown("residual is not finite".into());
        }
    }
    Status::MaxIters
}

fn cg(mon: &mut Monitor, m: &dyn Preconditioner, x: &mut [f64], spec: &SolverSpec) -> Status {
    let mut r = mon.r.clone();
    let mut z = m.apply(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; x.len()];
    while mon.iterations() < spec.max_iters {
        mon.a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Status::Breakdown(format!("p^T A p = {pap:e}, matrix not positive definite"));
        }
        if !(rz > 0.0) {
            return Status::Breakdown(format!(
                "r^T z = {rz:e}, preconditioner not positive definite"
            ));
        }
        let alpha = rz / pap;
        axpy(x, alpha, &p);
        axpy(&mut r, -alpha, &ap);
        if mon.record(x) {
            return Status::Converged;
        }
        z = m.apply(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Status::MaxIters
}

/// Right-preconditioned GMRES with Givens rotations. The preconditioned
/// directions are kept so the iterate can be formed every step.
fn gmres(mon: &mut Monitor, m: &dyn Preconditioner, x: &mut [f64], spec: &SolverSpec) -> Status {
    let n = x.len();
    let restart = spec.restart.unwrap_or(spec.max_iters).max(1);
    let mut w = vec![0.0; n];
    while mon.iterations() < spec.max_iters {
        let x0 = x.to_vec();
        let beta = norm(&mon.r);
        let mut v: Vec<Vec<f64>> = vec![mon.r.iter().map(|ri| ri / beta).collect()];
        let mut zs: Vec<Vec<f64>> = Vec::new();
        let mut h: Vec<Vec<f64>> = Vec::new();
        let (mut cs, mut sn) = (Vec::<f64>::new(), Vec::<f64>::new());
        let mut g = vec![beta];
        for j in 0..restart {
            if mon.iterations() >= spec.max_iters {
                return Status::MaxIters;
            }
            let z = m.apply(&v[j]);
            mon.a.mul_vec_into(&z, &mut w);
            zs.push(z);
            let mut col = Vec::with_capacity(j + 2);
            // modified Gram-Schmidt
            for vi in &v {
                let hij = dot(&w, vi);
                axpy(&mut w, -hij, vi);
                col.push(hij);
            }
            let hnext = norm(&w);
            col.push(hnext);
            for i in 0..j {
                let (a, b) = (col[i], col[i + 1]);
                col[i] = cs[i] * a + sn[i] * b;
                col[i + 1] = -sn[i] * a + cs[i] * b;
            }
            let (a, b) = (col[j], col[j + 1]);
            let rho = a.hypot(b);
            if rho == 0.0 {
                return Status::Breakdown("GMRES Hessenberg column vanished".into());
            }
            cs.push(a / rho);
            sn.push(b / rho);
            col[j] = rho;
            col[j + 1] = 0.0;
            g.push(-sn[j] * g[j]);
            g[j] *= cs[j];
            h.push(col);
            // back substitution for the current least-squares solution
            let k = j + 1;
            let mut y = vec![0.0; k];
            for i in (0..k).rev() {
                let mut s = g[i];
                for l in i + 1..k {
                    s -= h[l][i] * y[l];
                }
                y[i] = s / h[i][i];
            }
            x.copy_from_slice(&x0);
            for (zi, yi) in zs.iter().zip(&y) {
                axpy(x, *yi, zi);
            }
            if mon.record(x) {
                return Status::Converged;
            }
            if !mon.hist.last().unwrap().is_finite() {
                return Status::Breakdown("residual is not finite".into());
            }
            if hnext == 0.0 {
                // lucky breakdown: Krylov space is invariant, solution exact up to rounding
                return Status::Breakdown("Krylov space exhausted before tolerance".into());
            }
            v.push(w.iter().map(|wi| wi / hnext).collect());
        }
    }
    Status::MaxIters
}

fn bicgstab(mon: &mut Monitor, m: &dyn Preconditioner, x: &mut [f64], spec: &SolverSpec) -> Status {
    let n = x.len();
    let mut r = mon.r.clone();
    let r0 = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut t = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0f64, 1.0f64, 1.0f64);
    let scale = dot(&r0, &r0);
    while mon.iterations() < spec.max_iters {
        let rho_new = dot(&r0, &r);
        if rho_new.abs() <= 1e-300 * scale.max(1.0) || rho_new.abs() < f64::EPSILON.powi(2) * scale
        {
            return Status::Breakdown("BiCGStab rho vanished".into());
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let ph = m.apply(&p);
        mon.a.mul_vec_into(&ph, &mut v);
        let r0v = dot(&r0, &v);
        if r0v == 0.0 {
            return Status::Breakdown("BiCGStab <r0, v> vanished".into());
        }
        alpha = rho / r0v;
        let mut s = r.clone();
        axpy(&mut s, -alpha, &v);
        let sh = m.apply(&s);
        mon.a.mul_vec_into(&sh, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        axpy(x, alpha, &ph);
        axpy(x, omega, &sh);
        r.copy_from_slice(&s);
        axpy(&mut r, -omega, &t);
        if mon.record(x) {
            return Status::Converged;
        }
        if omega == 0.0 {
            return Status::Breakdown("BiCGStab omega vanished".into());
        }
    }
    Status::MaxIters
}
