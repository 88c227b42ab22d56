use crate::basis::CoarseSystem;
use crate::sparse::CsrMatrix;

use super::Smoother;

pub trait Preconditioner {
    /// `z ≈ A^{-1} v`.
    fn apply(&self, v: &[f64]) -> Vec<f64>;
}

pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }
}

/// `w = P A_c^{-1} R v`.
pub fn apply_ms(coarse: &CoarseSystem, v: &[f64]) -> Vec<f64> {
    coarse.correct(v)
}

/// Pre-smoother, optional multiscale correction, post-smoother, each stage
/// acting on the current residual. With no stage at all it is the identity.
pub struct TwoLevel<'a> {
    a: &'a CsrMatrix,
    pre: Smoother,
    coarse: Option<&'a CoarseSystem>,
    post: Smoother,
}

impl<'a> TwoLevel<'a> {
    pub fn new(
        a: &'a CsrMatrix,
        pre: Smoother,
        coarse: Option<&'a CoarseSystem>,
        post: Smoother,
    ) -> Self {
        Self {
            a,
            pre,
            coarse,
            post,
        }
    }

    fn stage(
        &self,
        v: &[f64],
        z: &mut [f64],
        r: &mut [f64],
        first: &mut bool,
        f: impl Fn(&[f64]) -> Vec<f64>,
    ) {
        if *first {
            r.copy_from_slice(v);
        } else {
            self.a.residual_into(v, z, r);
        }
        let dz = f(r);
        for (x, d) in z.iter_mut().zip(&dz) {
            *x += d;
        }
        *first = false;
    }
}

impl Preconditioner for TwoLevel<'_> {
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut z = vec![0.0; n];
        let mut r = vec![0.0; n];
        let mut first = true;
        if !self.pre.is_none() {
            self.stage(v, &mut z, &mut r, &mut first, |r| self.pre.apply(self.a, r));
        }
        if let Some(c) = self.coarse {
            self.stage(v, &mut z, &mut r, &mut first, |r| apply_ms(c, r));
        }
        if !self.post.is_none() {
            self.stage(v, &mut z, &mut r, &mut first, |r| {
                self.post.apply(self.a, r)
            });
        }
        if first {
            z.copy_from_slice(v);
        }
        z
    }
}
