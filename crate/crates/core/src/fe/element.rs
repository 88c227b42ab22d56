//! Q1 shape functions on tensor-ordered quads and hexes, reference cell [0,1]^d.

use crate::mesh::{Mesh, Point};
use crate::{Error, Result};

pub(crate) const GAUSS2: [(f64, f64); 2] = [
    (0.211_324_865_405_187_1, 0.5),
    (0.788_675_134_594_812_9, 0.5),
];

/// Quadrature point on a physical element: shape values, physical gradients
/// (one `[f64; 3]` per vertex) and weight times `det J`.
pub(crate) struct QuadPoint {
    pub n: Vec<f64>,
    pub grad: Vec<[f64; 3]>,
    pub w: f64,
}

fn shape(dim: usize, xi: [f64; 3]) -> (Vec<f64>, Vec<[f64; 3]>) {
    let nv = 1 << dim;
    let mut n = vec![0.0; nv];
    let mut g = vec![[0.0; 3]; nv];
    for b in 0..nv {
        let f = |d: usize| {
            if (b >> d) & 1 == 1 {
                xi[d]
            } else {
                1.0 - xi[d]
            }
        };
        let df = |d: usize| if (b >> d) & 1 == 1 { 1.0 } else { -1.0 };
        n[b] = (0..dim).map(f).product();
        for d in 0..dim {
            g[b][d] = df(d) * (0..dim).filter(|&e| e != d).map(f).product::<f64>();
        }
    }
    (n, g)
}

fn inverse(dim: usize, j: &[[f64; 3]; 3]) -> Option<([[f64; 3]; 3], f64)> {
    let mut inv = [[0.0; 3]; 3];
    let det = if dim == 2 {
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        inv[0][0] = j[1][1] / det;
        inv[0][1] = -j[0][1] / det;
        inv[1][0] = -j[1][0] / det;
        inv[1][1] = j[0][0] / det;
        det
    } else {
        let c = |r: usize, s: usize| {
            let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
            let (s1, s2) = ((s + 1) % 3, (s + 2) % 3);
            j[r1][s1] * j[r2][s2] - j[r1][s2] * j[r2][s1]
        };
        let det = j[0][0] * c(0, 0) + j[0][1] * c(0, 1) + j[0][2] * c(0, 2);
        for r in 0..3 {
            for s in 0..3 {
                inv[s][r] = c(r, s) / det;
            }
        }
        det
    };
    (det > 0.0 && det.is_finite()).then_some((inv, det))
}

/// Tensor Gauss rule with the given 1D points mapped through cell `c`.
pub(crate) fn quadrature(mesh: &Mesh, c: usize, rule: &[(f64, f64)]) -> Result<Vec<QuadPoint>> {
    let dim = mesh.dim();
    let verts: Vec<Point> = mesh.cells()[c]
        .vertices
        .iter()
        .map(|&v| mesh.nodes()[v])
        .collect();
    let nq = rule.len();
    let total = nq.pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    for q in 0..total {
        let mut xi = [0.0; 3];
        let mut w = 1.0;
        let mut r = q;
        for x in xi.iter_mut().take(dim) {
            let (p, wt) = rule[r % nq];
            *x = p;
            w *= wt;
            r /= nq;
        }
        let (n, g) = shape(dim, xi);
        // J[i][d] = dx_i / dxi_d
        let mut jac = [[0.0; 3]; 3];
        for (b, v) in verts.iter().enumerate() {
            for i in 0..dim {
                for d in 0..dim {
                    jac[i][d] += v[i] * g[b][d];
                }
            }
        }
        let (inv, det) = inverse(dim, &jac).ok_or(Error::InvertedCell { cell: c })?;
        // grad_x N = J^{-T} grad_xi N
        let grad = g
            .iter()
            .map(|gb| {
                let mut out = [0.0; 3];
                for i in 0..dim {
                    out[i] = (0..dim).map(|d| inv[d][i] * gb[d]).sum();
                }
                out
            })
            .collect();
        out.push(QuadPoint {
            n,
            grad,
            w: w * det,
        });
    }
    Ok(out)
}

/// Integrals of the face shape functions, `∫ N_a dS`, one per face vertex.
pub(crate) fn face_shape_integrals(mesh: &Mesh, face: usize) -> Vec<f64> {
    let f = &mesh.faces()[face];
    if mesh.dim() == 2 {
        return vec![0.5 * f.area; 2];
    }
    // cyclic vertices q0..q3 map to the bilinear patch (0,0),(1,0),(1,1),(0,1)
    let q: Vec<Point> = f.vertices.iter().map(|&v| mesh.nodes()[v]).collect();
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let mut out = vec![0.0; 4];
    for &(s, ws) in &GAUSS2 {
        for &(t, wt) in &GAUSS2 {
            let n: Vec<f64> = corners
                .iter()
                .map(|&(a, b)| {
                    (if a == 1.0 { s } else { 1.0 - s }) * (if b == 1.0 { t } else { 1.0 - t })
                })
                .collect();
            let mut xs = [0.0; 3];
            let mut xt = [0.0; 3];
            for k in 0..4 {
                let (a, b) = corners[k];
                let ds = (if a == 1.0 { 1.0 } else { -1.0 }) * (if b == 1.0 { t } else { 1.0 - t });
                let dt = (if a == 1.0 { s } else { 1.0 - s }) * (if b == 1.0 { 1.0 } else { -1.0 });
                for d in 0..3 {
                    xs[d] += q[k][d] * ds;
                    xt[d] += q[k][d] * dt;
                }
            }
            let c = [
                xs[1] * xt[2] - xs[2] * xt[1],
                xs[2] * xt[0] - xs[0] * xt[2],
                xs[0] * xt[1] - xs[1] * xt[0],
            ];
            let ja = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            for k in 0..4 {
                out[k] += ws * wt * ja * n[k];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, GridDistortion};

    #[test]
    fn partition_of_unity_and_zero_gradient_sum() {
        let d = GridDistortion {
            amplitude: 0.3,
            seed: 2,
            ..Default::default()
        };
        let m = build_structured_mesh(&[3, 3, 2], &[1.0, 2.0, 1.0], &d).unwrap();
        let mut vol = 0.0;
        for c in 0..m.num_cells() {
            for q in quadrature(&m, c, &GAUSS2).unwrap() {
                assert!((q.n.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                for dd in 0..3 {
                    assert!(q.grad.iter().map(|g| g[dd]).sum::<f64>().abs() < 1e-12);
                }
                vol += q.w;
            }
        }
        assert!((vol - 2.0).abs() < 1e-12);
    }

    #[test]
    fn face_integrals_sum_to_area() {
        let m = build_structured_mesh(&[2, 2, 2], &[1.0, 3.0, 2.0], &GridDistortion::default())
            .unwrap();
        for f in 0..m.faces().len() {
            let s: f64 = face_shape_integrals(&m, f).iter().sum();
            assert!((s - m.faces()[f].area).abs() < 1e-13);
        }
    }
}
