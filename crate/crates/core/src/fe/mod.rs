//! Q1 finite elements for linear elastostatics with direction-major DOFs
//! (`dof = direction * n_nodes + node`).

mod element;
mod profile;

pub use profile::{layered_young, young_profile, DepthProfile};

use crate::mesh::{Mesh, Side};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

pub(crate) use element::{face_shape_integrals, quadrature, GAUSS2};

/// One bar in pascal.
pub const BAR: f64 = 1e5;

#[derive(Clone, Debug)]
pub struct ElasticMaterial {
    /// Young's modulus per cell, Pa.
    pub young: Vec<f64>,
    /// Poisson ratio per cell.
    pub poisson: Vec<f64>,
}

impl ElasticMaterial {
    pub fn uniform(n: usize, young: f64, poisson: f64) -> Self {
        Self {
            young: vec![young; n],
            poisson: vec![poisson; n],
        }
    }

    /// `(λ, G)` of cell `c`.
    pub fn lame(&self, c: usize) -> (f64, f64) {
        let (e, nu) = (self.young[c], self.poisson[c]);
        (
            e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
            e / (2.0 * (1.0 + nu)),
        )
    }

    pub fn validate(&self, ncells: usize) -> Result<()> {
        if self.young.len() != ncells || self.poisson.len() != ncells {
            return Err(Error::dims("material arrays do not match the cell count"));
        }
        for c in 0..ncells {
            if !(self.young[c] > 0.0) || !self.young[c].is_finite() {
                return Err(Error::invalid(format!(
                    "cell {c}: Young's modulus must be positive"
                )));
            }
            if !(self.poisson[c] > -1.0 && self.poisson[c] < 0.5) {
                return Err(Error::invalid(format!(
                    "cell {c}: Poisson ratio outside (-1, 0.5)"
                )));
            }
        }
        Ok(())
    }
}

/// Displacement constraints per DOF, face tractions and cell body forces.
#[derive(Clone, Debug)]
pub struct ElasticBoundary {
    pub dirichlet: Vec<Option<f64>>,
    /// `(face, traction vector in Pa)`.
    pub tractions: Vec<(usize, [f64; 3])>,
    /// Per cell, N/m³.
    pub body_force: Vec<[f64; 3]>,
}

impl ElasticBoundary {
    pub fn free(mesh: &Mesh) -> Self {
        Self {
            dirichlet: vec![None; mesh.dim() * mesh.num_nodes()],
            tractions: vec![],
            body_force: vec![[0.0; 3]; mesh.num_cells()],
        }
    }

    /// Prescribes displacement component `direction` on every node of `side`.
    pub fn fix_side(&mut self, mesh: &Mesh, side: Side, direction: usize, value: f64) -> &mut Self {
        let n = mesh.num_nodes();
        for node in mesh.side_nodes(side) {
            self.dirichlet[direction * n + node] = Some(value);
        }
        self
    }

    pub fn traction_side(&mut self, mesh: &Mesh, side: Side, t: [f64; 3]) -> &mut Self {
        self.tractions.extend(mesh.side_faces(side).map(|f| (f, t)));
        self
    }
}

#[derive(Clone, Debug)]
pub struct ElasticSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// Stiffness matrix and load vector; Dirichlet constraints are not applied.
pub fn assemble_elasticity(
    mesh: &Mesh,
    material: &ElasticMaterial,
    bc: &ElasticBoundary,
) -> Result<ElasticSystem> {
    let dim = mesh.dim();
    let nn = mesh.num_nodes();
    material.validate(mesh.num_cells())?;
    if bc.dirichlet.len() != dim * nn || bc.body_force.len() != mesh.num_cells() {
        return Err(Error::dims("boundary data does not match the mesh"));
    }
    let nv = 1 << dim;
    let mut trip = Vec::with_capacity(mesh.num_cells() * (nv * dim) * (nv * dim));
    let mut rhs = vec![0.0; dim * nn];
    let mut ke = vec![0.0; (nv * dim) * (nv * dim)];
    for c in 0..mesh.num_cells() {
        let (lam, g) = material.lame(c);
        let verts = &mesh.cells()[c].vertices;
        ke.iter_mut().for_each(|x| *x = 0.0);
        let ld = nv * dim;
        for q in quadrature(mesh, c, &GAUSS2)? {
            // upper triangle only; mirrored below so the element matrix is bitwise symmetric
            for l in 0..dim {
                for a in 0..nv {
                    let ga = q.grad[a];
                    for m in l..dim {
                        let b0 = if m == l { a } else { 0 };
                        for b in b0..nv {
                            let gb = q.grad[b];
                            let mut v = lam * ga[l] * gb[m] + g * ga[m] * gb[l];
                            if l == m {
                                v += g * (0..dim).map(|k| ga[k] * gb[k]).sum::<f64>();
                            }
                            ke[(l * nv + a) * ld + m * nv + b] += q.w * v;
                        }
                    }
                }
            }
            for a in 0..nv {
                for l in 0..dim {
                    rhs[l * nn + verts[a]] += q.w * q.n[a] * bc.body_force[c][l];
                }
            }
        }
        for r in 0..ld {
            for k in 0..r {
                ke[r * ld + k] = ke[k * ld + r];
            }
        }
        for l in 0..dim {
            for a in 0..nv {
                let row = l * nn + verts[a];
                for m in 0..dim {
                    for b in 0..nv {
                        trip.push((row, m * nn + verts[b], ke[(l * nv + a) * ld + m * nv + b]));
                    }
                }
            }
        }
    }
    for &(f, t) in &bc.tractions {
        let w = face_shape_integrals(mesh, f);
        for (k, &v) in mesh.faces()[f].vertices.iter().enumerate() {
            for l in 0..dim {
                rhs[l * nn + v] += w[k] * t[l];
            }
        }
    }
    let n = dim * nn;
    Ok(ElasticSystem {
        matrix: CsrMatrix::from_triplets(n, n, &trip)?,
        rhs,
    })
}

/// Eliminates constrained DOFs while keeping the matrix symmetric:
/// `f -= A[:,k] g`, row and column `k` zeroed, `A_kk = 1`, `f_k = g`.
pub fn apply_dirichlet_symmetric(
    a: &CsrMatrix,
    f: &[f64],
    constraints: &[Option<f64>],
) -> Result<(CsrMatrix, Vec<f64>)> {
    let n = a.nrows();
    if a.ncols() != n || f.len() != n || constraints.len() != n {
        return Err(Error::dims("system and constraint sizes differ"));
    }
    let g: Vec<f64> = constraints.iter().map(|c| c.unwrap_or(0.0)).collect();
    let fixed: Vec<bool> = constraints.iter().map(|c| c.is_some()).collect();
    let mut rhs = f.to_vec();
    let ag = a.mul_vec(&g);
    for i in 0..n {
        rhs[i] = if fixed[i] { g[i] } else { rhs[i] - ag[i] };
    }
    let mut trip: Vec<(usize, usize, f64)> = a
        .triplets()
        .filter(|&(i, j, _)| !fixed[i] && !fixed[j])
        .collect();
    trip.extend((0..n).filter(|&i| fixed[i]).map(|i| (i, i, 1.0)));
    Ok((CsrMatrix::from_triplets(n, n, &trip)?, rhs))
}

/// `block-diag(A_xx, A_yy[, A_zz])` under direction-major ordering.
pub fn sdc_blocks(a: &CsrMatrix, n_sd: usize) -> Result<CsrMatrix> {
    let n = a.nrows();
    if n_sd == 0 || !n.is_multiple_of(n_sd) || a.ncols() != n {
        return Err(Error::dims(format!(
            "{n}x{} matrix cannot hold {n_sd} direction-major blocks",
            a.ncols()
        )));
    }
    let nb = n / n_sd;
    Ok(a.filter(|i, j, _| i / nb == j / nb))
}

/// `A_lm` blocks of a direction-major matrix.
pub fn block_view(a: &CsrMatrix, n_sd: usize) -> Result<Vec<Vec<CsrMatrix>>> {
    let n = a.nrows();
    if n_sd == 0 || !n.is_multiple_of(n_sd) || a.ncols() != n {
        return Err(Error::dims("matrix is not direction-major"));
    }
    let nb = n / n_sd;
    Ok((0..n_sd)
        .map(|l| {
            (0..n_sd)
                .map(|m| a.block(l * nb..(l + 1) * nb, m * nb..(m + 1) * nb))
                .collect()
        })
        .collect())
}

/// Equivalent nodal forces of a pressure drop `dp_bar` acting as an
/// isotropic eigenstress on the zone: `f = -Δp ∫ div η`.
pub fn reservoir_load(mesh: &Mesh, zone: &[usize], dp_bar: f64) -> Result<Vec<f64>> {
    if zone.is_empty() {
        return Err(Error::invalid("reservoir zone is empty"));
    }
    let dim = mesh.dim();
    let nn = mesh.num_nodes();
    let dp = dp_bar * BAR;
    let mut f = vec![0.0; dim * nn];
    for &c in zone {
        if c >= mesh.num_cells() {
            return Err(Error::invalid(format!("zone cell {c} out of range")));
        }
        let verts = &mesh.cells()[c].vertices;
        for q in quadrature(mesh, c, &GAUSS2)? {
            for (a, &v) in verts.iter().enumerate() {
                for l in 0..dim {
                    f[l * nn + v] -= dp * q.w * q.grad[a][l];
                }
            }
        }
    }
    Ok(f)
}
