//! Cell-centred finite volume discretization of `-div(Λ grad p) = q` with
//! two-point (TPFA) and multipoint O-method (MPFA-O) fluxes.

mod field;
mod mpfa;
mod tpfa;

pub use field::{diag, layered_lognormal, DiffusionField, Units, MD_PER_CP};
pub use mpfa::assemble_mpfa_o;
pub use tpfa::{assemble_tpfa, tpfa_stencils};

use serde::{Deserialize, Serialize};

use crate::mesh::{Mesh, Point, Side};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceCondition {
    /// Prescribed pressure.
    Dirichlet(f64),
    /// Prescribed outward flux per unit area.
    Neumann(f64),
}

/// Boundary data for every boundary face plus a per-cell source density.
#[derive(Clone, Debug)]
pub struct FlowBoundary {
    /// Indexed by face; `None` on interior faces.
    pub faces: Vec<Option<FaceCondition>>,
    pub source: Vec<f64>,
}

impl FlowBoundary {
    /// Homogeneous Neumann everywhere, no sources.
    pub fn no_flow(mesh: &Mesh) -> Self {
        let faces = mesh
            .faces()
            .iter()
            .map(|f| f.is_boundary().then_some(FaceCondition::Neumann(0.0)))
            .collect();
        Self {
            faces,
            source: vec![0.0; mesh.num_cells()],
        }
    }

    pub fn set_side(&mut self, mesh: &Mesh, side: Side, cond: FaceCondition) -> &mut Self {
        for f in mesh.side_faces(side) {
            self.faces[f] = Some(cond);
        }
        self
    }

    /// Dirichlet data evaluated at face centroids.
    pub fn set_side_dirichlet_with(
        &mut self,
        mesh: &Mesh,
        side: Side,
        g: impl Fn(Point) -> f64,
    ) -> &mut Self {
        for f in mesh.side_faces(side) {
            self.faces[f] = Some(FaceCondition::Dirichlet(g(mesh.faces()[f].centroid)));
        }
        self
    }

    pub fn has_dirichlet(&self) -> bool {
        self.faces
            .iter()
            .any(|c| matches!(c, Some(FaceCondition::Dirichlet(_))))
    }

    pub(crate) fn validate(&self, mesh: &Mesh) -> Result<()> {
        if self.faces.len() != mesh.faces().len() || self.source.len() != mesh.num_cells() {
            return Err(Error::dims("boundary data does not match the mesh"));
        }
        for (f, face) in mesh.faces().iter().enumerate() {
            if face.is_boundary() != self.faces[f].is_some() {
                return Err(Error::invalid(format!(
                    "face {f}: boundary condition set on wrong face type"
                )));
            }
        }
        Ok(())
    }
}

/// Linear flux through one face, positive along the face normal:
/// `F = sum_k coeff_k * p_{cell_k} + offset`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FluxStencil {
    pub face: usize,
    pub cells: Vec<(usize, f64)>,
    /// Contribution of Dirichlet (and coupled Neumann) data.
    pub offset: f64,
}

impl FluxStencil {
    pub fn eval(&self, p: &[f64]) -> f64 {
        self.cells.iter().map(|&(c, t)| t * p[c]).sum::<f64>() + self.offset
    }
}

/// Assembled pressure system together with the stencils that produced it.
#[derive(Clone, Debug)]
pub struct FlowSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub stencils: Vec<FluxStencil>,
}

/// Per-face fluxes `ŵ = ẘ(p) + w̄`; faces without a stencil (Neumann) keep
/// their prescribed flux `g_N * area`.
pub fn flux_reconstruct(
    mesh: &Mesh,
    bc: &FlowBoundary,
    stencils: &[FluxStencil],
    p: &[f64],
) -> Vec<f64> {
    let mut out: Vec<f64> = mesh
        .faces()
        .iter()
        .zip(&bc.faces)
        .map(|(f, c)| match c {
            Some(FaceCondition::Neumann(g)) => g * f.area,
            _ => 0.0,
        })
        .collect();
    for s in stencils {
        out[s.face] = s.eval(p);
    }
    out
}

/// Net outward flux minus source for every cell.
pub fn cell_imbalance(mesh: &Mesh, bc: &FlowBoundary, fluxes: &[f64]) -> Vec<f64> {
    let mut r: Vec<f64> = mesh
        .cells()
        .iter()
        .zip(&bc.source)
        .map(|(c, q)| -q * c.volume)
        .collect();
    for (f, face) in mesh.faces().iter().enumerate() {
        r[face.owner] += fluxes[f];
        if let Some(n) = face.neighbor {
            r[n] -= fluxes[f];
        }
    }
    r
}

// Sums signed stencils into cell equations: sum of outward fluxes = q V.
fn assemble_from_stencils(
    mesh: &Mesh,
    bc: &FlowBoundary,
    stencils: Vec<FluxStencil>,
) -> Result<FlowSystem> {
    let n = mesh.num_cells();
    let mut rhs: Vec<f64> = mesh
        .cells()
        .iter()
        .zip(&bc.source)
        .map(|(c, q)| q * c.volume)
        .collect();
    for (f, face) in mesh.faces().iter().enumerate() {
        if let Some(FaceCondition::Neumann(g)) = bc.faces[f] {
            rhs[face.owner] -= g * face.area;
        }
    }
    let mut trip = Vec::with_capacity(stencils.iter().map(|s| 2 * s.cells.len()).sum());
    for s in &stencils {
        let face = &mesh.faces()[s.face];
        let sides = [(face.owner, 1.0)]
            .into_iter()
            .chain(face.neighbor.map(|nb| (nb, -1.0)));
        for (row, sign) in sides {
            for &(c, t) in &s.cells {
                trip.push((row, c, sign * t));
            }
            rhs[row] -= sign * s.offset;
        }
    }
    Ok(FlowSystem {
        matrix: CsrMatrix::from_triplets(n, n, &trip)?,
        rhs,
        stencils,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, GridDistortion};

    #[test]
    fn boundary_validation() {
        let m = build_structured_mesh(&[2, 2], &[1.0, 1.0], &GridDistortion::default()).unwrap();
        let mut bc = FlowBoundary::no_flow(&m);
        assert!(bc.validate(&m).is_ok());
        let interior = m.faces().iter().position(|f| !f.is_boundary()).unwrap();
        bc.faces[interior] = Some(FaceCondition::Neumann(0.0));
        assert!(bc.validate(&m).is_err());
    }

    #[test]
    fn stencil_eval() {
        let s = FluxStencil {
            face: 0,
            cells: vec![(0, 2.0), (1, -2.0)],
            offset: 0.5,
        };
        assert_eq!(s.eval(&[1.0, 1.0]), 0.5);
    }
}
