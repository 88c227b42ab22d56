use super::{
    assemble_from_stencils, DiffusionField, FaceCondition, FlowBoundary, FlowSystem, FluxStencil,
};
use crate::mesh::{Mesh, Point};
use crate::{Error, Result};

fn half_transmissibility(
    area_vec: Point,
    lambda: &[[f64; 3]; 3],
    d: Point,
    face: usize,
) -> Result<f64> {
    let d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    if !(d2 > 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "face {face}: centroid-to-face vector has zero length"
        )));
    }
    let mut ld = [0.0; 3];
    for i in 0..3 {
        ld[i] = lambda[i][0] * d[0] + lambda[i][1] * d[1] + lambda[i][2] * d[2];
    }
    Ok((area_vec[0] * ld[0] + area_vec[1] * ld[1] + area_vec[2] * ld[2]) / d2)
}

/// Two-point stencils for interior and Dirichlet faces.
pub fn tpfa_stencils(
    mesh: &Mesh,
    field: &DiffusionField,
    bc: &FlowBoundary,
) -> Result<Vec<FluxStencil>> {
    field.validate(mesh.dim())?;
    bc.validate(mesh)?;
    let mut out = Vec::new();
    for (f, face) in mesh.faces().iter().enumerate() {
        let a = face.area_vector();
        let own = face.owner;
        let dk = sub(face.centroid, mesh.cells()[own].centroid);
        let tk = half_transmissibility(a, &field.tensors[own], dk, f)?;
        match (face.neighbor, bc.faces[f]) {
            (Some(nb), _) => {
                let dl = sub(face.centroid, mesh.cells()[nb].centroid);
                let tl = half_transmissibility([-a[0], -a[1], -a[2]], &field.tensors[nb], dl, f)?;
                let t = tk * tl / (tk + tl);
                out.push(FluxStencil {
                    face: f,
                    cells: vec![(own, t), (nb, -t)],
                    offset: 0.0,
                });
            }
            (None, Some(FaceCondition::Dirichlet(g))) => {
                out.push(FluxStencil {
                    face: f,
                    cells: vec![(own, tk)],
                    offset: -tk * g,
                });
            }
            (None, _) => {}
        }
    }
    Ok(out)
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn assemble_tpfa(mesh: &Mesh, field: &DiffusionField, bc: &FlowBoundary) -> Result<FlowSystem> {
    let stencils = tpfa_stencils(mesh, field, bc)?;
    assemble_from_stencils(mesh, bc, stencils)
}
