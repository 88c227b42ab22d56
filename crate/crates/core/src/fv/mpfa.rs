//! MPFA O-method. One interaction region per mesh vertex; continuity points
//! sit at face centroids and each sub-cell carries a linear pressure.

use nalgebra::DMatrix;

use super::{
    assemble_from_stencils, DiffusionField, FaceCondition, FlowBoundary, FlowSystem, FluxStencil,
};
use crate::mesh::{Mesh, Point};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Interior,
    Neumann(f64),
    Dirichlet(f64),
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn mid(a: Point, b: Point) -> Point {
    [
        0.5 * (a[0] + b[0]),
        0.5 * (a[1] + b[1]),
        0.5 * (a[2] + b[2]),
    ]
}

fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Area vector of the part of `face` attached to `vertex`, oriented like the face normal.
fn subface_vector(mesh: &Mesh, face: usize, vertex: usize) -> Point {
    let f = &mesh.faces()[face];
    if mesh.dim() == 2 {
        let a = f.area_vector();
        return [0.5 * a[0], 0.5 * a[1], 0.0];
    }
    let nodes = mesh.nodes();
    let k = f.vertices.len();
    let i = f
        .vertices
        .iter()
        .position(|&v| v == vertex)
        .expect("vertex on face");
    let v = nodes[vertex];
    let next = mid(v, nodes[f.vertices[(i + 1) % k]]);
    let prev = mid(v, nodes[f.vertices[(i + k - 1) % k]]);
    let c = cross(sub(f.centroid, v), sub(prev, next));
    [0.5 * c[0], 0.5 * c[1], 0.5 * c[2]]
}

pub fn assemble_mpfa_o(
    mesh: &Mesh,
    field: &DiffusionField,
    bc: &FlowBoundary,
) -> Result<FlowSystem> {
    field.validate(mesh.dim())?;
    bc.validate(mesh)?;
    let dim = mesh.dim();
    let node_cells = mesh.node_cells();
    let node_faces = mesh.node_faces();
    let mut acc: Vec<Vec<(usize, f64)>> = vec![Vec::new(); mesh.faces().len()];
    let mut offsets = vec![0.0; mesh.faces().len()];
    let mut has_stencil = vec![false; mesh.faces().len()];

    for v in 0..mesh.num_nodes() {
        let cells = &node_cells[v];
        let faces = &node_faces[v];
        let kinds: Vec<Kind> = faces
            .iter()
            .map(|&f| match bc.faces[f] {
                None => Kind::Interior,
                Some(FaceCondition::Neumann(g)) => Kind::Neumann(g),
                Some(FaceCondition::Dirichlet(g)) => Kind::Dirichlet(g),
            })
            .collect();
        // unknown index per local face, or None for Dirichlet
        let mut unknown = vec![None; faces.len()];
        let mut m = 0;
        for (l, k) in kinds.iter().enumerate() {
            if !matches!(k, Kind::Dirichlet(_)) {
                unknown[l] = Some(m);
                m += 1;
            }
        }
        let nc = cells.len();
        let nf = faces.len();
        let sub_vec: Vec<Point> = faces.iter().map(|&f| subface_vector(mesh, f, v)).collect();

        // per cell: local faces and T_K = -S Λ X^{-1}
        let mut cell_faces_loc: Vec<Vec<usize>> = Vec::with_capacity(nc);
        let mut tmats: Vec<DMatrix<f64>> = Vec::with_capacity(nc);
        for &c in cells {
            let lf: Vec<usize> = mesh
                .cell_faces(c)
                .iter()
                .filter_map(|f| faces.binary_search(f).ok())
                .collect();
            if lf.len() != dim {
                return Err(Error::SingularInteraction { vertex: v });
            }
            let xc = mesh.cells()[c].centroid;
            let x = DMatrix::from_fn(dim, dim, |r, k| {
                sub(mesh.faces()[faces[lf[r]]].centroid, xc)[k]
            });
            let g = x
                .try_inverse()
                .ok_or(Error::SingularInteraction { vertex: v })?;
            let lam = &field.tensors[c];
            let s = DMatrix::from_fn(dim, dim, |r, k| {
                (0..dim).map(|q| sub_vec[lf[r]][q] * lam[q][k]).sum::<f64>()
            });
            tmats.push(-(s * g));
            cell_faces_loc.push(lf);
        }

        // A_u u + A_p p + A_d g = b, one row per unknown half-face
        let mut au = DMatrix::<f64>::zeros(m, m);
        let mut ap = DMatrix::<f64>::zeros(m, nc);
        let mut b = DMatrix::<f64>::zeros(m, 1);
        let mut bd = DMatrix::<f64>::zeros(m, 1); // A_d g collapsed, since g is known
        for (lc, lf) in cell_faces_loc.iter().enumerate() {
            let c = cells[lc];
            let t = &tmats[lc];
            for (r, &fr) in lf.iter().enumerate() {
                let Some(row) = unknown[fr] else { continue };
                let face = &mesh.faces()[faces[fr]];
                let sign = if face.owner == c { 1.0 } else { -1.0 };
                for (k, &fk) in lf.iter().enumerate() {
                    let coef = sign * t[(r, k)];
                    match (unknown[fk], kinds[fk]) {
                        (Some(col), _) => au[(row, col)] += coef,
                        (None, Kind::Dirichlet(g)) => bd[(row, 0)] += coef * g,
                        _ => unreachable!(),
                    }
                    ap[(row, lc)] -= coef;
                }
            }
        }
        for (l, k) in kinds.iter().enumerate() {
            if let (Some(row), Kind::Neumann(g)) = (unknown[l], k) {
                let s = sub_vec[l];
                b[(row, 0)] = g * (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
            }
        }
        // u = U_p p + u_0
        let (up, u0) = if m > 0 {
            let lu = au.lu();
            let mut rhs = DMatrix::<f64>::zeros(m, nc + 1);
            for r in 0..m {
                for c in 0..nc {
                    rhs[(r, c)] = -ap[(r, c)];
                }
                rhs[(r, nc)] = b[(r, 0)] - bd[(r, 0)];
            }
            let sol = lu
                .solve(&rhs)
                .ok_or(Error::SingularInteraction { vertex: v })?;
            if sol.iter().any(|x| !x.is_finite()) {
                return Err(Error::SingularInteraction { vertex: v });
            }
            (sol.columns(0, nc).into_owned(), sol.column(nc).into_owned())
        } else {
            (
                DMatrix::zeros(0, nc),
                DMatrix::zeros(0, 1).column(0).into_owned(),
            )
        };

        // half-face fluxes from the owner side, for every non-Neumann face
        for l in 0..nf {
            if matches!(kinds[l], Kind::Neumann(_)) {
                continue;
            }
            let f = faces[l];
            let owner = mesh.faces()[f].owner;
            let lc = cells.binary_search(&owner).expect("owner touches vertex");
            let lf = &cell_faces_loc[lc];
            let r = lf.iter().position(|&x| x == l).unwrap();
            let t = &tmats[lc];
            let mut coeffs = vec![0.0; nc];
            let mut off = 0.0;
            for (k, &fk) in lf.iter().enumerate() {
                let tk = t[(r, k)];
                coeffs[lc] -= tk;
                match (unknown[fk], kinds[fk]) {
                    (Some(u), _) => {
                        for c in 0..nc {
                            coeffs[c] += tk * up[(u, c)];
                        }
                        off += tk * u0[u];
                    }
                    (None, Kind::Dirichlet(g)) => off += tk * g,
                    _ => unreachable!(),
                }
            }
            for (c, &x) in coeffs.iter().enumerate() {
                if x != 0.0 {
                    acc[f].push((cells[c], x));
                }
            }
            offsets[f] += off;
            has_stencil[f] = true;
        }
    }

    let mut stencils = Vec::new();
    for (f, mut entries) in acc.into_iter().enumerate() {
        if !has_stencil[f] {
            continue;
        }
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (c, x) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += x,
                _ => merged.push((c, x)),
            }
        }
        stencils.push(FluxStencil {
            face: f,
            cells: merged,
            offset: offsets[f],
        });
    }
    assemble_from_stencils(mesh, bc, stencils)
}
