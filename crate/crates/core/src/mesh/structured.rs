use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::*;
use super::{Cell, Face, Lattice, Mesh, Point, Side};
use crate::{Error, Result};

/// Deterministic perturbations applied to the tensor-product vertex lattice.
///
/// Order of application: random interior perturbation, topography, stretch,
/// shear. Random numbers come from `ChaCha8Rng::seed_from_u64(seed)`: one draw
/// per axis for every vertex (lattice order, x fastest), then two topography
/// phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridDistortion {
    /// Interior vertices move by `amplitude * psi * h_axis`, psi uniform in [-1/2, 1/2).
    pub amplitude: f64,
    pub stretch: [f64; 3],
    pub shear_x_by_z: f64,
    pub shear_y_by_z: f64,
    pub shear_x_by_y: f64,
    /// 3D only: scale heights by a smooth surface varying by up to 10%.
    pub topography: bool,
    pub seed: u64,
}

impl Default for GridDistortion {
    fn default() -> Self {
        Self {
            amplitude: 0.0,
            stretch: [1.0; 3],
            shear_x_by_z: 0.0,
            shear_y_by_z: 0.0,
            shear_x_by_y: 0.0,
            topography: false,
            seed: 0,
        }
    }
}

/// Builds a `cells[0] x cells[1] (x cells[2])` grid on `[0, extents]`.
pub fn build_structured_mesh(
    cells: &[usize],
    extents: &[f64],
    distortion: &GridDistortion,
) -> Result<Mesh> {
    let dim = cells.len();
    if !(dim == 2 || dim == 3) || extents.len() != dim {
        return Err(Error::invalid(format!(
            "need 2 or 3 cell counts with matching extents, got {} and {}",
            cells.len(),
            extents.len()
        )));
    }
    if cells.contains(&0) {
        return Err(Error::invalid("cell counts must be positive"));
    }
    if extents.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::invalid("extents must be positive and finite"));
    }
    if distortion.stretch.iter().any(|&s| !(s > 0.0)) || !distortion.amplitude.is_finite() {
        return Err(Error::invalid("stretch factors must be positive"));
    }
    let mut dims = [1usize; 3];
    dims[..dim].copy_from_slice(cells);
    let cell_lat = Lattice::new(dim, dims);
    let mut ndims = dims;
    for v in ndims.iter_mut().take(dim) {
        *v += 1;
    }
    let node_lat = Lattice::new(dim, ndims);
    let h: Vec<f64> = (0..dim).map(|d| extents[d] / cells[d] as f64).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(distortion.seed);
    let mut nodes: Vec<Point> = Vec::with_capacity(node_lat.len());
    for n in 0..node_lat.len() {
        let ijk = node_lat.ijk(n);
        let mut p = [0.0; 3];
        for d in 0..dim {
            p[d] = ijk[d] as f64 * h[d];
            let psi: f64 = rng.gen::<f64>() - 0.5;
            if ijk[d] > 0 && ijk[d] < cells[d] {
                p[d] += distortion.amplitude * psi * h[d];
            }
        }
        nodes.push(p);
    }
    if dim == 3 && distortion.topography {
        let two_pi = 2.0 * std::f64::consts::PI;
        let phi1 = two_pi * rng.gen::<f64>();
        let phi2 = two_pi * rng.gen::<f64>();
        for p in nodes.iter_mut() {
            let t = 0.1
                * (0.5 * (two_pi * p[0] / extents[0] + phi1).cos()
                    + 0.5 * (2.0 * two_pi * p[1] / extents[1] + phi2).cos());
            p[2] *= 1.0 + t;
        }
    }
    for p in nodes.iter_mut() {
        for d in 0..dim {
            p[d] *= distortion.stretch[d];
        }
        let (x, y, z) = (p[0], p[1], p[2]);
        p[0] = x + distortion.shear_x_by_z * z + distortion.shear_x_by_y * y;
        p[1] = y + distortion.shear_y_by_z * z;
    }

    let mut mesh_cells = Vec::with_capacity(cell_lat.len());
    for c in 0..cell_lat.len() {
        let ijk = cell_lat.ijk(c);
        let nv = 1 << dim;
        let vertices: Vec<usize> = (0..nv)
            .map(|b| {
                node_lat.index([
                    ijk[0] + (b & 1),
                    ijk[1] + ((b >> 1) & 1),
                    ijk[2] + ((b >> 2) & 1),
                ])
            })
            .collect();
        let (volume, centroid, jmin) = if dim == 2 {
            let q = [
                nodes[vertices[0]],
                nodes[vertices[1]],
                nodes[vertices[2]],
                nodes[vertices[3]],
            ];
            let (a, c) = quad_area_centroid(&q);
            (a, c, quad_min_corner_jacobian(&q))
        } else {
            let mut q = [[0.0; 3]; 8];
            for (k, &v) in vertices.iter().enumerate() {
                q[k] = nodes[v];
            }
            let (v, c) = hex_volume_centroid(&q);
            (v, c, hex_min_corner_jacobian(&q))
        };
        if !(jmin > 0.0) || !(volume > 0.0) {
            return Err(Error::InvertedCell { cell: c });
        }
        mesh_cells.push(Cell {
            vertices,
            centroid,
            volume,
        });
    }

    let mut faces = Vec::new();
    let mut cell_faces = vec![Vec::with_capacity(2 * dim); cell_lat.len()];
    for axis in 0..dim {
        let mut fdims = dims;
        fdims[axis] += 1;
        let flat = Lattice::new(dim, fdims);
        for f in 0..flat.len() {
            let ijk = flat.ijk(f);
            let i = ijk[axis];
            let lower = (i > 0).then(|| {
                let mut c = ijk;
                c[axis] -= 1;
                cell_lat.index(c)
            });
            let upper = (i < dims[axis]).then(|| cell_lat.index(ijk));
            let (owner, neighbor, side) = match (lower, upper) {
                (Some(l), Some(u)) => (l, Some(u), None),
                (Some(l), None) => (l, None, Some(Side::from_axis(axis, false))),
                (None, Some(u)) => (u, None, Some(Side::from_axis(axis, true))),
                (None, None) => unreachable!(),
            };
            let mut vertices = face_vertices(dim, axis, ijk, &node_lat);
            if side.is_some_and(|s| s.is_min()) {
                vertices.reverse();
            }
            let (area_vec, centroid) = face_geometry(dim, &vertices, &nodes);
            let area = norm(area_vec);
            if !(area > 0.0) {
                return Err(Error::DegenerateGeometry(format!(
                    "face {} has zero area",
                    faces.len()
                )));
            }
            let id = faces.len();
            cell_faces[owner].push(id);
            if let Some(n) = neighbor {
                cell_faces[n].push(id);
            }
            faces.push(Face {
                owner,
                neighbor,
                vertices,
                area,
                normal: scale(area_vec, 1.0 / area),
                centroid,
                side,
            });
        }
    }
    Ok(Mesh {
        dim,
        dims,
        nodes,
        cells: mesh_cells,
        faces,
        cell_faces,
    })
}

// Cyclic vertex order whose right-hand normal points along +axis.
fn face_vertices(dim: usize, axis: usize, ijk: [usize; 3], nl: &Lattice) -> Vec<usize> {
    let at = |offs: [(usize, usize); 2]| {
        let mut p = ijk;
        for (a, o) in offs {
            p[a] += o;
        }
        nl.index(p)
    };
    if dim == 2 {
        return match axis {
            0 => vec![at([(1, 0), (0, 0)]), at([(1, 1), (0, 0)])],
            _ => vec![at([(0, 1), (1, 0)]), at([(0, 0), (1, 0)])],
        };
    }
    let (a1, a2) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    vec![
        at([(a1, 0), (a2, 0)]),
        at([(a1, 1), (a2, 0)]),
        at([(a1, 1), (a2, 1)]),
        at([(a1, 0), (a2, 1)]),
    ]
}

fn face_geometry(dim: usize, v: &[usize], nodes: &[Point]) -> (Point, Point) {
    if dim == 2 {
        let (p, q) = (nodes[v[0]], nodes[v[1]]);
        let t = sub(q, p);
        return (
            [t[1], -t[0], 0.0],
            scale([p[0] + q[0], p[1] + q[1], 0.0], 0.5),
        );
    }
    let q = [nodes[v[0]], nodes[v[1]], nodes[v[2]], nodes[v[3]]];
    let mut c = [0.0; 3];
    for p in &q {
        for d in 0..3 {
            c[d] += 0.25 * p[d];
        }
    }
    (quad_area_vector(&q), c)
}
