//! Structured quadrilateral / hexahedral meshes with full face geometry,
//! coarse partitions and the support regions that confine basis smoothing.

mod geometry;
mod partition;
mod structured;
mod support;
pub mod vtk;

pub use partition::{
    partition_agglomerate, partition_structured, partition_structured_nodes, CoarsePartition,
    Lattice, NodeCoarsening, PartitionLayout,
};
pub use structured::{build_structured_mesh, GridDistortion};
pub use support::build_support_regions;

use serde::{Deserialize, Serialize};

pub type Point = [f64; 3];

/// Logical side of a structured box domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl Side {
    pub fn axis(self) -> usize {
        match self {
            Side::XMin | Side::XMax => 0,
            Side::YMin | Side::YMax => 1,
            Side::ZMin | Side::ZMax => 2,
        }
    }

    pub fn is_min(self) -> bool {
        matches!(self, Side::XMin | Side::YMin | Side::ZMin)
    }

    pub(crate) fn from_axis(axis: usize, min: bool) -> Side {
        match (axis, min) {
            (0, true) => Side::XMin,
            (0, false) => Side::XMax,
            (1, true) => Side::YMin,
            (1, false) => Side::YMax,
            (2, true) => Side::ZMin,
            _ => Side::ZMax,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    /// Vertices in tensor order: vertex `b` sits at offset `(b & 1, (b >> 1) & 1, (b >> 2) & 1)`.
    pub vertices: Vec<usize>,
    pub centroid: Point,
    /// Area in 2D, volume in 3D.
    pub volume: f64,
}

#[derive(Clone, Debug)]
pub struct Face {
    /// Cell the normal points away from.
    pub owner: usize,
    /// Cell the normal points into; `None` on the domain boundary.
    pub neighbor: Option<usize>,
    /// Vertices in cyclic order, oriented consistently with `normal`.
    pub vertices: Vec<usize>,
    /// Length in 2D, area in 3D.
    pub area: f64,
    pub normal: Point,
    pub centroid: Point,
    pub side: Option<Side>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.neighbor.is_none()
    }

    pub fn area_vector(&self) -> Point {
        [
            self.normal[0] * self.area,
            self.normal[1] * self.area,
            self.normal[2] * self.area,
        ]
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    dim: usize,
    dims: [usize; 3],
    nodes: Vec<Point>,
    cells: Vec<Cell>,
    faces: Vec<Face>,
    cell_faces: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cells per axis; unused axes report 1.
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn cell_faces(&self, cell: usize) -> &[usize] {
        &self.cell_faces[cell]
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Vertex count per axis.
    pub fn node_dims(&self) -> [usize; 3] {
        let mut d = self.dims;
        for v in d.iter_mut().take(self.dim) {
            *v += 1;
        }
        d
    }

    pub fn cell_lattice(&self) -> Lattice {
        Lattice::new(self.dim, self.dims)
    }

    pub fn node_lattice(&self) -> Lattice {
        Lattice::new(self.dim, self.node_dims())
    }

    /// Cells sharing a face with `cell`, in face order.
    pub fn face_neighbors(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        self.cell_faces[cell].iter().filter_map(move |&f| {
            let face = &self.faces[f];
            match face.neighbor {
                Some(n) if face.owner == cell => Some(n),
                Some(_) => Some(face.owner),
                None => None,
            }
        })
    }

    /// Cells sharing at least one vertex with `cell` (excluding itself).
    pub fn vertex_neighbors(&self, cell: usize) -> Vec<usize> {
        let node_cells = self.node_cells();
        let mut out: Vec<usize> = self.cells[cell]
            .vertices
            .iter()
            .flat_map(|&v| node_cells[v].iter().copied())
            .filter(|&c| c != cell)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// For each node, the cells that contain it (ascending).
    pub fn node_cells(&self) -> Vec<Vec<usize>> {
        let mut nc = vec![Vec::new(); self.nodes.len()];
        for (c, cell) in self.cells.iter().enumerate() {
            for &v in &cell.vertices {
                nc[v].push(c);
            }
        }
        nc
    }

    /// For each node, the faces that contain it (ascending).
    pub fn node_faces(&self) -> Vec<Vec<usize>> {
        let mut nf = vec![Vec::new(); self.nodes.len()];
        for (f, face) in self.faces.iter().enumerate() {
            for &v in &face.vertices {
                nf[v].push(f);
            }
        }
        nf
    }

    /// Boundary faces on a logical side.
    pub fn side_faces(&self, side: Side) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(move |&f| self.faces[f].side == Some(side))
    }

    /// Nodes on a logical side of the structured box.
    pub fn side_nodes(&self, side: Side) -> Vec<usize> {
        let lat = self.node_lattice();
        let axis = side.axis();
        let target = if side.is_min() { 0 } else { lat.dims[axis] - 1 };
        (0..lat.len())
            .filter(|&n| lat.ijk(n)[axis] == target)
            .collect()
    }

    pub fn translate(&mut self, offset: Point) {
        for p in self.nodes.iter_mut() {
            for d in 0..3 {
                p[d] += offset[d];
            }
        }
        for c in self.cells.iter_mut() {
            for d in 0..3 {
                c.centroid[d] += offset[d];
            }
        }
        for f in self.faces.iter_mut() {
            for d in 0..3 {
                f.centroid[d] += offset[d];
            }
        }
    }

    pub fn total_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.volume).sum()
    }
}
