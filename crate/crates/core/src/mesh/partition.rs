use std::collections::VecDeque;

use super::geometry::{dot, sub};
use super::Mesh;
use crate::{Error, Result};

/// Row-major (x fastest) index space over a box of points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub dim: usize,
    pub dims: [usize; 3],
}

impl Lattice {
    pub fn new(dim: usize, dims: [usize; 3]) -> Self {
        Self { dim, dims }
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.dims[0] * (ijk[1] + self.dims[1] * ijk[2])
    }

    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let r = idx / self.dims[0];
        [i, r % self.dims[1], r / self.dims[1]]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PartitionLayout {
    /// Logically Cartesian blocks over a lattice of fine points.
    Structured {
        lattice: Lattice,
        blocks: [usize; 3],
    },
    /// Arbitrary connected blocks; `adjacency` is the fine-point graph.
    Graph { adjacency: Vec<Vec<usize>> },
}

/// Fine points (cells or nodes) grouped into coarse blocks, each with one
/// coarse node, plus the support sets that confine its basis function.
#[derive(Clone, Debug)]
pub struct CoarsePartition {
    pub block_of: Vec<usize>,
    pub coarse_nodes: Vec<usize>,
    pub layout: PartitionLayout,
    /// Per basis, sorted. Empty until [`super::build_support_regions`] runs.
    pub supports: Vec<Vec<usize>>,
    /// Per basis, the hull cells enclosing its support (sorted).
    pub hulls: Vec<Vec<usize>>,
    /// Per basis, support cells lying on the hull of another basis (sorted).
    pub edges: Vec<Vec<usize>>,
    /// Union of all hulls.
    pub boundary: Vec<bool>,
}

impl CoarsePartition {
    pub(crate) fn new(
        block_of: Vec<usize>,
        coarse_nodes: Vec<usize>,
        layout: PartitionLayout,
    ) -> Self {
        Self {
            block_of,
            coarse_nodes,
            layout,
            supports: vec![],
            hulls: vec![],
            edges: vec![],
            boundary: vec![],
        }
    }

    pub fn num_fine(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.coarse_nodes.len()
    }

    pub fn has_supports(&self) -> bool {
        self.supports.len() == self.num_blocks()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut b = vec![Vec::new(); self.num_blocks()];
        for (i, &k) in self.block_of.iter().enumerate() {
            b[k].push(i);
        }
        b
    }

    /// Fine points lying on a support edge of any basis.
    pub fn edge_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.num_fine()];
        for e in &self.edges {
            for &c in e {
                m[c] = true;
            }
        }
        m
    }

    /// Replicates a scalar partition over `ncomp` direction-major components.
    pub fn replicate(&self, ncomp: usize) -> CoarsePartition {
        let n = self.num_fine();
        let nb = self.num_blocks();
        let shift = |v: &Vec<usize>, k: usize| v.iter().map(|&c| c + k * n).collect::<Vec<_>>();
        let mut out = CoarsePartition::new(
            (0..ncomp)
                .flat_map(|k| self.block_of.iter().map(move |&b| b + k * nb))
                .collect(),
            (0..ncomp)
                .flat_map(|k| self.coarse_nodes.iter().map(move |&c| c + k * n))
                .collect(),
            PartitionLayout::Graph { adjacency: vec![] },
        );
        if self.has_supports() {
            for k in 0..ncomp {
                for j in 0..nb {
                    out.supports.push(shift(&self.supports[j], k));
                    out.hulls.push(shift(&self.hulls[j], k));
                    out.edges.push(shift(&self.edges[j], k));
                }
            }
            out.boundary = (0..ncomp)
                .flat_map(|_| self.boundary.iter().copied())
                .collect();
        }
        out
    }
}

fn block_ranges(n: usize, ratio: usize) -> Vec<(usize, usize)> {
    let nb = (n / ratio).max(1);
    (0..nb)
        .map(|b| (b * ratio, if b + 1 == nb { n } else { (b + 1) * ratio }))
        .collect()
}

/// Cell partition into logically Cartesian blocks of `ratio` cells per axis.
pub fn partition_structured(mesh: &Mesh, ratio: &[usize]) -> Result<CoarsePartition> {
    let dim = mesh.dim();
    if ratio.len() != dim {
        return Err(Error::invalid(format!(
            "need {dim} coarsening ratios, got {}",
            ratio.len()
        )));
    }
    if let Some(r) = ratio.iter().find(|&&r| r < 2) {
        return Err(Error::invalid(format!("coarsening ratio {r} is below 2")));
    }
    let lat = mesh.cell_lattice();
    let ranges: Vec<Vec<(usize, usize)>> = (0..3)
        .map(|d| {
            if d < dim {
                block_ranges(lat.dims[d], ratio[d])
            } else {
                vec![(0, 1)]
            }
        })
        .collect();
    let blocks = [ranges[0].len(), ranges[1].len(), ranges[2].len()];
    let blat = Lattice::new(dim, blocks);
    let mut block_of_axis = vec![Vec::new(); 3];
    for d in 0..3 {
        for (b, &(lo, hi)) in ranges[d].iter().enumerate() {
            block_of_axis[d].extend(std::iter::repeat_n(b, hi - lo));
        }
    }
    let block_of: Vec<usize> = (0..lat.len())
        .map(|c| {
            let ijk = lat.ijk(c);
            blat.index([
                block_of_axis[0][ijk[0]],
                block_of_axis[1][ijk[1]],
                block_of_axis[2][ijk[2]],
            ])
        })
        .collect();
    let cells = mesh.cells();
    let mut members = vec![Vec::new(); blat.len()];
    for (c, &b) in block_of.iter().enumerate() {
        members[b].push(c);
    }
    let coarse_nodes = members
        .iter()
        .map(|m| {
            let vol: f64 = m.iter().map(|&c| cells[c].volume).sum();
            let mut ctr = [0.0; 3];
            for &c in m {
                for d in 0..3 {
                    ctr[d] += cells[c].volume * cells[c].centroid[d] / vol;
                }
            }
            let mut best = (f64::INFINITY, usize::MAX);
            for &c in m {
                let r = sub(cells[c].centroid, ctr);
                let d2 = dot(r, r);
                if d2 < best.0 {
                    best = (d2, c);
                }
            }
            best.1
        })
        .collect();
    Ok(CoarsePartition::new(
        block_of,
        coarse_nodes,
        PartitionLayout::Structured {
            lattice: lat,
            blocks,
        },
    ))
}

/// How coarse nodes are placed on the node lattice of a finite element mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeCoarsening {
    /// Every `r`-th node per axis, the last coarse element absorbing the remainder.
    Ratio(usize),
    /// `m` coarse elements per axis, nodes at `round(k * n / m)`.
    Count(usize),
}

fn coarse_positions(n: usize, c: NodeCoarsening) -> Result<Vec<usize>> {
    let pos: Vec<usize> = match c {
        NodeCoarsening::Ratio(r) => {
            if r < 2 {
                return Err(Error::invalid(format!("coarsening ratio {r} is below 2")));
            }
            let m = (n / r).max(1);
            (0..m).map(|k| k * r).chain(std::iter::once(n)).collect()
        }
        NodeCoarsening::Count(m) => {
            if m == 0 || m > n {
                return Err(Error::invalid(format!(
                    "cannot place {m} coarse elements on {n} fine elements"
                )));
            }
            (0..=m)
                .map(|k| ((k * n) as f64 / m as f64).round() as usize)
                .collect()
        }
    };
    Ok(pos)
}

/// Node partition for Q1 elasticity: coarse nodes on a sub-lattice of mesh
/// nodes, every node joining the nearest coarse node per axis (ties go low).
pub fn partition_structured_nodes(
    mesh: &Mesh,
    coarsening: &[NodeCoarsening],
) -> Result<CoarsePartition> {
    let dim = mesh.dim();
    if coarsening.len() != dim {
        return Err(Error::invalid(format!(
            "need {dim} coarsening specs, got {}",
            coarsening.len()
        )));
    }
    let lat = mesh.node_lattice();
    let mut positions = vec![vec![0usize]; 3];
    let mut nearest = vec![vec![0usize]; 3];
    for d in 0..dim {
        let n = lat.dims[d] - 1;
        let pos = coarse_positions(n, coarsening[d])?;
        nearest[d] = (0..=n)
            .map(|i| {
                let mut best = 0;
                for (k, &p) in pos.iter().enumerate() {
                    if i.abs_diff(p) < i.abs_diff(pos[best]) {
                        best = k;
                    }
                }
                best
            })
            .collect();
        positions[d] = pos;
    }
    let blocks = [positions[0].len(), positions[1].len(), positions[2].len()];
    let blat = Lattice::new(dim, blocks);
    let block_of = (0..lat.len())
        .map(|n| {
            let ijk = lat.ijk(n);
            blat.index([nearest[0][ijk[0]], nearest[1][ijk[1]], nearest[2][ijk[2]]])
        })
        .collect();
    let coarse_nodes = (0..blat.len())
        .map(|b| {
            let bi = blat.ijk(b);
            lat.index([
                positions[0][bi[0]],
                positions[1][bi[1]],
                positions[2][bi[2]],
            ])
        })
        .collect();
    Ok(CoarsePartition::new(
        block_of,
        coarse_nodes,
        PartitionLayout::Structured {
            lattice: lat,
            blocks,
        },
    ))
}

pub(crate) fn bfs(adj: &[Vec<usize>], src: usize, allowed: Option<&[bool]>) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut q = VecDeque::new();
    dist[src] = 0;
    q.push_back(src);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX && allowed.is_none_or(|a| a[v]) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    dist
}

/// Greedy region growing over face connectivity.
///
/// Seeds come from farthest-point sampling starting at cell 0, then are
/// recentred a few times inside their graph Voronoi regions. The currently
/// smallest block then repeatedly absorbs its frontier cell nearest to the seed
/// (lowest index on ties).
pub fn partition_agglomerate(mesh: &Mesh, target: usize) -> Result<CoarsePartition> {
    let adjacency: Vec<Vec<usize>> = (0..mesh.num_cells())
        .map(|c| mesh.face_neighbors(c).collect())
        .collect();
    agglomerate_graph(adjacency, target)
}

const LLOYD_STEPS: usize = 10;

// Multi-source BFS; ties go to the lower seed.
fn voronoi(adj: &[Vec<usize>], seeds: &[usize]) -> Vec<usize> {
    let mut owner = vec![usize::MAX; adj.len()];
    let mut q = VecDeque::new();
    for (b, &s) in seeds.iter().enumerate() {
        owner[s] = b;
        q.push_back(s);
    }
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if owner[v] == usize::MAX {
                owner[v] = owner[u];
                q.push_back(v);
            }
        }
    }
    owner
}

// Graph distance from each cell to the nearest cell with a neighbour in another region.
fn boundary_depth(adj: &[Vec<usize>], owner: &[usize]) -> Vec<usize> {
    let mut depth = vec![usize::MAX; adj.len()];
    let mut q = VecDeque::new();
    for u in 0..adj.len() {
        if adj[u].iter().any(|&v| owner[v] != owner[u]) {
            depth[u] = 0;
            q.push_back(u);
        }
    }
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if depth[v] == usize::MAX && owner[v] == owner[u] {
                depth[v] = depth[u] + 1;
                q.push_back(v);
            }
        }
    }
    // a region without any boundary (single block) keeps depth 0 everywhere
    depth
        .iter()
        .map(|&d| if d == usize::MAX { 0 } else { d })
        .collect()
}

pub(crate) fn agglomerate_graph(
    adjacency: Vec<Vec<usize>>,
    target: usize,
) -> Result<CoarsePartition> {
    let n = adjacency.len();
    if target == 0 || target > n {
        return Err(Error::invalid(format!(
            "cannot form {target} blocks from {n} cells"
        )));
    }
    let d0 = bfs(&adjacency, 0, None);
    if d0.contains(&usize::MAX) {
        return Err(Error::Disconnected);
    }
    // farthest-point seeds
    let mut seeds = Vec::with_capacity(target);
    let mut mind = vec![usize::MAX; n];
    let mut next = 0;
    for _ in 0..target {
        seeds.push(next);
        let d = bfs(&adjacency, next, None);
        for i in 0..n {
            mind[i] = mind[i].min(d[i]);
        }
        next = (0..n)
            .max_by(|&a, &b| mind[a].cmp(&mind[b]).then(b.cmp(&a)))
            .unwrap();
    }
    // recentre: each seed moves to the cell of its Voronoi region farthest from the region boundary
    for _ in 0..LLOYD_STEPS {
        let owner = voronoi(&adjacency, &seeds);
        let depth = boundary_depth(&adjacency, &owner);
        let mut best = vec![(0usize, usize::MAX); target];
        for c in 0..n {
            let b = owner[c];
            if best[b].1 == usize::MAX || depth[c] > best[b].0 {
                best[b] = (depth[c], c);
            }
        }
        let moved: Vec<usize> = best.iter().map(|b| b.1).collect();
        if moved == seeds {
            break;
        }
        seeds = moved;
    }
    let mut block_of = vec![usize::MAX; n];
    let mut sizes = vec![1usize; target];
    // frontier ordered by growth distance from the seed, then cell index
    let mut frontier: Vec<std::collections::BTreeSet<(usize, usize)>> =
        vec![Default::default(); target];
    for (b, &s) in seeds.iter().enumerate() {
        block_of[s] = b;
    }
    for (b, &s) in seeds.iter().enumerate() {
        frontier[b].extend(
            adjacency[s]
                .iter()
                .filter(|&&v| block_of[v] == usize::MAX)
                .map(|&v| (1, v)),
        );
    }
    let mut remaining = n - target;
    while remaining > 0 {
        let mut order: Vec<usize> = (0..target).collect();
        order.sort_by_key(|&b| (sizes[b], b));
        let mut grew = false;
        for b in order {
            while let Some((d, c)) = frontier[b].pop_first() {
                if block_of[c] != usize::MAX {
                    continue;
                }
                block_of[c] = b;
                sizes[b] += 1;
                remaining -= 1;
                for &v in &adjacency[c] {
                    if block_of[v] == usize::MAX {
                        frontier[b].insert((d + 1, v));
                    }
                }
                grew = true;
                break;
            }
            if grew {
                break;
            }
        }
        if !grew {
            return Err(Error::Disconnected);
        }
    }
    // coarse node: minimal eccentricity within the block
    let mut members = vec![Vec::new(); target];
    for (c, &b) in block_of.iter().enumerate() {
        members[b].push(c);
    }
    let mut coarse_nodes = Vec::with_capacity(target);
    let mut inside = vec![false; n];
    for m in &members {
        for &c in m {
            inside[c] = true;
        }
        let mut best = (usize::MAX, usize::MAX);
        for &c in m {
            let d = bfs(&adjacency, c, Some(&inside));
            let ecc = m.iter().map(|&o| d[o]).max().unwrap();
            if ecc < best.0 {
                best = (ecc, c);
            }
        }
        coarse_nodes.push(best.1);
        for &c in m {
            inside[c] = false;
        }
    }
    Ok(CoarsePartition::new(
        block_of,
        coarse_nodes,
        PartitionLayout::Graph { adjacency },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, GridDistortion};

    fn grid(nx: usize, ny: usize) -> Mesh {
        build_structured_mesh(
            &[nx, ny],
            &[nx as f64, ny as f64],
            &GridDistortion::default(),
        )
        .unwrap()
    }

    #[test]
    fn nine_by_nine_ratio_three() {
        let m = grid(9, 9);
        let p = partition_structured(&m, &[3, 3]).unwrap();
        assert_eq!(p.num_blocks(), 9);
        assert!(p.blocks().iter().all(|b| b.len() == 9));
        assert_eq!(p.coarse_nodes[4], 4 + 9 * 4);
        assert_eq!(p.coarse_nodes[0], 1 + 9);
    }

    #[test]
    fn block_counts_for_reference_grids() {
        let p = partition_structured(&grid(100, 100), &[5, 5]).unwrap();
        assert_eq!(p.num_blocks(), 400);
        let m = build_structured_mesh(&[50, 50, 30], &[1.0, 1.0, 1.0], &GridDistortion::default())
            .unwrap();
        let p = partition_structured(&m, &[5, 5, 5]).unwrap();
        assert_eq!(p.num_blocks(), 600);
        assert_eq!(p.num_fine(), 75_000);
    }

    #[test]
    fn remainder_goes_to_last_block() {
        let p = partition_structured(&grid(10, 4), &[3, 2]).unwrap();
        assert_eq!(p.num_blocks(), 3 * 2);
        assert_eq!(p.blocks()[2].len(), 4 * 2);
    }

    #[test]
    fn small_ratio_rejected() {
        assert!(partition_structured(&grid(4, 4), &[1, 2]).is_err());
    }

    #[test]
    fn path_graph_agglomeration() {
        let adj = vec![vec![1], vec![0, 2], vec![1, 3], vec![2]];
        let p = agglomerate_graph(adj, 2).unwrap();
        assert_eq!(p.block_of, vec![0, 0, 1, 1]);
    }

    #[test]
    fn singleton_agglomeration() {
        let m = grid(4, 3);
        let p = partition_agglomerate(&m, 12).unwrap();
        for (b, &c) in p.coarse_nodes.iter().enumerate() {
            assert_eq!(p.block_of[c], b);
            assert_eq!(p.blocks()[b], vec![c]);
        }
    }

    #[test]
    fn agglomerated_blocks_are_connected_and_balanced() {
        let m = grid(20, 15);
        let p = partition_agglomerate(&m, 12).unwrap();
        let blocks = p.blocks();
        let (mn, mx) = blocks.iter().fold((usize::MAX, 0), |(a, b), bl| {
            (a.min(bl.len()), b.max(bl.len()))
        });
        assert!(mx <= 2 * mn, "sizes {mn}..{mx}");
        let PartitionLayout::Graph { adjacency } = &p.layout else {
            panic!()
        };
        for (b, bl) in blocks.iter().enumerate() {
            let mask: Vec<bool> = p.block_of.iter().map(|&x| x == b).collect();
            let d = bfs(adjacency, bl[0], Some(&mask));
            assert!(bl.iter().all(|&c| d[c] != usize::MAX));
            assert_eq!(p.block_of[p.coarse_nodes[b]], b);
        }
    }

    #[test]
    fn disconnected_graph_rejected() {
        let adj = vec![vec![1], vec![0], vec![]];
        assert!(matches!(
            agglomerate_graph(adj, 2),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn node_lattice_positions() {
        assert_eq!(
            coarse_positions(12, NodeCoarsening::Ratio(3)).unwrap(),
            vec![0, 3, 6, 9, 12]
        );
        assert_eq!(
            coarse_positions(10, NodeCoarsening::Ratio(4)).unwrap(),
            vec![0, 4, 10]
        );
        assert_eq!(
            coarse_positions(35, NodeCoarsening::Count(7)).unwrap(),
            vec![0, 5, 10, 15, 20, 25, 30, 35]
        );
        let m = grid(6, 6);
        let p =
            partition_structured_nodes(&m, &[NodeCoarsening::Ratio(3), NodeCoarsening::Ratio(3)])
                .unwrap();
        assert_eq!(p.num_blocks(), 9);
        assert_eq!(p.coarse_nodes[4], 3 + 7 * 3);
        // node 1 is nearer to position 0, node 2 nearer to position 3
        assert_eq!(p.block_of[1], 0);
        assert_eq!(p.block_of[2], 1);
    }
}
