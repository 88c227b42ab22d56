use super::partition::{bfs, CoarsePartition, Lattice, PartitionLayout};
use super::Mesh;
use crate::{Error, Result};

/// Fills the support, hull and edge sets of every basis.
///
/// Structured partitions use the open box between neighbouring coarse nodes
/// along each axis. Graph partitions keep block `j` plus the cells of
/// face-adjacent blocks `k` that are closer to coarse node `j` than coarse
/// node `k` is.
pub fn build_support_regions(_mesh: &Mesh, partition: &CoarsePartition) -> Result<CoarsePartition> {
    let mut p = partition.clone();
    let (supports, hulls) = match &p.layout {
        PartitionLayout::Structured { lattice, blocks } => structured(&p, lattice, *blocks),
        PartitionLayout::Graph { adjacency } => graph(&p, adjacency),
    };
    if let Some(j) = supports.iter().position(|s| s.is_empty()) {
        return Err(Error::EmptySupport(j));
    }
    let n = p.num_fine();
    let mut boundary = vec![false; n];
    for h in &hulls {
        for &c in h {
            boundary[c] = true;
        }
    }
    // a support never contains its own hull, so any flagged support cell is
    // on the hull of another basis
    p.edges = supports
        .iter()
        .map(|s| s.iter().copied().filter(|&c| boundary[c]).collect())
        .collect();
    p.supports = supports;
    p.hulls = hulls;
    p.boundary = boundary;
    Ok(p)
}

type Sets = (Vec<Vec<usize>>, Vec<Vec<usize>>);

fn structured(p: &CoarsePartition, lat: &Lattice, blocks: [usize; 3]) -> Sets {
    let blat = Lattice::new(lat.dim, blocks);
    let node_ijk: Vec<[usize; 3]> = p.coarse_nodes.iter().map(|&c| lat.ijk(c)).collect();
    let mut supports = Vec::with_capacity(p.num_blocks());
    let mut hulls = Vec::with_capacity(p.num_blocks());
    for j in 0..p.num_blocks() {
        let b = blat.ijk(j);
        // inclusive support box and inclusive hull box per axis
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        let mut hlo = [0usize; 3];
        let mut hhi = [0usize; 3];
        for d in 0..3 {
            let (l, hl) = if b[d] > 0 {
                let mut nb = b;
                nb[d] -= 1;
                let c = node_ijk[blat.index(nb)][d];
                (c + 1, c)
            } else {
                (0, 0)
            };
            let (h, hh) = if b[d] + 1 < blocks[d] {
                let mut nb = b;
                nb[d] += 1;
                let c = node_ijk[blat.index(nb)][d];
                (c.saturating_sub(1), c)
            } else {
                (lat.dims[d] - 1, lat.dims[d] - 1)
            };
            lo[d] = l;
            hi[d] = h;
            hlo[d] = hl;
            hhi[d] = hh;
        }
        let mut s = Vec::new();
        let mut hull = Vec::new();
        for k in hlo[2]..=hhi[2] {
            for jj in hlo[1]..=hhi[1] {
                for i in hlo[0]..=hhi[0] {
                    let q = [i, jj, k];
                    let inside = (0..3).all(|d| q[d] >= lo[d] && q[d] <= hi[d]);
                    if inside {
                        s.push(lat.index(q));
                    } else {
                        hull.push(lat.index(q));
                    }
                }
            }
        }
        s.sort_unstable();
        hull.sort_unstable();
        supports.push(s);
        hulls.push(hull);
    }
    (supports, hulls)
}

fn graph(p: &CoarsePartition, adj: &[Vec<usize>]) -> Sets {
    let nb = p.num_blocks();
    let n = p.num_fine();
    let mut block_adj = vec![Vec::new(); nb];
    for (c, nbrs) in adj.iter().enumerate() {
        for &v in nbrs {
            let (a, b) = (p.block_of[c], p.block_of[v]);
            if a != b {
                block_adj[a].push(b);
            }
        }
    }
    for l in block_adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    let blocks = p.blocks();
    let mut supports = Vec::with_capacity(nb);
    let mut hulls = Vec::with_capacity(nb);
    let mut in_support = vec![false; n];
    for j in 0..nb {
        let mut region = vec![false; n];
        for &k in block_adj[j].iter().chain(std::iter::once(&j)) {
            for &c in &blocks[k] {
                region[c] = true;
            }
        }
        let dist = bfs(adj, p.coarse_nodes[j], Some(&region));
        let mut s: Vec<usize> = blocks[j].clone();
        for &k in &block_adj[j] {
            let reach = dist[p.coarse_nodes[k]];
            s.extend(blocks[k].iter().copied().filter(|&c| dist[c] < reach));
        }
        s.sort_unstable();
        for &c in &s {
            in_support[c] = true;
        }
        let mut hull: Vec<usize> = s
            .iter()
            .flat_map(|&c| adj[c].iter().copied())
            .filter(|&v| !in_support[v])
            .collect();
        hull.sort_unstable();
        hull.dedup();
        for &c in &s {
            in_support[c] = false;
        }
        supports.push(s);
        hulls.push(hull);
    }
    (supports, hulls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{
        build_structured_mesh, partition_agglomerate, partition_structured, GridDistortion,
    };
    use proptest::prelude::*;

    fn grid(nx: usize, ny: usize) -> Mesh {
        build_structured_mesh(&[nx, ny], &[1.0, 1.0], &GridDistortion::default()).unwrap()
    }

    fn boxed(lo: (usize, usize), hi: (usize, usize), nx: usize) -> Vec<usize> {
        let mut v = Vec::new();
        for j in lo.1..=hi.1 {
            for i in lo.0..=hi.0 {
                v.push(i + nx * j);
            }
        }
        v
    }

    #[test]
    fn interior_support_on_nine_by_nine() {
        let m = grid(9, 9);
        let p = build_support_regions(&m, &partition_structured(&m, &[3, 3]).unwrap()).unwrap();
        assert_eq!(p.supports[4], boxed((2, 2), (6, 6), 9));
        let mut hull = boxed((1, 1), (7, 7), 9);
        hull.retain(|c| !p.supports[4].contains(c));
        assert_eq!(p.hulls[4], hull);
        assert!(p.hulls[4].iter().all(|&c| {
            let (i, j) = (c % 9, c / 9);
            i == 1 || i == 7 || j == 1 || j == 7
        }));
    }

    #[test]
    fn corner_support_is_clamped() {
        let m = grid(9, 9);
        let p = build_support_regions(&m, &partition_structured(&m, &[3, 3]).unwrap()).unwrap();
        assert_eq!(p.supports[0], boxed((0, 0), (3, 3), 9));
        assert!(p.supports[0].contains(&0));
    }

    #[test]
    fn single_block_covers_everything() {
        let m = grid(3, 3);
        let p = build_support_regions(&m, &partition_structured(&m, &[3, 3]).unwrap()).unwrap();
        assert_eq!(p.supports[0], (0..9).collect::<Vec<_>>());
        assert!(p.hulls[0].is_empty());
        assert!(p.edges[0].is_empty());
    }

    fn check_invariants(p: &CoarsePartition, structured: bool) {
        let mut covered = vec![false; p.num_fine()];
        for (j, s) in p.supports.iter().enumerate() {
            for &c in s {
                covered[c] = true;
            }
            if structured {
                for (c, &b) in p.block_of.iter().enumerate() {
                    if b == j {
                        assert!(s.binary_search(&c).is_ok());
                    }
                }
            }
            assert!(s.binary_search(&p.coarse_nodes[j]).is_ok());
            for &e in &p.edges[j] {
                assert!(p
                    .hulls
                    .iter()
                    .enumerate()
                    .any(|(k, h)| k != j && h.binary_search(&e).is_ok()));
            }
        }
        assert!(covered.iter().all(|&c| c));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn structured_support_invariants(nx in 4usize..14, ny in 4usize..14, rx in 2usize..5, ry in 2usize..5) {
            let m = grid(nx, ny);
            let p = build_support_regions(&m, &partition_structured(&m, &[rx, ry]).unwrap()).unwrap();
            check_invariants(&p, true);
        }

        #[test]
        fn graph_support_invariants(nx in 4usize..12, ny in 4usize..12, nb in 2usize..8) {
            let m = grid(nx, ny);
            let p = build_support_regions(&m, &partition_agglomerate(&m, nb).unwrap()).unwrap();
            check_invariants(&p, false);
        }
    }
}
