//! Adjacency graph over an abstraction's leaves.
//!
//! Two leaves are connected when their hypercubes meet across a face with
//! positive overlap. The test works on exact half-unit integer centers, so
//! there is no epsilon anywhere: the infinity-norm of the center offset must
//! equal the sum of the half side lengths, attained in exactly one
//! coordinate.

use std::path::Path;

use crate::error::{Error, Result};
use crate::par;
use crate::tree::{NodeId, QuadTree, TreeAbstraction};

/// Graph over abstraction leaves: vertex `i` is `nodes[i]`, adjacency lists
/// are sorted vertex indices, edges are symmetric and loop-free.
#[derive(Debug, Clone)]
pub struct AbstractGraph {
    nodes: Vec<NodeId>,
    adjacency: Vec<Vec<usize>>,
}

impl AbstractGraph {
    pub fn vertex_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Node backing vertex `v`.
    pub fn node_of(&self, v: usize) -> NodeId {
        self.nodes[v]
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Vertex index of a node, if it is a leaf of the abstraction.
    pub fn vertex_of(&self, n: NodeId) -> Option<usize> {
        self.nodes.binary_search(&n).ok()
    }

    /// Undirected edges as (smaller vertex, larger vertex) pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Dump the edge list as CSV: u_node_id, v_node_id.
    pub fn write_edge_csv(&self, path: &Path) -> Result<()> {
        use std::fmt::Write as _;
        let mut out = String::from("u_node_id,v_node_id\n");
        for (u, v) in self.edges() {
            writeln!(out, "{},{}", self.nodes[u], self.nodes[v]).expect("write to string");
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Face-adjacency test on exact dyadic centers.
///
/// True when the centers' infinity-norm distance equals the sum of the two
/// half side lengths and a single coordinate attains it (corner contact has
/// two and is excluded).
pub fn is_nodal_neighbor(tree: &QuadTree, n: NodeId, m: NodeId) -> Result<bool> {
    tree.validate_node(n)?;
    tree.validate_node(m)?;
    Ok(nodal_neighbor_unchecked(tree, n, m))
}

fn nodal_neighbor_unchecked(tree: &QuadTree, n: NodeId, m: NodeId) -> bool {
    let (nx, ny) = tree.center_half_units(n);
    let (mx, my) = tree.center_half_units(m);
    // Half side of a node with r-value r is 2^(r-1) grid units = 2^r half-units.
    let threshold = (1i64 << tree.r_value(n)) + (1i64 << tree.r_value(m));
    let dx = (nx - mx).abs();
    let dy = (ny - my).abs();
    dx.max(dy) == threshold && (dx == threshold) != (dy == threshold)
}

/// Build the graph of an abstraction.
///
/// Candidates for each leaf come from probing the unit cells just outside
/// each of its four faces and locating their covering leaves; every
/// candidate is then confirmed with the exact nodal-neighbor test, which
/// makes the edge set identical to the all-pairs construction.
pub fn build_graph(tree: &QuadTree, abs: &TreeAbstraction) -> AbstractGraph {
    let nodes: Vec<NodeId> = abs.leaves().to_vec();
    let side = tree.side();

    let adjacency: Vec<Vec<usize>> = par::map_slice(&nodes, |&n| {
        let (ox, oy) = tree.origin(n);
        let (ox, oy) = (ox as usize, oy as usize);
        let span = 1usize << tree.r_value(n);
        let mut candidates: Vec<NodeId> = Vec::new();
        let mut probe = |x: usize, y: usize| {
            let leaf = abs
                .locate_cell(tree, x, y)
                .expect("probed cell is in bounds");
            candidates.push(leaf);
        };
        for d in 0..span {
            if ox > 0 {
                probe(ox - 1, oy + d);
            }
            if ox + span < side {
                probe(ox + span, oy + d);
            }
            if oy > 0 {
                probe(ox + d, oy - 1);
            }
            if oy + span < side {
                probe(ox + d, oy + span);
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        candidates
            .into_iter()
            .filter(|&m| nodal_neighbor_unchecked(tree, n, m))
            .map(|m| nodes.binary_search(&m).expect("candidate is a leaf"))
            .collect()
    });

    AbstractGraph { nodes, adjacency }
}

/// Vertex whose node's hypercube contains `point`.
pub fn locate_vertex(
    graph: &AbstractGraph,
    abs: &TreeAbstraction,
    tree: &QuadTree,
    point: (f64, f64),
) -> Result<usize> {
    let leaf = abs.locate_leaf(tree, point)?;
    graph
        .vertex_of(leaf)
        .ok_or_else(|| Error::InvalidAbstraction(format!("leaf {leaf} is not a vertex")))
}

/// Vertex whose node covers the unit cell (x, y).
pub fn locate_vertex_cell(
    graph: &AbstractGraph,
    abs: &TreeAbstraction,
    tree: &QuadTree,
    x: usize,
    y: usize,
) -> Result<usize> {
    let leaf = abs.locate_cell(tree, x, y)?;
    graph
        .vertex_of(leaf)
        .ok_or_else(|| Error::InvalidAbstraction(format!("leaf {leaf} is not a vertex")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cell_neighbors() {
        let tree = QuadTree::with_side_exponent(2);
        let a = tree.leaf_of_cell(0, 0);
        let b = tree.leaf_of_cell(1, 0);
        let c = tree.leaf_of_cell(1, 1);
        // Edge-adjacent same size.
        assert!(is_nodal_neighbor(&tree, a, b).unwrap());
        assert!(is_nodal_neighbor(&tree, b, a).unwrap());
        // Diagonal contact: two coordinates attain the norm.
        assert!(!is_nodal_neighbor(&tree, a, c).unwrap());
        // Same node.
        assert!(!is_nodal_neighbor(&tree, a, a).unwrap());
        // Not touching.
        let d = tree.leaf_of_cell(3, 0);
        assert!(!is_nodal_neighbor(&tree, a, d).unwrap());
        assert!(is_nodal_neighbor(&tree, 999, a).is_err());
    }

    #[test]
    fn cross_resolution_neighbor() {
        // r=1 block centered (1,1) against the unit cell centered (2.5, 0.5):
        // offset (1.5, 0.5), threshold 1 + 0.5, attained only in x.
        let tree = QuadTree::with_side_exponent(2);
        let block = tree.children(0).unwrap()[0];
        assert_eq!(tree.center(block), (1.0, 1.0));
        let cell = tree.leaf_of_cell(2, 0);
        assert_eq!(tree.center(cell), (2.5, 0.5));
        assert!(is_nodal_neighbor(&tree, block, cell).unwrap());

        // Corner contact across resolutions: cell (2,2) touches the block
        // only at the point (2,2).
        let corner = tree.leaf_of_cell(2, 2);
        assert!(!is_nodal_neighbor(&tree, block, corner).unwrap());

        // Containment is not adjacency.
        let inner = tree.leaf_of_cell(0, 0);
        assert!(!is_nodal_neighbor(&tree, block, inner).unwrap());
    }

    #[test]
    fn full_resolution_graph_is_four_connected() {
        let tree = QuadTree::with_side_exponent(2);
        let abs = TreeAbstraction::full_resolution(&tree);
        let graph = build_graph(&tree, &abs);
        assert_eq!(graph.vertex_count(), 16);
        assert_eq!(graph.edge_count(), 24);

        let tree = QuadTree::with_side_exponent(1);
        let abs = TreeAbstraction::full_resolution(&tree);
        let graph = build_graph(&tree, &abs);
        assert_eq!(graph.vertex_count(), 4);
        assert_eq!(graph.edge_count(), 4);
    }

    #[test]
    fn root_only_graph() {
        let tree = QuadTree::with_side_exponent(3);
        let abs = TreeAbstraction::root_only(&tree);
        let graph = build_graph(&tree, &abs);
        assert_eq!(graph.vertex_count(), 1);
        assert_eq!(graph.edge_count(), 0);
    }

    fn brute_force_edges(tree: &QuadTree, abs: &TreeAbstraction) -> Vec<(NodeId, NodeId)> {
        let leaves = abs.leaves();
        let mut edges = Vec::new();
        for (i, &n) in leaves.iter().enumerate() {
            for &m in &leaves[i + 1..] {
                if is_nodal_neighbor(tree, n, m).unwrap() {
                    edges.push((n, m));
                }
            }
        }
        edges
    }

    #[test]
    fn pruned_build_matches_brute_force() {
        // Mixed abstraction over an 8x8 map.
        let tree = QuadTree::with_side_exponent(3);
        let kids = tree.children(0).unwrap();
        let se_kids = tree.children(kids[1]).unwrap();
        let mut leaves = vec![kids[0], kids[2], kids[3]];
        leaves.extend_from_slice(&se_kids[..3]);
        leaves.extend_from_slice(&tree.children(se_kids[3]).unwrap());
        let abs = TreeAbstraction::from_leaves(&tree, leaves, None).unwrap();

        let graph = build_graph(&tree, &abs);
        let mut got: Vec<(NodeId, NodeId)> = graph
            .edges()
            .map(|(u, v)| (graph.node_of(u), graph.node_of(v)))
            .collect();
        got.sort_unstable();
        let mut expected = brute_force_edges(&tree, &abs);
        expected.sort_unstable();
        assert_eq!(got, expected);

        // Symmetry and no self-loops.
        for (u, adj) in (0..graph.vertex_count()).map(|u| (u, graph.neighbors(u))) {
            for &v in adj {
                assert_ne!(u, v);
                assert!(graph.neighbors(v).contains(&u));
            }
        }
    }

    #[test]
    fn neighbors_share_positive_face_overlap() {
        let tree = QuadTree::with_side_exponent(3);
        let kids = tree.children(0).unwrap();
        let mut leaves = vec![kids[2], kids[3]];
        leaves.extend_from_slice(&tree.children(kids[0]).unwrap());
        leaves.extend_from_slice(&tree.children(kids[1]).unwrap());
        let abs = TreeAbstraction::from_leaves(&tree, leaves, None).unwrap();
        let graph = build_graph(&tree, &abs);

        for (u, v) in graph.edges() {
            let (n, m) = (graph.node_of(u), graph.node_of(v));
            let (nx, ny) = tree.origin(n);
            let (mx, my) = tree.origin(m);
            let ns = 1u32 << tree.r_value(n);
            let ms = 1u32 << tree.r_value(m);
            // Overlap of the two cell ranges in each axis.
            let overlap = |a0: u32, a1: u32, b0: u32, b1: u32| -> i64 {
                (a1.min(b1) as i64 - a0.max(b0) as i64).max(0)
            };
            let ox = overlap(nx, nx + ns, mx, mx + ms);
            let oy = overlap(ny, ny + ns, my, my + ms);
            // Touching faces: one axis overlaps with positive length, the
            // other has zero gap and zero overlap.
            let touch_x = nx + ns == mx || mx + ms == nx;
            let touch_y = ny + ns == my || my + ms == ny;
            assert!(
                (touch_x && oy > 0) || (touch_y && ox > 0),
                "edge {n}-{m} shares no positive face segment"
            );
        }
    }

    #[test]
    fn locate_vertex_cases() {
        let tree = QuadTree::with_side_exponent(2);
        let abs = TreeAbstraction::full_resolution(&tree);
        let graph = build_graph(&tree, &abs);
        let v = locate_vertex(&graph, &abs, &tree, (0.2, 0.2)).unwrap();
        assert_eq!(tree.cell_of_leaf(graph.node_of(v)), (0, 0));

        let root = TreeAbstraction::root_only(&tree);
        let root_graph = build_graph(&tree, &root);
        assert_eq!(
            locate_vertex(&root_graph, &root, &tree, (3.3, 1.1)).unwrap(),
            0
        );
        assert!(locate_vertex(&root_graph, &root, &tree, (5.0, 1.0)).is_err());
    }
}
