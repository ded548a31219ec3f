//! Full quadtree over the map and leaf-set abstractions of it.
//!
//! The full tree is a complete 4-ary tree of depth l stored as a dense
//! array with implicit heap indexing: the children of node `i` are
//! `4i + 1 .. 4i + 4`. Node ids are therefore stable for a given l and
//! navigation is O(1) without pointer chasing.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridMap;

/// Dense integer handle for a tree node; the root is 0.
pub type NodeId = usize;

/// Number of children per node (d = 2).
pub const CHILDREN: usize = 4;

/// Total node count of a complete quadtree of depth `l`: (4^(l+1) - 1) / 3.
pub fn node_count(side_exponent: u32) -> usize {
    ((1usize << (2 * (side_exponent + 1))) - 1) / 3
}

/// First node id at depth `k`: (4^k - 1) / 3.
pub fn level_start(depth: u32) -> usize {
    ((1usize << (2 * depth)) - 1) / 3
}

/// Complete quadtree of depth `side_exponent` over a 2^l x 2^l grid.
///
/// Children are ordered (SW, SE, NW, NE) by center coordinates, which fixes
/// node ids, serialization order, and tie-breaking everywhere downstream.
#[derive(Debug, Clone)]
pub struct QuadTree {
    side_exponent: u32,
    /// Per node: origin of its hypercube in unit cells (min corner).
    origins: Vec<(u32, u32)>,
}

impl QuadTree {
    /// Build the full tree for a map, computing per-node geometry.
    pub fn build(map: &GridMap) -> Self {
        Self::with_side_exponent(map.side_exponent())
    }

    pub fn with_side_exponent(side_exponent: u32) -> Self {
        let total = node_count(side_exponent);
        let mut origins = vec![(0u32, 0u32); total];
        for depth in 0..side_exponent {
            let half = 1u32 << (side_exponent - depth - 1);
            let start = level_start(depth);
            let end = level_start(depth + 1);
            for id in start..end {
                let (ox, oy) = origins[id];
                let base = 4 * id + 1;
                origins[base] = (ox, oy);
                origins[base + 1] = (ox + half, oy);
                origins[base + 2] = (ox, oy + half);
                origins[base + 3] = (ox + half, oy + half);
            }
        }
        Self {
            side_exponent,
            origins,
        }
    }

    pub fn side_exponent(&self) -> u32 {
        self.side_exponent
    }

    /// Side length of the map in unit cells.
    pub fn side(&self) -> usize {
        1 << self.side_exponent
    }

    pub fn node_count(&self) -> usize {
        self.origins.len()
    }

    /// Number of unit cells, 4^l.
    pub fn leaf_count(&self) -> usize {
        1 << (2 * self.side_exponent)
    }

    pub fn validate_node(&self, n: NodeId) -> Result<()> {
        if n < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode(n))
        }
    }

    /// Depth k of a node (root has depth 0).
    pub fn depth(&self, n: NodeId) -> u32 {
        debug_assert!(n < self.node_count());
        let mut depth = 0;
        while level_start(depth + 1) <= n {
            depth += 1;
        }
        depth
    }

    /// r-value: l - depth. The node's hypercube has side 2^r.
    pub fn r_value(&self, n: NodeId) -> u32 {
        self.side_exponent - self.depth(n)
    }

    /// True for nodes at depth l (unit cells).
    pub fn is_leaf(&self, n: NodeId) -> bool {
        n >= level_start(self.side_exponent)
    }

    pub fn is_interior(&self, n: NodeId) -> bool {
        !self.is_leaf(n)
    }

    /// Children of an interior node, in (SW, SE, NW, NE) order.
    pub fn children(&self, n: NodeId) -> Option<[NodeId; CHILDREN]> {
        if self.is_leaf(n) {
            None
        } else {
            let base = 4 * n + 1;
            Some([base, base + 1, base + 2, base + 3])
        }
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        if n == 0 {
            None
        } else {
            Some((n - 1) / 4)
        }
    }

    /// Min corner of the node's hypercube, in unit cells.
    pub fn origin(&self, n: NodeId) -> (u32, u32) {
        self.origins[n]
    }

    /// Center in half-unit integer coordinates (exact dyadic arithmetic).
    ///
    /// A node at origin (ox, oy) with r-value r is centered at
    /// (ox + 2^(r-1), oy + 2^(r-1)) in grid units, i.e. at
    /// (2 ox + 2^r, 2 oy + 2^r) in half-units, which is always an integer.
    pub fn center_half_units(&self, n: NodeId) -> (i64, i64) {
        let (ox, oy) = self.origins[n];
        let half_span = 1i64 << self.r_value(n);
        (2 * ox as i64 + half_span, 2 * oy as i64 + half_span)
    }

    /// Center in grid coordinates.
    pub fn center(&self, n: NodeId) -> (f64, f64) {
        let (hx, hy) = self.center_half_units(n);
        (hx as f64 / 2.0, hy as f64 / 2.0)
    }

    /// Leaf id of the unit cell (x, y).
    pub fn leaf_of_cell(&self, x: usize, y: usize) -> NodeId {
        debug_assert!(x < self.side() && y < self.side());
        let mut id = 0;
        for bit in (0..self.side_exponent).rev() {
            let xb = (x >> bit) & 1;
            let yb = (y >> bit) & 1;
            id = 4 * id + 1 + (yb << 1 | xb);
        }
        id
    }

    /// Unit cell (x, y) of a depth-l node.
    pub fn cell_of_leaf(&self, n: NodeId) -> (usize, usize) {
        debug_assert!(self.is_leaf(n));
        let (ox, oy) = self.origins[n];
        (ox as usize, oy as usize)
    }

    /// Row-major cell index of a depth-l node.
    pub fn cell_index_of_leaf(&self, n: NodeId) -> usize {
        let (x, y) = self.cell_of_leaf(n);
        y * self.side() + x
    }

    /// All depth-l descendants of `n` (just `n` if it is a unit cell),
    /// in row-major order over the node's cell block.
    pub fn subtree_leaves(&self, n: NodeId) -> Result<Vec<NodeId>> {
        self.validate_node(n)?;
        let (ox, oy) = self.origins[n];
        let span = 1usize << self.r_value(n);
        let mut leaves = Vec::with_capacity(span * span);
        for dy in 0..span {
            for dx in 0..span {
                leaves.push(self.leaf_of_cell(ox as usize + dx, oy as usize + dy));
            }
        }
        Ok(leaves)
    }

    /// Iterate the row-major cell indices covered by `n` without
    /// materializing leaf ids.
    pub fn cell_indices(&self, n: NodeId) -> impl Iterator<Item = usize> + '_ {
        let (ox, oy) = self.origins[n];
        let span = 1usize << self.r_value(n);
        let side = self.side();
        (0..span).flat_map(move |dy| {
            let row = (oy as usize + dy) * side + ox as usize;
            row..row + span
        })
    }

    /// Interior node ids (depths 0..l), ascending.
    pub fn interior_nodes(&self) -> std::ops::Range<NodeId> {
        0..level_start(self.side_exponent)
    }
}

/// Leaf set of a (possibly compressed) tree: an antichain of nodes whose
/// hypercubes partition the map.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeAbstraction {
    side_exponent: u32,
    /// Sorted node ids.
    leaves: Vec<NodeId>,
    beta: Option<f64>,
}

impl TreeAbstraction {
    /// Build from an explicit leaf set, validating the partition property:
    /// ids valid, no duplicates, no ancestor pairs, covered volume 4^l.
    pub fn from_leaves(tree: &QuadTree, mut leaves: Vec<NodeId>, beta: Option<f64>) -> Result<Self> {
        leaves.sort_unstable();
        for &n in &leaves {
            tree.validate_node(n)?;
        }
        if leaves.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidAbstraction("duplicate leaf".into()));
        }
        let mut volume = 0usize;
        for &n in &leaves {
            volume += 1usize << (2 * tree.r_value(n));
        }
        if volume != tree.leaf_count() {
            return Err(Error::InvalidAbstraction(format!(
                "leaf hypercubes cover {volume} cells, map has {}",
                tree.leaf_count()
            )));
        }
        // Equal volume plus no ancestor/descendant pair implies a partition.
        let set: std::collections::HashSet<NodeId> = leaves.iter().copied().collect();
        for &n in &leaves {
            let mut a = n;
            while let Some(p) = tree.parent(a) {
                if set.contains(&p) {
                    return Err(Error::InvalidAbstraction(format!(
                        "leaf {p} is an ancestor of leaf {n}"
                    )));
                }
                a = p;
            }
        }
        Ok(Self {
            side_exponent: tree.side_exponent(),
            leaves,
            beta,
        })
    }

    /// Construct without validation; `leaves` must already be a sorted
    /// antichain partition (used by the tree searches).
    pub(crate) fn from_sorted_unchecked(
        side_exponent: u32,
        leaves: Vec<NodeId>,
        beta: Option<f64>,
    ) -> Self {
        debug_assert!(leaves.windows(2).all(|w| w[0] < w[1]));
        Self {
            side_exponent,
            leaves,
            beta,
        }
    }

    /// The trivial one-leaf abstraction (just the root).
    pub fn root_only(tree: &QuadTree) -> Self {
        Self::from_sorted_unchecked(tree.side_exponent(), vec![0], None)
    }

    /// The finest-resolution abstraction: all 4^l unit cells.
    pub fn full_resolution(tree: &QuadTree) -> Self {
        let start = level_start(tree.side_exponent());
        Self::from_sorted_unchecked(
            tree.side_exponent(),
            (start..tree.node_count()).collect(),
            None,
        )
    }

    pub fn side_exponent(&self) -> u32 {
        self.side_exponent
    }

    /// Sorted leaf node ids.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// Leaf count over 4^l.
    pub fn compression(&self) -> f64 {
        self.leaves.len() as f64 / (1u64 << (2 * self.side_exponent)) as f64
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.leaves.binary_search(&n).is_ok()
    }

    /// True when every leaf is a unit cell.
    pub fn is_full_resolution(&self) -> bool {
        self.leaves.len() == 1usize << (2 * self.side_exponent)
    }

    /// Leaf of this abstraction whose hypercube contains `point`.
    ///
    /// Cells are half-open [low, high) except at the top/right map edge,
    /// which is closed.
    pub fn locate_leaf(&self, tree: &QuadTree, point: (f64, f64)) -> Result<NodeId> {
        let side = tree.side() as f64;
        let (px, py) = point;
        if !(px.is_finite() && py.is_finite()) || !(0.0..=side).contains(&px) || !(0.0..=side).contains(&py) {
            return Err(Error::OutOfBounds(px, py));
        }
        let clamp = |v: f64| -> usize { (v.floor() as usize).min(tree.side() - 1) };
        self.locate_cell(tree, clamp(px), clamp(py))
    }

    /// Leaf containing the unit cell (x, y).
    pub fn locate_cell(&self, tree: &QuadTree, x: usize, y: usize) -> Result<NodeId> {
        if x >= tree.side() || y >= tree.side() {
            return Err(Error::OutOfBounds(x as f64, y as f64));
        }
        let mut id = 0;
        for bit in (0..tree.side_exponent()).rev() {
            if self.contains(id) {
                return Ok(id);
            }
            let xb = (x >> bit) & 1;
            let yb = (y >> bit) & 1;
            id = 4 * id + 1 + (yb << 1 | xb);
        }
        if self.contains(id) {
            Ok(id)
        } else {
            Err(Error::InvalidAbstraction(format!(
                "no leaf covers cell ({x}, {y})"
            )))
        }
    }

    /// Serialize to JSON: side exponent, beta, sorted leaf ids.
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let dto = AbstractionDto {
            side_exponent: self.side_exponent,
            beta: self.beta,
            leaves: self.leaves.clone(),
        };
        let text = serde_json::to_string_pretty(&dto)
            .map_err(|e| Error::InvalidAbstraction(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Reload an abstraction written by [`Self::write_json`], revalidating it.
    pub fn read_json(path: &Path, tree: &QuadTree) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let dto: AbstractionDto =
            serde_json::from_str(&text).map_err(|e| Error::MalformedFile(e.to_string()))?;
        if dto.side_exponent != tree.side_exponent() {
            return Err(Error::SizeMismatch(format!(
                "abstraction is for side exponent {}, tree has {}",
                dto.side_exponent,
                tree.side_exponent()
            )));
        }
        Self::from_leaves(tree, dto.leaves, dto.beta)
    }
}

#[derive(Serialize, Deserialize)]
struct AbstractionDto {
    side_exponent: u32,
    beta: Option<f64>,
    leaves: Vec<NodeId>,
}
