//! Information quantities over the tree and the tree searches driven by them.
//!
//! Everything here works in bits (log base 2). The per-node expansion gains
//! are the split entropy and the mass-weighted Jensen-Shannon divergence of
//! the child occupancy conditionals; both are cached once per map since they
//! do not depend on the trade-off parameter beta.

use crate::error::{Error, Result};
use crate::grid::{CellPrior, GridMap};
use crate::par;
use crate::tree::{level_start, NodeId, QuadTree, TreeAbstraction};

/// Binary entropy in bits, with the 0 log 0 = 0 convention.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Per-node mass p(n) and occupancy conditional p(y=1|n), aggregated
/// bottom-up from the map and the cell prior.
#[derive(Debug, Clone)]
pub struct JointModel {
    side_exponent: u32,
    mass: Vec<f64>,
    cond: Vec<f64>,
}

impl JointModel {
    /// Aggregate masses and conditionals over the full tree.
    ///
    /// Leaves take p(x) and p(y=1|x) directly; an interior node has
    /// p(n) = sum of child masses and p(y=1|n) the mass-weighted mixture
    /// of child conditionals (0 where p(n) = 0).
    pub fn build(map: &GridMap, prior: &CellPrior, tree: &QuadTree) -> Result<Self> {
        if map.side_exponent() != tree.side_exponent() {
            return Err(Error::SizeMismatch(format!(
                "map side exponent {} vs tree {}",
                map.side_exponent(),
                tree.side_exponent()
            )));
        }
        if prior.len() != map.cell_count() {
            return Err(Error::SizeMismatch(format!(
                "prior has {} entries, map has {} cells",
                prior.len(),
                map.cell_count()
            )));
        }
        let ell = tree.side_exponent();
        let total = tree.node_count();
        let leaf_start = level_start(ell);

        let mut mass = vec![0.0; total];
        let mut cond = vec![0.0; total];
        par::fill_indexed(&mut mass[leaf_start..], leaf_start, |id| {
            prior.prob(tree.cell_index_of_leaf(id))
        });
        par::fill_indexed(&mut cond[leaf_start..], leaf_start, |id| {
            map.occupancy_at(tree.cell_index_of_leaf(id))
        });

        for depth in (0..ell).rev() {
            let start = level_start(depth);
            let end = level_start(depth + 1);
            let (head, tail) = mass.split_at_mut(end);
            par::fill_indexed(&mut head[start..end], start, |id| {
                let base = 4 * id + 1 - end;
                tail[base] + tail[base + 1] + tail[base + 2] + tail[base + 3]
            });
        }
        for depth in (0..ell).rev() {
            let start = level_start(depth);
            let end = level_start(depth + 1);
            let (head, tail) = cond.split_at_mut(end);
            let mass_ref = &mass;
            par::fill_indexed(&mut head[start..end], start, |id| {
                let m = mass_ref[id];
                if m == 0.0 {
                    return 0.0;
                }
                let base = 4 * id + 1;
                let mut weighted = 0.0;
                for c in base..base + 4 {
                    weighted += mass_ref[c] * tail[c - end];
                }
                (weighted / m).clamp(0.0, 1.0)
            });
        }

        Ok(Self {
            side_exponent: ell,
            mass,
            cond,
        })
    }

    pub fn side_exponent(&self) -> u32 {
        self.side_exponent
    }

    pub fn node_count(&self) -> usize {
        self.mass.len()
    }

    /// Subtree mass p(n).
    pub fn mass(&self, n: NodeId) -> f64 {
        self.mass[n]
    }

    /// Occupancy conditional p(y=1|n).
    pub fn conditional(&self, n: NodeId) -> f64 {
        self.cond[n]
    }

    fn leaf_start(&self) -> usize {
        level_start(self.side_exponent)
    }

    fn require_interior(&self, n: NodeId) -> Result<()> {
        if n >= self.node_count() {
            Err(Error::InvalidNode(n))
        } else if n >= self.leaf_start() {
            Err(Error::NotInterior(n))
        } else {
            Ok(())
        }
    }

    /// Representation-cost gain of expanding `n`, in bits:
    /// p(n) times the entropy of the child mass split.
    pub fn delta_ix(&self, n: NodeId) -> Result<f64> {
        self.require_interior(n)?;
        Ok(self.delta_ix_unchecked(n))
    }

    fn delta_ix_unchecked(&self, n: NodeId) -> f64 {
        let p = self.mass[n];
        if p == 0.0 {
            return 0.0;
        }
        let base = 4 * n + 1;
        let mut h = 0.0;
        for c in base..base + 4 {
            h += term(self.mass[c] / p);
        }
        p * h
    }

    /// Relevant-information gain of expanding `n`, in bits: p(n) times the
    /// Jensen-Shannon divergence of the child occupancy conditionals under
    /// the split proportions.
    pub fn delta_iy(&self, n: NodeId) -> Result<f64> {
        self.require_interior(n)?;
        Ok(self.delta_iy_unchecked(n))
    }

    fn delta_iy_unchecked(&self, n: NodeId) -> f64 {
        let p = self.mass[n];
        if p == 0.0 {
            return 0.0;
        }
        let base = 4 * n + 1;
        // Exactly zero when every child with mass has the same conditional.
        let mut reference = None;
        let mut identical = true;
        for c in base..base + 4 {
            if self.mass[c] > 0.0 {
                match reference {
                    None => reference = Some(self.cond[c]),
                    Some(q) => identical &= self.cond[c] == q,
                }
            }
        }
        if identical {
            return 0.0;
        }
        let mut jsd = binary_entropy(self.cond[n]);
        for c in base..base + 4 {
            jsd -= self.mass[c] / p * binary_entropy(self.cond[c]);
        }
        // Non-negative by Jensen; guard the float dust.
        (p * jsd).max(0.0)
    }
}

/// Beta-independent expansion gains for every interior node.
#[derive(Debug, Clone)]
pub struct InfoCache {
    side_exponent: u32,
    delta_iy: Vec<f64>,
    delta_ix: Vec<f64>,
}

impl InfoCache {
    /// Compute both gains for all interior nodes in one parallel pass.
    pub fn build(joint: &JointModel) -> Self {
        let interior = level_start(joint.side_exponent());
        let pairs = par::map_indices(interior, |n| {
            (joint.delta_iy_unchecked(n), joint.delta_ix_unchecked(n))
        });
        let mut delta_iy = Vec::with_capacity(interior);
        let mut delta_ix = Vec::with_capacity(interior);
        for (iy, ix) in pairs {
            delta_iy.push(iy);
            delta_ix.push(ix);
        }
        Self {
            side_exponent: joint.side_exponent(),
            delta_iy,
            delta_ix,
        }
    }

    pub fn side_exponent(&self) -> u32 {
        self.side_exponent
    }

    pub fn interior_count(&self) -> usize {
        self.delta_iy.len()
    }

    fn require_interior(&self, n: NodeId) -> Result<()> {
        if n < self.interior_count() {
            Ok(())
        } else if n < crate::tree::node_count(self.side_exponent) {
            Err(Error::NotInterior(n))
        } else {
            Err(Error::InvalidNode(n))
        }
    }

    pub fn delta_iy(&self, n: NodeId) -> Result<f64> {
        self.require_interior(n)?;
        Ok(self.delta_iy[n])
    }

    pub fn delta_ix(&self, n: NodeId) -> Result<f64> {
        self.require_interior(n)?;
        Ok(self.delta_ix[n])
    }

    /// Net expansion gain at trade-off `beta`:
    /// delta_iy(n) - delta_ix(n) / beta.
    pub fn delta_l_tilde(&self, n: NodeId, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        self.require_interior(n)?;
        Ok(self.delta_l_unchecked(n, beta))
    }

    fn delta_l_unchecked(&self, n: NodeId, beta: f64) -> f64 {
        self.delta_iy[n] - self.delta_ix[n] / beta
    }

    /// Per-node sum of the relevant-information gains over each node's
    /// interior descendants (itself included); zero at full-tree leaves.
    /// This is the large-beta limit of the future-aware expansion value.
    pub fn subtree_iy_sums(&self, tree: &QuadTree) -> Vec<f64> {
        let total = tree.node_count();
        let mut sums = vec![0.0; total];
        for depth in (0..tree.side_exponent()).rev() {
            let start = level_start(depth);
            let end = level_start(depth + 1);
            let (head, tail) = sums.split_at_mut(end);
            let iy = &self.delta_iy;
            par::fill_indexed(&mut head[start..end], start, |id| {
                let base = 4 * id + 1 - end;
                let future = tail[base] + tail[base + 1] + tail[base + 2] + tail[base + 3];
                iy[id] + future
            });
        }
        sums
    }

    /// Dump interior rows as CSV: node_id, depth, delta_iy_bits, delta_ix_bits.
    pub fn write_csv(&self, tree: &QuadTree, path: &std::path::Path) -> Result<()> {
        use std::fmt::Write as _;
        let mut out = String::from("node_id,depth,delta_iy_bits,delta_ix_bits\n");
        for n in 0..self.interior_count() {
            writeln!(
                out,
                "{n},{},{},{}",
                tree.depth(n),
                self.delta_iy[n],
                self.delta_ix[n]
            )
            .expect("write to string");
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveBeta(beta))
    }
}

/// One bottom-up value sweep over the full tree for a fixed beta.
///
/// `q` holds the future-aware expansion values (clamped at zero at every
/// node); `p` holds the same recursion without the clamp, whose value at a
/// node equals the plain sum of net gains over its interior descendants.
#[derive(Debug, Clone)]
pub struct ValueSweep {
    beta: f64,
    q: Vec<f64>,
    p: Vec<f64>,
}

impl ValueSweep {
    /// Compute both recursions for all nodes, one level at a time.
    pub fn compute(tree: &QuadTree, cache: &InfoCache, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if tree.side_exponent() != cache.side_exponent() {
            return Err(Error::SizeMismatch(format!(
                "tree side exponent {} vs cache {}",
                tree.side_exponent(),
                cache.side_exponent()
            )));
        }
        let ell = tree.side_exponent();
        let total = tree.node_count();
        let mut q = vec![0.0; total];
        let mut p = vec![0.0; total];
        for depth in (0..ell).rev() {
            let start = level_start(depth);
            let end = level_start(depth + 1);
            {
                let (head, tail) = q.split_at_mut(end);
                par::fill_indexed(&mut head[start..end], start, |id| {
                    let base = 4 * id + 1 - end;
                    let future = tail[base] + tail[base + 1] + tail[base + 2] + tail[base + 3];
                    (cache.delta_l_unchecked(id, beta) + future).max(0.0)
                });
            }
            {
                let (head, tail) = p.split_at_mut(end);
                par::fill_indexed(&mut head[start..end], start, |id| {
                    let base = 4 * id + 1 - end;
                    let future = tail[base] + tail[base + 1] + tail[base + 2] + tail[base + 3];
                    cache.delta_l_unchecked(id, beta) + future
                });
            }
        }
        Ok(Self { beta, q, p })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Future-aware expansion value of `n`; zero at full-tree leaves.
    pub fn q_value(&self, n: NodeId) -> f64 {
        self.q[n]
    }

    /// Unclamped accumulated net gain of `n`'s interior subtree.
    pub fn p_value(&self, n: NodeId) -> f64 {
        self.p[n]
    }
}

/// Future-aware expansion value of a single node (full sweep, then index).
pub fn q_tilde(tree: &QuadTree, cache: &InfoCache, n: NodeId, beta: f64) -> Result<f64> {
    tree.validate_node(n)?;
    Ok(ValueSweep::compute(tree, cache, beta)?.q_value(n))
}

/// Unclamped accumulated net gain of a single node.
pub fn p_tilde(tree: &QuadTree, cache: &InfoCache, n: NodeId, beta: f64) -> Result<f64> {
    tree.validate_node(n)?;
    Ok(ValueSweep::compute(tree, cache, beta)?.p_value(n))
}

/// Select the tree for `beta` by expanding every node whose future-aware
/// value is strictly positive, starting from the root.
///
/// The result does not depend on expansion order: the values are computed
/// once over the full tree, so a node ends up interior exactly when itself
/// and all of its ancestors have positive value.
pub fn qtree_search(tree: &QuadTree, cache: &InfoCache, beta: f64) -> Result<TreeAbstraction> {
    let sweep = ValueSweep::compute(tree, cache, beta)?;
    Ok(abstraction_from_values(tree, &sweep))
}

/// Tree-search step alone, on an already computed value sweep.
pub fn abstraction_from_values(tree: &QuadTree, sweep: &ValueSweep) -> TreeAbstraction {
    frontier(tree, sweep.beta(), |n| sweep.q_value(n) > 0.0)
}

/// Greedy baseline: expand only while the immediate net gain is positive,
/// ignoring descendants' future gains.
pub fn greedy_search(tree: &QuadTree, cache: &InfoCache, beta: f64) -> Result<TreeAbstraction> {
    check_beta(beta)?;
    if tree.side_exponent() != cache.side_exponent() {
        return Err(Error::SizeMismatch(format!(
            "tree side exponent {} vs cache {}",
            tree.side_exponent(),
            cache.side_exponent()
        )));
    }
    Ok(frontier(tree, beta, |n| {
        cache.delta_l_unchecked(n, beta) > 0.0
    }))
}

/// Leaves of the tree grown from the root by expanding every interior node
/// that satisfies `expand`.
fn frontier<F: Fn(NodeId) -> bool>(tree: &QuadTree, beta: f64, expand: F) -> TreeAbstraction {
    let mut leaves = Vec::new();
    let mut stack = vec![0];
    while let Some(n) = stack.pop() {
        if tree.is_interior(n) && expand(n) {
            let base = 4 * n + 1;
            stack.extend([base, base + 1, base + 2, base + 3]);
        } else {
            leaves.push(n);
        }
    }
    leaves.sort_unstable();
    TreeAbstraction::from_sorted_unchecked(tree.side_exponent(), leaves, Some(beta))
}

/// Information-bottleneck objective of an abstraction:
/// I(Z;Y) - I(Z;X) / beta over the leaf partition, in bits.
///
/// The encoder is deterministic, so I(Z;X) reduces to the leaf-mass entropy
/// and I(Z;Y) to the drop in occupancy entropy across the partition.
pub fn ib_objective(joint: &JointModel, abs: &TreeAbstraction, beta: f64) -> f64 {
    assert!(beta > 0.0, "beta must be positive");
    let mut h_z = 0.0;
    let mut h_y_given_z = 0.0;
    for &z in abs.leaves() {
        let m = joint.mass(z);
        h_z += term(m);
        h_y_given_z += m * binary_entropy(joint.conditional(z));
    }
    let i_zy = binary_entropy(joint.conditional(0)) - h_y_given_z;
    let i_zx = h_z;
    i_zy - i_zx / beta
}

/// Strictly increasing sequence of positive trade-off values.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaSchedule {
    values: Vec<f64>,
}

impl BetaSchedule {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty beta schedule".into()));
        }
        for &b in &values {
            check_beta(b)?;
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "beta schedule must be strictly increasing".into(),
            ));
        }
        Ok(Self { values })
    }

    /// Geometric ladder of `count` values from `min` to `max` inclusive.
    pub fn geometric(min: f64, max: f64, count: usize) -> Result<Self> {
        check_beta(min)?;
        check_beta(max)?;
        if count == 0 {
            return Err(Error::InvalidParameter("empty beta schedule".into()));
        }
        if count == 1 {
            return Self::new(vec![min]);
        }
        if min >= max {
            return Err(Error::InvalidParameter(format!(
                "need min < max for a geometric schedule, got {min} >= {max}"
            )));
        }
        let ratio = (max / min).powf(1.0 / (count - 1) as f64);
        let mut values: Vec<f64> = (0..count).map(|i| min * ratio.powi(i as i32)).collect();
        // Land the endpoint exactly despite powf rounding.
        values[count - 1] = max;
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
