//! Property suite run by the `verify` command: checks the planner and
//! abstraction guarantees on a concrete map and reports pass/fail per
//! property.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{build_graph, AbstractGraph};
use crate::grid::{default_prior, GridMap};
use crate::info::{
    greedy_search, ib_objective, qtree_search, BetaSchedule, InfoCache, JointModel, ValueSweep,
};
use crate::planner::{plan, CostParams, Path, ValueCache};
use crate::tree::{level_start, NodeId, QuadTree, TreeAbstraction};

use super::{sample_queries, CostArgs};

#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl PropertyReport {
    fn pass(name: &'static str, details: String) -> Self {
        Self {
            name,
            passed: true,
            details,
        }
    }

    fn fail(name: &'static str, details: String) -> Self {
        Self {
            name,
            passed: false,
            details,
        }
    }

    fn check(name: &'static str, passed: bool, details: String) -> Self {
        Self {
            name,
            passed,
            details,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub query_count: usize,
    pub cost: CostArgs,
    pub schedule: BetaSchedule,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            query_count: 10,
            cost: CostArgs::default(),
            schedule: BetaSchedule::geometric(1e-3, 1e9, 12).expect("valid schedule"),
        }
    }
}

struct Instance {
    map: GridMap,
    tree: QuadTree,
    joint: JointModel,
    cache: InfoCache,
    params: CostParams,
    values: ValueCache,
}

impl Instance {
    fn build(map: &GridMap, cost: &CostArgs) -> Result<Self> {
        let tree = QuadTree::build(map);
        let prior = default_prior(map);
        let joint = JointModel::build(map, &prior, &tree)?;
        let cache = InfoCache::build(&joint);
        let params = cost.params_for(map.side_exponent())?;
        let values = ValueCache::build(map, &tree, &params)?;
        Ok(Self {
            map: map.clone(),
            tree,
            joint,
            cache,
            params,
            values,
        })
    }
}

/// Run every property on the map and collect the reports.
pub fn verify_map(map: &GridMap, config: &VerifyConfig) -> Result<Vec<PropertyReport>> {
    let inst = Instance::build(map, &config.cost)?;
    Ok(vec![
        monotone_cost_in_beta(&inst, config)?,
        limit_tree_full_iff(&inst),
        abstract_feasibility_cost_iff(&inst, config),
        finest_feasibility_cost_iff(&inst, config),
        obstacle_value_iff(&inst),
        value_aggregation_identity(&inst),
        child_subset_bound(&inst),
        p_value_below_q_value(&inst)?,
        q_value_upper_bound(&inst)?,
        q_value_limit(&inst)?,
        telescoping_objective(&inst),
        monotone_refinement(&inst, config)?,
        qtree_dominates_greedy(&inst, config)?,
    ])
}

/// Every leaf of `fine` is a descendant-or-self of some leaf of `coarse`.
pub fn refines(tree: &QuadTree, coarse: &TreeAbstraction, fine: &TreeAbstraction) -> bool {
    fine.leaves().iter().all(|&n| {
        let mut a = n;
        loop {
            if coarse.contains(a) {
                return true;
            }
            match tree.parent(a) {
                Some(p) => a = p,
                None => return false,
            }
        }
    })
}

fn monotone_cost_in_beta(inst: &Instance, config: &VerifyConfig) -> Result<PropertyReport> {
    let name = "monotone-cost-in-beta";
    let queries = sample_queries(&inst.map, inst.params.eps(), config.query_count, config.seed)?;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(config.schedule.len());
    for &beta in config.schedule.values() {
        let abs = qtree_search(&inst.tree, &inst.cache, beta)?;
        let graph = build_graph(&inst.tree, &abs);
        let costs: Vec<f64> = queries
            .iter()
            .map(|&q| plan(&inst.tree, &abs, &graph, &inst.values, q).map(|p| p.cost))
            .collect::<Result<_>>()?;
        table.push(costs);
    }
    let mut worst: f64 = 0.0;
    for row in table.windows(2) {
        for (a, b) in row[0].iter().zip(&row[1]) {
            worst = worst.max(b - a);
        }
    }
    Ok(PropertyReport::check(
        name,
        worst <= 1e-9,
        format!("max cost increase along schedule: {worst:.3e}"),
    ))
}

fn limit_tree_full_iff(inst: &Instance) -> PropertyReport {
    let name = "limit-tree-full-iff";
    let ell = inst.tree.side_exponent();
    let penultimate = level_start(ell - 1)..level_start(ell);
    let condition = penultimate
        .clone()
        .all(|n| inst.cache.delta_iy(n).unwrap() > 0.0);

    // Limit tree: expand while the subtree's relevant-information sum is
    // positive.
    let sums = inst.cache.subtree_iy_sums(&inst.tree);
    let mut leaves = Vec::new();
    let mut stack = vec![0usize];
    while let Some(n) = stack.pop() {
        if inst.tree.is_interior(n) && sums[n] > 0.0 {
            let base = 4 * n + 1;
            stack.extend([base, base + 1, base + 2, base + 3]);
        } else {
            leaves.push(n);
        }
    }
    let full = leaves.len() == inst.tree.leaf_count();
    PropertyReport::check(
        name,
        condition == full,
        format!("all penultimate gains positive: {condition}; limit tree full: {full}"),
    )
}

/// Random simple path on a graph, as vertex indices.
fn random_simple_path(
    graph: &AbstractGraph,
    rng: &mut ChaCha8Rng,
    max_len: usize,
) -> Vec<usize> {
    let start = rng.random_range(0..graph.vertex_count());
    let mut path = vec![start];
    let mut used = vec![false; graph.vertex_count()];
    used[start] = true;
    while path.len() < max_len {
        let here = *path.last().unwrap();
        let options: Vec<usize> = graph
            .neighbors(here)
            .iter()
            .copied()
            .filter(|&v| !used[v])
            .collect();
        if options.is_empty() {
            break;
        }
        let next = options[rng.random_range(0..options.len())];
        used[next] = true;
        path.push(next);
    }
    path
}

fn feasibility_biconditional(
    inst: &Instance,
    graph: &AbstractGraph,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> (bool, usize) {
    let mut checked = 0;
    for _ in 0..samples {
        let vertices = random_simple_path(graph, rng, 12);
        let nodes: Vec<NodeId> = vertices.iter().map(|&v| graph.node_of(v)).collect();
        let path = Path::assemble(&inst.tree, &inst.values, nodes).expect("valid walk");
        let all_tolerated = path.nodes.iter().all(|&z| {
            inst.tree
                .cell_indices(z)
                .all(|c| inst.map.occupancy_at(c) <= inst.params.eps())
        });
        let cost_feasible = path.cost < inst.params.big_m();
        checked += 1;
        if cost_feasible != all_tolerated {
            return (false, checked);
        }
    }
    (true, checked)
}

fn abstract_feasibility_cost_iff(inst: &Instance, config: &VerifyConfig) -> PropertyReport {
    let name = "abstract-feasibility-cost-iff";
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xa5a5);
    let mut total = 0;
    for &beta in config.schedule.values().iter().step_by(3) {
        let abs = qtree_search(&inst.tree, &inst.cache, beta).expect("valid beta");
        if abs.is_full_resolution() {
            continue;
        }
        let graph = build_graph(&inst.tree, &abs);
        let (ok, checked) = feasibility_biconditional(inst, &graph, &mut rng, 200);
        total += checked;
        if !ok {
            return PropertyReport::fail(name, format!("counterexample after {total} paths"));
        }
    }
    PropertyReport::pass(name, format!("{total} abstract paths checked"))
}

fn finest_feasibility_cost_iff(inst: &Instance, config: &VerifyConfig) -> PropertyReport {
    let name = "finest-feasibility-cost-iff";
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5a5a);
    let abs = TreeAbstraction::full_resolution(&inst.tree);
    let graph = build_graph(&inst.tree, &abs);
    let (ok, checked) = feasibility_biconditional(inst, &graph, &mut rng, 400);
    PropertyReport::check(name, ok, format!("{checked} finest-resolution paths checked"))
}

fn obstacle_value_iff(inst: &Instance) -> PropertyReport {
    let name = "obstacle-value-iff";
    for n in inst.tree.interior_nodes() {
        let predicate = inst.values.value(n) > inst.params.interior_threshold();
        let truth = inst
            .tree
            .cell_indices(n)
            .any(|c| inst.map.occupancy_at(c) > inst.params.eps());
        if predicate != truth {
            return PropertyReport::fail(
                name,
                format!("node {n}: predicate {predicate}, subtree truth {truth}"),
            );
        }
    }
    PropertyReport::pass(
        name,
        format!("{} interior nodes checked", inst.tree.interior_nodes().len()),
    )
}

fn value_aggregation_identity(inst: &Instance) -> PropertyReport {
    let name = "value-aggregation-identity";
    let mut worst: f64 = 0.0;
    for n in 0..inst.tree.node_count() {
        let r = inst.tree.r_value(n);
        let direct: f64 = inst
            .tree
            .cell_indices(n)
            .map(|c| crate::planner::cell_cost_at(&inst.map, &inst.params, c))
            .sum::<f64>()
            / (1u64 << (2 * r)) as f64;
        let v = inst.values.value(n);
        let scale = v.abs().max(1e-300);
        worst = worst.max((v - direct).abs() / scale);
    }
    PropertyReport::check(name, worst <= 1e-12, format!("max relative error {worst:.3e}"))
}

fn child_subset_bound(inst: &Instance) -> PropertyReport {
    let name = "child-subset-bound";
    for n in inst.tree.interior_nodes() {
        let lhs = inst.values.weight(&inst.tree, n);
        let kids = inst.tree.children(n).unwrap();
        let kid_weights: Vec<f64> = kids
            .iter()
            .map(|&c| inst.values.weight(&inst.tree, c))
            .collect();
        for mask in 0u32..16 {
            let rhs: f64 = (0..4)
                .filter(|i| mask & (1 << i) == 0)
                .map(|i| kid_weights[i])
                .sum();
            if lhs < rhs - 1e-12 * rhs.abs().max(1.0) {
                return PropertyReport::fail(
                    name,
                    format!("node {n} mask {mask:#06b}: {lhs} < {rhs}"),
                );
            }
        }
    }
    PropertyReport::pass(
        name,
        format!(
            "{} interior nodes x 16 subsets checked",
            inst.tree.interior_nodes().len()
        ),
    )
}

const BOUND_BETAS: [f64; 4] = [0.1, 1.0, 10.0, 1e6];

fn p_value_below_q_value(inst: &Instance) -> Result<PropertyReport> {
    let name = "p-value-below-q-value";
    for beta in BOUND_BETAS {
        let sweep = ValueSweep::compute(&inst.tree, &inst.cache, beta)?;
        for n in inst.tree.interior_nodes() {
            if sweep.p_value(n) > sweep.q_value(n) {
                return Ok(PropertyReport::fail(
                    name,
                    format!("node {n} beta {beta}: p {} > q {}", sweep.p_value(n), sweep.q_value(n)),
                ));
            }
        }
    }
    Ok(PropertyReport::pass(
        name,
        format!("betas {BOUND_BETAS:?}"),
    ))
}

fn q_value_upper_bound(inst: &Instance) -> Result<PropertyReport> {
    let name = "q-value-upper-bound";
    let sums = inst.cache.subtree_iy_sums(&inst.tree);
    for beta in BOUND_BETAS {
        let sweep = ValueSweep::compute(&inst.tree, &inst.cache, beta)?;
        for n in inst.tree.interior_nodes() {
            let bound = sums[n] + 1e-12 * sums[n].max(1.0);
            if sweep.q_value(n) > bound {
                return Ok(PropertyReport::fail(
                    name,
                    format!("node {n} beta {beta}: q {} > bound {bound}", sweep.q_value(n)),
                ));
            }
        }
    }
    Ok(PropertyReport::pass(name, format!("betas {BOUND_BETAS:?}")))
}

fn q_value_limit(inst: &Instance) -> Result<PropertyReport> {
    let name = "q-value-limit";
    let sums = inst.cache.subtree_iy_sums(&inst.tree);
    let sweep = ValueSweep::compute(&inst.tree, &inst.cache, 1e12)?;
    let mut worst: f64 = 0.0;
    for n in inst.tree.interior_nodes() {
        worst = worst.max((sweep.q_value(n) - sums[n]).abs());
    }
    Ok(PropertyReport::check(
        name,
        worst <= 1e-6,
        format!("max |q(1e12) - limit| = {worst:.3e}"),
    ))
}

fn telescoping_objective(inst: &Instance) -> PropertyReport {
    let name = "telescoping-objective";
    let beta = 3.0;
    // Grow from the root to the full tree breadth-first, expanding one node
    // at a time; every interior node is the expanded node exactly once.
    let mut leaves: Vec<NodeId> = vec![0];
    let mut abs = TreeAbstraction::from_sorted_unchecked(
        inst.tree.side_exponent(),
        leaves.clone(),
        None,
    );
    let mut objective = ib_objective(&inst.joint, &abs, beta);
    let mut worst: f64 = 0.0;
    for n in inst.tree.interior_nodes() {
        let base = 4 * n + 1;
        leaves.retain(|&z| z != n);
        leaves.extend([base, base + 1, base + 2, base + 3]);
        leaves.sort_unstable();
        abs = TreeAbstraction::from_sorted_unchecked(
            inst.tree.side_exponent(),
            leaves.clone(),
            None,
        );
        let next = ib_objective(&inst.joint, &abs, beta);
        let delta = next - objective;
        let expected = inst.cache.delta_l_tilde(n, beta).unwrap();
        worst = worst.max((delta - expected).abs());
        objective = next;
    }
    PropertyReport::check(
        name,
        worst <= 1e-9,
        format!("max |objective delta - net gain| = {worst:.3e}"),
    )
}

fn monotone_refinement(inst: &Instance, config: &VerifyConfig) -> Result<PropertyReport> {
    let name = "monotone-refinement";
    let mut previous: Option<TreeAbstraction> = None;
    for &beta in config.schedule.values() {
        let abs = qtree_search(&inst.tree, &inst.cache, beta)?;
        if let Some(coarse) = &previous {
            if !refines(&inst.tree, coarse, &abs) {
                return Ok(PropertyReport::fail(
                    name,
                    format!("beta {beta} does not refine its predecessor"),
                ));
            }
        }
        previous = Some(abs);
    }
    Ok(PropertyReport::pass(
        name,
        format!("{} schedule steps", config.schedule.len()),
    ))
}

fn qtree_dominates_greedy(inst: &Instance, config: &VerifyConfig) -> Result<PropertyReport> {
    let name = "qtree-dominates-greedy";
    let mut worst: f64 = 0.0;
    for &beta in config.schedule.values() {
        let q = qtree_search(&inst.tree, &inst.cache, beta)?;
        let g = greedy_search(&inst.tree, &inst.cache, beta)?;
        let qo = ib_objective(&inst.joint, &q, beta);
        let go = ib_objective(&inst.joint, &g, beta);
        worst = worst.max(go - qo);
    }
    Ok(PropertyReport::check(
        name,
        worst <= 1e-12,
        format!("max greedy excess {worst:.3e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::maps;

    #[test]
    fn all_properties_pass_on_random_map() {
        let map = maps::random_map(4, 7);
        let config = VerifyConfig {
            query_count: 5,
            ..VerifyConfig::default()
        };
        let reports = verify_map(&map, &config).unwrap();
        assert!(reports.len() >= 12);
        for r in &reports {
            assert!(r.passed, "{} failed: {}", r.name, r.details);
        }
    }

    #[test]
    fn all_properties_pass_on_blob_map() {
        let map = maps::synthetic_blob_map(4, 3);
        let config = VerifyConfig {
            query_count: 4,
            ..VerifyConfig::default()
        };
        let reports = verify_map(&map, &config).unwrap();
        for r in &reports {
            assert!(r.passed, "{} failed: {}", r.name, r.details);
        }
    }

    #[test]
    fn refinement_helper() {
        let tree = QuadTree::with_side_exponent(2);
        let root = TreeAbstraction::root_only(&tree);
        let full = TreeAbstraction::full_resolution(&tree);
        assert!(refines(&tree, &root, &full));
        assert!(refines(&tree, &root, &root));
        assert!(!refines(&tree, &full, &root));
    }
}
