//! Experiment drivers: compression/cost sweeps, four-phase timing runs, and
//! the exhaustive tree-space oracle for tiny instances.

pub mod maps;
pub mod verify;

use std::path::Path as FsPath;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{build_graph, AbstractGraph};
use crate::grid::{default_prior, GridMap};
use crate::info::{
    abstraction_from_values, ib_objective, BetaSchedule, InfoCache, JointModel, ValueSweep,
};
use crate::planner::{
    plan_batch, plan_detailed, CostParams, PlanQuery, PlanReport, ValueCache, DEFAULT_GAMMA,
};
use crate::tree::{NodeId, QuadTree, TreeAbstraction};

/// Cost model arguments independent of map size.
#[derive(Debug, Clone, Copy)]
pub struct CostArgs {
    pub eps: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: f64,
}

impl Default for CostArgs {
    fn default() -> Self {
        Self {
            eps: 0.5,
            lambda1: 0.001,
            lambda2: 1.0,
            gamma: DEFAULT_GAMMA,
        }
    }
}

impl CostArgs {
    pub fn params_for(&self, side_exponent: u32) -> Result<CostParams> {
        CostParams::new(
            side_exponent,
            self.eps,
            self.lambda1,
            self.lambda2,
            self.gamma,
        )
    }
}

/// Configuration of a compression sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub schedule: BetaSchedule,
    pub query_count: usize,
    pub seed: u64,
    pub cost: CostArgs,
}

impl SweepConfig {
    pub fn new(schedule: BetaSchedule) -> Self {
        Self {
            schedule,
            query_count: 200,
            seed: maps::DEMO_MAP_SEED,
            cost: CostArgs::default(),
        }
    }
}

/// One sweep row per beta. Timing columns hold medians of three runs; all
/// other columns are deterministic for a fixed config and seed.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub beta: f64,
    pub leaf_count: usize,
    pub compression: f64,
    pub avg_cost_ratio: f64,
    pub frac_feasible: f64,
    pub info_ns: u128,
    pub qvalue_ns: u128,
    pub qtree_ns: u128,
    pub dijkstra_ns: u128,
}

impl SweepRow {
    /// Four-phase total: information pass, value sweep, tree extraction,
    /// and per-query graph search.
    pub fn plan_total_ns(&self) -> u128 {
        self.info_ns + self.qvalue_ns + self.qtree_ns + self.dijkstra_ns
    }
}

/// Sweep output: per-beta rows plus the mean compression at which queries
/// first obtained a feasible plan (None when no query ever did).
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub first_feasible_compression: Option<f64>,
    /// Fraction of queries that found a feasible plan at some beta.
    pub queries_with_feasible: f64,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
    let t0 = Instant::now();
    let value = f();
    (value, t0.elapsed().as_nanos())
}

/// Run `f` three times, returning the first result and the median time.
fn median3<T>(mut f: impl FnMut() -> T) -> (T, u128) {
    let (value, t1) = timed(&mut f);
    let (_, t2) = timed(&mut f);
    let (_, t3) = timed(&mut f);
    let mut ts = [t1, t2, t3];
    ts.sort_unstable();
    (value, ts[1])
}

/// Sample start/goal pairs uniformly over tolerated cells, resampling the
/// goal while it collides with the start.
pub fn sample_queries(
    map: &GridMap,
    eps: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<PlanQuery>> {
    let side = map.side();
    let free: Vec<usize> = (0..map.cell_count())
        .filter(|&i| map.occupancy_at(i) <= eps)
        .collect();
    if free.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two tolerated cells to sample queries".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cell = |i: usize| (i % side, i / side);
    Ok((0..count)
        .map(|_| {
            let s = free[rng.random_range(0..free.len())];
            let mut g = s;
            while g == s {
                g = free[rng.random_range(0..free.len())];
            }
            PlanQuery::new(cell(s), cell(g))
        })
        .collect())
}

fn solve_all(
    tree: &QuadTree,
    abs: &TreeAbstraction,
    graph: &AbstractGraph,
    values: &ValueCache,
    queries: &[PlanQuery],
) -> Vec<PlanReport> {
    queries
        .iter()
        .map(|&q| plan_detailed(tree, abs, graph, values, q).expect("query in bounds"))
        .collect()
}

/// Sweep the schedule on one map: per beta, rebuild the abstraction, plan
/// every query, and record cost ratios against the finest-resolution optimum.
///
/// Phases are timed serially (median of three); the untimed baseline solves
/// run in parallel when the `parallel` feature is on, which does not change
/// any reported value.
pub fn run_sweep(map: &GridMap, config: &SweepConfig) -> Result<SweepOutput> {
    let tree = QuadTree::build(map);
    let prior = default_prior(map);
    let params = config.cost.params_for(map.side_exponent())?;
    let values = ValueCache::build(map, &tree, &params)?;

    let (cache, info_ns) = median3(|| {
        let joint = JointModel::build(map, &prior, &tree).expect("validated sizes");
        InfoCache::build(&joint)
    });

    let queries = sample_queries(map, params.eps(), config.query_count, config.seed)?;

    let full_abs = TreeAbstraction::full_resolution(&tree);
    let full_graph = build_graph(&tree, &full_abs);
    let frp_costs: Vec<f64> = plan_batch(&tree, &full_abs, &full_graph, &values, &queries)?
        .into_iter()
        .map(|r| r.path.cost)
        .collect();

    let mut rows = Vec::with_capacity(config.schedule.len());
    let mut first_feasible: Vec<Option<f64>> = vec![None; queries.len()];

    for &beta in config.schedule.values() {
        let (sweep, qvalue_ns) =
            median3(|| ValueSweep::compute(&tree, &cache, beta).expect("beta validated"));
        let (abs, qtree_ns) = median3(|| abstraction_from_values(&tree, &sweep));
        let graph = build_graph(&tree, &abs);
        let (reports, batch_ns) = median3(|| solve_all(&tree, &abs, &graph, &values, &queries));
        let dijkstra_ns = batch_ns / queries.len().max(1) as u128;

        let mut ratio_sum = 0.0;
        let mut feasible = 0usize;
        for (i, report) in reports.iter().enumerate() {
            ratio_sum += report.path.cost / frp_costs[i];
            if report.path.feasible {
                feasible += 1;
                if first_feasible[i].is_none() {
                    first_feasible[i] = Some(abs.compression());
                }
            }
        }

        rows.push(SweepRow {
            beta,
            leaf_count: abs.leaf_count(),
            compression: abs.compression(),
            avg_cost_ratio: ratio_sum / queries.len() as f64,
            frac_feasible: feasible as f64 / queries.len() as f64,
            info_ns,
            qvalue_ns,
            qtree_ns,
            dijkstra_ns,
        });
    }

    let reached: Vec<f64> = first_feasible.iter().filter_map(|&c| c).collect();
    let first_feasible_compression = if reached.is_empty() {
        None
    } else {
        Some(reached.iter().sum::<f64>() / reached.len() as f64)
    };
    Ok(SweepOutput {
        rows,
        first_feasible_compression,
        queries_with_feasible: reached.len() as f64 / queries.len() as f64,
    })
}

/// Sweep CSV with the timing columns last.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from(
        "beta,leaf_count,compression,avg_cost_ratio,frac_feasible,info_ns,qvalue_ns,qtree_ns,dijkstra_ns,plan_total_ns\n",
    );
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.beta,
            r.leaf_count,
            r.compression,
            r.avg_cost_ratio,
            r.frac_feasible,
            r.info_ns,
            r.qvalue_ns,
            r.qtree_ns,
            r.dijkstra_ns,
            r.plan_total_ns()
        )
        .expect("write to string");
    }
    out
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &FsPath) -> Result<()> {
    std::fs::write(path, sweep_csv(rows))?;
    Ok(())
}

/// Timing-benchmark configuration.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub schedule: BetaSchedule,
    pub query_count: usize,
    pub seed: u64,
    pub cost: CostArgs,
}

impl BenchConfig {
    pub fn new(schedule: BetaSchedule) -> Self {
        Self {
            schedule,
            query_count: 100,
            seed: maps::DEMO_MAP_SEED,
            cost: CostArgs::default(),
        }
    }
}

/// One timing row per (map size, beta).
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub side: usize,
    pub beta: f64,
    pub leaf_count: usize,
    pub compression: f64,
    pub info_ns: u128,
    pub qvalue_ns: u128,
    pub qtree_ns: u128,
    pub dijkstra_ns: u128,
    /// Average per-query finest-resolution search time.
    pub baseline_ns: u128,
}

impl BenchRow {
    pub fn total_ns(&self) -> u128 {
        self.info_ns + self.qvalue_ns + self.qtree_ns + self.dijkstra_ns
    }

    /// Four-phase total over the finest-resolution search baseline.
    pub fn normalized(&self) -> f64 {
        self.total_ns() as f64 / self.baseline_ns as f64
    }
}

/// Worst-case timing runs: every phase, including the information pass, is
/// redone from scratch for each beta, and everything is timed serially.
pub fn run_bench(maps: &[GridMap], config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for map in maps {
        let tree = QuadTree::build(map);
        let prior = default_prior(map);
        let params = config.cost.params_for(map.side_exponent())?;
        let values = ValueCache::build(map, &tree, &params)?;
        let queries = sample_queries(map, params.eps(), config.query_count, config.seed)?;

        let full_abs = TreeAbstraction::full_resolution(&tree);
        let full_graph = build_graph(&tree, &full_abs);
        let (_, baseline_batch) =
            median3(|| solve_all(&tree, &full_abs, &full_graph, &values, &queries));
        let baseline_ns = baseline_batch / queries.len().max(1) as u128;

        for &beta in config.schedule.values() {
            let (cache, info_ns) = median3(|| {
                let joint = JointModel::build(map, &prior, &tree).expect("validated sizes");
                InfoCache::build(&joint)
            });
            let (sweep, qvalue_ns) =
                median3(|| ValueSweep::compute(&tree, &cache, beta).expect("beta validated"));
            let (abs, qtree_ns) = median3(|| abstraction_from_values(&tree, &sweep));
            let graph = build_graph(&tree, &abs);
            let (_, batch_ns) = median3(|| solve_all(&tree, &abs, &graph, &values, &queries));
            rows.push(BenchRow {
                side: map.side(),
                beta,
                leaf_count: abs.leaf_count(),
                compression: abs.compression(),
                info_ns,
                qvalue_ns,
                qtree_ns,
                dijkstra_ns: batch_ns / queries.len().max(1) as u128,
                baseline_ns,
            });
        }
    }
    Ok(rows)
}

/// Bench CSV, one row per (size, beta).
pub fn bench_csv(rows: &[BenchRow]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from(
        "size,beta,leaf_count,compression,info_ns,qvalue_ns,qtree_ns,dijkstra_ns,total_ns,baseline_ns,normalized\n",
    );
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.side,
            r.beta,
            r.leaf_count,
            r.compression,
            r.info_ns,
            r.qvalue_ns,
            r.qtree_ns,
            r.dijkstra_ns,
            r.total_ns(),
            r.baseline_ns,
            r.normalized()
        )
        .expect("write to string");
    }
    out
}

pub fn write_bench_csv(rows: &[BenchRow], path: &FsPath) -> Result<()> {
    std::fs::write(path, bench_csv(rows))?;
    Ok(())
}

/// Exhaustively enumerate every quadtree abstraction of a tiny map and
/// return the best objective value with a witness. Only maps with side
/// exponent <= 2 are accepted; the tree space explodes beyond that.
pub fn oracle_enumerate_trees(
    map: &GridMap,
    beta: f64,
) -> Result<(f64, TreeAbstraction)> {
    if map.side_exponent() > 2 {
        return Err(Error::TooLarge(format!(
            "tree enumeration needs side exponent <= 2, got {}",
            map.side_exponent()
        )));
    }
    if beta <= 0.0 {
        return Err(Error::NonPositiveBeta(beta));
    }
    let tree = QuadTree::build(map);
    let prior = default_prior(map);
    let joint = JointModel::build(map, &prior, &tree)?;

    let candidates = enumerate_leaf_sets(&tree, 0);
    let mut best: Option<(f64, TreeAbstraction)> = None;
    for mut leaves in candidates {
        leaves.sort_unstable();
        let abs = TreeAbstraction::from_sorted_unchecked(tree.side_exponent(), leaves, Some(beta));
        let objective = ib_objective(&joint, &abs, beta);
        if best.as_ref().is_none_or(|(b, _)| objective > *b) {
            best = Some((objective, abs));
        }
    }
    Ok(best.expect("at least the root-only abstraction exists"))
}

/// All leaf sets of subtrees rooted at `n`: either `n` stays a leaf or it
/// expands into every combination of its children's leaf sets.
fn enumerate_leaf_sets(tree: &QuadTree, n: NodeId) -> Vec<Vec<NodeId>> {
    let mut sets = vec![vec![n]];
    if let Some(kids) = tree.children(n) {
        let child_sets: Vec<Vec<Vec<NodeId>>> =
            kids.iter().map(|&c| enumerate_leaf_sets(tree, c)).collect();
        let mut combos: Vec<Vec<NodeId>> = vec![Vec::new()];
        for options in &child_sets {
            let mut next = Vec::with_capacity(combos.len() * options.len());
            for prefix in &combos {
                for option in options {
                    let mut merged = prefix.clone();
                    merged.extend_from_slice(option);
                    next.push(merged);
                }
            }
            combos = next;
        }
        sets.extend(combos);
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::qtree_search;

    #[test]
    fn enumeration_counts() {
        let tree = QuadTree::with_side_exponent(1);
        assert_eq!(enumerate_leaf_sets(&tree, 0).len(), 2);
        let tree = QuadTree::with_side_exponent(2);
        assert_eq!(enumerate_leaf_sets(&tree, 0).len(), 17);
    }

    #[test]
    fn oracle_trivial_cases() {
        // All-free: best is the root-only abstraction at objective 0.
        let map = GridMap::uniform(1, 0.0).unwrap();
        let (best, abs) = oracle_enumerate_trees(&map, 10.0).unwrap();
        assert_eq!(best, 0.0);
        assert_eq!(abs.leaves(), &[0]);

        // One occupied cell at huge beta: expanding wins.
        let map = GridMap::new(1, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let (best, abs) = oracle_enumerate_trees(&map, 1e6).unwrap();
        assert_eq!(abs.leaf_count(), 4);
        assert!(best > 0.5);

        let map = GridMap::uniform(3, 0.0).unwrap();
        assert!(matches!(
            oracle_enumerate_trees(&map, 1.0),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn oracle_matches_search_on_random_maps() {
        for seed in 0..10 {
            let map = maps::random_map(2, seed);
            let tree = QuadTree::build(&map);
            let prior = default_prior(&map);
            let joint = JointModel::build(&map, &prior, &tree).unwrap();
            let cache = InfoCache::build(&joint);
            for beta in [0.01, 1.0, 100.0] {
                let (best, _) = oracle_enumerate_trees(&map, beta).unwrap();
                let found = qtree_search(&tree, &cache, beta).unwrap();
                let objective = ib_objective(&joint, &found, beta);
                assert!(
                    (objective - best).abs() < 1e-9,
                    "seed {seed} beta {beta}: search {objective} vs oracle {best}"
                );
            }
        }
    }

    #[test]
    fn sweep_rows_on_tiny_map() {
        let map = maps::synthetic_blob_map(4, 3);
        let schedule = BetaSchedule::geometric(0.01, 1e9, 6).unwrap();
        let mut config = SweepConfig::new(schedule);
        config.query_count = 8;
        config.seed = 5;
        let output = run_sweep(&map, &config).unwrap();
        assert_eq!(output.rows.len(), 6);
        for row in &output.rows {
            assert!(row.compression > 0.0 && row.compression <= 1.0);
            assert!(row.avg_cost_ratio >= 1.0 - 1e-9);
            assert!((0.0..=1.0).contains(&row.frac_feasible));
        }
        // Ratios non-increasing, feasibility non-decreasing.
        for pair in output.rows.windows(2) {
            assert!(pair[1].avg_cost_ratio <= pair[0].avg_cost_ratio + 1e-9);
            assert!(pair[1].frac_feasible >= pair[0].frac_feasible);
        }
    }

    #[test]
    fn sweep_deterministic_modulo_timing() {
        let map = maps::synthetic_blob_map(4, 11);
        let schedule = BetaSchedule::geometric(0.1, 1e6, 4).unwrap();
        let mut config = SweepConfig::new(schedule);
        config.query_count = 5;
        let a = run_sweep(&map, &config).unwrap();
        let b = run_sweep(&map, &config).unwrap();
        assert_eq!(a.first_feasible_compression, b.first_feasible_compression);
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.beta, rb.beta);
            assert_eq!(ra.leaf_count, rb.leaf_count);
            assert_eq!(ra.compression, rb.compression);
            assert_eq!(ra.avg_cost_ratio, rb.avg_cost_ratio);
            assert_eq!(ra.frac_feasible, rb.frac_feasible);
        }
    }

    #[test]
    fn sweep_on_all_free_map() {
        // Nothing is ever worth refining, so every row is the root-only
        // abstraction; ratios stay >= 1 (the aggregated path overpays).
        let map = GridMap::uniform(3, 0.0).unwrap();
        let schedule = BetaSchedule::geometric(0.01, 1e9, 4).unwrap();
        let mut config = SweepConfig::new(schedule);
        config.query_count = 6;
        let output = run_sweep(&map, &config).unwrap();
        for row in &output.rows {
            assert_eq!(row.leaf_count, 1);
            assert!(row.avg_cost_ratio >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn bench_rows_shape() {
        let maps = vec![maps::synthetic_blob_map(3, 2), maps::synthetic_blob_map(4, 2)];
        let schedule = BetaSchedule::new(vec![1.0, 1e6]).unwrap();
        let mut config = BenchConfig::new(schedule);
        config.query_count = 4;
        let rows = run_bench(&maps, &config).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].side, 8);
        assert_eq!(rows[3].side, 16);
        for row in &rows {
            assert!(row.leaf_count >= 1);
            assert!(row.baseline_ns > 0);
            assert!(row.normalized() > 0.0);
            assert_eq!(
                row.total_ns(),
                row.info_ns + row.qvalue_ns + row.qtree_ns + row.dijkstra_ns
            );
        }
    }

    #[test]
    fn query_sampling_respects_tolerance() {
        let map = maps::synthetic_blob_map(5, 2);
        let queries = sample_queries(&map, 0.5, 50, 3).unwrap();
        for q in &queries {
            assert!(map.occupancy(q.start.0, q.start.1) <= 0.5);
            assert!(map.occupancy(q.goal.0, q.goal.1) <= 0.5);
            assert_ne!(q.start, q.goal);
        }
        // Fully blocked map cannot be sampled.
        let blocked = GridMap::uniform(2, 1.0).unwrap();
        assert!(sample_queries(&blocked, 0.5, 1, 0).is_err());
    }
}
