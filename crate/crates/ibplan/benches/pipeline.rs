//! Criterion benchmarks over the abstraction pipeline.
//!
//! Group names carry the active execution mode, so results from
//! `cargo bench` (parallel, default features) and
//! `cargo bench --no-default-features` (sequential) land side by side in
//! the same criterion report and can be compared directly.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use ibplan::experiments::maps::{synthetic_blob_map, DEMO_MAP_SEED};
use ibplan::experiments::{sample_queries, CostArgs};
use ibplan::graph::build_graph;
use ibplan::grid::default_prior;
use ibplan::info::{abstraction_from_values, InfoCache, JointModel, ValueSweep};
use ibplan::planner::{plan_batch, ValueCache};
use ibplan::tree::{QuadTree, TreeAbstraction};

const SIDE_EXPONENTS: [u32; 2] = [7, 8];
const BETA: f64 = 50.0;

fn bench_info_phase(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("{}/info_cache", ibplan::mode_name()));
    for ell in SIDE_EXPONENTS {
        let map = synthetic_blob_map(ell, DEMO_MAP_SEED);
        let tree = QuadTree::build(&map);
        let prior = default_prior(&map);
        group.bench_function(format!("{}x{}", map.side(), map.side()), |b| {
            b.iter(|| {
                let joint = JointModel::build(&map, &prior, &tree).unwrap();
                black_box(InfoCache::build(&joint))
            })
        });
    }
    group.finish();
}

fn bench_value_sweep_and_search(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("{}/sweep_and_search", ibplan::mode_name()));
    for ell in SIDE_EXPONENTS {
        let map = synthetic_blob_map(ell, DEMO_MAP_SEED);
        let tree = QuadTree::build(&map);
        let prior = default_prior(&map);
        let joint = JointModel::build(&map, &prior, &tree).unwrap();
        let cache = InfoCache::build(&joint);
        group.bench_function(format!("{}x{}", map.side(), map.side()), |b| {
            b.iter(|| {
                let sweep = ValueSweep::compute(&tree, &cache, BETA).unwrap();
                black_box(abstraction_from_values(&tree, &sweep))
            })
        });
    }
    group.finish();
}

fn bench_graph_build(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("{}/graph_build", ibplan::mode_name()));
    for ell in SIDE_EXPONENTS {
        let map = synthetic_blob_map(ell, DEMO_MAP_SEED);
        let tree = QuadTree::build(&map);
        let prior = default_prior(&map);
        let joint = JointModel::build(&map, &prior, &tree).unwrap();
        let cache = InfoCache::build(&joint);
        let sweep = ValueSweep::compute(&tree, &cache, BETA).unwrap();
        let abs = abstraction_from_values(&tree, &sweep);
        group.bench_function(
            format!("{}x{}/{}leaves", map.side(), map.side(), abs.leaf_count()),
            |b| {
                b.iter_batched(
                    || abs.clone(),
                    |abs| black_box(build_graph(&tree, &abs)),
                    BatchSize::LargeInput,
                )
            },
        );
    }
    group.finish();
}

fn bench_query_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("{}/plan_batch", ibplan::mode_name()));
    for ell in SIDE_EXPONENTS {
        let map = synthetic_blob_map(ell, DEMO_MAP_SEED);
        let tree = QuadTree::build(&map);
        let cost = CostArgs::default();
        let params = cost.params_for(ell).unwrap();
        let values = ValueCache::build(&map, &tree, &params).unwrap();
        let abs = TreeAbstraction::full_resolution(&tree);
        let graph = build_graph(&tree, &abs);
        let queries = sample_queries(&map, params.eps(), 20, DEMO_MAP_SEED).unwrap();
        group.bench_function(format!("{}x{}/20queries", map.side(), map.side()), |b| {
            b.iter(|| black_box(plan_batch(&tree, &abs, &graph, &values, &queries).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_info_phase,
    bench_value_sweep_and_search,
    bench_graph_build,
    bench_query_batch
);
criterion_main!(benches);
