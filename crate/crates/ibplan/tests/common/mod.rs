//! Shared brute-force oracles for the integration and acceptance suites.
//!
//! Everything here recomputes quantities from first principles, independent
//! of the library's aggregation paths: mutual information from explicit
//! joint tables, path optima from exhaustive simple-path enumeration.

#![allow(dead_code)]

use ibplan::graph::AbstractGraph;
use ibplan::grid::{CellPrior, GridMap};
use ibplan::tree::{QuadTree, TreeAbstraction};

fn log2_term(joint: f64, marginal_a: f64, marginal_b: f64) -> f64 {
    if joint > 0.0 {
        joint * (joint / (marginal_a * marginal_b)).log2()
    } else {
        0.0
    }
}

/// I(Z;X) and I(Z;Y) in bits from the explicit leaf partition, computed as
/// literal double sums over the joint distributions.
pub fn mutual_information_oracle(
    map: &GridMap,
    prior: &CellPrior,
    tree: &QuadTree,
    abs: &TreeAbstraction,
) -> (f64, f64) {
    let p_y1: f64 = (0..map.cell_count())
        .map(|i| prior.prob(i) * map.occupancy_at(i))
        .sum();
    let p_y0 = 1.0 - p_y1;

    let mut i_zx = 0.0;
    let mut i_zy = 0.0;
    for &z in abs.leaves() {
        let cells: Vec<usize> = tree.cell_indices(z).collect();
        let p_z: f64 = cells.iter().map(|&c| prior.prob(c)).sum();
        // Deterministic encoder: p(x, z) = p(x) for cells inside z.
        for &c in &cells {
            i_zx += log2_term(prior.prob(c), p_z, prior.prob(c));
        }
        let p_z_y1: f64 = cells
            .iter()
            .map(|&c| prior.prob(c) * map.occupancy_at(c))
            .sum();
        let p_z_y0 = p_z - p_z_y1;
        i_zy += log2_term(p_z_y1, p_z, p_y1);
        i_zy += log2_term(p_z_y0, p_z, p_y0);
    }
    (i_zx, i_zy)
}

/// Information-bottleneck objective from the oracle quantities.
pub fn objective_oracle(
    map: &GridMap,
    prior: &CellPrior,
    tree: &QuadTree,
    abs: &TreeAbstraction,
    beta: f64,
) -> f64 {
    let (i_zx, i_zy) = mutual_information_oracle(map, prior, tree, abs);
    i_zy - i_zx / beta
}

/// Visit every simple path of the graph (every start vertex, every length
/// >= 1). Paths are reported as vertex index slices.
pub fn for_each_simple_path(graph: &AbstractGraph, visit: &mut impl FnMut(&[usize])) {
    let n = graph.vertex_count();
    let mut used = vec![false; n];
    let mut path = Vec::new();
    for start in 0..n {
        extend(graph, start, &mut path, &mut used, visit);
    }
}

fn extend(
    graph: &AbstractGraph,
    v: usize,
    path: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut impl FnMut(&[usize]),
) {
    path.push(v);
    used[v] = true;
    visit(path);
    for &w in graph.neighbors(v) {
        if !used[w] {
            extend(graph, w, path, used, visit);
        }
    }
    used[v] = false;
    path.pop();
}

/// Exhaustive minimum path cost between two vertices under vertex weights
/// (start weight paid once, then each entered vertex).
pub fn min_simple_path_cost(
    graph: &AbstractGraph,
    weights: &[f64],
    start: usize,
    goal: usize,
) -> f64 {
    let mut best = f64::INFINITY;
    for_each_simple_path(graph, &mut |path| {
        if path[0] == start && *path.last().unwrap() == goal {
            let cost: f64 = path.iter().map(|&v| weights[v]).sum();
            if cost < best {
                best = cost;
            }
        }
    });
    best
}
