//! Cost model, abstract node values, and deterministic Dijkstra planning.
//!
//! Path cost is a node sum: a vertex pays its own weight on entry and the
//! start vertex is paid once. The weight of a vertex is 4^r(n) times the
//! node's recursive value, which collapses to the plain cell cost at unit
//! cells, so finest-resolution and abstract planning share one machinery.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::path::Path as FsPath;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{is_nodal_neighbor, AbstractGraph};
use crate::grid::GridMap;
use crate::par;
use crate::tree::{level_start, NodeId, QuadTree, TreeAbstraction};

/// Cost parameters plus the derived obstacle penalty for a given map size.
///
/// The penalty exceeds the cost of visiting every free cell in the map, so
/// any path through an obstacle cell is costlier than any obstacle-free one;
/// it doubles as the feasibility threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    side_exponent: u32,
    eps: f64,
    lambda1: f64,
    lambda2: f64,
    gamma: f64,
    big_m: f64,
}

pub const DEFAULT_GAMMA: f64 = 2.0;

impl CostParams {
    pub fn new(side_exponent: u32, eps: f64, lambda1: f64, lambda2: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidParameter(format!("eps {eps} outside [0, 1]")));
        }
        if !(lambda1 > 0.0 && lambda1 <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda1 {lambda1} outside (0, 1]"
            )));
        }
        if !(0.0..=1.0).contains(&lambda2) {
            return Err(Error::InvalidParameter(format!(
                "lambda2 {lambda2} outside [0, 1]"
            )));
        }
        if gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!("gamma {gamma} must be > 0")));
        }
        let cells = (1u64 << (2 * side_exponent)) as f64;
        Ok(Self {
            side_exponent,
            eps,
            lambda1,
            lambda2,
            gamma,
            big_m: cells * (lambda1 + eps * lambda2) + gamma,
        })
    }

    pub fn side_exponent(&self) -> u32 {
        self.side_exponent
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Obstacle penalty and feasibility threshold.
    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    /// Obstacle threshold for interior nodes: lambda1 + eps * lambda2.
    pub fn interior_threshold(&self) -> f64 {
        self.lambda1 + self.eps * self.lambda2
    }
}

/// Traversal cost of the unit cell (x, y): lambda1 + lambda2 p when the cell
/// is within the occupancy tolerance (p <= eps, inclusive), the obstacle
/// penalty otherwise.
pub fn cell_cost(map: &GridMap, params: &CostParams, x: usize, y: usize) -> f64 {
    cell_cost_at(map, params, y * map.side() + x)
}

pub fn cell_cost_at(map: &GridMap, params: &CostParams, index: usize) -> f64 {
    let p = map.occupancy_at(index);
    if p <= params.eps {
        params.lambda1 + params.lambda2 * p
    } else {
        params.big_m
    }
}

/// Recursive node values for a (map, params) pair, cached for all nodes:
/// the cell cost at unit cells, the mean of the four child values above.
#[derive(Debug, Clone)]
pub struct ValueCache {
    params: CostParams,
    values: Vec<f64>,
}

impl ValueCache {
    pub fn build(map: &GridMap, tree: &QuadTree, params: &CostParams) -> Result<Self> {
        if map.side_exponent() != tree.side_exponent()
            || params.side_exponent() != tree.side_exponent()
        {
            return Err(Error::SizeMismatch(format!(
                "map side exponent {}, tree {}, params {}",
                map.side_exponent(),
                tree.side_exponent(),
                params.side_exponent()
            )));
        }
        let ell = tree.side_exponent();
        let leaf_start = level_start(ell);
        let mut values = vec![0.0; tree.node_count()];
        par::fill_indexed(&mut values[leaf_start..], leaf_start, |id| {
            cell_cost_at(map, params, tree.cell_index_of_leaf(id))
        });
        for depth in (0..ell).rev() {
            let start = level_start(depth);
            let end = level_start(depth + 1);
            let (head, tail) = values.split_at_mut(end);
            par::fill_indexed(&mut head[start..end], start, |id| {
                let base = 4 * id + 1 - end;
                0.25 * (tail[base] + tail[base + 1] + tail[base + 2] + tail[base + 3])
            });
        }
        Ok(Self {
            params: *params,
            values,
        })
    }

    pub fn params(&self) -> &CostParams {
        &self.params
    }

    /// V value of a node.
    pub fn value(&self, n: NodeId) -> f64 {
        self.values[n]
    }

    /// Vertex weight: 4^r(n) * V(n); the cell cost when n is a unit cell.
    pub fn weight(&self, tree: &QuadTree, n: NodeId) -> f64 {
        (1u64 << (2 * tree.r_value(n))) as f64 * self.values[n]
    }
}

/// Start and goal as unit-cell coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanQuery {
    pub start: (usize, usize),
    pub goal: (usize, usize),
}

impl PlanQuery {
    pub fn new(start: (usize, usize), goal: (usize, usize)) -> Self {
        Self { start, goal }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Frp,
    Abstract,
}

/// A planned node sequence with its cost and feasibility verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub kind: PathKind,
    pub nodes: Vec<NodeId>,
    pub cost: f64,
    pub feasible: bool,
}

impl Path {
    /// Build a path from an explicit node sequence, validating that nodes
    /// are distinct and consecutive ones are nodal neighbors, and computing
    /// cost and feasibility from the value cache.
    pub fn assemble(tree: &QuadTree, values: &ValueCache, nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("empty path".into()));
        }
        for &n in &nodes {
            tree.validate_node(n)?;
        }
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("path repeats a node".into()));
        }
        for pair in nodes.windows(2) {
            if !is_nodal_neighbor(tree, pair[0], pair[1])? {
                return Err(Error::InvalidParameter(format!(
                    "nodes {} and {} are not nodal neighbors",
                    pair[0], pair[1]
                )));
            }
        }
        let kind = if nodes.iter().all(|&n| tree.is_leaf(n)) {
            PathKind::Frp
        } else {
            PathKind::Abstract
        };
        let cost = nodes.iter().map(|&n| values.weight(tree, n)).sum();
        Ok(Self {
            kind,
            nodes,
            cost,
            feasible: cost < values.params().big_m(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Finest-resolution path cost: the sum of cell costs over the sequence,
/// both endpoints included.
pub fn path_cost_frp(
    map: &GridMap,
    tree: &QuadTree,
    params: &CostParams,
    path: &Path,
) -> Result<f64> {
    if path.kind != PathKind::Frp {
        return Err(Error::KindMismatch("expected a finest-resolution path".into()));
    }
    let mut total = 0.0;
    for &n in &path.nodes {
        if !tree.is_leaf(n) {
            return Err(Error::KindMismatch(format!("node {n} is not a unit cell")));
        }
        total += cell_cost_at(map, params, tree.cell_index_of_leaf(n));
    }
    Ok(total)
}

/// Abstract path cost: sum of 4^r(z) * V(z) over the sequence.
pub fn path_cost_abstract(tree: &QuadTree, values: &ValueCache, path: &Path) -> Result<f64> {
    if path.kind != PathKind::Abstract && !path.nodes.iter().all(|&n| tree.is_leaf(n)) {
        return Err(Error::KindMismatch("mislabelled path".into()));
    }
    Ok(path.nodes.iter().map(|&n| values.weight(tree, n)).sum())
}

/// Feasibility from cost alone: cost strictly below the obstacle penalty.
pub fn is_eps_feasible(path: &Path, params: &CostParams) -> bool {
    path.cost < params.big_m()
}

/// True when the node's subtree contains a cell over the occupancy
/// tolerance. Unit cells compare occupancy directly (p > eps, strict);
/// interior nodes compare V against lambda1 + eps * lambda2.
pub fn is_eps_obstacle(
    tree: &QuadTree,
    map: &GridMap,
    values: &ValueCache,
    n: NodeId,
) -> Result<bool> {
    tree.validate_node(n)?;
    if tree.is_leaf(n) {
        let p = map.occupancy_at(tree.cell_index_of_leaf(n));
        Ok(p > values.params().eps())
    } else {
        Ok(values.value(n) > values.params().interior_threshold())
    }
}

/// A plan plus search statistics.
#[derive(Debug, Clone)]
pub struct PlanReport {
    pub path: Path,
    /// Vertices settled by the search.
    pub expanded: usize,
}

/// Minimum-cost path between the leaves containing the query cells.
///
/// Dijkstra over vertex weights; ties break toward the smaller vertex index
/// (and smaller predecessor), so the result is deterministic. Obstacle
/// vertices stay in the graph: if no tolerance-respecting path exists the
/// least-infeasible one is returned and flagged infeasible.
pub fn plan(
    tree: &QuadTree,
    abs: &TreeAbstraction,
    graph: &AbstractGraph,
    values: &ValueCache,
    query: PlanQuery,
) -> Result<Path> {
    Ok(plan_detailed(tree, abs, graph, values, query)?.path)
}

/// Solve a batch of queries against one graph, in parallel when the
/// `parallel` feature is active. Result order follows the input order, so
/// the output is identical in both modes.
pub fn plan_batch(
    tree: &QuadTree,
    abs: &TreeAbstraction,
    graph: &AbstractGraph,
    values: &ValueCache,
    queries: &[PlanQuery],
) -> Result<Vec<PlanReport>> {
    par::map_slice(queries, |&q| plan_detailed(tree, abs, graph, values, q))
        .into_iter()
        .collect()
}

pub fn plan_detailed(
    tree: &QuadTree,
    abs: &TreeAbstraction,
    graph: &AbstractGraph,
    values: &ValueCache,
    query: PlanQuery,
) -> Result<PlanReport> {
    let start_leaf = abs.locate_cell(tree, query.start.0, query.start.1)?;
    let goal_leaf = abs.locate_cell(tree, query.goal.0, query.goal.1)?;
    let start = graph
        .vertex_of(start_leaf)
        .ok_or_else(|| Error::InvalidAbstraction(format!("leaf {start_leaf} is not a vertex")))?;
    let goal = graph
        .vertex_of(goal_leaf)
        .ok_or_else(|| Error::InvalidAbstraction(format!("leaf {goal_leaf} is not a vertex")))?;

    let weights: Vec<f64> = graph
        .nodes()
        .iter()
        .map(|&n| values.weight(tree, n))
        .collect();
    let (vertices, _cost, expanded) = dijkstra(graph, &weights, start, goal);
    let nodes: Vec<NodeId> = vertices.into_iter().map(|v| graph.node_of(v)).collect();
    let path = Path::assemble(tree, values, nodes)?;
    Ok(PlanReport { path, expanded })
}

#[derive(Copy, Clone)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
    pred: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the smallest
        // (dist, vertex, pred) on top.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
            .then_with(|| other.pred.cmp(&self.pred))
    }
}

/// Dijkstra with the start vertex's weight paid once and each edge paying
/// the destination's weight. Returns the vertex sequence, its cost, and the
/// number of settled vertices.
fn dijkstra(
    graph: &AbstractGraph,
    weights: &[f64],
    start: usize,
    goal: usize,
) -> (Vec<usize>, f64, usize) {
    let n = graph.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut expanded = 0usize;

    dist[start] = weights[start];
    heap.push(HeapEntry {
        dist: weights[start],
        vertex: start,
        pred: start,
    });

    while let Some(entry) = heap.pop() {
        let v = entry.vertex;
        if settled[v] {
            continue;
        }
        settled[v] = true;
        pred[v] = entry.pred;
        expanded += 1;
        if v == goal {
            break;
        }
        for &w in graph.neighbors(v) {
            if settled[w] {
                continue;
            }
            let alt = entry.dist + weights[w];
            if alt < dist[w] {
                dist[w] = alt;
                heap.push(HeapEntry {
                    dist: alt,
                    vertex: w,
                    pred: v,
                });
            } else if alt == dist[w] {
                // Equal-cost route: keep it so the smallest predecessor wins.
                heap.push(HeapEntry {
                    dist: alt,
                    vertex: w,
                    pred: v,
                });
            }
        }
    }

    // A partition graph of a connected square is connected.
    assert!(settled[goal], "goal unreachable in partition graph");

    let mut vertices = vec![goal];
    let mut v = goal;
    while v != start {
        v = pred[v];
        vertices.push(v);
    }
    vertices.reverse();
    (vertices, dist[goal], expanded)
}

/// Summary emitted next to a path CSV.
#[derive(Debug, Serialize)]
pub struct PlanSummary {
    pub cost: f64,
    pub feasible: bool,
    pub kind: PathKind,
    pub path_len: usize,
    pub vertex_count: usize,
    pub expanded_count: usize,
}

impl PlanSummary {
    pub fn new(report: &PlanReport, graph: &AbstractGraph) -> Self {
        Self {
            cost: report.path.cost,
            feasible: report.path.feasible,
            kind: report.path.kind,
            path_len: report.path.len(),
            vertex_count: graph.vertex_count(),
            expanded_count: report.expanded,
        }
    }

    pub fn write_json(&self, path: &FsPath) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Path CSV: seq, node_id, r_value, center_x, center_y, weight.
pub fn write_path_csv(
    tree: &QuadTree,
    values: &ValueCache,
    path: &Path,
    out: &FsPath,
) -> Result<()> {
    use std::fmt::Write as _;
    let mut text = String::from("seq,node_id,r_value,center_x,center_y,weight\n");
    for (seq, &n) in path.nodes.iter().enumerate() {
        let (cx, cy) = tree.center(n);
        writeln!(
            text,
            "{seq},{n},{},{cx},{cy},{}",
            tree.r_value(n),
            values.weight(tree, n)
        )
        .expect("write to string");
    }
    std::fs::write(out, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn setup(occ: Vec<f64>, ell: u32, eps: f64, l1: f64, l2: f64) -> (GridMap, QuadTree, CostParams, ValueCache) {
        let map = GridMap::new(ell, occ).unwrap();
        let tree = QuadTree::build(&map);
        let params = CostParams::new(ell, eps, l1, l2, DEFAULT_GAMMA).unwrap();
        let values = ValueCache::build(&map, &tree, &params).unwrap();
        (map, tree, params, values)
    }

    #[test]
    fn param_validation() {
        assert!(CostParams::new(2, 0.5, 0.001, 1.0, 2.0).is_ok());
        assert!(CostParams::new(2, 1.5, 0.001, 1.0, 2.0).is_err());
        assert!(CostParams::new(2, 0.5, 0.0, 1.0, 2.0).is_err());
        assert!(CostParams::new(2, 0.5, 0.001, 1.1, 2.0).is_err());
        assert!(CostParams::new(2, 0.5, 0.001, 1.0, 0.0).is_err());
        let p = CostParams::new(2, 0.5, 0.001, 1.0, 2.0).unwrap();
        assert!((p.big_m() - 10.016).abs() < 1e-12);
    }

    #[test]
    fn cell_cost_branches() {
        let (map, _, params, _) = setup(vec![0.2; 16], 2, 0.5, 0.001, 1.0);
        assert!((cell_cost(&map, &params, 0, 0) - 0.201).abs() < 1e-12);

        let (map, _, params, _) = setup(vec![0.7; 16], 2, 0.5, 0.001, 1.0);
        assert!((cell_cost(&map, &params, 1, 2) - 10.016).abs() < 1e-12);

        // p exactly at eps stays on the tolerated branch.
        let (map, _, params, _) = setup(vec![0.5; 16], 2, 0.5, 0.001, 1.0);
        assert!((cell_cost(&map, &params, 0, 0) - 0.501).abs() < 1e-12);
    }

    #[test]
    fn value_cache_recursion() {
        // One obstacle cell in a 4x4 map.
        let mut occ = vec![0.0; 16];
        occ[0] = 0.7;
        let (_, tree, params, values) = setup(occ, 2, 0.5, 0.001, 1.0);
        let leaf = tree.leaf_of_cell(0, 0);
        assert!((values.value(leaf) - 10.016).abs() < 1e-12);
        // Its r=1 parent averages {10.016, 0.001, 0.001, 0.001}.
        let block = tree.parent(leaf).unwrap();
        assert!((values.value(block) - 2.50475).abs() < 1e-12);
        assert!(values.value(block) > params.interior_threshold());
        // Root averages again.
        let expected_root = (2.50475 + 3.0 * 0.001) / 4.0;
        assert!((values.value(0) - expected_root).abs() < 1e-12);
    }

    #[test]
    fn obstacle_predicate_cases() {
        let mut occ = vec![0.0; 16];
        occ[0] = 0.7;
        let (map, tree, _, values) = setup(occ, 2, 0.5, 0.001, 1.0);
        // Interior with an obstacle below.
        let leaf = tree.leaf_of_cell(0, 0);
        let block = tree.parent(leaf).unwrap();
        assert!(is_eps_obstacle(&tree, &map, &values, block).unwrap());
        assert!(is_eps_obstacle(&tree, &map, &values, 0).unwrap());
        // Interior with all-free descendants.
        let clean = tree.parent(tree.leaf_of_cell(3, 3)).unwrap();
        assert!(!is_eps_obstacle(&tree, &map, &values, clean).unwrap());
        // Unit cell exactly at eps is not an obstacle (strict inequality).
        let (map, tree, _, values) = setup(vec![0.5; 16], 2, 0.5, 0.001, 1.0);
        let leaf = tree.leaf_of_cell(2, 2);
        assert!(!is_eps_obstacle(&tree, &map, &values, leaf).unwrap());
    }

    #[test]
    fn plan_two_by_two_all_free() {
        let (_, tree, _, values) = setup(vec![0.0; 4], 1, 0.5, 1.0, 0.0);
        let abs = TreeAbstraction::full_resolution(&tree);
        let graph = build_graph(&tree, &abs);
        let report = plan_detailed(
            &tree,
            &abs,
            &graph,
            &values,
            PlanQuery::new((0, 0), (1, 1)),
        )
        .unwrap();
        assert_eq!(report.path.len(), 3);
        assert!((report.path.cost - 3.0).abs() < 1e-12);
        assert_eq!(report.path.kind, PathKind::Frp);
        assert!(report.path.feasible);
        // Deterministic tie-break: two optimal routes exist; the path must
        // be reproducible.
        let again = plan(&tree, &abs, &graph, &values, PlanQuery::new((0, 0), (1, 1))).unwrap();
        assert_eq!(again.nodes, report.path.nodes);
    }

    #[test]
    fn plan_start_equals_goal() {
        let (_, tree, _, values) = setup(vec![0.1; 16], 2, 0.5, 0.001, 1.0);
        let abs = TreeAbstraction::full_resolution(&tree);
        let graph = build_graph(&tree, &abs);
        let path = plan(&tree, &abs, &graph, &values, PlanQuery::new((2, 1), (2, 1))).unwrap();
        assert_eq!(path.len(), 1);
        let leaf = tree.leaf_of_cell(2, 1);
        assert_eq!(path.nodes, vec![leaf]);
        assert!((path.cost - values.weight(&tree, leaf)).abs() < 1e-15);
    }

    #[test]
    fn plan_out_of_bounds_query() {
        let (_, tree, _, values) = setup(vec![0.0; 4], 1, 0.5, 0.001, 1.0);
        let abs = TreeAbstraction::full_resolution(&tree);
        let graph = build_graph(&tree, &abs);
        let err = plan(&tree, &abs, &graph, &values, PlanQuery::new((0, 0), (2, 0)));
        assert!(matches!(err, Err(Error::OutOfBounds(..))));
    }

    #[test]
    fn blocked_map_returns_least_infeasible() {
        // Start and goal free, every other cell blocked.
        let mut occ = vec![1.0; 16];
        occ[0] = 0.0;
        occ[15] = 0.0;
        let (_, tree, params, values) = setup(occ, 2, 0.5, 0.001, 1.0);
        let abs = TreeAbstraction::full_resolution(&tree);
        let graph = build_graph(&tree, &abs);
        let path = plan(&tree, &abs, &graph, &values, PlanQuery::new((0, 0), (3, 3))).unwrap();
        assert!(!path.feasible);
        assert!(path.cost >= params.big_m());
        // Shortest geodesic uses 5 obstacle cells.
        assert_eq!(path.len(), 7);
    }

    #[test]
    fn path_costs_agree_at_full_resolution() {
        let occ: Vec<f64> = (0..16).map(|i| (i as f64) / 40.0).collect();
        let (map, tree, params, values) = setup(occ, 2, 0.5, 0.001, 1.0);
        let nodes = vec![
            tree.leaf_of_cell(0, 0),
            tree.leaf_of_cell(1, 0),
            tree.leaf_of_cell(1, 1),
        ];
        let path = Path::assemble(&tree, &values, nodes).unwrap();
        assert_eq!(path.kind, PathKind::Frp);
        let frp = path_cost_frp(&map, &tree, &params, &path).unwrap();
        let abstr = path.nodes.iter().map(|&n| values.weight(&tree, n)).sum::<f64>();
        assert_eq!(frp, abstr);
        assert_eq!(frp, path.cost);
    }

    #[test]
    fn root_only_abstract_path_cost() {
        // Root covers all four cells of an all-free 2x2 map: 4 * V(root).
        let (_, tree, _, values) = setup(vec![0.0; 4], 1, 0.5, 1.0, 0.0);
        let path = Path::assemble(&tree, &values, vec![0]).unwrap();
        assert_eq!(path.kind, PathKind::Abstract);
        assert_eq!(path.cost, 4.0);
        assert_eq!(path_cost_abstract(&tree, &values, &path).unwrap(), 4.0);
    }

    #[test]
    fn kind_mismatch_errors() {
        let (map, tree, params, values) = setup(vec![0.0; 16], 2, 0.5, 0.001, 1.0);
        let kids = tree.children(0).unwrap();
        let path = Path::assemble(&tree, &values, vec![kids[0], kids[1]]).unwrap();
        assert_eq!(path.kind, PathKind::Abstract);
        assert!(matches!(
            path_cost_frp(&map, &tree, &params, &path),
            Err(Error::KindMismatch(_))
        ));
    }

    #[test]
    fn assemble_rejects_bad_sequences() {
        let (_, tree, _, values) = setup(vec![0.0; 16], 2, 0.5, 0.001, 1.0);
        let a = tree.leaf_of_cell(0, 0);
        let b = tree.leaf_of_cell(2, 0);
        // Not adjacent.
        assert!(Path::assemble(&tree, &values, vec![a, b]).is_err());
        // Repeated node.
        let c = tree.leaf_of_cell(1, 0);
        assert!(Path::assemble(&tree, &values, vec![a, c, a]).is_err());
        assert!(Path::assemble(&tree, &values, vec![]).is_err());
    }

    #[test]
    fn feasibility_from_cost() {
        let (_, tree, params, values) = setup(vec![0.0; 16], 2, 0.5, 0.001, 1.0);
        let a = tree.leaf_of_cell(0, 0);
        let path = Path::assemble(&tree, &values, vec![a]).unwrap();
        assert!(is_eps_feasible(&path, &params));
        let mut blocked = path.clone();
        blocked.cost = params.big_m() + 1.0;
        assert!(!is_eps_feasible(&blocked, &params));
    }
}
