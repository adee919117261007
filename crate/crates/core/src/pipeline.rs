//! Points to bounded-angle tree: Euclidean MST, shortcut it into a spanning
//! path, then run the path builder. The result weighs at most four times the
//! MST.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{build_tree_with, BastResult, BuildError, BuildOptions, PathInstance};
use crate::geom::{find_duplicate, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("no points")]
    Empty,
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error(transparent)]
    Build(#[from] BuildError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTree {
    pub vertex_count: usize,
    /// `(a, b, length)`
    pub edges: Vec<(usize, usize, f64)>,
    pub weight: f64,
}

/// Dense Prim over the complete Euclidean graph, O(n²).
pub fn euclidean_mst(points: &[Point]) -> Result<WeightedTree, PipelineError> {
    let n = points.len();
    if n == 0 {
        return Err(PipelineError::Empty);
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(PipelineError::NonFinite(i));
    }
    if let Some((a, b)) = find_duplicate(points) {
        return Err(PipelineError::DuplicatePoints(a, b));
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    best[0] = 0.0;
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                u = v;
            }
        }
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            edges.push((parent[u], u, best[u]));
        }
        for v in 0..n {
            if !in_tree[v] {
                let d = points[u].dist(&points[v]);
                if d < best[v] {
                    best[v] = d;
                    parent[v] = u;
                }
            }
        }
    }
    let weight = edges.iter().map(|e| e.2).sum();
    Ok(WeightedTree {
        vertex_count: n,
        edges,
        weight,
    })
}

/// Depth-first first-visit order of `tree` from `root`; children are visited
/// shortest edge first. Shortcutting the doubled tree this way gives a path
/// at most twice the tree's weight.
pub fn mst_to_path(tree: &WeightedTree, root: usize) -> Vec<usize> {
    let n = tree.vertex_count;
    let mut adj: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n];
    for &(a, b, w) in &tree.edges {
        adj[a].push((w, b));
        adj[b].push((w, a));
    }
    for list in &mut adj {
        list.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        order.push(v);
        // reversed so the shortest child is popped first
        for &(_, c) in adj[v].iter().rev() {
            if !seen[c] {
                stack.push(c);
            }
        }
    }
    order
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    /// `order[i]` is the input index of path vertex `i`.
    pub order: Vec<usize>,
    pub path: PathInstance,
    /// Tree over path indices.
    pub result: BastResult,
    pub mst_weight: f64,
    pub path_weight: f64,
    pub ratio_to_mst: f64,
    pub ratio_to_path: f64,
}

impl ApproxResult {
    /// Tree edges over input indices.
    pub fn edges_in_input_order(&self) -> Vec<(usize, usize)> {
        self.result
            .edges
            .iter()
            .map(|&(a, b)| (self.order[a], self.order[b]))
            .collect()
    }
}

pub fn approx_bast(points: &[Point]) -> Result<ApproxResult, PipelineError> {
    approx_bast_with(points, BuildOptions::default())
}

pub fn approx_bast_with(points: &[Point], opts: BuildOptions) -> Result<ApproxResult, PipelineError> {
    if points.len() < 2 {
        return Err(BuildError::PathTooShort(points.len()).into());
    }
    let mst = euclidean_mst(points)?;
    let order = mst_to_path(&mst, 0);
    let path = PathInstance::new(order.iter().map(|&i| points[i]).collect())?;
    let result = build_tree_with(&path, opts)?;
    let path_weight = path.weight();
    let ratio = |den: f64| if den > 0.0 { result.tree_weight / den } else { 1.0 };
    Ok(ApproxResult {
        ratio_to_mst: ratio(mst.weight),
        ratio_to_path: ratio(path_weight),
        order,
        path,
        mst_weight: mst.weight,
        path_weight,
        result,
    })
}
