//! Ground truth for small instances and checkers for every guarantee the
//! builder makes.
//!
//! The brute-force optimum enumerates all `n^(n-2)` labeled spanning trees via
//! Prüfer sequences, so it is only usable up to `max_n` points (9 by default,
//! about 4.8M trees).

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{check_tree, BastResult, PathInstance};
use crate::exec::Exec;
use crate::geom::{angular_span, direction, find_duplicate, Direction, Point, ANGLE_TOL, CONE_ANGLE};

/// Absolute slack on weight comparisons, scaled by `max(1, reference)`.
pub const WEIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{n} points exceed the enumeration cap of {max_n}")]
    TooLarge { n: usize, max_n: usize },
    #[error("need at least two points, got {0}")]
    TooSmall(usize),
    #[error("alpha {0} is outside [π/3, 2π)")]
    InvalidAlpha(f64),
    #[error("no feasible tree found; bounded-angle trees exist for every alpha >= π/3")]
    InfeasibleUnexpected,
    #[error("edge set is not a spanning tree: {0}")]
    NotATree(String),
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub alpha: f64,
    pub max_n: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            alpha: CONE_ANGLE,
            max_n: 9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub weight: f64,
    pub edges: Vec<(usize, usize)>,
    pub trees_examined: u64,
    pub feasible: u64,
}

/// Decode a Prüfer sequence over `n` labels into a sorted edge list.
pub fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always exists");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges.sort_unstable();
    edges
}

/// Every labeled spanning tree on `n` vertices, each exactly once.
#[derive(Debug, Clone)]
pub struct SpanningTrees {
    n: usize,
    seq: Vec<usize>,
    done: bool,
}

impl Iterator for SpanningTrees {
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let tree = prufer_decode(&self.seq, self.n);
        // odometer increment
        let mut i = self.seq.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.seq[i] += 1;
            if self.seq[i] < self.n {
                break;
            }
            self.seq[i] = 0;
        }
        Some(tree)
    }
}

pub fn enumerate_spanning_trees(n: usize, max_n: usize) -> Result<SpanningTrees, OracleError> {
    if n < 2 {
        return Err(OracleError::TooSmall(n));
    }
    if n > max_n {
        return Err(OracleError::TooLarge { n, max_n });
    }
    Ok(SpanningTrees {
        n,
        seq: vec![0; n - 2],
        done: false,
    })
}

fn incident_directions(points: &[Point], edges: &[(usize, usize)]) -> Vec<Vec<Direction>> {
    let mut dirs = vec![Vec::new(); points.len()];
    for &(a, b) in edges {
        if let (Ok(ab), Ok(ba)) = (direction(points[a], points[b]), direction(points[b], points[a])) {
            dirs[a].push(ab);
            dirs[b].push(ba);
        }
    }
    dirs
}

/// Largest per-vertex angular span and the vertex attaining it.
pub fn max_span(points: &[Point], edges: &[(usize, usize)]) -> (f64, usize) {
    incident_directions(points, edges)
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_empty())
        .map(|(v, d)| (angular_span(d).unwrap_or(0.0), v))
        .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc })
}

pub fn tree_alpha_feasible(points: &[Point], edges: &[(usize, usize)], alpha: f64) -> Result<bool, OracleError> {
    check_tree(points.len(), edges).map_err(OracleError::NotATree)?;
    Ok(max_span(points, edges).0 <= alpha + ANGLE_TOL)
}

struct Tables {
    dist: Vec<Vec<f64>>,
    dir: Vec<Vec<f64>>,
}

impl Tables {
    fn new(points: &[Point]) -> Self {
        let n = points.len();
        let mut dist = vec![vec![0.0; n]; n];
        let mut dir = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    dist[a][b] = points[a].dist(&points[b]);
                    dir[a][b] = direction(points[a], points[b]).map(|d| d.radians()).unwrap_or(0.0);
                }
            }
        }
        Tables { dist, dir }
    }

    fn feasible(&self, edges: &[(usize, usize)], alpha: f64) -> bool {
        let n = self.dist.len();
        let mut dirs: Vec<Vec<Direction>> = vec![Vec::with_capacity(4); n];
        for &(a, b) in edges {
            dirs[a].push(Direction::new(self.dir[a][b]));
            dirs[b].push(Direction::new(self.dir[b][a]));
        }
        dirs.iter()
            .all(|d| d.len() < 2 || angular_span(d).unwrap_or(0.0) <= alpha + ANGLE_TOL)
    }

    fn weight(&self, edges: &[(usize, usize)]) -> f64 {
        edges.iter().map(|&(a, b)| self.dist[a][b]).sum()
    }
}

#[derive(Debug, Clone)]
struct Partial {
    best: Option<(f64, Vec<(usize, usize)>)>,
    examined: u64,
    feasible: u64,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.examined += other.examined;
        self.feasible += other.feasible;
        if let Some(cand) = other.best {
            self.offer(cand.0, cand.1);
        }
        self
    }

    fn offer(&mut self, w: f64, edges: Vec<(usize, usize)>) {
        let better = match &self.best {
            None => true,
            Some((bw, be)) => w.total_cmp(bw).then_with(|| edges.cmp(be)).is_lt(),
        };
        if better {
            self.best = Some((w, edges));
        }
    }
}

fn scan(tables: &Tables, trees: impl Iterator<Item = Vec<(usize, usize)>>, alpha: f64) -> Partial {
    let mut part = Partial {
        best: None,
        examined: 0,
        feasible: 0,
    };
    for edges in trees {
        part.examined += 1;
        if tables.feasible(&edges, alpha) {
            part.feasible += 1;
            let w = tables.weight(&edges);
            part.offer(w, edges);
        }
    }
    part
}

/// Minimum-weight spanning tree whose edges fit within `alpha` at every
/// vertex. Ties go to the lexicographically smallest edge list, so the answer
/// does not depend on how the enumeration is split across workers.
pub fn alpha_mst_bruteforce(points: &[Point], config: OracleConfig, exec: Exec) -> Result<OracleResult, OracleError> {
    let n = points.len();
    if !(PI / 3.0..2.0 * PI).contains(&config.alpha) {
        return Err(OracleError::InvalidAlpha(config.alpha));
    }
    if n < 2 {
        return Err(OracleError::TooSmall(n));
    }
    if n > config.max_n {
        return Err(OracleError::TooLarge { n, max_n: config.max_n });
    }
    if let Some((a, b)) = find_duplicate(points) {
        return Err(OracleError::DuplicatePoints(a, b));
    }
    let tables = Tables::new(points);
    let total = if n == 2 {
        scan(&tables, enumerate_spanning_trees(n, n)?, config.alpha)
    } else {
        // split on the first Prüfer symbol
        exec.map_range(n, |first| {
            let mut seq = vec![0usize; n - 2];
            seq[0] = first;
            let tail = n - 3;
            let count = n.pow(tail as u32);
            let trees = (0..count).map(move |mut idx| {
                let mut s = seq.clone();
                for slot in s[1..].iter_mut().rev() {
                    *slot = idx % n;
                    idx /= n;
                }
                prufer_decode(&s, n)
            });
            scan(&tables, trees, config.alpha)
        })
        .into_iter()
        .reduce(Partial::merge)
        .expect("n >= 3 partitions")
    };
    let (weight, edges) = total.best.ok_or(OracleError::InfeasibleUnexpected)?;
    Ok(OracleResult {
        weight,
        edges,
        trees_examined: total.examined,
        feasible: total.feasible,
    })
}

/// Breadth-first hop distance in `edges` (over `n` vertices), giving up past
/// `limit` hops.
pub fn hop_distance(adj: &[Vec<usize>], a: usize, b: usize, limit: usize) -> Option<usize> {
    if a == b {
        return Some(0);
    }
    let mut seen = vec![(a, 0usize)];
    let mut queue = VecDeque::from([(a, 0usize)]);
    while let Some((v, d)) = queue.pop_front() {
        if d == limit {
            continue;
        }
        for &w in &adj[v] {
            if w == b {
                return Some(d + 1);
            }
            if !seen.iter().any(|&(s, _)| s == w) {
                seen.push((w, d + 1));
                queue.push_back((w, d + 1));
            }
        }
    }
    None
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a < n && b < n {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    adj
}

pub fn hop_distance_ok(n: usize, edges: &[(usize, usize)], a: usize, b: usize, k: usize) -> bool {
    hop_distance(&adjacency(n, edges), a, b, k).is_some()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    /// Witness for a failure.
    pub detail: Option<String>,
}

impl Check {
    fn pass() -> Self {
        Check {
            passed: true,
            detail: None,
        }
    }

    fn fail(detail: String) -> Self {
        Check {
            passed: false,
            detail: Some(detail),
        }
    }

    fn from(res: Result<(), String>) -> Self {
        match res {
            Ok(()) => Check::pass(),
            Err(d) => Check::fail(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub spanning_tree: Check,
    pub angle: Check,
    pub transmission: Check,
    pub weight_consistent: Check,
    pub weight_bound: Check,
    pub hop_spanner: Check,
    pub mst_bound: Option<Check>,
    pub max_span: f64,
    /// `2 ω(Π) - ω(T)`, recomputed from coordinates.
    pub weight_slack: f64,
    pub passed: bool,
}

fn scaled(reference: f64) -> f64 {
    WEIGHT_TOL * reference.abs().max(1.0)
}

/// Check every guarantee of `result` against the path it was built from.
/// `mst_weight` adds the four-times-MST check.
pub fn verify_result(path: &PathInstance, result: &BastResult, mst_weight: Option<f64>) -> VerificationReport {
    let pts = &path.points;
    let n = pts.len();
    let in_range: Vec<(usize, usize)> = result
        .edges
        .iter()
        .copied()
        .filter(|&(a, b)| a < n && b < n && a != b)
        .collect();

    let spanning_tree = Check::from(if result.vertex_count != n {
        Err(format!("result has {} vertices, path has {n}", result.vertex_count))
    } else {
        check_tree(n, &result.edges)
    });

    let (span, worst) = max_span(pts, &in_range);
    let angle = if span <= CONE_ANGLE + ANGLE_TOL {
        Check::pass()
    } else {
        Check::fail(format!("vertex {worst} spans {span} rad"))
    };

    let transmission = Check::from((|| {
        if result.orientations.len() != n {
            return Err(format!("{} orientations for {n} vertices", result.orientations.len()));
        }
        for (v, o) in result.orientations.iter().enumerate() {
            if o.cone.apex != pts[v] {
                return Err(format!("cone of vertex {v} is not anchored at it"));
            }
        }
        for &(a, b) in &in_range {
            let ab = result.orientations[a].cone.contains(pts[b]).unwrap_or(false);
            let ba = result.orientations[b].cone.contains(pts[a]).unwrap_or(false);
            if !(ab && ba) {
                return Err(format!("tree edge ({a}, {b}) is not a transmission edge"));
            }
        }
        Ok(())
    })());

    let tree_weight: f64 = in_range.iter().map(|&(a, b)| pts[a].dist(&pts[b])).sum();
    let path_weight = path.weight();
    let weight_consistent = Check::from((|| {
        if (result.tree_weight - tree_weight).abs() > scaled(tree_weight) {
            return Err(format!(
                "recorded tree weight {} != {}",
                result.tree_weight, tree_weight
            ));
        }
        if (result.path_weight - path_weight).abs() > scaled(path_weight) {
            return Err(format!(
                "recorded path weight {} != {}",
                result.path_weight, path_weight
            ));
        }
        Ok(())
    })());

    let weight_slack = 2.0 * path_weight - tree_weight;
    let weight_bound = if weight_slack >= -scaled(path_weight) {
        Check::pass()
    } else {
        Check::fail(format!(
            "tree weight {tree_weight} exceeds twice the path weight {path_weight}"
        ))
    };

    let adj = adjacency(n, &in_range);
    let hop_spanner = match (0..n.saturating_sub(1)).find(|&i| hop_distance(&adj, i, i + 1, 3).is_none()) {
        None => Check::pass(),
        Some(i) => Check::fail(format!("path edge ({i}, {}) is more than 3 hops apart", i + 1)),
    };

    let mst_bound = mst_weight.map(|m| {
        if tree_weight <= 4.0 * m + scaled(m) {
            Check::pass()
        } else {
            Check::fail(format!(
                "tree weight {tree_weight} exceeds four times the MST weight {m}"
            ))
        }
    });

    let passed = [
        &spanning_tree,
        &angle,
        &transmission,
        &weight_consistent,
        &weight_bound,
        &hop_spanner,
    ]
    .iter()
    .all(|c| c.passed)
        && mst_bound.as_ref().is_none_or(|c| c.passed);
    VerificationReport {
        spanning_tree,
        angle,
        transmission,
        weight_consistent,
        weight_bound,
        hop_spanner,
        mst_bound,
        max_span: span,
        weight_slack,
        passed,
    }
}

/// `(0,0), (s,0), ..., ((n-1)s, 0)` as a path.
pub fn collinear_instance(n: usize, spacing: f64) -> PathInstance {
    PathInstance {
        points: (0..n).map(|i| Point::new(i as f64 * spacing, 0.0)).collect(),
    }
}

/// `n` points uniform in the unit square, in generation order.
pub fn random_uniform(n: usize, seed: u64) -> PathInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PathInstance {
        points: (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect(),
    }
}
