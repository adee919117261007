//! Path to bounded-angle spanning tree.
//!
//! Given a polygonal path over the input points, pick the lighter of its two
//! alternating matchings, make it perfect with virtual companions for
//! unmatched endpoints, then orient every vertex with one of its three basic
//! cones (relative to its matching partner) in three phases:
//!
//! 1. a single pass assigning center cones from purely positional conditions;
//! 2. repeated passes applying edge-creating operations under the
//!    no-reorienting, center-first, edge-creation and no-double-tapping rules
//!    until nothing changes (or, in linear mode, one forward and one backward
//!    pass);
//! 3. a final pass orienting what is left so that every consecutive pair of
//!    matching edges is joined by a transmission edge.
//!
//! The tree is the matching plus one connector per consecutive pair. Each
//! connector is no longer than the three path edges it shortcuts, so the tree
//! weighs at most the path plus twice the matching, i.e. at most twice the
//! path.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{classify_region, direction, find_duplicate, Cone, ConeKind, Direction, GeomError, Point, Region};
use crate::orientation::{Condition, OrientationError, OrientationState, Phase, Provenance, TraceRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("path needs at least two points, got {0}")]
    PathTooShort(usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("virtual companion for vertex {0} left its region")]
    AugmentationFailed(usize),
    #[error("vertices {0} and {1} of one matching edge were both oriented due to the same neighbor")]
    AtMostOne(usize, usize),
    #[error("phase II did not reach a fixpoint within {0} rounds")]
    NonTermination(usize),
    #[error("no orientation joins matching edges {0} and {1}")]
    AlgorithmInvariantViolation(usize, usize),
    #[error("extracted edge set is not a spanning tree: {0}")]
    NotATree(String),
    #[error("vertex {0} cannot be re-attached after removing its virtual companion")]
    DevirtualizeFailed(usize),
    #[error(transparent)]
    Orientation(#[from] OrientationError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// The input path `(p_1, ..., p_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathInstance {
    pub points: Vec<Point>,
}

impl PathInstance {
    pub fn new(points: Vec<Point>) -> Result<Self, BuildError> {
        let path = PathInstance { points };
        path.validate()?;
        Ok(path)
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        if self.points.len() < 2 {
            return Err(BuildError::PathTooShort(self.points.len()));
        }
        if let Some(i) = self.points.iter().position(|p| !p.is_finite()) {
            return Err(BuildError::NonFinite(i));
        }
        if let Some((a, b)) = find_duplicate(&self.points) {
            return Err(BuildError::DuplicatePoints(a, b));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }
}

/// Which alternating matching of the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// `{p1,p2}, {p3,p4}, ...`
    OddStart,
    /// `{p2,p3}, {p4,p5}, ...`
    EvenStart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingSequence {
    pub edges: Vec<(usize, usize)>,
    pub parity: Parity,
    /// Path endpoints left uncovered by `edges`.
    pub unmatched: Vec<usize>,
    pub weight: f64,
}

impl MatchingSequence {
    fn of(path: &PathInstance, parity: Parity) -> Self {
        let n = path.len();
        let start = match parity {
            Parity::OddStart => 0,
            Parity::EvenStart => 1,
        };
        let edges: Vec<(usize, usize)> = (start..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)).collect();
        let mut unmatched = Vec::new();
        if start == 1 {
            unmatched.push(0);
        }
        if edges.last().is_none_or(|&(_, b)| b != n - 1) {
            unmatched.push(n - 1);
        }
        let weight = edges.iter().map(|&(a, b)| path.points[a].dist(&path.points[b])).sum();
        MatchingSequence {
            edges,
            parity,
            unmatched,
            weight,
        }
    }

    pub fn partner(&self, v: usize) -> Option<usize> {
        self.edges.iter().find_map(|&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }
}

/// Lighter of the two alternating matchings (ties go to `OddStart`), unless
/// `force` says otherwise. An empty matching is never chosen automatically.
pub fn select_matching(path: &PathInstance, force: Option<Parity>) -> Result<MatchingSequence, BuildError> {
    let n = path.len();
    if n < 2 {
        return Err(BuildError::PathTooShort(n));
    }
    let odd = MatchingSequence::of(path, Parity::OddStart);
    match force {
        Some(Parity::OddStart) => Ok(odd),
        Some(Parity::EvenStart) if n < 3 => Err(BuildError::PathTooShort(n)),
        Some(Parity::EvenStart) => Ok(MatchingSequence::of(path, Parity::EvenStart)),
        None if n < 3 => Ok(odd),
        None => {
            let even = MatchingSequence::of(path, Parity::EvenStart);
            Ok(if even.weight < odd.weight { even } else { odd })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirtualPoint {
    /// The unmatched real vertex.
    pub real: usize,
    /// Index of its companion in the augmented point list.
    pub virtual_index: usize,
    /// Index (in the augmented sequence) of the matching edge adjacent to the
    /// virtual edge.
    pub adjacent_edge: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VirtualAugmentation {
    pub entries: Vec<VirtualPoint>,
}

/// A perfect matching sequence over real plus virtual points.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedInstance {
    pub points: Vec<Point>,
    pub edges: Vec<(usize, usize)>,
    pub real_count: usize,
}

/// Direction that moves a point deeper into its region of the partition
/// induced by `(u, v)`.
fn stabilizing_direction(u: Point, v: Point, region: Region) -> Result<Direction, GeomError> {
    let axis = direction(u, v)?;
    Ok(match region {
        Region::R1 => axis.reversed(),
        Region::R3 => axis,
        Region::R2 => axis.rotated(std::f64::consts::FRAC_PI_2),
        Region::R4 => axis.rotated(-std::f64::consts::FRAC_PI_2),
    })
}

fn place_companion(points: &[Point], p: usize, (u, v): (usize, usize)) -> Result<(Point, f64), BuildError> {
    let (pp, pu, pv) = (points[p], points[u], points[v]);
    let region = classify_region(pu, pv, pp)?;
    let dir = stabilizing_direction(pu, pv, region)?;
    let mut eps = 1e-9 * pp.dist(&pu).min(pp.dist(&pv)).min(pu.dist(&pv));
    for _ in 0..2 {
        let q = pp.offset(dir, eps);
        if q != pp && classify_region(pu, pv, q).ok() == Some(region) {
            return Ok((q, eps));
        }
        eps *= 1e-3;
    }
    Err(BuildError::AugmentationFailed(p))
}

/// Give every unmatched endpoint a companion point so the matching becomes
/// perfect. The companion lies in the same region as the endpoint relative to
/// the adjacent matching edge.
pub fn augment_virtual(
    path: &PathInstance,
    matching: &MatchingSequence,
) -> Result<(AugmentedInstance, VirtualAugmentation), BuildError> {
    let n = path.len();
    let mut points = path.points.clone();
    let mut edges = matching.edges.clone();
    let mut aug = VirtualAugmentation::default();

    let front = matching.unmatched.contains(&0) && n > 1 && !edges.is_empty();
    let back = matching.unmatched.contains(&(n - 1)) && !edges.is_empty();

    if front {
        let (q, eps) = place_companion(&path.points, 0, edges[0])?;
        let idx = points.len();
        points.push(q);
        edges.insert(0, (idx, 0));
        aug.entries.push(VirtualPoint {
            real: 0,
            virtual_index: idx,
            adjacent_edge: 1,
            epsilon: eps,
        });
    }
    if back {
        let adjacent = *edges.last().expect("non-empty");
        let (q, eps) = place_companion(&path.points, n - 1, adjacent)?;
        let idx = points.len();
        points.push(q);
        edges.push((n - 1, idx));
        aug.entries.push(VirtualPoint {
            real: n - 1,
            virtual_index: idx,
            adjacent_edge: edges.len() - 2,
            epsilon: eps,
        });
    }
    Ok((
        AugmentedInstance {
            points,
            edges,
            real_count: n,
        },
        aug,
    ))
}

/// Per-phase count of (edge, neighbor) examinations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkCounter {
    pub phase1: usize,
    pub phase2: usize,
    pub phase3: usize,
}

impl WorkCounter {
    pub fn total(&self) -> usize {
        self.phase1 + self.phase2 + self.phase3
    }
}

/// What `phase1_examine` assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExamineOutcome {
    pub assigned: [Option<(usize, Condition)>; 2],
}

fn in_side_of(points: &[Point], from: usize, toward: usize, q: usize) -> Result<bool, GeomError> {
    // side region adjacent to `toward` in the partition of (from, toward)
    Ok(classify_region(points[from], points[toward], points[q])? == Region::R3)
}

/// Phase I conditions for a single vertex `u` of `e` against neighbor `f`.
pub fn phase1_condition(state: &OrientationState, u: usize, f: usize) -> Result<Option<Condition>, GeomError> {
    let pts = state.points();
    let v = state.partner(u);
    let (x, y) = state.edge(f);
    let x_in = in_side_of(pts, u, v, x)?;
    let y_in = in_side_of(pts, u, v, y)?;
    let first = (x_in && in_side_of(pts, x, y, u)?) || (y_in && in_side_of(pts, y, x, u)?);
    if first {
        Ok(Some(Condition::First))
    } else if x_in && y_in {
        Ok(Some(Condition::Second))
    } else {
        Ok(None)
    }
}

/// Examine matching edge `e` with respect to its neighbor `f`, assigning
/// center cones where a condition holds.
pub fn phase1_examine(state: &mut OrientationState, e: usize, f: usize) -> Result<ExamineOutcome, BuildError> {
    let (u, v) = state.edge(e);
    let mut out = ExamineOutcome::default();
    for (slot, w) in [u, v].into_iter().enumerate() {
        if let Some(cond) = phase1_condition(state, w, f)? {
            state.assign(w, ConeKind::Center, Provenance::phase1(f, cond))?;
            out.assigned[slot] = Some((w, cond));
        }
    }
    if out.assigned.iter().all(Option::is_some) {
        return Err(BuildError::AtMostOne(u, v));
    }
    Ok(out)
}

/// One pass over the matching; each edge looks at its previous neighbor, then
/// its next one.
pub fn phase1(state: &mut OrientationState, work: &mut WorkCounter) -> Result<(), BuildError> {
    let m = state.edges().len();
    for i in 0..m {
        if i > 0 {
            phase1_examine(state, i, i - 1)?;
            work.phase1 += 1;
        }
        if i + 1 < m {
            phase1_examine(state, i, i + 1)?;
            work.phase1 += 1;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operation {
    /// Orient `vertex` so it forms a transmission edge with the already
    /// oriented `target` on the opposite matching edge.
    Single {
        vertex: usize,
        kind: ConeKind,
        target: usize,
    },
    /// Orient one vertex of each edge toward the other.
    Double {
        a: usize,
        kind_a: ConeKind,
        b: usize,
        kind_b: ConeKind,
    },
}

fn mutual_cones(ca: &Cone, cb: &Cone) -> bool {
    ca.contains(cb.apex).unwrap_or(false) && cb.contains(ca.apex).unwrap_or(false)
}

/// Legal phase II operations for the consecutive pair `(e, f)`, `e` first.
///
/// Singles come before doubles; within each class vertices are ordered
/// `e.0, e.1, f.0, f.1` and kinds center, up, down.
pub fn legal_operations(state: &OrientationState, e: usize, f: usize) -> Vec<Operation> {
    let mut ops = Vec::new();
    if state.connector_exists(e, f) {
        return ops;
    }
    let (u, v) = state.edge(e);
    let (x, y) = state.edge(f);
    let opposite = |w: usize| if state.edge_of(w) == e { f } else { e };
    // no double tapping: partner already oriented due to the opposite edge
    let open = |w: usize| !state.is_oriented(w) && !state.oriented_due_to(state.partner(w), opposite(w));
    let allowed = |w: usize, k: ConeKind| k == ConeKind::Center || state.is_oriented(state.partner(w));

    for w in [u, v, x, y] {
        if !open(w) {
            continue;
        }
        let targets = if state.edge_of(w) == e { [x, y] } else { [u, v] };
        for kind in ConeKind::PRIORITY {
            if !allowed(w, kind) {
                continue;
            }
            let Ok(cw) = state.candidate_cone(w, kind) else {
                continue;
            };
            for t in targets {
                if let Some(ct) = state.cone(t) {
                    if mutual_cones(&cw, ct) {
                        ops.push(Operation::Single {
                            vertex: w,
                            kind,
                            target: t,
                        });
                    }
                }
            }
        }
    }
    for a in [u, v] {
        if !open(a) {
            continue;
        }
        for b in [x, y] {
            if !open(b) {
                continue;
            }
            for ka in ConeKind::PRIORITY {
                if !allowed(a, ka) {
                    continue;
                }
                let Ok(ca) = state.candidate_cone(a, ka) else { continue };
                for kb in ConeKind::PRIORITY {
                    if !allowed(b, kb) {
                        continue;
                    }
                    let Ok(cb) = state.candidate_cone(b, kb) else { continue };
                    if mutual_cones(&ca, &cb) {
                        ops.push(Operation::Double {
                            a,
                            kind_a: ka,
                            b,
                            kind_b: kb,
                        });
                    }
                }
            }
        }
    }
    ops
}

fn apply(state: &mut OrientationState, op: Operation, phase: Phase) -> Result<(), BuildError> {
    let make = |due_edge: usize, simultaneous: bool| match phase {
        Phase::II => Provenance::phase2(due_edge, simultaneous),
        _ => Provenance::phase3(Some(due_edge), simultaneous),
    };
    match op {
        Operation::Single { vertex, kind, target } => {
            state.assign(vertex, kind, make(state.edge_of(target), false))?;
        }
        Operation::Double { a, kind_a, b, kind_b } => {
            let (ea, eb) = (state.edge_of(a), state.edge_of(b));
            state.assign(a, kind_a, make(eb, true))?;
            state.assign(b, kind_b, make(ea, true))?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase2Mode {
    /// One forward pass, then one backward pass.
    TwoRound,
    /// Forward passes until a pass assigns nothing.
    Reference,
}

fn visit_pair(state: &mut OrientationState, i: usize, work: &mut WorkCounter) -> Result<bool, BuildError> {
    work.phase2 += 1;
    match legal_operations(state, i, i + 1).first() {
        Some(&op) => {
            apply(state, op, Phase::II)?;
            Ok(true)
        }
        None => Ok(false),
    }
}

/// Apply edge-creating operations, at most one per pair per visit. Returns
/// the number of passes made.
pub fn phase2(state: &mut OrientationState, mode: Phase2Mode, work: &mut WorkCounter) -> Result<usize, BuildError> {
    let m = state.edges().len();
    if m < 2 {
        return Ok(0);
    }
    match mode {
        Phase2Mode::TwoRound => {
            for i in 0..m - 1 {
                visit_pair(state, i, work)?;
            }
            for i in (0..m - 1).rev() {
                visit_pair(state, i, work)?;
            }
            Ok(2)
        }
        Phase2Mode::Reference => {
            let limit = state.len();
            let mut rounds = 0;
            loop {
                rounds += 1;
                if rounds > limit {
                    return Err(BuildError::NonTermination(limit));
                }
                let mut changed = false;
                for i in 0..m - 1 {
                    changed |= visit_pair(state, i, work)?;
                }
                if !changed {
                    return Ok(rounds);
                }
            }
        }
    }
}

/// No consecutive pair admits a legal operation.
pub fn is_quiescent(state: &OrientationState) -> bool {
    let m = state.edges().len();
    (0..m.saturating_sub(1)).all(|i| legal_operations(state, i, i + 1).is_empty())
}

/// Candidate operations joining `e` and `f` in phase III: same shapes as in
/// phase II but without the center-first and no-double-tapping rules.
fn phase3_operation(state: &OrientationState, e: usize, f: usize) -> Option<Operation> {
    let (u, v) = state.edge(e);
    let (x, y) = state.edge(f);
    for w in [u, v, x, y] {
        if state.is_oriented(w) {
            continue;
        }
        let targets = if state.edge_of(w) == e { [x, y] } else { [u, v] };
        for kind in ConeKind::PRIORITY {
            let Ok(cw) = state.candidate_cone(w, kind) else {
                continue;
            };
            for t in targets {
                if state.cone(t).is_some_and(|ct| mutual_cones(&cw, ct)) {
                    return Some(Operation::Single {
                        vertex: w,
                        kind,
                        target: t,
                    });
                }
            }
        }
    }
    for a in [u, v] {
        for b in [x, y] {
            if state.is_oriented(a) || state.is_oriented(b) {
                continue;
            }
            for ka in ConeKind::PRIORITY {
                let Ok(ca) = state.candidate_cone(a, ka) else { continue };
                for kb in ConeKind::PRIORITY {
                    let Ok(cb) = state.candidate_cone(b, kb) else { continue };
                    if mutual_cones(&ca, &cb) {
                        return Some(Operation::Double {
                            a,
                            kind_a: ka,
                            b,
                            kind_b: kb,
                        });
                    }
                }
            }
        }
    }
    None
}

/// Final forward pass: join every consecutive pair, orient whatever remains
/// with center cones.
pub fn phase3(state: &mut OrientationState, work: &mut WorkCounter) -> Result<(), BuildError> {
    let m = state.edges().len();
    for i in 0..m.saturating_sub(1) {
        work.phase3 += 1;
        if !state.connector_exists(i, i + 1) {
            let op = phase3_operation(state, i, i + 1).ok_or(BuildError::AlgorithmInvariantViolation(i, i + 1))?;
            apply(state, op, Phase::III)?;
        }
        let (u, v) = state.edge(i);
        for w in [u, v] {
            if !state.is_oriented(w) {
                state.assign(w, ConeKind::Center, Provenance::phase3(None, false))?;
            }
        }
    }
    for w in 0..state.len() {
        if !state.is_oriented(w) {
            state.assign(w, ConeKind::Center, Provenance::cleanup())?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectorPolicy {
    Shortest,
    First,
}

/// Final orientation of one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexOrientation {
    pub kind: ConeKind,
    /// The vertex the kind is relative to; `None` when it was a removed
    /// virtual companion.
    pub partner: Option<usize>,
    pub cone: Cone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BastResult {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub matching: Vec<(usize, usize)>,
    pub connectors: Vec<(usize, usize)>,
    pub orientations: Vec<VertexOrientation>,
    pub tree_weight: f64,
    pub path_weight: f64,
    pub parity: Parity,
    pub virtual_points: VirtualAugmentation,
    pub work: WorkCounter,
    /// Assignment log; vertex indices at or above `vertex_count` refer to
    /// virtual companions.
    pub trace: Vec<TraceRecord>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

pub type EdgeList = Vec<(usize, usize)>;

/// `Ok` iff `edges` is a spanning tree on `n` vertices.
pub fn check_tree(n: usize, edges: &[(usize, usize)]) -> Result<(), String> {
    if edges.len() + 1 != n {
        return Err(format!("{} edges on {} vertices", edges.len(), n));
    }
    let mut dsu = Dsu::new(n);
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(format!("edge ({a}, {b}) out of range"));
        }
        if !dsu.union(a, b) {
            return Err(format!("edge ({a}, {b}) closes a cycle"));
        }
    }
    Ok(())
}

/// Matching edges plus one connector per consecutive pair, over the
/// augmented instance. Returns `(tree edges, connectors)`.
pub fn extract_tree(state: &OrientationState, policy: ConnectorPolicy) -> Result<(EdgeList, EdgeList), BuildError> {
    let pts = state.points();
    let m = state.edges().len();
    let mut connectors = Vec::with_capacity(m.saturating_sub(1));
    for i in 0..m.saturating_sub(1) {
        let cands = state.connectors(i, i + 1);
        let chosen = match policy {
            ConnectorPolicy::First => cands.into_iter().next(),
            ConnectorPolicy::Shortest => cands.min_by(|a, b| {
                let la = pts[a.0].dist(&pts[a.1]);
                let lb = pts[b.0].dist(&pts[b.1]);
                la.total_cmp(&lb)
                    .then((a.0.min(a.1), a.0.max(a.1)).cmp(&(b.0.min(b.1), b.0.max(b.1))))
            }),
        };
        connectors.push(chosen.ok_or_else(|| BuildError::NotATree(format!("no connector between {i} and {}", i + 1)))?);
    }
    let mut edges = state.edges().to_vec();
    edges.extend_from_slice(&connectors);
    check_tree(state.len(), &edges).map_err(BuildError::NotATree)?;
    Ok((edges, connectors))
}

/// Remove virtual companions and rewire any connector that used one.
///
/// Takes tree/connectors over the augmented instance and returns them over
/// the real vertices, along with final per-vertex orientations.
pub fn devirtualize(
    state: &OrientationState,
    aug: &VirtualAugmentation,
    edges: &[(usize, usize)],
    connectors: &[(usize, usize)],
    real_count: usize,
) -> Result<(EdgeList, EdgeList, Vec<VertexOrientation>), BuildError> {
    let pts = state.points();
    let mut orientations: Vec<VertexOrientation> = (0..real_count)
        .map(|v| {
            let a = state
                .assignment(v)
                .ok_or(OrientationError::UnorientedVertex { vertex: v })?;
            let partner = state.partner(v);
            Ok(VertexOrientation {
                kind: a.kind,
                partner: (partner < real_count).then_some(partner),
                cone: a.cone,
            })
        })
        .collect::<Result<_, BuildError>>()?;

    let mut rewired: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for vp in &aug.entries {
        let (p, pv) = (vp.real, vp.virtual_index);
        let (fu, fv) = state.edge(vp.adjacent_edge);
        let pair = state.edge_of(pv).min(vp.adjacent_edge);
        let conn = *connectors.get(pair).ok_or(BuildError::DevirtualizeFailed(p))?;
        if conn.0 == p || conn.1 == p {
            continue;
        }
        let w = if conn.0 == pv { conn.1 } else { conn.0 };
        // the companion's connector target first, then the other endpoint of f
        let other = if w == fu { fv } else { fu };
        let target = [w, other]
            .into_iter()
            .find(|&t| state.cone(t).is_some_and(|c| c.contains(pts[p]).unwrap_or(false)))
            .ok_or(BuildError::DevirtualizeFailed(p))?;
        let cone = Cone::new(pts[p], direction(pts[p], pts[target])?);
        orientations[p] = VertexOrientation {
            kind: ConeKind::Center,
            partner: Some(target),
            cone,
        };
        rewired.push((conn, (p, target)));
    }

    let fix = |e: &(usize, usize)| -> Option<(usize, usize)> {
        if let Some(&(_, new)) = rewired.iter().find(|(old, _)| old == e) {
            return Some(new);
        }
        (e.0 < real_count && e.1 < real_count).then_some(*e)
    };
    let edges: Vec<_> = edges.iter().filter_map(fix).collect();
    let connectors: Vec<_> = connectors.iter().filter_map(fix).collect();
    check_tree(real_count, &edges).map_err(BuildError::NotATree)?;
    Ok((edges, connectors, orientations))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub matching: Option<Parity>,
    pub phase2: Phase2Mode,
    pub connector: ConnectorPolicy,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            matching: None,
            phase2: Phase2Mode::TwoRound,
            connector: ConnectorPolicy::Shortest,
        }
    }
}

/// Step-by-step driver; `build_tree_from_path` runs all of it.
#[derive(Debug, Clone)]
pub struct Builder {
    pub path: PathInstance,
    pub matching: MatchingSequence,
    pub augmentation: VirtualAugmentation,
    pub state: OrientationState,
    pub work: WorkCounter,
    real_count: usize,
}

impl Builder {
    pub fn new(path: &PathInstance, matching: Option<Parity>) -> Result<Self, BuildError> {
        path.validate()?;
        let matching = select_matching(path, matching)?;
        let (inst, augmentation) = augment_virtual(path, &matching)?;
        Ok(Builder {
            path: path.clone(),
            matching,
            augmentation,
            state: OrientationState::new(inst.points, inst.edges),
            work: WorkCounter::default(),
            real_count: inst.real_count,
        })
    }

    pub fn phase1(&mut self) -> Result<(), BuildError> {
        phase1(&mut self.state, &mut self.work)
    }

    pub fn phase2(&mut self, mode: Phase2Mode) -> Result<usize, BuildError> {
        phase2(&mut self.state, mode, &mut self.work)
    }

    pub fn phase3(&mut self) -> Result<(), BuildError> {
        phase3(&mut self.state, &mut self.work)
    }

    pub fn finish(self, policy: ConnectorPolicy) -> Result<BastResult, BuildError> {
        let (edges, connectors) = extract_tree(&self.state, policy)?;
        let (edges, connectors, orientations) =
            devirtualize(&self.state, &self.augmentation, &edges, &connectors, self.real_count)?;
        let tree_weight = edges
            .iter()
            .map(|&(a, b)| self.path.points[a].dist(&self.path.points[b]))
            .sum();
        let matching = self.matching.edges.clone();
        Ok(BastResult {
            vertex_count: self.real_count,
            edges,
            matching,
            connectors,
            orientations,
            tree_weight,
            path_weight: self.path.weight(),
            parity: self.matching.parity,
            virtual_points: self.augmentation,
            work: self.work,
            trace: self.state.trace().to_vec(),
        })
    }
}

/// Bounded-angle spanning tree of the path's points: every vertex's edges
/// fit in a 2π/3 cone, the weight is at most twice the path's, and path
/// neighbors are at most three tree edges apart.
pub fn build_tree_from_path(path: &PathInstance) -> Result<BastResult, BuildError> {
    build_tree_with(path, BuildOptions::default())
}

pub fn build_tree_with(path: &PathInstance, opts: BuildOptions) -> Result<BastResult, BuildError> {
    let mut b = Builder::new(path, opts.matching)?;
    b.phase1()?;
    b.phase2(opts.phase2)?;
    b.phase3()?;
    b.finish(opts.connector)
}
