//! Orientation state: which basic cone each vertex has been given, why, and
//! the transmission graph those cones induce.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{basic_cone, Cone, ConeKind, GeomError, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    I,
    II,
    III,
    Cleanup,
    Devirtualize,
}

/// Which Phase I condition fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub phase: Phase,
    pub due_edge: Option<usize>,
    pub condition: Option<Condition>,
    /// Part of a double assignment (two vertices oriented toward each other).
    pub simultaneous: bool,
}

impl Provenance {
    pub fn phase1(due_edge: usize, condition: Condition) -> Self {
        Provenance {
            phase: Phase::I,
            due_edge: Some(due_edge),
            condition: Some(condition),
            simultaneous: false,
        }
    }

    pub fn phase2(due_edge: usize, simultaneous: bool) -> Self {
        Provenance {
            phase: Phase::II,
            due_edge: Some(due_edge),
            condition: None,
            simultaneous,
        }
    }

    pub fn phase3(due_edge: Option<usize>, simultaneous: bool) -> Self {
        Provenance {
            phase: Phase::III,
            due_edge,
            condition: None,
            simultaneous,
        }
    }

    pub fn cleanup() -> Self {
        Provenance {
            phase: Phase::Cleanup,
            due_edge: None,
            condition: None,
            simultaneous: false,
        }
    }
}

/// One accepted assignment, in the order it happened.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub phase: Phase,
    pub vertex: usize,
    pub kind: ConeKind,
    pub due_edge: Option<usize>,
    pub condition: Option<Condition>,
    pub simultaneous: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrientationError {
    #[error("vertex {vertex} is already oriented")]
    ReorientAttempt { vertex: usize },
    #[error("vertex {vertex} must be given a center orientation: its partner is not oriented yet")]
    NonCenterFirst { vertex: usize },
    #[error("vertex {vertex} has no orientation")]
    UnorientedVertex { vertex: usize },
    #[error("condition recorded outside phase I")]
    InvalidProvenance,
    #[error("vertex {0} is out of range")]
    OutOfRange(usize),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub kind: ConeKind,
    pub cone: Cone,
    pub provenance: Vec<Provenance>,
}

/// Per-vertex orientations over a perfect matching.
///
/// Every vertex belongs to exactly one matching edge and is only ever
/// oriented with a basic cone relative to its partner in that edge. Once set,
/// a cone never changes.
#[derive(Debug, Clone)]
pub struct OrientationState {
    points: Vec<Point>,
    edges: Vec<(usize, usize)>,
    partner: Vec<usize>,
    edge_of: Vec<usize>,
    slots: Vec<Option<Assignment>>,
    trace: Vec<TraceRecord>,
}

impl OrientationState {
    /// `edges` must be a perfect matching on `points`.
    pub fn new(points: Vec<Point>, edges: Vec<(usize, usize)>) -> Self {
        let n = points.len();
        let mut partner = vec![usize::MAX; n];
        let mut edge_of = vec![usize::MAX; n];
        for (i, &(a, b)) in edges.iter().enumerate() {
            partner[a] = b;
            partner[b] = a;
            edge_of[a] = i;
            edge_of[b] = i;
        }
        debug_assert!(partner.iter().all(|&p| p != usize::MAX), "matching is not perfect");
        OrientationState {
            points,
            edges,
            partner,
            edge_of,
            slots: vec![None; n],
            trace: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> (usize, usize) {
        self.edges[i]
    }

    pub fn partner(&self, v: usize) -> usize {
        self.partner[v]
    }

    pub fn edge_of(&self, v: usize) -> usize {
        self.edge_of[v]
    }

    pub fn assignment(&self, v: usize) -> Option<&Assignment> {
        self.slots[v].as_ref()
    }

    pub fn is_oriented(&self, v: usize) -> bool {
        self.slots[v].is_some()
    }

    pub fn kind(&self, v: usize) -> Option<ConeKind> {
        self.slots[v].as_ref().map(|a| a.kind)
    }

    pub fn cone(&self, v: usize) -> Option<&Cone> {
        self.slots[v].as_ref().map(|a| &a.cone)
    }

    pub fn oriented_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn all_oriented(&self) -> bool {
        self.slots.iter().all(Option::is_some)
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    /// Whether `v` carries a provenance record attributing it to edge `due`.
    pub fn oriented_due_to(&self, v: usize, due: usize) -> bool {
        self.slots[v]
            .as_ref()
            .is_some_and(|a| a.provenance.iter().any(|p| p.due_edge == Some(due)))
    }

    /// Cone `v` would get with `kind`, without assigning it.
    pub fn candidate_cone(&self, v: usize, kind: ConeKind) -> Result<Cone, GeomError> {
        basic_cone(self.points[v], self.points[self.partner[v]], kind)
    }

    /// Assign `kind` to `vertex`.
    ///
    /// Re-assigning the same kind in phase I only records the extra
    /// provenance. During phases I and II a non-center kind requires the
    /// partner to be oriented already.
    pub fn assign(&mut self, vertex: usize, kind: ConeKind, prov: Provenance) -> Result<(), OrientationError> {
        if vertex >= self.len() {
            return Err(OrientationError::OutOfRange(vertex));
        }
        if prov.condition.is_some() && prov.phase != Phase::I {
            return Err(OrientationError::InvalidProvenance);
        }
        if let Some(existing) = self.slots[vertex].as_mut() {
            if existing.kind == kind
                && prov.phase == Phase::I
                && existing.provenance.iter().all(|p| p.phase == Phase::I)
            {
                existing.provenance.push(prov);
                self.trace.push(record(vertex, kind, prov));
                return Ok(());
            }
            return Err(OrientationError::ReorientAttempt { vertex });
        }
        if matches!(prov.phase, Phase::I | Phase::II)
            && kind != ConeKind::Center
            && !self.is_oriented(self.partner[vertex])
        {
            return Err(OrientationError::NonCenterFirst { vertex });
        }
        let cone = self.candidate_cone(vertex, kind)?;
        self.slots[vertex] = Some(Assignment {
            kind,
            cone,
            provenance: vec![prov],
        });
        self.trace.push(record(vertex, kind, prov));
        Ok(())
    }

    /// Both endpoints oriented and each inside the other's closed cone.
    pub fn is_transmission_edge(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        match (self.cone(a), self.cone(b)) {
            (Some(ca), Some(cb)) => mutual(ca, cb),
            _ => false,
        }
    }

    /// Transmission edges between the endpoints of matching edges `e` and `f`,
    /// in the order `(e.0, f.0), (e.0, f.1), (e.1, f.0), (e.1, f.1)`.
    pub fn connectors(&self, e: usize, f: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (u, v) = self.edges[e];
        let (x, y) = self.edges[f];
        [(u, x), (u, y), (v, x), (v, y)]
            .into_iter()
            .filter(move |&(a, b)| self.is_transmission_edge(a, b))
    }

    pub fn connector_exists(&self, e: usize, f: usize) -> bool {
        self.connectors(e, f).next().is_some()
    }

    /// All transmission edges. Quadratic; meant for verification only.
    pub fn transmission_graph(&self) -> Result<TransmissionGraph, OrientationError> {
        let cones = self
            .slots
            .iter()
            .enumerate()
            .map(|(v, s)| {
                s.as_ref()
                    .map(|a| a.cone)
                    .ok_or(OrientationError::UnorientedVertex { vertex: v })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut edges = Vec::new();
        for a in 0..cones.len() {
            for b in a + 1..cones.len() {
                if mutual(&cones[a], &cones[b]) {
                    edges.push((a, b));
                }
            }
        }
        Ok(TransmissionGraph {
            vertex_count: cones.len(),
            edges,
            cones,
        })
    }
}

fn mutual(ca: &Cone, cb: &Cone) -> bool {
    ca.contains(cb.apex).unwrap_or(false) && cb.contains(ca.apex).unwrap_or(false)
}

fn record(vertex: usize, kind: ConeKind, prov: Provenance) -> TraceRecord {
    TraceRecord {
        phase: prov.phase,
        vertex,
        kind,
        due_edge: prov.due_edge,
        condition: prov.condition,
        simultaneous: prov.simultaneous,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub cones: Vec<Cone>,
}

impl TransmissionGraph {
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }
}
