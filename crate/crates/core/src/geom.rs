//! Planar primitives: directions, the four-region partition induced by an
//! ordered segment, the three basic 2π/3 transmission cones and angular spans.
//!
//! Geometry of the partition for an ordered pair `(u, v)`, in the frame where
//! `v - u` points along +x:
//!
//! * `R1` is the closed wedge with apex `u`, half-angle π/3, axis pointing
//!   away from `v` (the side region adjacent to `u`);
//! * `R3` is the closed wedge with apex `v`, half-angle π/3, axis pointing
//!   away from `u` (the side region adjacent to `v`);
//! * `R2` is whatever remains strictly left of `u -> v`, plus the open
//!   segment `uv`;
//! * `R4` is whatever remains strictly right.
//!
//! The wedge half-angle is not a free parameter: it is the only value for
//! which each of `R2`, `R3`, `R4` fits in exactly one 2π/3 cone at `u`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack applied to every closed angular test, in radians.
pub const ANGLE_TOL: f64 = 1e-9;

/// Points closer than this fraction of the instance diameter are duplicates.
pub const DUPLICATE_REL_TOL: f64 = 1e-12;

/// Half the opening angle of a transmission cone.
pub const CONE_HALF_ANGLE: f64 = PI / 3.0;

/// Opening angle of a transmission cone.
pub const CONE_ANGLE: f64 = 2.0 * PI / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("points coincide; direction is undefined")]
    CoincidentPoints,
    #[error("query point coincides with a segment endpoint")]
    DuplicatePoint,
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("query point coincides with the cone apex")]
    ApexQuery,
    #[error("empty direction set")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// `self + t * (cos theta, sin theta)`.
    pub fn offset(&self, dir: Direction, t: f64) -> Point {
        let (s, c) = dir.radians().sin_cos();
        Point::new(self.x + t * c, self.y + t * s)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An angle normalized to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction(f64);

impl Direction {
    pub fn new(theta: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if t >= TAU {
            t = 0.0;
        }
        Direction(t)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn rotated(self, delta: f64) -> Self {
        Direction::new(self.0 + delta)
    }

    pub fn reversed(self) -> Self {
        self.rotated(PI)
    }

    /// Smallest rotation taking one direction to the other, in `[0, π]`.
    pub fn angular_distance(self, other: Direction) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }
}

pub fn direction(from: Point, to: Point) -> Result<Direction, GeomError> {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(GeomError::CoincidentPoints);
    }
    Ok(Direction::new(dy.atan2(dx)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    R1,
    R2,
    R3,
    R4,
}

impl Region {
    pub fn is_side(self) -> bool {
        matches!(self, Region::R1 | Region::R3)
    }

    pub fn is_center(self) -> bool {
        !self.is_side()
    }

    /// Label of the same region under the reversed pair `(v, u)`.
    pub fn swapped(self) -> Region {
        match self {
            Region::R1 => Region::R3,
            Region::R2 => Region::R4,
            Region::R3 => Region::R1,
            Region::R4 => Region::R2,
        }
    }
}

/// The three basic orientations of a vertex with respect to its partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConeKind {
    Up,
    Down,
    Center,
}

impl ConeKind {
    /// Preference order used wherever the algorithm has a free choice.
    pub const PRIORITY: [ConeKind; 3] = [ConeKind::Center, ConeKind::Up, ConeKind::Down];

    fn bisector_offset(self) -> f64 {
        match self {
            ConeKind::Center => 0.0,
            ConeKind::Up => CONE_HALF_ANGLE,
            ConeKind::Down => -CONE_HALF_ANGLE,
        }
    }
}

impl fmt::Display for ConeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConeKind::Up => "up",
            ConeKind::Down => "down",
            ConeKind::Center => "center",
        };
        f.write_str(s)
    }
}

/// A closed 2π/3 transmission cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub apex: Point,
    pub bisector: Direction,
}

impl Cone {
    pub fn new(apex: Point, bisector: Direction) -> Self {
        Cone { apex, bisector }
    }

    pub fn contains(&self, q: Point) -> Result<bool, GeomError> {
        let d = direction(self.apex, q).map_err(|_| GeomError::ApexQuery)?;
        Ok(self.contains_direction(d))
    }

    pub fn contains_direction(&self, d: Direction) -> bool {
        d.angular_distance(self.bisector) <= CONE_HALF_ANGLE + ANGLE_TOL
    }

    pub fn rotated(&self, delta: f64) -> Cone {
        Cone::new(self.apex, self.bisector.rotated(delta))
    }
}

pub fn cone_contains(c: &Cone, q: Point) -> Result<bool, GeomError> {
    c.contains(q)
}

pub fn classify_region(u: Point, v: Point, q: Point) -> Result<Region, GeomError> {
    if u == v {
        return Err(GeomError::DegenerateSegment);
    }
    if q == u || q == v {
        return Err(GeomError::DuplicatePoint);
    }
    let axis = direction(u, v)?;
    let from_u = direction(u, q)?;
    if from_u.angular_distance(axis.reversed()) <= CONE_HALF_ANGLE + ANGLE_TOL {
        return Ok(Region::R1);
    }
    let from_v = direction(v, q)?;
    if from_v.angular_distance(axis) <= CONE_HALF_ANGLE + ANGLE_TOL {
        return Ok(Region::R3);
    }
    let cross = (v.x - u.x) * (q.y - u.y) - (v.y - u.y) * (q.x - u.x);
    // cross == 0 outside both wedges means q sits on the open segment
    if cross >= 0.0 {
        Ok(Region::R2)
    } else {
        Ok(Region::R4)
    }
}

pub fn basic_cone(u: Point, v: Point, kind: ConeKind) -> Result<Cone, GeomError> {
    let axis = direction(u, v).map_err(|_| GeomError::DegenerateSegment)?;
    Ok(Cone::new(u, axis.rotated(kind.bisector_offset())))
}

/// Whether some basic cone of `a` (with respect to `partner`) contains `q`.
///
/// The three basic cones jointly cover every direction except the open wedge
/// of `R1(a, partner)`.
pub fn can_cover(a: Point, partner: Point, q: Point) -> Result<bool, GeomError> {
    let axis = direction(a, partner).map_err(|_| GeomError::DegenerateSegment)?;
    let to_q = direction(a, q).map_err(|_| GeomError::ApexQuery)?;
    Ok(to_q.angular_distance(axis.reversed()) >= CONE_HALF_ANGLE - ANGLE_TOL)
}

pub fn mutual_edge_possible(a: Point, pa: Point, b: Point, pb: Point) -> Result<bool, GeomError> {
    if a == b {
        return Err(GeomError::CoincidentPoints);
    }
    Ok(can_cover(a, pa, b)? && can_cover(b, pb, a)?)
}

/// Smallest angle spanned by a set of directions: `2π` minus the largest
/// circular gap between consecutive sorted directions.
pub fn angular_span(dirs: &[Direction]) -> Result<f64, GeomError> {
    if dirs.is_empty() {
        return Err(GeomError::EmptyInput);
    }
    if dirs.len() == 1 {
        return Ok(0.0);
    }
    let mut sorted: Vec<f64> = dirs.iter().map(|d| d.radians()).collect();
    sorted.sort_by(f64::total_cmp);
    let mut max_gap = sorted[0] + TAU - sorted[sorted.len() - 1];
    for w in sorted.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    Ok((TAU - max_gap).max(0.0))
}

/// Largest pairwise distance, by brute force over the bounding box corners
/// of the input (an upper bound within a factor √2 is all callers need).
pub fn diameter_bound(points: &[Point]) -> f64 {
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    if points.is_empty() {
        0.0
    } else {
        min.dist(&max)
    }
}

/// First pair of points closer than `DUPLICATE_REL_TOL` times the diameter.
///
/// Uses a hash grid with cell size equal to the tolerance, so the check is
/// linear in expectation.
pub fn find_duplicate(points: &[Point]) -> Option<(usize, usize)> {
    use std::collections::HashMap;

    let diam = diameter_bound(points);
    let tol = DUPLICATE_REL_TOL * diam;
    if tol == 0.0 {
        // all points identical (or a single point)
        return if points.len() >= 2 { Some((0, 1)) } else { None };
    }
    let cell = |p: &Point| ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let (cx, cy) = cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                    if let Some(&j) = bucket.iter().find(|&&j| points[j].dist(p) <= tol) {
                        return Some((j, i));
                    }
                }
            }
        }
        grid.entry((cx, cy)).or_default().push(i);
    }
    None
}
