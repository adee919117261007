//! Test-only helpers: region depth, constrained samplers and an independent
//! brute-force bounded-angle tree search that shares no code with the crate's
//! own enumeration.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_3, PI, TAU};

use bast::geom::{Point, Region};
use proptest::test_runner::Config;
use rand::Rng;

/// Euclidean distance from `q` to the closed wedge with apex `a`, axis angle
/// `axis` and half-angle π/3, negated when `q` is inside (so positive means
/// outside by that much).
fn wedge_signed(a: Point, axis: f64, q: Point) -> f64 {
    let (dx, dy) = (q.x - a.x, q.y - a.y);
    let r = dx.hypot(dy);
    if r == 0.0 {
        return 0.0;
    }
    let mut phi = (dy.atan2(dx) - axis).rem_euclid(TAU);
    if phi > PI {
        phi = TAU - phi;
    }
    if phi <= FRAC_PI_3 {
        -r * (FRAC_PI_3 - phi).sin()
    } else if phi - FRAC_PI_3 >= PI / 2.0 {
        r
    } else {
        r * (phi - FRAC_PI_3).sin()
    }
}

/// How far `q` sits inside `region` of the partition induced by `(u, v)`;
/// negative when it is outside. Written from the geometric definition, not
/// from the crate's classifier.
pub fn depth(u: Point, v: Point, region: Region, q: Point) -> f64 {
    let axis = (v.y - u.y).atan2(v.x - u.x);
    let w1 = wedge_signed(u, axis + PI, q);
    let w3 = wedge_signed(v, axis, q);
    let len = u.dist(&v);
    // signed distance to the line through u, v; positive on the left
    let left = ((v.x - u.x) * (q.y - u.y) - (v.y - u.y) * (q.x - u.x)) / len;
    match region {
        Region::R1 => -w1,
        Region::R3 => -w3,
        Region::R2 => left.min(w1).min(w3),
        Region::R4 => (-left).min(w1).min(w3),
    }
}

pub fn proptest_config(cases: u32) -> Config {
    Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn random_point<R: Rng>(rng: &mut R, scale: f64) -> Point {
    Point::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// A random point at least `margin` inside `region` of `(u, v)`.
pub fn sample_in<R: Rng>(rng: &mut R, u: Point, v: Point, region: Region, margin: f64) -> Point {
    let axis = (v.y - u.y).atan2(v.x - u.x);
    let len = u.dist(&v);
    loop {
        let q = match region {
            Region::R1 | Region::R3 => {
                let (apex, dir) = if region == Region::R1 {
                    (u, axis + PI)
                } else {
                    (v, axis)
                };
                let t = dir + rng.gen_range(-FRAC_PI_3..FRAC_PI_3);
                let r = len * rng.gen_range(0.0..4.0);
                Point::new(apex.x + r * t.cos(), apex.y + r * t.sin())
            }
            Region::R2 | Region::R4 => {
                let mid = Point::new((u.x + v.x) / 2.0, (u.y + v.y) / 2.0);
                let sign = if region == Region::R2 { 1.0 } else { -1.0 };
                let t = axis + sign * rng.gen_range(0.0..PI);
                let r = len * rng.gen_range(0.0..4.0);
                Point::new(mid.x + r * t.cos(), mid.y + r * t.sin())
            }
        };
        if depth(u, v, region, q) >= margin {
            return q;
        }
    }
}

/// A random pair of distinct points with separation at least 0.1.
pub fn random_segment<R: Rng>(rng: &mut R) -> (Point, Point) {
    loop {
        let u = random_point(rng, 10.0);
        let v = random_point(rng, 10.0);
        if u.dist(&v) >= 0.1 {
            return (u, v);
        }
    }
}

/// Smallest angle containing all of `angles` (radians, any range).
pub fn span(angles: &[f64]) -> f64 {
    if angles.len() < 2 {
        return 0.0;
    }
    let mut a: Vec<f64> = angles.iter().map(|t| t.rem_euclid(TAU)).collect();
    a.sort_by(f64::total_cmp);
    let mut gap = a[0] + TAU - a[a.len() - 1];
    for w in a.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    TAU - gap
}

pub fn tree_span(points: &[Point], edges: &[(usize, usize)]) -> f64 {
    let mut per: Vec<Vec<f64>> = vec![Vec::new(); points.len()];
    for &(a, b) in edges {
        let (p, q) = (points[a], points[b]);
        per[a].push((q.y - p.y).atan2(q.x - p.x));
        per[b].push((p.y - q.y).atan2(p.x - q.x));
    }
    per.iter().map(|d| span(d)).fold(0.0, f64::max)
}

fn is_spanning_tree(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut comp: Vec<usize> = (0..n).collect();
    for &(a, b) in edges {
        let (ca, cb) = (comp[a], comp[b]);
        if ca == cb {
            return false;
        }
        for c in comp.iter_mut() {
            if *c == cb {
                *c = ca;
            }
        }
    }
    true
}

/// Minimum weight of an `alpha`-bounded spanning tree, by trying every
/// (n-1)-subset of the complete graph's edges. Exponential; n ≤ 7.
pub fn subset_alpha_mst(points: &[Point], alpha: f64) -> f64 {
    let n = points.len();
    let all: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let k = n - 1;
    let mut best = f64::INFINITY;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let edges: Vec<(usize, usize)> = idx.iter().map(|&i| all[i]).collect();
        if is_spanning_tree(n, &edges) && tree_span(points, &edges) <= alpha + 1e-9 {
            let w: f64 = edges.iter().map(|&(a, b)| points[a].dist(&points[b])).sum();
            best = best.min(w);
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] != i + all.len() - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Plain minimum spanning tree weight by Kruskal over all pairs.
pub fn kruskal_weight(points: &[Point]) -> f64 {
    let n = points.len();
    let mut all: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|(a, b)| (points[a].dist(&points[b]), a, b))
        .collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut comp: Vec<usize> = (0..n).collect();
    let mut w = 0.0;
    for (d, a, b) in all {
        let (ca, cb) = (comp[a], comp[b]);
        if ca != cb {
            w += d;
            for c in comp.iter_mut() {
                if *c == cb {
                    *c = ca;
                }
            }
        }
    }
    w
}

/// Hop distance by repeated frontier expansion.
pub fn hops(n: usize, edges: &[(usize, usize)], a: usize, b: usize) -> Option<usize> {
    let mut seen = vec![false; n];
    seen[a] = true;
    let mut frontier = vec![a];
    let mut d = 0;
    while !frontier.is_empty() {
        if frontier.contains(&b) {
            return Some(d);
        }
        let mut next = Vec::new();
        for &x in &frontier {
            for &(p, q) in edges {
                let y = if p == x {
                    q
                } else if q == x {
                    p
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    next.push(y);
                }
            }
        }
        frontier = next;
        d += 1;
    }
    None
}

pub fn c4() -> Vec<Point> {
    vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(3.0, 0.0),
        Point::new(4.0, 0.0),
    ]
}

/// Outcome of one claim sample: `None` when the sampled configuration does
/// not meet the claim's premise, otherwise whether the conclusion held.
pub type ClaimSample = Option<Result<(), String>>;

/// x in one side region of (u, v), y in the other: u and v fall in center
/// regions of (x, y).
pub fn claim_sides_opposite<R: Rng>(rng: &mut R, margin: f64) -> ClaimSample {
    use bast::geom::classify_region;
    let (u, v) = random_segment(rng);
    let x = sample_in(rng, u, v, Region::R1, margin);
    let y = sample_in(rng, u, v, Region::R3, margin);
    for (name, p) in [("u", u), ("v", v)] {
        let r = classify_region(x, y, p).map_err(|e| e.to_string());
        if !matches!(r, Ok(Region::R2 | Region::R4)) {
            return Some(Err(format!("{name} in {r:?}: u={u:?} v={v:?} x={x:?} y={y:?}")));
        }
    }
    Some(Ok(()))
}

fn center_region<R: Rng>(rng: &mut R) -> Region {
    if rng.gen_bool(0.5) {
        Region::R2
    } else {
        Region::R4
    }
}

/// x in v's side region, y in a center region of (u, v): if u is in the side
/// region adjacent to x, so is v.
///
/// u lies behind x relative to y exactly when y lies beyond x relative to u,
/// so y is drawn from that wedge and kept only if it is central for (u, v).
pub fn claim_behind_x<R: Rng>(rng: &mut R, margin: f64) -> ClaimSample {
    use bast::geom::classify_region;
    let (u, v) = random_segment(rng);
    let x = sample_in(rng, u, v, Region::R3, margin);
    let y = sample_in(rng, u, x, Region::R3, margin);
    let central = depth(u, v, Region::R2, y).max(depth(u, v, Region::R4, y));
    if central < margin || depth(x, y, Region::R1, u) < margin {
        return None;
    }
    match classify_region(x, y, v) {
        Ok(Region::R1) => Some(Ok(())),
        r => Some(Err(format!("v in {r:?}: u={u:?} v={v:?} x={x:?} y={y:?}"))),
    }
}

/// Same setup: if v is in the side region adjacent to y, so is u.
///
/// v lies beyond y relative to x exactly when x lies beyond y relative to v.
pub fn claim_behind_y<R: Rng>(rng: &mut R, margin: f64) -> ClaimSample {
    use bast::geom::classify_region;
    let (u, v) = random_segment(rng);
    let side = center_region(rng);
    let y = sample_in(rng, u, v, side, margin);
    let x = sample_in(rng, v, y, Region::R3, margin);
    if depth(u, v, Region::R3, x) < margin || depth(x, y, Region::R3, v) < margin {
        return None;
    }
    match classify_region(x, y, u) {
        Ok(Region::R3) => Some(Ok(())),
        r => Some(Err(format!("u in {r:?}: u={u:?} v={v:?} x={x:?} y={y:?}"))),
    }
}

/// Draw until `want` samples meet the premise (or `cap` draws); returns
/// `(premise hits, first counterexample)`.
pub fn run_claim<R: Rng>(
    rng: &mut R,
    want: usize,
    cap: usize,
    margin: f64,
    f: fn(&mut R, f64) -> ClaimSample,
) -> (usize, Option<String>) {
    let mut hits = 0;
    for _ in 0..cap {
        match f(rng, margin) {
            None => {}
            Some(Ok(())) => hits += 1,
            Some(Err(e)) => return (hits, Some(e)),
        }
        if hits >= want {
            break;
        }
    }
    (hits, None)
}
