//! SVG rendering of a result document: tree edges as segments (matching and
//! connectors styled apart) and every vertex's transmission cone as a
//! translucent 120° wedge.

use std::collections::HashSet;
use std::fmt::Write;

use crate::document::OutputDocument;
use crate::geom::{Direction, Point, CONE_HALF_ANGLE};

/// Wedge radius as a fraction of the median tree edge length.
const WEDGE_SCALE: f64 = 0.3;
const MARGIN: f64 = 0.05;

fn median_edge_length(doc: &OutputDocument) -> f64 {
    let mut lens: Vec<f64> = doc
        .tree_edges
        .iter()
        .map(|&(a, b)| doc.points[a].dist(&doc.points[b]))
        .collect();
    if lens.is_empty() {
        return 1.0;
    }
    lens.sort_by(f64::total_cmp);
    lens[lens.len() / 2]
}

/// Render `doc`. Output depends only on the document, so repeated calls give
/// identical bytes.
pub fn render(doc: &OutputDocument) -> String {
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &doc.points {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    if doc.points.is_empty() {
        (min_x, min_y, max_x, max_y) = (0.0, 0.0, 1.0, 1.0);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(f64::MIN_POSITIVE);
    let (w, h) = ((max_x - min_x).max(span * 1e-3), (max_y - min_y).max(span * 1e-3));
    let (mx, my) = (w * MARGIN, h * MARGIN);
    let radius = WEDGE_SCALE * median_edge_length(doc);
    let stroke = span * 4e-3;

    // y grows downward in SVG; flip so the picture matches the plane
    let sx = |p: &Point| p.x;
    let sy = |p: &Point| -p.y;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        min_x - mx,
        -max_y - my,
        w + 2.0 * mx,
        h + 2.0 * my
    );
    let _ = writeln!(
        out,
        r#"  <style>.cone{{fill:#4a90d9;fill-opacity:0.2;stroke:none}} .matching{{stroke:#222;stroke-width:{stroke:.6}}} .connector{{stroke:#d9534f;stroke-width:{stroke:.6};stroke-dasharray:{d:.6}}} .vertex{{fill:#222}}</style>"#,
        d = stroke * 3.0
    );

    let _ = writeln!(out, r#"  <g id="cones">"#);
    for (i, o) in doc.orientations.iter().enumerate() {
        let apex = doc.points[i];
        let b = Direction::new(o.bisector);
        let a0 = apex.offset(b.rotated(-CONE_HALF_ANGLE), radius);
        let a1 = apex.offset(b.rotated(CONE_HALF_ANGLE), radius);
        // counter-clockwise in the plane is sweep-flag 0 after the flip
        let _ = writeln!(
            out,
            r#"    <path class="cone" d="M {:.6} {:.6} L {:.6} {:.6} A {r:.6} {r:.6} 0 0 0 {:.6} {:.6} Z"/>"#,
            sx(&apex),
            sy(&apex),
            sx(&a0),
            sy(&a0),
            sx(&a1),
            sy(&a1),
            r = radius
        );
    }
    let _ = writeln!(out, "  </g>");

    let connectors: HashSet<(usize, usize)> = doc.connector_edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let _ = writeln!(out, r#"  <g id="edges">"#);
    for &(a, b) in &doc.tree_edges {
        let class = if connectors.contains(&(a.min(b), a.max(b))) {
            "connector"
        } else {
            "matching"
        };
        let (p, q) = (&doc.points[a], &doc.points[b]);
        let _ = writeln!(
            out,
            r#"    <line class="{class}" x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}"/>"#,
            sx(p),
            sy(p),
            sx(q),
            sy(q)
        );
    }
    let _ = writeln!(out, "  </g>");

    let _ = writeln!(out, r#"  <g id="vertices">"#);
    for p in &doc.points {
        let _ = writeln!(
            out,
            r#"    <circle class="vertex" cx="{:.6}" cy="{:.6}" r="{:.6}"/>"#,
            sx(p),
            sy(p),
            stroke * 2.0
        );
    }
    let _ = writeln!(out, "  </g>");
    out.push_str("</svg>\n");
    out
}
