//! Point files and the JSON result document.
//!
//! Text point files hold one point per line as two whitespace-separated
//! decimals; lines starting with `#` are comments. JSON point files are an
//! array of `[x, y]` pairs. Doubles are written in shortest round-trip form
//! so files survive a parse/serialize cycle bit for bit.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{BastResult, Parity, WorkCounter};
use crate::geom::{ConeKind, Point};
use crate::oracle::VerificationReport;
use crate::orientation::TraceRecord;
use crate::pipeline::ApproxResult;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("line {line}: {msg}")]
    Text { line: usize, msg: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("no points in input")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFormat {
    Text,
    Json,
}

pub fn parse_points_text(src: &str) -> Result<Vec<Point>, InputError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| InputError::Text {
            line: i + 1,
            msg: msg.to_string(),
        };
        let mut it = line.split_whitespace();
        let (Some(xs), Some(ys), None) = (it.next(), it.next(), it.next()) else {
            return Err(err("expected two numbers"));
        };
        let x: f64 = xs.parse().map_err(|_| err("bad x coordinate"))?;
        let y: f64 = ys.parse().map_err(|_| err("bad y coordinate"))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(err("non-finite coordinate"));
        }
        out.push(Point::new(x, y));
    }
    if out.is_empty() {
        return Err(InputError::Empty);
    }
    Ok(out)
}

pub fn parse_points_json(src: &str) -> Result<Vec<Point>, InputError> {
    let raw: Vec<[f64; 2]> = serde_json::from_str(src)?;
    if raw.is_empty() {
        return Err(InputError::Empty);
    }
    Ok(raw.into_iter().map(|[x, y]| Point::new(x, y)).collect())
}

pub fn parse_points(src: &str, format: PointFormat) -> Result<Vec<Point>, InputError> {
    match format {
        PointFormat::Text => parse_points_text(src),
        PointFormat::Json => parse_points_json(src),
    }
}

pub fn format_points(points: &[Point], format: PointFormat) -> String {
    match format {
        PointFormat::Text => {
            let mut s = String::new();
            for p in points {
                let _ = writeln!(s, "{} {}", p.x, p.y);
            }
            s
        }
        PointFormat::Json => {
            let raw: Vec<[f64; 2]> = points.iter().map(|p| [p.x, p.y]).collect();
            let mut s = serde_json::to_string(&raw).expect("finite floats serialize");
            s.push('\n');
            s
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientationEntry {
    pub bisector: f64,
    pub kind: ConeKind,
    pub partner: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub path: f64,
    pub mst: Option<f64>,
    pub tree: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub tree_to_path: f64,
    pub tree_to_mst: Option<f64>,
}

/// Everything `build` reports. All vertex indices refer to the input order;
/// `path[i]` is the input index of the i-th path vertex. Trace vertex indices
/// are path positions (with virtual companions numbered after the last real
/// vertex).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub points: Vec<Point>,
    pub path: Vec<usize>,
    pub tree_edges: Vec<(usize, usize)>,
    pub matching_edges: Vec<(usize, usize)>,
    pub connector_edges: Vec<(usize, usize)>,
    pub orientations: Vec<OrientationEntry>,
    pub parity: Parity,
    pub weights: Weights,
    pub ratios: Ratios,
    pub work: WorkCounter,
    pub verification: VerificationReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRecord>>,
}

impl OutputDocument {
    /// `order[i]` is the input index of path vertex `i`; `points` are in input
    /// order.
    pub fn assemble(
        points: &[Point],
        order: &[usize],
        result: &BastResult,
        mst_weight: Option<f64>,
        verification: VerificationReport,
        with_trace: bool,
    ) -> Self {
        let map = |e: &(usize, usize)| (order[e.0], order[e.1]);
        let mut orientations = vec![
            OrientationEntry {
                bisector: 0.0,
                kind: ConeKind::Center,
                partner: None,
            };
            points.len()
        ];
        for (i, o) in result.orientations.iter().enumerate() {
            orientations[order[i]] = OrientationEntry {
                bisector: o.cone.bisector.radians(),
                kind: o.kind,
                partner: o.partner.map(|p| order[p]),
            };
        }
        OutputDocument {
            points: points.to_vec(),
            path: order.to_vec(),
            tree_edges: result.edges.iter().map(map).collect(),
            matching_edges: result.matching.iter().map(map).collect(),
            connector_edges: result.connectors.iter().map(map).collect(),
            orientations,
            parity: result.parity,
            weights: Weights {
                path: result.path_weight,
                mst: mst_weight,
                tree: result.tree_weight,
            },
            ratios: Ratios {
                tree_to_path: if result.path_weight > 0.0 {
                    result.tree_weight / result.path_weight
                } else {
                    1.0
                },
                tree_to_mst: mst_weight.map(|m| if m > 0.0 { result.tree_weight / m } else { 1.0 }),
            },
            work: result.work,
            verification,
            trace: with_trace.then(|| result.trace.clone()),
        }
    }

    pub fn from_approx(
        points: &[Point],
        approx: &ApproxResult,
        verification: VerificationReport,
        with_trace: bool,
    ) -> Self {
        OutputDocument::assemble(
            points,
            &approx.order,
            &approx.result,
            Some(approx.mst_weight),
            verification,
            with_trace,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(src: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(src)?)
    }
}
