//! Bounded-angle spanning trees.
//!
//! Every vertex of the output tree gets a 2π/3 transmission cone that holds
//! all of its tree edges. Built from a spanning path, the tree weighs at most
//! twice the path and keeps path neighbors within three hops; built from the
//! Euclidean MST (via a shortcut path) it weighs at most four times the MST.

pub mod builder;
pub mod cli;
pub mod document;
pub mod exec;
pub mod geom;
pub mod oracle;
pub mod orientation;
pub mod pipeline;
pub mod svg;

pub use builder::{build_tree_from_path, build_tree_with, BastResult, BuildError, BuildOptions, PathInstance};
pub use exec::Exec;
pub use geom::{ConeKind, Point};
pub use pipeline::{approx_bast, ApproxResult};
