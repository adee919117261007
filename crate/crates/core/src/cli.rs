//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad input or arguments.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::builder::{build_tree_with, BuildOptions, ConnectorPolicy, Parity, PathInstance, Phase2Mode};
use crate::document::{format_points, parse_points, OutputDocument, PointFormat};
use crate::exec::Exec;
use crate::geom::CONE_ANGLE;
use crate::oracle::{alpha_mst_bruteforce, collinear_instance, random_uniform, verify_result, OracleConfig};
use crate::pipeline::approx_bast_with;
use crate::svg;

#[derive(Debug, Parser)]
#[command(
    name = "bast",
    version,
    about = "Bounded-angle (2π/3) spanning trees of planar point sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// `.json` extension means JSON, anything else text
    Auto,
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    /// Input order is the path
    Path,
    /// Path from a shortcut Euclidean MST
    Mst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatchingArg {
    Auto,
    /// {p1,p2},{p3,p4},...
    First,
    /// {p2,p3},{p4,p5},...
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Phase2Arg {
    TwoRound,
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConnectorArg {
    Shortest,
    First,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Uniform,
    Collinear,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a tree and verify it; writes a JSON result document
    Build {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: FormatArg,
        #[arg(long, value_enum, default_value = "path")]
        source: SourceArg,
        #[arg(long, value_enum, default_value = "auto")]
        matching: MatchingArg,
        #[arg(long, value_enum, default_value = "two-round")]
        phase2: Phase2Arg,
        #[arg(long, value_enum, default_value = "shortest")]
        connector: ConnectorArg,
        /// Include the per-assignment trace
        #[arg(long)]
        trace: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive minimum bounded-angle tree for small inputs
    Oracle {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: FormatArg,
        /// Cone angle in radians
        #[arg(long, default_value_t = CONE_ANGLE)]
        alpha: f64,
        #[arg(long, default_value_t = 9)]
        max_n: usize,
        /// Result document whose tree to compare against the optimum
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a result document as SVG
    Svg {
        document: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate an instance
    Gen {
        #[arg(long, value_enum, default_value = "uniform")]
        kind: GenKind,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        spacing: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time path builds and report examinations per matching edge
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A failure that maps to an exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Verification(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

fn resolve_format(arg: FormatArg, path: &Path) -> PointFormat {
    match arg {
        FormatArg::Text => PointFormat::Text,
        FormatArg::Json => PointFormat::Json,
        FormatArg::Auto => {
            if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
                PointFormat::Json
            } else {
                PointFormat::Text
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, body: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[allow(clippy::too_many_arguments)]
fn cmd_build(
    input: &Path,
    format: FormatArg,
    source: SourceArg,
    matching: MatchingArg,
    phase2: Phase2Arg,
    connector: ConnectorArg,
    trace: bool,
    output: &Option<PathBuf>,
) -> Result<(), Failure> {
    let points = parse_points(&read(input)?, resolve_format(format, input))?;
    let opts = BuildOptions {
        matching: match matching {
            MatchingArg::Auto => None,
            MatchingArg::First => Some(Parity::OddStart),
            MatchingArg::Second => Some(Parity::EvenStart),
        },
        phase2: match phase2 {
            Phase2Arg::TwoRound => Phase2Mode::TwoRound,
            Phase2Arg::Reference => Phase2Mode::Reference,
        },
        connector: match connector {
            ConnectorArg::Shortest => ConnectorPolicy::Shortest,
            ConnectorArg::First => ConnectorPolicy::First,
        },
    };
    let doc = match source {
        SourceArg::Path => {
            let path = PathInstance::new(points.clone())?;
            let result = build_tree_with(&path, opts)?;
            let report = verify_result(&path, &result, None);
            let order: Vec<usize> = (0..points.len()).collect();
            OutputDocument::assemble(&points, &order, &result, None, report, trace)
        }
        SourceArg::Mst => {
            let approx = approx_bast_with(&points, opts)?;
            let report = verify_result(&approx.path, &approx.result, Some(approx.mst_weight));
            OutputDocument::from_approx(&points, &approx, report, trace)
        }
    };
    emit(output, &(doc.to_json() + "\n"))?;
    if doc.verification.passed {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "verification failed: {:?}",
            doc.verification
        )))
    }
}

#[derive(Debug, Serialize)]
struct Comparison {
    tree_weight: f64,
    ratio: f64,
}

#[derive(Debug, Serialize)]
struct OracleReport {
    n: usize,
    alpha: f64,
    weight: f64,
    edges: Vec<(usize, usize)>,
    trees_examined: u64,
    feasible: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<Comparison>,
}

fn cmd_oracle(
    input: &Path,
    format: FormatArg,
    alpha: f64,
    max_n: usize,
    compare: &Option<PathBuf>,
    sequential: bool,
    output: &Option<PathBuf>,
) -> Result<(), Failure> {
    let points = parse_points(&read(input)?, resolve_format(format, input))?;
    let exec = if sequential { Exec::Sequential } else { Exec::Parallel };
    let res = alpha_mst_bruteforce(&points, OracleConfig { alpha, max_n }, exec)?;
    let comparison = match compare {
        Some(p) => {
            let doc = OutputDocument::from_json(&read(p)?)?;
            if doc.points != points {
                return Err(Failure::Input("comparison document is over different points".into()));
            }
            Some(Comparison {
                tree_weight: doc.weights.tree,
                ratio: if res.weight > 0.0 {
                    doc.weights.tree / res.weight
                } else {
                    1.0
                },
            })
        }
        None => None,
    };
    let report = OracleReport {
        n: points.len(),
        alpha,
        weight: res.weight,
        edges: res.edges,
        trees_examined: res.trees_examined,
        feasible: res.feasible,
        comparison,
    };
    emit(output, &to_json(&report))
}

fn check_document(doc: &OutputDocument) -> Result<(), Failure> {
    let n = doc.points.len();
    if doc.orientations.len() != n {
        return Err(Failure::Input(format!(
            "{} orientations for {n} points",
            doc.orientations.len()
        )));
    }
    let bad = |e: &&(usize, usize)| e.0 >= n || e.1 >= n;
    if let Some(e) = doc.tree_edges.iter().chain(&doc.connector_edges).find(bad) {
        return Err(Failure::Input(format!("edge {e:?} out of range")));
    }
    if doc.points.iter().any(|p| !p.is_finite()) || doc.orientations.iter().any(|o| !o.bisector.is_finite()) {
        return Err(Failure::Input("non-finite value in document".into()));
    }
    Ok(())
}

fn cmd_svg(document: &Path, output: &Option<PathBuf>) -> Result<(), Failure> {
    let doc = OutputDocument::from_json(&read(document)?)?;
    check_document(&doc)?;
    emit(output, &svg::render(&doc))
}

fn cmd_gen(
    kind: GenKind,
    n: usize,
    seed: u64,
    spacing: f64,
    format: FormatArg,
    output: &Option<PathBuf>,
) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::Input(format!("n must be at least 2, got {n}")));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Failure::Input(format!("spacing must be positive, got {spacing}")));
    }
    let path = match kind {
        GenKind::Uniform => random_uniform(n, seed),
        GenKind::Collinear => collinear_instance(n, spacing),
    };
    let fmt = match format {
        FormatArg::Json => PointFormat::Json,
        FormatArg::Text => PointFormat::Text,
        FormatArg::Auto => match output {
            Some(p) => resolve_format(FormatArg::Auto, p),
            None => PointFormat::Text,
        },
    };
    emit(output, &format_points(&path.points, fmt))
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub matching_edges: usize,
    pub examinations: usize,
    pub examinations_per_edge: f64,
    pub seconds: f64,
}

fn cmd_bench(sizes: &[usize], seed: u64, output: &Option<PathBuf>) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for &n in sizes {
        if n < 2 {
            return Err(Failure::Input(format!("size must be at least 2, got {n}")));
        }
        let path = random_uniform(n, seed);
        let start = Instant::now();
        let r = build_tree_with(&path, BuildOptions::default())?;
        let seconds = start.elapsed().as_secs_f64();
        let m = r.matching.len() + r.virtual_points.entries.len();
        rows.push(BenchRow {
            n,
            matching_edges: m,
            examinations: r.work.total(),
            examinations_per_edge: r.work.total() as f64 / m as f64,
            seconds,
        });
    }
    emit(output, &to_json(&rows))
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let res = match &cli.command {
        Command::Build {
            input,
            format,
            source,
            matching,
            phase2,
            connector,
            trace,
            output,
        } => cmd_build(input, *format, *source, *matching, *phase2, *connector, *trace, output),
        Command::Oracle {
            input,
            format,
            alpha,
            max_n,
            compare,
            sequential,
            output,
        } => cmd_oracle(input, *format, *alpha, *max_n, compare, *sequential, output),
        Command::Svg { document, output } => cmd_svg(document, output),
        Command::Gen {
            kind,
            n,
            seed,
            spacing,
            format,
            output,
        } => cmd_gen(*kind, *n, *seed, *spacing, *format, output),
        Command::Bench { sizes, seed, output } => cmd_bench(sizes, *seed, output),
    };
    match res {
        Ok(()) => 0,
        Err(Failure::Verification(msg)) => {
            eprintln!("bast: {msg}");
            1
        }
        Err(Failure::Input(msg)) => {
            eprintln!("bast: {msg}");
            2
        }
    }
}
