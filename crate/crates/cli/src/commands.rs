//! Command implementations. Each analysis renders to a string so `report`
//! can reuse it; files are written atomically.

use std::fmt::Write as _;
use std::path::Path;

use las_core::generators::{Generator, LlmGenerator, MockGenerator};
use las_core::io::{
    correlation_csv, distribution_csv, dot_landscape, dot_trajectory, graph_json,
    graphml_landscape, import_external, metrics_csv, operators_csv, pairs_csv, read_pairs_csv,
    read_run_log, write_atomic, write_run_log,
};
use las_core::landscape::{
    build_graph, layout, metrics, trajectory, LandscapeGraph, LayoutOptions,
};
use las_core::search::{run_search, RunLog};
use las_core::similarity::{pair_table, SimilarityPair};
use las_core::stats::{
    correlation_matrix, histogram, kde, normalize_fitness, operator_summary, silverman_bandwidth,
    CorrelationOptions,
};

use crate::config::{GeneratorKind, ResolvedRun};
use crate::error::CliError;

/// Histogram bins used by `report`.
pub const REPORT_BINS: usize = 20;
/// Points on the KDE evaluation grid.
pub const KDE_GRID_POINTS: usize = 201;
/// The KDE grid extends this many bandwidths past the sample range.
const KDE_GRID_MARGIN: f64 = 4.0;

pub fn run(cfg: &ResolvedRun, out: &Path) -> Result<RunLog, CliError> {
    let generator: Box<dyn Generator> = match cfg.generator {
        GeneratorKind::Mock => Box::new(MockGenerator {
            max_depth: cfg.search.max_depth,
        }),
        GeneratorKind::Llm => {
            let llm = cfg.llm.clone().expect("resolved llm config");
            Box::new(LlmGenerator::from_env(llm).map_err(|e| CliError::Usage(e.to_string()))?)
        }
    };
    let log = run_search(&cfg.search, &cfg.task, generator.as_ref())?;
    write_run_log(&log, out)?;
    Ok(log)
}

/// Reads a toolkit log, or with `import` a log produced elsewhere.
pub fn load_log(path: &Path, import: bool) -> Result<RunLog, CliError> {
    Ok(if import {
        import_external(path)?
    } else {
        read_run_log(path)?
    })
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    Ok(write_atomic(path, text.as_bytes())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    Graphml,
    Dot,
    Json,
}

pub fn landscape(
    log: &RunLog,
    format: GraphFormat,
    opts: &LayoutOptions,
) -> Result<String, CliError> {
    let g = build_graph(log)?;
    let shown = g.filtered(opts.weight_threshold);
    Ok(match format {
        GraphFormat::Graphml => graphml_landscape(&shown),
        GraphFormat::Dot => dot_landscape(&shown),
        GraphFormat::Json => graph_json(&shown, Some(&layout(&g, opts))),
    })
}

/// Human-readable metrics of the full landscape graph.
pub fn metrics_text(g: &LandscapeGraph) -> String {
    let m = metrics(g);
    let mut s = String::new();
    let _ = writeln!(s, "nodes {}", g.node_count());
    let _ = writeln!(s, "edges {}", g.edge_count());
    let _ = writeln!(s, "density {}", m.density);
    let _ = writeln!(s, "average_degree {}", m.average_degree);
    let _ = writeln!(s, "clustering {}", m.clustering);
    s
}

pub fn metrics_table(g: &LandscapeGraph) -> Result<String, CliError> {
    Ok(metrics_csv(&metrics(g), g.node_count(), g.edge_count())?)
}

/// Histogram of the normalized fitness of every feasible event, with KDE
/// rows when `with_kde`. A KDE on a degenerate sample is an error only when
/// `kde_required`.
pub fn distribution(
    log: &RunLog,
    bins: usize,
    with_kde: bool,
    kde_required: bool,
) -> Result<String, CliError> {
    let values: Vec<f64> = log
        .events
        .iter()
        .filter_map(|e| e.fitness.finite())
        .collect();
    let norm = normalize_fitness(&values).map_err(|e| CliError::degenerate("fitness", e))?;
    let hist = histogram(&norm, bins).map_err(|e| CliError::degenerate("histogram", e))?;
    let density = if with_kde {
        match kde_on_grid(&norm) {
            Ok(d) => Some(d),
            Err(e) if kde_required => return Err(e),
            Err(e) => {
                log::warn!("skipping density rows: {e}");
                None
            }
        }
    } else {
        None
    };
    let kde_rows = density.as_ref().map(|(g, d)| (g.as_slice(), d.as_slice()));
    Ok(distribution_csv(&hist, kde_rows)?)
}

fn kde_on_grid(values: &[f64]) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let h = silverman_bandwidth(values).map_err(|e| CliError::degenerate("kde", e))?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min) - KDE_GRID_MARGIN * h;
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max) + KDE_GRID_MARGIN * h;
    let step = (hi - lo) / (KDE_GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..KDE_GRID_POINTS).map(|i| lo + step * i as f64).collect();
    let density = kde(values, &grid).map_err(|e| CliError::degenerate("kde", e))?;
    Ok((grid, density))
}

pub fn trajectory_dot(log: &RunLog) -> Result<String, CliError> {
    let g = build_graph(log)?;
    let t = trajectory(log)?;
    Ok(dot_trajectory(&t, Some(&g)))
}

pub fn similarity(log: &RunLog) -> Result<(Vec<SimilarityPair>, String), CliError> {
    let pairs = pair_table(log);
    let text = pairs_csv(&pairs)?;
    Ok((pairs, text))
}

/// Correlation table; with `strict`, a matrix without a single defined
/// off-diagonal cell is an error.
pub fn correlation(
    pairs: &[SimilarityPair],
    signed_delta: bool,
    strict: bool,
) -> Result<String, CliError> {
    let opts = CorrelationOptions {
        signed_delta,
        ..CorrelationOptions::default()
    };
    let m = correlation_matrix(pairs, opts);
    if strict && m.all_off_diagonal_missing() {
        return Err(CliError::Degenerate(format!(
            "pearson correlation among {} is undefined for every pair of columns ({} rows)",
            m.labels.join(", "),
            pairs.len()
        )));
    }
    Ok(correlation_csv(&m)?)
}

pub fn operators(pairs: &[SimilarityPair]) -> Result<String, CliError> {
    Ok(operators_csv(&operator_summary(pairs))?)
}

pub fn read_pairs(path: &Path) -> Result<Vec<SimilarityPair>, CliError> {
    Ok(read_pairs_csv(path)?)
}

/// Best candidate (lowest fitness, earliest on ties) and run totals.
pub fn summary(log: &RunLog) -> Result<String, CliError> {
    let best = log
        .best()
        .ok_or_else(|| CliError::Degenerate("fitness: no feasible candidate".into()))?;
    let feasible = log.events.iter().filter(|e| e.fitness.feasible).count();
    let task = log
        .header
        .task_spec()
        .map_or("unknown", |t| t.kind().name());
    let mut s = String::new();
    let _ = writeln!(s, "task {task}");
    let _ = writeln!(s, "seed {}", log.header.seed);
    let _ = writeln!(s, "events {}", log.events.len());
    let _ = writeln!(s, "feasible_events {feasible}");
    let _ = writeln!(s, "best_eval_index {}", best.eval_index);
    let _ = writeln!(s, "best_fitness {}", best.fitness.value);
    let _ = writeln!(s, "best_canonical_id {}", best.candidate.id());
    let _ = writeln!(s, "best_canonical_code\n{}", best.candidate.canonical.text);
    Ok(s)
}

/// File names written by `report`, in writing order.
pub const REPORT_FILES: [&str; 10] = [
    "metrics.csv",
    "distribution.csv",
    "landscape.graphml",
    "landscape.dot",
    "landscape.json",
    "trajectory.dot",
    "pairs.csv",
    "correlation.csv",
    "operators.csv",
    "summary.txt",
];

/// Every analysis with default settings. Degenerate correlation cells and
/// an undefined KDE are reported as missing rather than failing the bundle.
pub fn report(log: &RunLog, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let g = build_graph(log)?;
    let (pairs, pairs_text) = similarity(log)?;
    let contents = [
        metrics_table(&g)?,
        distribution(log, REPORT_BINS, true, false)?,
        graphml_landscape(&g),
        dot_landscape(&g),
        graph_json(&g, Some(&layout(&g, &LayoutOptions::default()))),
        trajectory_dot(log)?,
        pairs_text,
        correlation(&pairs, false, false)?,
        operators(&pairs)?,
        summary(log)?,
    ];
    for (name, text) in REPORT_FILES.iter().zip(&contents) {
        write(&dir.join(name), text)?;
    }
    Ok(())
}
