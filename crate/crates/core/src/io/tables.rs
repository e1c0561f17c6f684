use std::path::Path;

use serde::Serialize;

use super::{read_to_string, write_atomic, IoError};
use crate::landscape::GraphMetrics;
use crate::similarity::SimilarityPair;
use crate::stats::{CorrelationMatrix, Histogram, OperatorStats, Summary};

fn render<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, IoError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| IoError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Pair table with empty cells for missing structural metrics.
pub fn pairs_csv(pairs: &[SimilarityPair]) -> Result<String, IoError> {
    if pairs.is_empty() {
        // Header only, so readers still see the columns.
        return Ok(concat!(
            "eval_index,parent_id,offspring_id,operator,bleu,weighted_bleu,",
            "ast_match,dataflow_match,delta_signed,delta_abs\n"
        )
        .to_string());
    }
    render(pairs)
}

pub fn write_pairs_csv(pairs: &[SimilarityPair], path: &Path) -> Result<(), IoError> {
    write_atomic(path, pairs_csv(pairs)?.as_bytes())
}

pub fn parse_pairs_csv(text: &str) -> Result<Vec<SimilarityPair>, IoError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .map(|row| {
            row.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                IoError::schema(line, "<row>", e.to_string())
            })
        })
        .collect()
}

pub fn read_pairs_csv(path: &Path) -> Result<Vec<SimilarityPair>, IoError> {
    parse_pairs_csv(&read_to_string(path)?)
}

#[derive(Serialize)]
struct MetricsRow {
    nodes: usize,
    edges: usize,
    density: f64,
    average_degree: f64,
    clustering: f64,
}

pub fn metrics_csv(m: &GraphMetrics, nodes: usize, edges: usize) -> Result<String, IoError> {
    render([MetricsRow {
        nodes,
        edges,
        density: m.density,
        average_degree: m.average_degree,
        clustering: m.clustering,
    }])
}

#[derive(Serialize)]
struct DistributionRow {
    series: &'static str,
    x_low: f64,
    x_high: f64,
    value: f64,
}

/// Long format: `hist` rows carry bin edges and counts, `kde` rows a grid
/// point (twice) and its density.
pub fn distribution_csv(
    hist: &Histogram,
    kde: Option<(&[f64], &[f64])>,
) -> Result<String, IoError> {
    let bins = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| DistributionRow {
            series: "hist",
            x_low: hist.edges[i],
            x_high: hist.edges[i + 1],
            value: c as f64,
        });
    let density = kde.into_iter().flat_map(|(grid, d)| {
        grid.iter().zip(d).map(|(&x, &v)| DistributionRow {
            series: "kde",
            x_low: x,
            x_high: x,
            value: v,
        })
    });
    render(bins.chain(density))
}

#[derive(Serialize)]
struct CorrelationRow<'a> {
    row: &'a str,
    column: &'a str,
    r: Option<f64>,
    n: usize,
}

/// One line per matrix cell; `r` is empty where the cell is degenerate.
pub fn correlation_csv(m: &CorrelationMatrix) -> Result<String, IoError> {
    let mut rows = Vec::new();
    for (i, a) in m.labels.iter().enumerate() {
        for (j, b) in m.labels.iter().enumerate() {
            rows.push(CorrelationRow {
                row: a,
                column: b,
                r: m.values[i][j],
                n: m.counts[i][j],
            });
        }
    }
    render(rows)
}

#[derive(Serialize)]
struct OperatorRow<'a> {
    operator: &'a str,
    metric: &'a str,
    count: usize,
    min: Option<f64>,
    lower_quartile: Option<f64>,
    median: Option<f64>,
    upper_quartile: Option<f64>,
    max: Option<f64>,
}

pub fn operators_csv(stats: &[OperatorStats]) -> Result<String, IoError> {
    let mut rows = Vec::new();
    for s in stats {
        let metrics: [(&str, &Summary); 3] = [
            ("delta_signed", &s.delta_signed),
            ("delta_abs", &s.delta_abs),
            ("dataflow_match", &s.dataflow_match),
        ];
        for (metric, q) in metrics {
            rows.push(OperatorRow {
                operator: s.operator.name(),
                metric,
                count: q.count,
                min: q.min,
                lower_quartile: q.lower_quartile,
                median: q.median,
                upper_quartile: q.upper_quartile,
                max: q.max,
            });
        }
    }
    render(rows)
}
