//! Distribution and correlation statistics over fitness values and pair
//! tables.

use serde::Serialize;
use thiserror::Error;

use crate::generators::OperatorKind;
use crate::search::Operator;
use crate::similarity::SimilarityPair;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("empty input")]
    EmptyInput,
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
}

fn degenerate(what: impl Into<String>) -> StatsError {
    StatsError::DegenerateSample(what.into())
}

/// Min-max scaling to [0, 1]; a constant sample maps to all zeros.
pub fn normalize_fitness(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(values
        .iter()
        .map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `counts.len() + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Equal-width bins over `[min, max]`; the last bin includes its right edge.
pub fn histogram(values: &[f64], bins: usize) -> Result<Histogram, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if bins == 0 {
        return Err(degenerate("histogram needs at least one bin"));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + width * i as f64 })
        .collect();
    let mut counts = vec![0; bins];
    for &v in values {
        let idx = if width > 0.0 {
            (((v - lo) / width).floor() as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)).sqrt()
}

/// Linear-interpolation quantile of sorted data, `h = (n - 1) p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

const MIN_BANDWIDTH: f64 = 1e-6;

/// Silverman's rule `0.9 min(sd, IQR / 1.34) n^(-1/5)`; the IQR term is
/// skipped when it is zero.
pub fn silverman_bandwidth(values: &[f64]) -> Result<f64, StatsError> {
    if values.len() < 2 {
        return Err(degenerate("kde needs at least two values"));
    }
    let sd = std_dev(values);
    if sd.is_nan() || sd <= 0.0 {
        return Err(degenerate("kde sample has zero variance"));
    }
    let s = sorted(values);
    let iqr = quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok((0.9 * spread * (values.len() as f64).powf(-0.2)).max(MIN_BANDWIDTH))
}

/// Gaussian kernel density evaluated on `grid`.
pub fn kde(values: &[f64], grid: &[f64]) -> Result<Vec<f64>, StatsError> {
    let h = silverman_bandwidth(values)?;
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h * values.len() as f64);
    Ok(grid
        .iter()
        .map(|g| {
            values
                .iter()
                .map(|v| (-0.5 * ((g - v) / h).powi(2)).exp())
                .sum::<f64>()
                * norm
        })
        .collect())
}

/// Product-moment correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(degenerate("pearson inputs differ in length"));
    }
    if x.len() < 2 {
        return Err(degenerate("pearson needs at least two points"));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx.is_nan() || syy.is_nan() || sxx <= 0.0 || syy <= 0.0 {
        return Err(degenerate("pearson input is constant"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Least-squares `(slope, intercept)` of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64), StatsError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(degenerate("linear fit needs two or more paired points"));
    }
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(degenerate("linear fit predictor is constant"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Clamps to the `lower` and `upper` quantiles of the sample.
pub fn winsorize(values: &[f64], lower: f64, upper: f64) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let s = sorted(values);
    let (lo, hi) = (quantile_sorted(&s, lower), quantile_sorted(&s, upper));
    values.iter().map(|v| v.clamp(lo, hi)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrelationOptions {
    /// Use `delta_signed` instead of `delta_abs`.
    pub signed_delta: bool,
    /// Clamp the delta column to its 1st/99th percentiles first.
    pub winsorize: bool,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        CorrelationOptions {
            signed_delta: false,
            winsorize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// `None` where the pairwise-complete sample is degenerate.
    pub values: Vec<Vec<Option<f64>>>,
    pub counts: Vec<Vec<usize>>,
}

impl CorrelationMatrix {
    pub fn all_off_diagonal_missing(&self) -> bool {
        let n = self.labels.len();
        (0..n).all(|i| (0..n).all(|j| i == j || self.values[i][j].is_none()))
    }
}

/// Pairwise-complete Pearson matrix over the four similarities and the
/// performance delta. The diagonal is 1.
pub fn correlation_matrix(pairs: &[SimilarityPair], opts: CorrelationOptions) -> CorrelationMatrix {
    let delta_label = if opts.signed_delta {
        "delta_signed"
    } else {
        "delta_abs"
    };
    let labels: Vec<String> = SimilarityPair::METRICS[..4]
        .iter()
        .map(|s| s.to_string())
        .chain(std::iter::once(delta_label.to_string()))
        .collect();
    let mut columns: Vec<Vec<Option<f64>>> = SimilarityPair::METRICS
        .iter()
        .map(|m| {
            pairs
                .iter()
                .map(|p| p.metric(m, opts.signed_delta))
                .collect()
        })
        .collect();
    if opts.winsorize {
        let delta: Vec<f64> = columns[4].iter().flatten().copied().collect();
        let clamped = winsorize(&delta, 0.01, 0.99);
        let mut it = clamped.into_iter();
        for cell in columns[4].iter_mut().filter(|c| c.is_some()) {
            *cell = it.next();
        }
    }
    let n = labels.len();
    let mut values = vec![vec![None; n]; n];
    let mut counts = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i..n {
            let (x, y): (Vec<f64>, Vec<f64>) = columns[i]
                .iter()
                .zip(&columns[j])
                .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
                .unzip();
            let r = if i == j {
                Some(1.0)
            } else {
                pearson(&x, &y).ok()
            };
            values[i][j] = r;
            values[j][i] = r;
            counts[i][j] = x.len();
            counts[j][i] = x.len();
        }
    }
    CorrelationMatrix {
        labels,
        values,
        counts,
    }
}

/// Box-plot statistics; all `None` when `count` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub min: Option<f64>,
    pub lower_quartile: Option<f64>,
    pub median: Option<f64>,
    pub upper_quartile: Option<f64>,
    pub max: Option<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        if values.is_empty() {
            return Summary {
                count: 0,
                min: None,
                lower_quartile: None,
                median: None,
                upper_quartile: None,
                max: None,
            };
        }
        let s = sorted(values);
        Summary {
            count: s.len(),
            min: Some(s[0]),
            lower_quartile: Some(quantile_sorted(&s, 0.25)),
            median: Some(quantile_sorted(&s, 0.5)),
            upper_quartile: Some(quantile_sorted(&s, 0.75)),
            max: Some(s[s.len() - 1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorStats {
    pub operator: Operator,
    pub count: usize,
    pub delta_signed: Summary,
    pub delta_abs: Summary,
    pub dataflow_match: Summary,
}

/// Per-operator summaries: E1, E2, M1, M2 always, then any other operator
/// present in the table.
pub fn operator_summary(pairs: &[SimilarityPair]) -> Vec<OperatorStats> {
    let mut ops: Vec<Operator> = OperatorKind::ALL.into_iter().map(Operator::from).collect();
    for p in pairs {
        if !ops.contains(&p.operator) {
            ops.push(p.operator);
        }
    }
    ops.into_iter()
        .map(|op| {
            let rows: Vec<&SimilarityPair> = pairs.iter().filter(|p| p.operator == op).collect();
            let col = |f: &dyn Fn(&SimilarityPair) -> Option<f64>| -> Vec<f64> {
                rows.iter().filter_map(|p| f(p)).collect()
            };
            OperatorStats {
                operator: op,
                count: rows.len(),
                delta_signed: Summary::of(&col(&|p| Some(p.delta_signed))),
                delta_abs: Summary::of(&col(&|p| Some(p.delta_abs))),
                dataflow_match: Summary::of(&col(&|p| p.dataflow_match)),
            }
        })
        .collect()
}
