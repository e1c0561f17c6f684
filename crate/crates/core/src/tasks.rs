//! Algorithm-design tasks, their seeded instance sets, and candidate
//! evaluation as the mean per-instance score (lower is better).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{CompiledProgram, DslError, Program, Scratch};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaskError {
    #[error("invalid task parameters: {0}")]
    InvalidParams(String),
    #[error("program inputs {found:?} do not match task signature {expected:?}")]
    SignatureMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Obp,
    Tsp,
    Symreg,
}

impl TaskKind {
    pub fn input_vars(self) -> &'static [&'static str] {
        match self {
            TaskKind::Obp => &["item", "cap"],
            TaskKind::Tsp => &["d_cm", "d_md", "n_u", "avg_md"],
            TaskKind::Symreg => &["x"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Obp => "obp",
            TaskKind::Tsp => "tsp",
            TaskKind::Symreg => "symreg",
        }
    }
}

impl std::str::FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "obp" => Ok(TaskKind::Obp),
            "tsp" => Ok(TaskKind::Tsp),
            "symreg" => Ok(TaskKind::Symreg),
            other => Err(format!("unknown task `{other}`")),
        }
    }
}

/// Target curve for symbolic regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SymregTarget {
    /// `2.5 / (1 + exp(-1.3 (x - 4)))`
    #[default]
    Logistic,
    /// `x`
    Identity,
}

impl SymregTarget {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            SymregTarget::Logistic => 2.5 / (1.0 + (-1.3 * (x - 4.0)).exp()),
            SymregTarget::Identity => x,
        }
    }
}

/// Instance-generation parameters, tagged by task kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TaskParams {
    Obp {
        #[serde(default = "defaults::items")]
        items: usize,
        #[serde(default = "defaults::min_item")]
        min_item: u32,
        #[serde(default = "defaults::max_item")]
        max_item: u32,
        #[serde(default = "defaults::capacity")]
        capacity: u32,
    },
    Tsp {
        #[serde(default = "defaults::cities")]
        cities: usize,
    },
    Symreg {
        #[serde(default = "defaults::samples")]
        samples: usize,
        #[serde(default)]
        x_min: f64,
        #[serde(default = "defaults::x_max")]
        x_max: f64,
        #[serde(default)]
        target: SymregTarget,
    },
}

mod defaults {
    pub fn items() -> usize {
        50
    }
    pub fn min_item() -> u32 {
        20
    }
    pub fn max_item() -> u32 {
        100
    }
    pub fn capacity() -> u32 {
        150
    }
    pub fn cities() -> usize {
        50
    }
    pub fn samples() -> usize {
        100
    }
    pub fn x_max() -> f64 {
        10.0
    }
    pub fn instances() -> usize {
        5
    }
}

impl TaskParams {
    pub fn default_for(kind: TaskKind) -> TaskParams {
        match kind {
            TaskKind::Obp => TaskParams::Obp {
                items: defaults::items(),
                min_item: defaults::min_item(),
                max_item: defaults::max_item(),
                capacity: defaults::capacity(),
            },
            TaskKind::Tsp => TaskParams::Tsp {
                cities: defaults::cities(),
            },
            TaskKind::Symreg => TaskParams::Symreg {
                samples: defaults::samples(),
                x_min: 0.0,
                x_max: defaults::x_max(),
                target: SymregTarget::Logistic,
            },
        }
    }

    pub fn kind(&self) -> TaskKind {
        match self {
            TaskParams::Obp { .. } => TaskKind::Obp,
            TaskParams::Tsp { .. } => TaskKind::Tsp,
            TaskParams::Symreg { .. } => TaskKind::Symreg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    #[serde(flatten)]
    pub params: TaskParams,
    #[serde(default = "defaults::instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
}

impl TaskSpec {
    pub fn new(kind: TaskKind, seed: u64) -> TaskSpec {
        TaskSpec {
            params: TaskParams::default_for(kind),
            instances: defaults::instances(),
            seed,
        }
    }

    pub fn kind(&self) -> TaskKind {
        self.params.kind()
    }

    pub fn input_vars(&self) -> &'static [&'static str] {
        self.kind().input_vars()
    }

    pub fn validate(&self) -> Result<(), TaskError> {
        let bad = |m: &str| Err(TaskError::InvalidParams(m.to_string()));
        if self.instances == 0 {
            return bad("instances must be positive");
        }
        match self.params {
            TaskParams::Obp {
                items,
                min_item,
                max_item,
                capacity,
            } => {
                if items == 0 || min_item == 0 || capacity == 0 {
                    return bad("item count, sizes and capacity must be positive");
                }
                if min_item > max_item || max_item > capacity {
                    return bad("require min_item <= max_item <= capacity");
                }
            }
            TaskParams::Tsp { cities } => {
                if cities < 2 {
                    return bad("at least two cities required");
                }
            }
            TaskParams::Symreg {
                samples,
                x_min,
                x_max,
                ..
            } => {
                if samples == 0 {
                    return bad("samples must be positive");
                }
                if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
                    return bad("require finite x_min < x_max");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObpInstance {
    pub items: Vec<f64>,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    pub coords: Vec<[f64; 2]>,
    pub dist: Vec<Vec<f64>>,
}

impl TspInstance {
    pub fn from_coords(coords: Vec<[f64; 2]>) -> TspInstance {
        let dist = coords
            .iter()
            .map(|a| {
                coords
                    .iter()
                    .map(|b| (a[0] - b[0]).hypot(a[1] - b[1]))
                    .collect()
            })
            .collect();
        TspInstance { coords, dist }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Length of the closed tour visiting `order` and returning to its start.
    pub fn tour_length(&self, order: &[usize]) -> f64 {
        let mut total = 0.0;
        for (i, &c) in order.iter().enumerate() {
            total += self.dist[c][order[(i + 1) % order.len()]];
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymregInstance {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskInstance {
    Obp(ObpInstance),
    Tsp(TspInstance),
    Symreg(SymregInstance),
}

/// Candidate quality; infeasible candidates carry `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    pub value: f64,
    pub feasible: bool,
}

impl Fitness {
    pub fn feasible(value: f64) -> Fitness {
        debug_assert!(value.is_finite());
        Fitness {
            value,
            feasible: true,
        }
    }

    pub fn infeasible() -> Fitness {
        Fitness {
            value: f64::INFINITY,
            feasible: false,
        }
    }

    /// The finite value, if feasible.
    pub fn finite(&self) -> Option<f64> {
        self.feasible.then_some(self.value)
    }
}

/// Generates the seeded instance set; identical specs give identical data.
pub fn make_instances(spec: &TaskSpec) -> Result<Vec<TaskInstance>, TaskError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let instances = (0..spec.instances)
        .map(|_| match spec.params {
            TaskParams::Obp {
                items,
                min_item,
                max_item,
                capacity,
            } => TaskInstance::Obp(ObpInstance {
                items: (0..items)
                    .map(|_| rng.random_range(min_item..=max_item) as f64)
                    .collect(),
                capacity: capacity as f64,
            }),
            TaskParams::Tsp { cities } => TaskInstance::Tsp(TspInstance::from_coords(
                (0..cities)
                    .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
                    .collect(),
            )),
            TaskParams::Symreg {
                samples,
                x_min,
                x_max,
                target,
            } => {
                // One jittered sample per stratum keeps x strictly increasing.
                let width = (x_max - x_min) / samples as f64;
                let xs: Vec<f64> = (0..samples)
                    .map(|i| x_min + (i as f64 + rng.random::<f64>()) * width)
                    .collect();
                let ys = xs.iter().map(|&x| target.eval(x)).collect();
                TaskInstance::Symreg(SymregInstance { xs, ys })
            }
        })
        .collect();
    Ok(instances)
}

/// Online bin packing: each item goes to the open bin with the highest
/// score among those it fits in (lowest index on ties), else a new bin.
pub fn run_obp(instance: &ObpInstance, program: &CompiledProgram) -> Result<usize, DslError> {
    let mut scratch = Scratch::default();
    let mut remaining: Vec<f64> = Vec::new();
    for &item in &instance.items {
        let mut best: Option<(usize, f64)> = None;
        for (i, &rem) in remaining.iter().enumerate() {
            if rem < item {
                continue;
            }
            let score = program.eval_with(&[item, rem], &mut scratch)?;
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        match best {
            Some((i, _)) => remaining[i] -= item,
            None => remaining.push(instance.capacity - item),
        }
    }
    Ok(remaining.len())
}

/// `ceil(sum(items) / capacity)`, at least 1.
pub fn obp_lower_bound(instance: &ObpInstance) -> usize {
    let total: f64 = instance.items.iter().sum();
    ((total / instance.capacity).ceil() as usize).max(1)
}

/// Constructive tour from city 0: at each step the unvisited city with the
/// lowest score is appended (lowest index on ties); returns the closed length.
pub fn run_tsp(instance: &TspInstance, program: &CompiledProgram) -> Result<f64, DslError> {
    Ok(instance.tour_length(&construct_tour(instance, program)?))
}

pub fn construct_tour(
    instance: &TspInstance,
    program: &CompiledProgram,
) -> Result<Vec<usize>, DslError> {
    let n = instance.len();
    let d = &instance.dist;
    let mut scratch = Scratch::default();
    let mut visited = vec![false; n];
    // Sum of distances from each city to every unvisited city.
    let mut unvisited_sum: Vec<f64> = (0..n).map(|m| (1..n).map(|u| d[m][u]).sum()).collect();
    let mut order = Vec::with_capacity(n);
    let mut current = 0;
    visited[0] = true;
    order.push(0);
    let mut n_unvisited = n - 1;
    while n_unvisited > 0 {
        let mut best: Option<(usize, f64)> = None;
        for m in 1..n {
            if visited[m] {
                continue;
            }
            let others = n_unvisited - 1;
            let avg_md = if others == 0 {
                0.0
            } else {
                (unvisited_sum[m] - d[m][m]) / others as f64
            };
            let env = [d[current][m], d[m][0], n_unvisited as f64, avg_md];
            let score = program.eval_with(&env, &mut scratch)?;
            if best.is_none_or(|(_, s)| score < s) {
                best = Some((m, score));
            }
        }
        let (next, _) = best.expect("an unvisited city exists");
        visited[next] = true;
        for (m, sum) in unvisited_sum.iter_mut().enumerate() {
            *sum -= d[m][next];
        }
        order.push(next);
        current = next;
        n_unvisited -= 1;
    }
    Ok(order)
}

/// Nearest-neighbour tour length from city 0 (lowest index on ties).
pub fn nearest_neighbor_length(instance: &TspInstance) -> f64 {
    let n = instance.len();
    let mut visited = vec![false; n];
    let mut order = vec![0];
    visited[0] = true;
    let mut current = 0;
    for _ in 1..n {
        let next = (0..n)
            .filter(|&m| !visited[m])
            .fold(None::<usize>, |best, m| match best {
                Some(b) if instance.dist[current][b] <= instance.dist[current][m] => Some(b),
                _ => Some(m),
            })
            .expect("unvisited city");
        visited[next] = true;
        order.push(next);
        current = next;
    }
    instance.tour_length(&order)
}

pub fn symreg_mse(instance: &SymregInstance, program: &CompiledProgram) -> Result<f64, DslError> {
    let mut scratch = Scratch::default();
    let mut total = 0.0;
    for (&x, &y) in instance.xs.iter().zip(&instance.ys) {
        let err = program.eval_with(&[x], &mut scratch)? - y;
        total += err * err;
    }
    let mse = total / instance.xs.len() as f64;
    if mse.is_finite() {
        Ok(mse)
    } else {
        Err(DslError::NonFiniteResult)
    }
}

/// Per-instance normalized score.
pub fn instance_score(instance: &TaskInstance, program: &CompiledProgram) -> Result<f64, DslError> {
    match instance {
        TaskInstance::Obp(inst) => {
            Ok(run_obp(inst, program)? as f64 / obp_lower_bound(inst) as f64)
        }
        TaskInstance::Tsp(inst) => {
            let length = run_tsp(inst, program)?;
            let baseline = nearest_neighbor_length(inst);
            Ok(if baseline > 0.0 {
                length / baseline
            } else {
                1.0
            })
        }
        TaskInstance::Symreg(inst) => symreg_mse(inst, program),
    }
}

/// Mean score over the instances, summed in index order.
pub fn evaluate_candidate(
    spec: &TaskSpec,
    instances: &[TaskInstance],
    program: &Program,
) -> Result<Fitness, TaskError> {
    let expected = spec.input_vars();
    if program.input_vars.len() != expected.len()
        || program.input_vars.iter().zip(expected).any(|(a, b)| a != b)
    {
        return Err(TaskError::SignatureMismatch {
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: program.input_vars.clone(),
        });
    }
    let compiled = CompiledProgram::new(program);
    let mut total = 0.0;
    for instance in instances {
        match instance_score(instance, &compiled) {
            Ok(score) => total += score,
            Err(_) => return Ok(Fitness::infeasible()),
        }
    }
    let mean = total / instances.len() as f64;
    Ok(if mean.is_finite() {
        Fitness::feasible(mean)
    } else {
        Fitness::infeasible()
    })
}
