//! The LLM-assisted algorithm search loop: seed a population, repeatedly
//! apply variation operators to selected parents, evaluate offspring, and
//! keep the best distinct candidates.

mod log;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::candidate::Candidate;
use crate::dsl::random_program;
use crate::generators::{GenerationRequest, Generator, GeneratorError, OperatorKind};
use crate::tasks::{
    evaluate_candidate, make_instances, Fitness, TaskError, TaskInstance, TaskSpec,
};

pub(crate) use self::log::best_event;
pub use self::log::{GenerationEvent, Operator, RunHeader, RunLog, SCHEMA_VERSION};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("population is empty")]
    EmptyPopulation,
    #[error("generator failed {failures} consecutive iterations: {last}")]
    GeneratorExhausted {
        failures: usize,
        last: GeneratorError,
    },
}

fn default_pop_size() -> usize {
    20
}
fn default_budget() -> usize {
    2000
}
fn default_schedule() -> Vec<OperatorKind> {
    OperatorKind::ALL.to_vec()
}
fn default_init_retries() -> usize {
    10
}
fn default_max_depth() -> usize {
    4
}
fn default_generator_retries() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default = "default_pop_size")]
    pub pop_size: usize,
    /// Total evaluations, initial population included.
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Operators applied in turn, one offspring each, per iteration.
    #[serde(default = "default_schedule")]
    pub schedule: Vec<OperatorKind>,
    /// Redraws of an infeasible initial program before it is kept anyway.
    #[serde(default = "default_init_retries")]
    pub init_retry_limit: usize,
    /// Depth bound for randomly generated programs.
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    /// Generation attempts per offspring, and consecutive all-failed
    /// iterations tolerated before the search aborts.
    #[serde(default = "default_generator_retries")]
    pub generator_retries: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            pop_size: default_pop_size(),
            budget: default_budget(),
            master_seed: 0,
            schedule: default_schedule(),
            init_retry_limit: default_init_retries(),
            max_depth: default_max_depth(),
            generator_retries: default_generator_retries(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidConfig(m.to_string()));
        if self.pop_size == 0 {
            return bad("pop_size must be at least 1");
        }
        if self.budget < self.pop_size {
            return bad("budget must be at least pop_size");
        }
        if self.schedule.is_empty() {
            return bad("operator schedule is empty");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1");
        }
        Ok(())
    }
}

/// A population entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub eval_index: usize,
    pub candidate: Candidate,
    pub fitness: Fitness,
}

impl Member {
    fn from_event(event: &GenerationEvent) -> Member {
        Member {
            eval_index: event.eval_index,
            candidate: event.candidate.clone(),
            fitness: event.fitness,
        }
    }
}

const SALT_INIT: u64 = 0x494e4954;
const SALT_SELECT: u64 = 0x53454c45;
const SALT_GENERATE: u64 = 0x47454e45;

/// Independent random stream keyed by (master seed, purpose, index, attempt).
pub fn derive_stream(master_seed: u64, salt: u64, index: u64, attempt: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    for word in [master_seed, salt, index, attempt] {
        hasher.update(word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Rank-weighted sampling from a population sorted best-first: rank `r`
/// (1 = best) has weight `1 / (r + n)`. Draws without replacement; once the
/// population is exhausted the remainder is drawn with replacement.
pub fn select_parents<'a, T, R: Rng + ?Sized>(
    population: &'a [T],
    k: usize,
    rng: &mut R,
) -> Result<Vec<&'a T>, SearchError> {
    let n = population.len();
    if n == 0 {
        return Err(SearchError::EmptyPopulation);
    }
    let weights: Vec<f64> = (1..=n).map(|rank| 1.0 / (rank + n) as f64).collect();
    let draw = |rng: &mut R, available: &[usize]| -> usize {
        let total: f64 = available.iter().map(|&i| weights[i]).sum();
        let mut u = rng.random::<f64>() * total;
        for (pos, &i) in available.iter().enumerate() {
            u -= weights[i];
            if u < 0.0 {
                return pos;
            }
        }
        available.len() - 1
    };
    let mut available: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k.min(n) {
        let pos = draw(rng, &available);
        out.push(&population[available.remove(pos)]);
    }
    let all: Vec<usize> = (0..n).collect();
    for _ in n..k {
        out.push(&population[all[draw(rng, &all)]]);
    }
    Ok(out)
}

/// Elitist truncation: merge, drop infeasible, keep the earliest copy of each
/// canonical id, sort by fitness then eval_index, keep `pop_size`. If nothing
/// feasible remains the old population is returned.
pub fn update_population(
    population: &[Member],
    offspring: &[Member],
    pop_size: usize,
) -> Vec<Member> {
    let mut merged: Vec<&Member> = population
        .iter()
        .chain(offspring)
        .filter(|m| m.fitness.feasible)
        .collect();
    merged.sort_by_key(|m| m.eval_index);
    let mut seen = std::collections::HashSet::new();
    merged.retain(|m| seen.insert(m.candidate.id()));
    merged.sort_by(|a, b| {
        a.fitness
            .value
            .total_cmp(&b.fitness.value)
            .then(a.eval_index.cmp(&b.eval_index))
    });
    merged.truncate(pop_size);
    if merged.is_empty() {
        return population.to_vec();
    }
    merged.into_iter().cloned().collect()
}

struct Context<'a> {
    config: &'a SearchConfig,
    task: &'a TaskSpec,
    instances: Vec<TaskInstance>,
    input_vars: &'static [&'static str],
}

impl Context<'_> {
    fn evaluate(&self, candidate: &Candidate) -> Fitness {
        match &candidate.program {
            Some(p) => {
                evaluate_candidate(self.task, &self.instances, p).unwrap_or(Fitness::infeasible())
            }
            None => Fitness::infeasible(),
        }
    }

    fn init_candidate(&self, index: usize) -> (Candidate, Fitness) {
        let mut rng = derive_stream(self.config.master_seed, SALT_INIT, index as u64, 0);
        let mut attempt = 0;
        loop {
            let program = random_program(&mut rng, self.input_vars, self.config.max_depth);
            let candidate = Candidate::from_program(program);
            let fitness = self.evaluate(&candidate);
            if fitness.feasible || attempt >= self.config.init_retry_limit {
                return (candidate, fitness);
            }
            attempt += 1;
        }
    }

    fn offspring(
        &self,
        generator: &dyn Generator,
        dispatch: u64,
        op: OperatorKind,
        parents: &[&Member],
    ) -> Result<(Candidate, Fitness, Option<String>), GeneratorError> {
        let programs: Vec<_> = parents
            .iter()
            .filter_map(|m| m.candidate.canonical_program())
            .collect();
        let request = GenerationRequest {
            op,
            parents: &programs,
            task: self.task,
        };
        let mut last = None;
        for attempt in 0..=self.config.generator_retries {
            let mut rng = derive_stream(
                self.config.master_seed,
                SALT_GENERATE,
                dispatch,
                attempt as u64,
            );
            match generator.generate(&request, &mut rng) {
                Ok(generated) => {
                    let candidate = Candidate::from_source(&generated.code, self.input_vars);
                    let fitness = self.evaluate(&candidate);
                    let mut note = generated.note;
                    if !candidate.is_dsl() {
                        let reason = crate::dsl::parse(&generated.code, self.input_vars)
                            .err()
                            .map(|e| e.to_string())
                            .unwrap_or_default();
                        note = Some(match note {
                            Some(n) => format!("unparseable: {reason}; {n}"),
                            None => format!("unparseable: {reason}"),
                        });
                    }
                    return Ok((candidate, fitness, note));
                }
                Err(e) => {
                    ::log::warn!("generation {dispatch} ({op}) attempt {attempt} failed: {e}");
                    last = Some(e);
                }
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn run_header(config: &SearchConfig, task: &TaskSpec, generator: &str) -> RunHeader {
    let mut cfg = serde_json::to_value(config).expect("config serializes");
    cfg["generator"] = generator.into();
    cfg["toolkit_version"] = TOOLKIT_VERSION.into();
    RunHeader {
        schema_version: SCHEMA_VERSION.to_string(),
        task: serde_json::to_value(task).expect("task serializes"),
        config: cfg,
        seed: config.master_seed,
        created_at: now_rfc3339(),
    }
}

/// Runs the search until `budget` events are logged.
pub fn run_search(
    config: &SearchConfig,
    task: &TaskSpec,
    generator: &dyn Generator,
) -> Result<RunLog, SearchError> {
    config.validate()?;
    let ctx = Context {
        config,
        task,
        instances: make_instances(task)?,
        input_vars: task.input_vars(),
    };
    let header = run_header(config, task, generator.name());

    let mut events: Vec<GenerationEvent> = (0..config.pop_size)
        .into_par_iter()
        .map(|i| {
            let (candidate, fitness) = ctx.init_candidate(i);
            GenerationEvent {
                eval_index: i,
                candidate,
                operator: Operator::Init,
                parent_ids: Vec::new(),
                fitness,
                note: None,
            }
        })
        .collect();
    let init: Vec<Member> = events.iter().map(Member::from_event).collect();
    let mut population = update_population(&[], &init, config.pop_size);

    let mut dispatch = events.len() as u64;
    let mut failed_iterations = 0;
    while events.len() < config.budget {
        let slots = config.schedule.len().min(config.budget - events.len());
        let mut select_rng = derive_stream(config.master_seed, SALT_SELECT, dispatch, 0);
        let mut jobs = Vec::with_capacity(slots);
        for j in 0..slots {
            let op =
                config.schedule[(dispatch as usize - config.pop_size + j) % config.schedule.len()];
            let parents = select_parents(&population, op.parent_count(), &mut select_rng)?;
            jobs.push((dispatch + j as u64, op, parents));
        }
        dispatch += slots as u64;

        let outcomes: Vec<_> = jobs
            .par_iter()
            .map(|(d, op, parents)| ctx.offspring(generator, *d, *op, parents))
            .collect();

        let mut offspring = Vec::new();
        let mut last_error = None;
        for ((_, op, parents), outcome) in jobs.iter().zip(outcomes) {
            match outcome {
                Ok((candidate, fitness, note)) => {
                    let event = GenerationEvent {
                        eval_index: events.len(),
                        candidate,
                        operator: Operator::Variation(*op),
                        parent_ids: parents
                            .iter()
                            .map(|m| m.candidate.id().to_string())
                            .collect(),
                        fitness,
                        note,
                    };
                    offspring.push(Member::from_event(&event));
                    events.push(event);
                }
                Err(e) => last_error = Some(e),
            }
        }
        if offspring.is_empty() {
            failed_iterations += 1;
            if failed_iterations > config.generator_retries {
                return Err(SearchError::GeneratorExhausted {
                    failures: failed_iterations,
                    last: last_error.expect("every job failed"),
                });
            }
        } else {
            failed_iterations = 0;
        }
        population = update_population(&population, &offspring, config.pop_size);
    }
    Ok(RunLog { header, events })
}
