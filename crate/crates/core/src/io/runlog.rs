use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use super::{read_to_string, write_atomic, IoError};
use crate::candidate::Candidate;
use crate::search::{GenerationEvent, Operator, RunHeader, RunLog, SCHEMA_VERSION};
use crate::tasks::Fitness;

#[derive(Serialize)]
struct EventRecord<'a> {
    eval_index: usize,
    code: &'a str,
    canonical_code: &'a str,
    canonical_id: &'a str,
    operator: &'a str,
    parent_ids: &'a [String],
    fitness: Option<f64>,
    feasible: bool,
    note: Option<&'a str>,
}

/// One header line followed by one line per event, each LF-terminated.
pub fn render_run_log(log: &RunLog) -> String {
    let mut out = serde_json::to_string(&log.header).expect("header serializes");
    out.push('\n');
    for e in &log.events {
        let record = EventRecord {
            eval_index: e.eval_index,
            code: &e.candidate.code,
            canonical_code: &e.candidate.canonical.text,
            canonical_id: e.candidate.id(),
            operator: e.operator.name(),
            parent_ids: &e.parent_ids,
            fitness: e.fitness.finite(),
            feasible: e.fitness.feasible,
            note: e.note.as_deref(),
        };
        out.push_str(&serde_json::to_string(&record).expect("event serializes"));
        out.push('\n');
    }
    out
}

pub fn write_run_log(log: &RunLog, path: &Path) -> Result<(), IoError> {
    write_atomic(path, render_run_log(log).as_bytes())
}

pub fn read_run_log(path: &Path) -> Result<RunLog, IoError> {
    parse_run_log(&read_to_string(path)?)
}

/// Strict reader for logs written by this toolkit: contiguous indices,
/// canonical fields that match the code, operator arity, known parents.
pub fn parse_run_log(text: &str) -> Result<RunLog, IoError> {
    parse(text, Mode::Strict)
}

/// Reads a log in the same record schema produced elsewhere. Canonical
/// fields are recomputed (foreign code is identified by its
/// whitespace-normalized text) and parent ids are translated to the
/// recomputed ids. Indices need only increase.
pub fn import_external(path: &Path) -> Result<RunLog, IoError> {
    parse(&read_to_string(path)?, Mode::Import)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Strict,
    Import,
}

fn object(line: usize, text: &str) -> Result<Map<String, Value>, IoError> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(IoError::schema(line, "<record>", "expected a JSON object")),
        Err(e) => Err(IoError::schema(line, "<record>", e.to_string())),
    }
}

fn required<'a>(line: usize, m: &'a Map<String, Value>, field: &str) -> Result<&'a Value, IoError> {
    m.get(field)
        .ok_or_else(|| IoError::schema(line, field, "missing"))
}

fn string_field<'a>(
    line: usize,
    m: &'a Map<String, Value>,
    field: &str,
) -> Result<&'a str, IoError> {
    required(line, m, field)?
        .as_str()
        .ok_or_else(|| IoError::schema(line, field, "expected a string"))
}

fn parse_header(line: usize, text: &str) -> Result<RunHeader, IoError> {
    let m = object(line, text)?;
    let version = string_field(line, &m, "schema_version")?;
    if version != SCHEMA_VERSION {
        return Err(IoError::schema(
            line,
            "schema_version",
            format!("unsupported version `{version}`"),
        ));
    }
    let task = required(line, &m, "task")?.clone();
    let config = required(line, &m, "config")?.clone();
    let seed = required(line, &m, "seed")?
        .as_u64()
        .ok_or_else(|| IoError::schema(line, "seed", "expected an unsigned integer"))?;
    let created_at = string_field(line, &m, "created_at")?.to_string();
    Ok(RunHeader {
        schema_version: version.to_string(),
        task,
        config,
        seed,
        created_at,
    })
}

fn parse(text: &str, mode: Mode) -> Result<RunLog, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, htext) = lines
        .next()
        .ok_or_else(|| IoError::schema(1, "schema_version", "empty log"))?;
    let header = parse_header(hline, htext)?;
    let vars: Option<Vec<String>> = header
        .task_spec()
        .map(|t| t.input_vars().iter().map(|s| s.to_string()).collect());
    let make = |code: &str| match &vars {
        Some(v) => {
            let v: Vec<&str> = v.iter().map(String::as_str).collect();
            Candidate::from_source(code, &v)
        }
        None => Candidate::from_source_lenient(code),
    };

    let mut events: Vec<GenerationEvent> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut alias: HashMap<String, String> = HashMap::new();
    for (line, text) in lines {
        let m = object(line, text)?;
        let eval_index = required(line, &m, "eval_index")?
            .as_u64()
            .ok_or_else(|| IoError::schema(line, "eval_index", "expected an unsigned integer"))?
            as usize;
        match (mode, events.last()) {
            (Mode::Strict, _) if eval_index != events.len() => {
                return Err(IoError::schema(
                    line,
                    "eval_index",
                    format!("expected {}, found {eval_index}", events.len()),
                ))
            }
            (Mode::Import, Some(prev)) if eval_index <= prev.eval_index => {
                return Err(IoError::schema(
                    line,
                    "eval_index",
                    format!("{eval_index} does not follow {}", prev.eval_index),
                ))
            }
            _ => {}
        }
        let code = string_field(line, &m, "code")?;
        let candidate = make(code);
        let given_id = match mode {
            Mode::Strict => {
                let text = string_field(line, &m, "canonical_code")?;
                if text != candidate.canonical.text {
                    return Err(IoError::schema(
                        line,
                        "canonical_code",
                        "does not match code",
                    ));
                }
                let id = string_field(line, &m, "canonical_id")?;
                if id != candidate.id() {
                    return Err(IoError::schema(line, "canonical_id", "does not match code"));
                }
                None
            }
            Mode::Import => m.get("canonical_id").and_then(Value::as_str),
        };
        let operator: Operator = string_field(line, &m, "operator")?
            .parse()
            .map_err(|e: String| IoError::schema(line, "operator", e))?;
        let parents = required(line, &m, "parent_ids")?
            .as_array()
            .ok_or_else(|| IoError::schema(line, "parent_ids", "expected an array"))?;
        let mut parent_ids = Vec::with_capacity(parents.len());
        for p in parents {
            let p = p
                .as_str()
                .ok_or_else(|| IoError::schema(line, "parent_ids", "expected strings"))?;
            let resolved = alias.get(p).map(String::as_str).unwrap_or(p);
            if !seen.contains(resolved) {
                return Err(IoError::schema(
                    line,
                    "parent_ids",
                    format!("unknown parent `{p}`"),
                ));
            }
            parent_ids.push(resolved.to_string());
        }
        if mode == Mode::Strict && !operator.accepts_parents(parent_ids.len()) {
            return Err(IoError::schema(
                line,
                "parent_ids",
                format!("{operator} cannot take {} parent(s)", parent_ids.len()),
            ));
        }
        let fitness_value = required(line, &m, "fitness")?;
        let feasible = required(line, &m, "feasible")?
            .as_bool()
            .ok_or_else(|| IoError::schema(line, "feasible", "expected a boolean"))?;
        let fitness = if feasible {
            match fitness_value.as_f64() {
                Some(v) if v.is_finite() => Fitness::feasible(v),
                _ => {
                    return Err(IoError::schema(
                        line,
                        "fitness",
                        "feasible event needs a finite number",
                    ))
                }
            }
        } else {
            if mode == Mode::Strict && !fitness_value.is_null() {
                return Err(IoError::schema(
                    line,
                    "fitness",
                    "infeasible event must have null fitness",
                ));
            }
            Fitness::infeasible()
        };
        let note = match m.get("note") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(IoError::schema(line, "note", "expected a string or null")),
        };
        if let Some(given) = given_id {
            if given != candidate.id() {
                alias.insert(given.to_string(), candidate.id().to_string());
            }
        }
        seen.insert(candidate.id().to_string());
        events.push(GenerationEvent {
            eval_index,
            candidate,
            operator,
            parent_ids,
            fitness,
            note,
        });
    }
    Ok(RunLog { header, events })
}
