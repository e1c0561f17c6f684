//! Code-similarity metrics between parent and offspring candidates.
//!
//! Lexical scores (BLEU, weighted BLEU) compare canonical token streams;
//! structural scores (AST and dataflow match) need parsed DSL programs and
//! are absent for foreign code.

mod bleu;
mod structure;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate::Candidate;
use crate::search::{Operator, RunLog};

pub use bleu::{bleu, weighted_bleu};
pub use structure::{ast_match, ast_subtrees, dataflow_match, extract_dfg, DataflowGraph};

const DELTA_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SimilarityError {
    #[error("performance delta needs two finite fitness values")]
    InfeasibleOperand,
}

/// Relative fitness change `(F_o - F_p) / (|F_p| + 1e-12)` and its magnitude.
pub fn performance_delta(parent: f64, offspring: f64) -> Result<(f64, f64), SimilarityError> {
    if !parent.is_finite() || !offspring.is_finite() {
        return Err(SimilarityError::InfeasibleOperand);
    }
    let signed = (offspring - parent) / (parent.abs() + DELTA_GUARD);
    Ok((signed, signed.abs()))
}

/// One parent-offspring row of the pair table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityPair {
    pub eval_index: usize,
    pub parent_id: String,
    pub offspring_id: String,
    pub operator: Operator,
    pub bleu: f64,
    pub weighted_bleu: f64,
    pub ast_match: Option<f64>,
    pub dataflow_match: Option<f64>,
    pub delta_signed: f64,
    pub delta_abs: f64,
}

impl SimilarityPair {
    pub const METRICS: [&'static str; 5] = [
        "bleu",
        "weighted_bleu",
        "ast_match",
        "dataflow_match",
        "delta",
    ];

    /// Builds the row with `parent` as reference.
    pub fn compare(
        eval_index: usize,
        operator: Operator,
        parent: (&Candidate, f64),
        offspring: (&Candidate, f64),
    ) -> Result<SimilarityPair, SimilarityError> {
        let (delta_signed, delta_abs) = performance_delta(parent.1, offspring.1)?;
        let (rt, ct) = (parent.0.tokens(), offspring.0.tokens());
        let programs = parent.0.program.as_ref().zip(offspring.0.program.as_ref());
        Ok(SimilarityPair {
            eval_index,
            parent_id: parent.0.id().to_string(),
            offspring_id: offspring.0.id().to_string(),
            operator,
            bleu: bleu(&rt, &ct),
            weighted_bleu: weighted_bleu(&rt, &ct),
            ast_match: programs.map(|(r, c)| ast_match(r, c)),
            dataflow_match: programs.map(|(r, c)| dataflow_match(r, c)),
            delta_signed,
            delta_abs,
        })
    }

    /// Value of the named metric column; `delta` picks the signed or
    /// absolute variant.
    pub fn metric(&self, name: &str, signed_delta: bool) -> Option<f64> {
        match name {
            "bleu" => Some(self.bleu),
            "weighted_bleu" => Some(self.weighted_bleu),
            "ast_match" => self.ast_match,
            "dataflow_match" => self.dataflow_match,
            "delta" if signed_delta => Some(self.delta_signed),
            "delta" => Some(self.delta_abs),
            _ => None,
        }
    }
}

/// One row per distinct parent of every non-INIT event where parent and
/// offspring are both feasible. A parent is represented by the first event
/// that produced its id; unknown parents are skipped.
pub fn pair_table(log: &RunLog) -> Vec<SimilarityPair> {
    let mut first: HashMap<&str, usize> = HashMap::new();
    for (i, e) in log.events.iter().enumerate() {
        first.entry(e.candidate.id()).or_insert(i);
    }
    let mut rows = Vec::new();
    for e in &log.events {
        if e.operator == Operator::Init || !e.fitness.feasible {
            continue;
        }
        for pid in e.distinct_parents() {
            let Some(&pi) = first.get(pid) else { continue };
            let parent = &log.events[pi];
            if !parent.fitness.feasible {
                continue;
            }
            if let Ok(row) = SimilarityPair::compare(
                e.eval_index,
                e.operator,
                (&parent.candidate, parent.fitness.value),
                (&e.candidate, e.fitness.value),
            ) {
                rows.push(row);
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::OperatorKind;
    use crate::search::{GenerationEvent, RunHeader};
    use crate::tasks::Fitness;

    #[test]
    fn delta_formula() {
        let (s, a) = performance_delta(10.0, 8.0).unwrap();
        assert!((s + 0.2).abs() < 1e-12 && (a - 0.2).abs() < 1e-12);
        assert_eq!(performance_delta(3.0, 3.0).unwrap(), (0.0, 0.0));
        assert_eq!(performance_delta(0.0, 2.0).unwrap().0, 2.0 / 1e-12);
        assert_eq!(
            performance_delta(f64::INFINITY, 1.0),
            Err(SimilarityError::InfeasibleOperand)
        );
    }

    fn event(
        i: usize,
        code: &str,
        op: Operator,
        parents: &[&Candidate],
        fit: f64,
    ) -> GenerationEvent {
        GenerationEvent {
            eval_index: i,
            candidate: Candidate::from_source(code, &["x", "y"]),
            operator: op,
            parent_ids: parents.iter().map(|c| c.id().to_string()).collect(),
            fitness: if fit.is_finite() {
                Fitness::feasible(fit)
            } else {
                Fitness::infeasible()
            },
            note: None,
        }
    }

    fn log(events: Vec<GenerationEvent>) -> RunLog {
        RunLog {
            header: RunHeader {
                schema_version: "1".into(),
                task: serde_json::Value::Null,
                config: serde_json::Value::Null,
                seed: 0,
                created_at: String::new(),
            },
            events,
        }
    }

    #[test]
    fn multi_parent_and_feasibility_rules() {
        let a = Candidate::from_source("return x", &["x", "y"]);
        let b = Candidate::from_source("return y", &["x", "y"]);
        let bad = Candidate::from_source("return x / y", &["x", "y"]);
        let e2 = Operator::Variation(OperatorKind::E2);
        let m1 = Operator::Variation(OperatorKind::M1);
        let l = log(vec![
            event(0, "return x", Operator::Init, &[], 2.0),
            event(1, "return y", Operator::Init, &[], 4.0),
            event(2, "return x / y", Operator::Init, &[], f64::INFINITY),
            event(3, "return x + y", e2, &[&a, &b], 3.0),
            event(4, "return x * y", m1, &[&bad], 1.0),
            event(5, "return x - y", m1, &[&a], f64::INFINITY),
        ]);
        let rows = pair_table(&l);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.eval_index == 3 && r.operator == e2));
        assert_eq!(rows[0].parent_id, a.id());
        assert!((rows[0].delta_signed - 0.5).abs() < 1e-9);
        assert!((rows[1].delta_signed + 0.25).abs() < 1e-9);
        let parent_slots: usize = l.events.iter().map(|e| e.parent_ids.len()).sum();
        assert!(rows.len() <= parent_slots);
    }

    #[test]
    fn self_transition_is_perfect() {
        let a = Candidate::from_source("let t = x * 2; return t + y", &["x", "y"]);
        let l = log(vec![
            event(0, "let t = x * 2; return t + y", Operator::Init, &[], 2.0),
            event(
                1,
                "let q = x * 2; return q + y",
                Operator::Variation(OperatorKind::M2),
                &[&a],
                2.0,
            ),
        ]);
        let rows = pair_table(&l);
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!(r.parent_id, r.offspring_id);
        assert_eq!(
            (r.bleu, r.weighted_bleu, r.ast_match, r.dataflow_match),
            (1.0, 1.0, Some(1.0), Some(1.0))
        );
        assert_eq!((r.delta_signed, r.delta_abs), (0.0, 0.0));
    }

    #[test]
    fn foreign_code_has_missing_structure() {
        let a = Candidate::from_source("return x", &["x", "y"]);
        let l = log(vec![
            event(0, "return x", Operator::Init, &[], 2.0),
            event(1, "def f(x): return x", Operator::Import, &[&a], 2.0),
        ]);
        let rows = pair_table(&l);
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].ast_match, rows[0].dataflow_match), (None, None));
        assert!(rows[0].bleu > 0.0);
    }
}
