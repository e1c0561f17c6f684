use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::LandscapeError;
use crate::search::{best_event, Operator, RunLog};

/// Ancestry of the best candidate as a directed graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryGraph {
    pub best: String,
    /// Shortest directed distance to `best`; `best` itself is 0.
    pub levels: BTreeMap<String, usize>,
    /// Directed `(parent, offspring)` pairs among the ancestors.
    pub edges: BTreeSet<(String, String)>,
}

impl TrajectoryGraph {
    pub fn node_count(&self) -> usize {
        self.levels.len()
    }

    pub fn depth(&self) -> usize {
        self.levels.values().copied().max().unwrap_or(0)
    }
}

/// Parent links are kept only from an earlier-seen node to a later-seen one,
/// so the result is acyclic in first-appearance order.
pub fn trajectory(log: &RunLog) -> Result<TrajectoryGraph, LandscapeError> {
    let best = best_event(&log.events)
        .ok_or(LandscapeError::NoFeasibleCandidate)?
        .candidate
        .id()
        .to_string();

    let mut first_seen: HashMap<&str, usize> = HashMap::new();
    for e in &log.events {
        first_seen.entry(e.candidate.id()).or_insert(e.eval_index);
    }
    let mut parents_of: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for e in &log.events {
        if e.operator == Operator::Init {
            continue;
        }
        let child = e.candidate.id();
        for p in e.distinct_parents() {
            let Some(&pi) = first_seen.get(p) else {
                return Err(LandscapeError::DanglingParent {
                    eval_index: e.eval_index,
                    parent: p.to_string(),
                });
            };
            if pi < first_seen[child] {
                parents_of.entry(child).or_default().insert(p);
            }
        }
    }

    let mut levels: BTreeMap<String, usize> = BTreeMap::new();
    let mut edges = BTreeSet::new();
    let mut queue = VecDeque::from([(best.as_str(), 0usize)]);
    levels.insert(best.clone(), 0);
    while let Some((node, level)) = queue.pop_front() {
        for &p in parents_of.get(node).into_iter().flatten() {
            edges.insert((p.to_string(), node.to_string()));
            if !levels.contains_key(p) {
                levels.insert(p.to_string(), level + 1);
                queue.push_back((p, level + 1));
            }
        }
    }
    Ok(TrajectoryGraph {
        best,
        levels,
        edges,
    })
}
