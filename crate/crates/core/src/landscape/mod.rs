//! Fitness-landscape graphs built from run logs.
//!
//! Nodes are distinct canonical candidates; an undirected edge joins a parent
//! and an offspring, weighted by how often that transition was generated.

mod layout;
mod trajectory;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::search::{GenerationEvent, Operator, RunLog};

pub use layout::{layout, Layout, LayoutOptions};
pub use trajectory::{trajectory, TrajectoryGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LandscapeError {
    #[error("event {eval_index} references unknown parent {parent}")]
    DanglingParent { eval_index: usize, parent: String },
    #[error("log contains no feasible candidate")]
    NoFeasibleCandidate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeInfo {
    pub canonical_text: String,
    /// Best fitness observed for this node; `+inf` if never feasible.
    pub best_fitness: f64,
    /// Number of events that produced this node.
    pub count: usize,
    pub feasible: bool,
    pub first_index: usize,
}

/// Undirected weighted graph. Edge keys are ordered `(min id, max id)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LandscapeGraph {
    pub nodes: BTreeMap<String, NodeInfo>,
    pub edges: BTreeMap<(String, String), u64>,
}

fn edge_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl LandscapeGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, a: &str, b: &str) -> Option<u64> {
        self.edges.get(&edge_key(a, b)).copied()
    }

    /// Copy keeping only edges with weight strictly greater than `threshold`.
    pub fn filtered(&self, threshold: u64) -> LandscapeGraph {
        LandscapeGraph {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .filter(|(_, &w)| w > threshold)
                .map(|(k, &w)| (k.clone(), w))
                .collect(),
        }
    }

    /// Node ids in sorted order with index-based neighbour sets.
    pub fn adjacency(&self) -> (Vec<&str>, Vec<BTreeSet<usize>>) {
        let ids: Vec<&str> = self.nodes.keys().map(String::as_str).collect();
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut adj = vec![BTreeSet::new(); ids.len()];
        for (a, b) in self.edges.keys() {
            let (i, j) = (index[a.as_str()], index[b.as_str()]);
            adj[i].insert(j);
            adj[j].insert(i);
        }
        (ids, adj)
    }

    /// Fitness of each feasible node min-max scaled to [0, 1].
    pub fn normalized_fitness(&self) -> BTreeMap<String, f64> {
        let finite: Vec<f64> = self
            .nodes
            .values()
            .filter(|n| n.feasible)
            .map(|n| n.best_fitness)
            .collect();
        let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.nodes
            .iter()
            .filter(|(_, n)| n.feasible)
            .map(|(id, n)| {
                let v = if hi > lo {
                    (n.best_fitness - lo) / (hi - lo)
                } else {
                    0.0
                };
                (id.clone(), v)
            })
            .collect()
    }
}

/// One node per canonical id; each non-INIT event adds one weight unit per
/// distinct parent, except parents equal to the offspring (self-transitions
/// only bump the node count).
pub fn build_graph(log: &RunLog) -> Result<LandscapeGraph, LandscapeError> {
    build_graph_from_events(&log.events)
}

pub fn build_graph_from_events(
    events: &[GenerationEvent],
) -> Result<LandscapeGraph, LandscapeError> {
    let mut g = LandscapeGraph::default();
    for event in events {
        let id = event.candidate.id();
        if event.operator != Operator::Init {
            for parent in event.distinct_parents() {
                if !g.nodes.contains_key(parent) {
                    return Err(LandscapeError::DanglingParent {
                        eval_index: event.eval_index,
                        parent: parent.to_string(),
                    });
                }
            }
        }
        let node = g.nodes.entry(id.to_string()).or_insert_with(|| NodeInfo {
            canonical_text: event.candidate.canonical.text.clone(),
            best_fitness: f64::INFINITY,
            count: 0,
            feasible: false,
            first_index: event.eval_index,
        });
        node.count += 1;
        if event.fitness.feasible {
            node.feasible = true;
            node.best_fitness = node.best_fitness.min(event.fitness.value);
        }
        for parent in event.distinct_parents() {
            if parent != id {
                *g.edges.entry(edge_key(parent, id)).or_insert(0) += 1;
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphMetrics {
    pub density: f64,
    pub average_degree: f64,
    pub clustering: f64,
}

/// Density, mean degree and mean local clustering coefficient (nodes with
/// degree below 2 count as 0). Weights are ignored.
pub fn metrics(g: &LandscapeGraph) -> GraphMetrics {
    let n = g.node_count();
    let m = g.edge_count() as f64;
    let density = if n >= 2 {
        2.0 * m / (n as f64 * (n as f64 - 1.0))
    } else {
        0.0
    };
    let average_degree = if n >= 1 { 2.0 * m / n as f64 } else { 0.0 };
    let (_, adj) = g.adjacency();
    let mut total = 0.0;
    for neighbours in &adj {
        let deg = neighbours.len();
        if deg < 2 {
            continue;
        }
        let nb: Vec<usize> = neighbours.iter().copied().collect();
        let mut triangles = 0usize;
        for (i, &u) in nb.iter().enumerate() {
            for &v in &nb[i + 1..] {
                if adj[u].contains(&v) {
                    triangles += 1;
                }
            }
        }
        total += triangles as f64 / (deg * (deg - 1) / 2) as f64;
    }
    let clustering = if n > 0 { total / n as f64 } else { 0.0 };
    GraphMetrics {
        density,
        average_degree,
        clustering,
    }
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    #[test]
    fn construction_rules() {
        let log = log_of(&[
            (0, &[], 5.0),
            (1, &[0], 4.0),
            (2, &[0, 1], 3.0),
            (1, &[0], 4.0),
        ]);
        let g = build_graph(&log).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.weight(&id(0), &id(1)), Some(2));
        assert_eq!(g.weight(&id(1), &id(0)), Some(2));
        assert_eq!(g.weight(&id(0), &id(2)), Some(1));
        assert_eq!(g.weight(&id(1), &id(2)), Some(1));
        assert_eq!(g.nodes[&id(1)].count, 2);
        let total: usize = g.nodes.values().map(|n| n.count).sum();
        assert_eq!(total, log.events.len());
    }

    #[test]
    fn init_only_has_no_edges() {
        let log = log_of(&[(0, &[], 1.0), (1, &[], 2.0), (2, &[], 3.0)]);
        let g = build_graph(&log).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 0));
    }

    #[test]
    fn self_transition_bumps_count_only() {
        let log = log_of(&[(0, &[], 1.0), (0, &[0], 1.0)]);
        let g = build_graph(&log).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.nodes[&id(0)].count, 2);
    }

    #[test]
    fn dangling_parent() {
        let log = log_of(&[(0, &[], 1.0), (1, &[7], 1.0)]);
        assert!(matches!(
            build_graph(&log),
            Err(LandscapeError::DanglingParent { eval_index: 1, .. })
        ));
    }

    #[test]
    fn triangle_and_path_metrics() {
        let tri =
            build_graph(&log_of(&[(0, &[], 1.0), (1, &[0], 1.0), (2, &[0, 1], 1.0)])).unwrap();
        let m = metrics(&tri);
        assert_eq!((m.density, m.average_degree, m.clustering), (1.0, 2.0, 1.0));
        let path = build_graph(&log_of(&[(0, &[], 1.0), (1, &[0], 1.0), (2, &[1], 1.0)])).unwrap();
        let m = metrics(&path);
        assert!((m.density - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.average_degree - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.clustering, 0.0);
    }

    #[test]
    fn triangle_with_pendant() {
        // Triangle 0-1-2 plus 3 hanging off 0. Brute-force local coefficients:
        // node 0: neighbours {1,2,3}, one linked pair of three -> 1/3
        // nodes 1, 2: neighbours linked -> 1; node 3: degree 1 -> 0
        let g = build_graph(&log_of(&[
            (0, &[], 1.0),
            (1, &[0], 1.0),
            (2, &[0, 1], 1.0),
            (3, &[0], 1.0),
        ]))
        .unwrap();
        let m = metrics(&g);
        assert!((m.clustering - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn empty_and_singleton_metrics() {
        let m = metrics(&LandscapeGraph::default());
        assert_eq!((m.density, m.average_degree, m.clustering), (0.0, 0.0, 0.0));
        let g = build_graph(&log_of(&[(0, &[], 1.0)])).unwrap();
        let m = metrics(&g);
        assert_eq!((m.density, m.average_degree, m.clustering), (0.0, 0.0, 0.0));
    }

    #[test]
    fn filtering_by_weight() {
        let log = log_of(&[
            (0, &[], 5.0),
            (1, &[0], 4.0),
            (2, &[0, 1], 3.0),
            (1, &[0], 4.0),
        ]);
        let g = build_graph(&log).unwrap().filtered(1);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.node_count(), 3);
        assert!(metrics(&g).average_degree <= metrics(&build_graph(&log).unwrap()).average_degree);
    }

    /// Adjacency-matrix oracle straight from the `(node, parents)` list.
    fn brute_force(spec: &[(usize, Vec<usize>)], n: usize) -> (f64, f64, f64) {
        let mut present = vec![false; n];
        let mut a = vec![vec![false; n]; n];
        for (node, parents) in spec {
            present[*node] = true;
            for &p in parents {
                if p != *node {
                    a[p][*node] = true;
                    a[*node][p] = true;
                }
            }
        }
        let nodes: Vec<usize> = (0..n).filter(|&i| present[i]).collect();
        let nn = nodes.len() as f64;
        let mut m = 0.0;
        let mut cc = 0.0;
        for &i in &nodes {
            let nb: Vec<usize> = nodes.iter().copied().filter(|&j| a[i][j]).collect();
            m += nb.len() as f64 / 2.0;
            if nb.len() >= 2 {
                let mut links = 0.0;
                let mut pairs = 0.0;
                for &u in &nb {
                    for &v in &nb {
                        if u < v {
                            pairs += 1.0;
                            if a[u][v] {
                                links += 1.0;
                            }
                        }
                    }
                }
                cc += links / pairs;
            }
        }
        let density = if nn >= 2.0 {
            m / (nn * (nn - 1.0) / 2.0)
        } else {
            0.0
        };
        (density, 2.0 * m / nn, cc / nn)
    }

    #[test]
    fn metrics_match_brute_force_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let mut spec: Vec<(usize, Vec<usize>)> = Vec::new();
            let mut seen: Vec<usize> = Vec::new();
            for i in 0..rng.random_range(1..15) {
                let node = rng.random_range(0..6);
                let parents: Vec<usize> = if i == 0 {
                    vec![]
                } else {
                    (0..rng.random_range(0..=2usize.min(seen.len())))
                        .map(|_| seen[rng.random_range(0..seen.len())])
                        .collect()
                };
                spec.push((node, parents));
                if !seen.contains(&node) {
                    seen.push(node);
                }
            }
            let refs: Vec<(usize, &[usize], f64)> =
                spec.iter().map(|(n, p)| (*n, p.as_slice(), 1.0)).collect();
            let g = build_graph(&log_of(&refs)).unwrap();
            let m = metrics(&g);
            let (d, k, c) = brute_force(&spec, 6);
            assert!((m.density - d).abs() < 1e-12);
            assert!((m.average_degree - k).abs() < 1e-12);
            assert!((m.clustering - c).abs() < 1e-12);
            assert!(m.density <= 1.0 && (0.0..=1.0).contains(&m.clustering));
            let total: usize = g.nodes.values().map(|n| n.count).sum();
            assert_eq!(total, spec.len());
        }
    }

    #[test]
    fn best_fitness_and_feasibility() {
        let log = log_of(&[
            (0, &[], f64::INFINITY),
            (0, &[0], 2.0),
            (1, &[0], f64::INFINITY),
        ]);
        let g = build_graph(&log).unwrap();
        assert_eq!(g.nodes[&id(0)].best_fitness, 2.0);
        assert!(g.nodes[&id(0)].feasible);
        assert!(!g.nodes[&id(1)].feasible);
        let norm = g.normalized_fitness();
        assert_eq!(norm.len(), 1);
    }
}
