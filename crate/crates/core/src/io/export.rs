use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::json;

use super::{write_atomic, IoError};
use crate::landscape::{metrics, LandscapeGraph, Layout, TrajectoryGraph};

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n")
}

const GRAPHML_OPEN: &str = concat!(
    "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
    "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
);

fn graphml_node(out: &mut String, g: Option<&LandscapeGraph>, id: &str, level: Option<usize>) {
    let _ = writeln!(out, "    <node id=\"{}\">", escape_xml(id));
    if let Some(n) = g.and_then(|g| g.nodes.get(id)) {
        if n.feasible {
            let _ = writeln!(out, "      <data key=\"fitness\">{}</data>", n.best_fitness);
        }
        let _ = writeln!(out, "      <data key=\"count\">{}</data>", n.count);
        let _ = writeln!(out, "      <data key=\"feasible\">{}</data>", n.feasible);
        let _ = writeln!(
            out,
            "      <data key=\"code\">{}</data>",
            escape_xml(&n.canonical_text)
        );
    }
    if let Some(level) = level {
        let _ = writeln!(out, "      <data key=\"level\">{level}</data>");
    }
    out.push_str("    </node>\n");
}

fn graphml_keys(out: &mut String, with_level: bool, with_weight: bool) {
    for (id, target, ty) in [
        ("fitness", "node", "double"),
        ("count", "node", "int"),
        ("feasible", "node", "boolean"),
        ("code", "node", "string"),
    ] {
        let _ = writeln!(
            out,
            "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>"
        );
    }
    if with_level {
        out.push_str("  <key id=\"level\" for=\"node\" attr.name=\"level\" attr.type=\"int\"/>\n");
    }
    if with_weight {
        out.push_str(
            "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n",
        );
    }
}

/// Undirected GraphML with node fitness, count, feasibility and code, and
/// integer edge weights.
pub fn graphml_landscape(g: &LandscapeGraph) -> String {
    let mut out = String::from(GRAPHML_OPEN);
    graphml_keys(&mut out, false, true);
    out.push_str("  <graph id=\"landscape\" edgedefault=\"undirected\">\n");
    for id in g.nodes.keys() {
        graphml_node(&mut out, Some(g), id, None);
    }
    for ((a, b), w) in &g.edges {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\">\n      <data key=\"weight\">{w}</data>\n    </edge>",
            escape_xml(a),
            escape_xml(b)
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// Directed GraphML of the trajectory; node attributes come from `g` when
/// given.
pub fn graphml_trajectory(t: &TrajectoryGraph, g: Option<&LandscapeGraph>) -> String {
    let mut out = String::from(GRAPHML_OPEN);
    graphml_keys(&mut out, true, false);
    out.push_str("  <graph id=\"trajectory\" edgedefault=\"directed\">\n");
    for (id, level) in &t.levels {
        graphml_node(&mut out, g, id, Some(*level));
    }
    for (a, b) in &t.edges {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"/>",
            escape_xml(a),
            escape_xml(b)
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// Grey level of a normalized fitness: best (0) is black, worst (1) light
/// grey; nodes without a feasible fitness are white.
fn fill(norm: Option<f64>) -> String {
    match norm {
        Some(f) => {
            let v = (f.clamp(0.0, 1.0) * 224.0).round() as u8;
            format!("#{v:02x}{v:02x}{v:02x}")
        }
        None => "#ffffff".to_string(),
    }
}

const SIZE_PER_COUNT: f64 = 0.1;

fn dot_node(out: &mut String, id: &str, g: Option<&LandscapeGraph>, norm: &BTreeMap<String, f64>) {
    let count = g.and_then(|g| g.nodes.get(id)).map_or(1, |n| n.count);
    let size = SIZE_PER_COUNT * count as f64;
    let _ = writeln!(
        out,
        "  \"{}\" [label=\"{}\", fillcolor=\"{}\", width={size}, height={size}];",
        escape_dot(id),
        escape_dot(&id[..id.len().min(8)]),
        fill(norm.get(id).copied())
    );
}

const DOT_NODE_STYLE: &str =
    "  node [shape=circle, style=filled, fixedsize=true, fontsize=6, fontcolor=\"#d04040\"];\n";

/// Undirected DOT: fill by normalized fitness, size by generation count,
/// pen width by edge weight.
pub fn dot_landscape(g: &LandscapeGraph) -> String {
    let norm = g.normalized_fitness();
    let mut out = String::from("graph landscape {\n");
    out.push_str(DOT_NODE_STYLE);
    for id in g.nodes.keys() {
        dot_node(&mut out, id, Some(g), &norm);
    }
    for ((a, b), w) in &g.edges {
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\" [penwidth={w}];",
            escape_dot(a),
            escape_dot(b)
        );
    }
    out.push_str("}\n");
    out
}

/// Directed DOT with one `rank=same` group per level, best at the bottom.
pub fn dot_trajectory(t: &TrajectoryGraph, g: Option<&LandscapeGraph>) -> String {
    let norm = g
        .map(LandscapeGraph::normalized_fitness)
        .unwrap_or_default();
    let mut out = String::from("digraph trajectory {\n  rankdir=TB;\n");
    out.push_str(DOT_NODE_STYLE);
    for id in t.levels.keys() {
        dot_node(&mut out, id, g, &norm);
    }
    let mut by_level: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (id, level) in &t.levels {
        by_level.entry(*level).or_default().push(id);
    }
    for (level, ids) in by_level.iter().rev() {
        let members: Vec<String> = ids
            .iter()
            .map(|id| format!("\"{}\";", escape_dot(id)))
            .collect();
        let _ = writeln!(
            out,
            "  {{ rank=same; /* level {level} */ {} }}",
            members.join(" ")
        );
    }
    for (a, b) in &t.edges {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", escape_dot(a), escape_dot(b));
    }
    out.push_str("}\n");
    out
}

/// Nodes (with coordinates when laid out), weighted edges and metrics.
pub fn graph_json(g: &LandscapeGraph, layout: Option<&Layout>) -> String {
    let nodes: Vec<_> = g
        .nodes
        .iter()
        .map(|(id, n)| {
            json!({
                "id": id,
                "canonical_text": n.canonical_text,
                "fitness": n.feasible.then_some(n.best_fitness),
                "count": n.count,
                "feasible": n.feasible,
                "first_index": n.first_index,
                "coords": layout.and_then(|l| l.get(id)),
            })
        })
        .collect();
    let edges: Vec<_> = g
        .edges
        .iter()
        .map(|((a, b), w)| json!({"source": a, "target": b, "weight": w}))
        .collect();
    let doc = json!({"nodes": nodes, "edges": edges, "metrics": metrics(g)});
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}

pub fn write_graphml_landscape(g: &LandscapeGraph, path: &Path) -> Result<(), IoError> {
    write_atomic(path, graphml_landscape(g).as_bytes())
}

pub fn write_graphml_trajectory(
    t: &TrajectoryGraph,
    g: Option<&LandscapeGraph>,
    path: &Path,
) -> Result<(), IoError> {
    write_atomic(path, graphml_trajectory(t, g).as_bytes())
}

pub fn write_dot_landscape(g: &LandscapeGraph, path: &Path) -> Result<(), IoError> {
    write_atomic(path, dot_landscape(g).as_bytes())
}

pub fn write_dot_trajectory(
    t: &TrajectoryGraph,
    g: Option<&LandscapeGraph>,
    path: &Path,
) -> Result<(), IoError> {
    write_atomic(path, dot_trajectory(t, g).as_bytes())
}

pub fn write_graph_json(
    g: &LandscapeGraph,
    layout: Option<&Layout>,
    path: &Path,
) -> Result<(), IoError> {
    write_atomic(path, graph_json(g, layout).as_bytes())
}
