use std::collections::HashMap;
use std::hash::Hash;

use crate::dsl::{Expr, Program};

/// Pushes the placeholder serialization of every subtree of `e` and returns
/// the serialization of `e` itself.
fn collect_subtrees(e: &Expr, out: &mut Vec<String>) -> String {
    let text = match e {
        Expr::Num(_) => "NUM".to_string(),
        Expr::Var(_) => "ID".to_string(),
        Expr::Neg(inner) => format!("(neg {})", collect_subtrees(inner, out)),
        Expr::Binary(op, l, r) => {
            let l = collect_subtrees(l, out);
            let r = collect_subtrees(r, out);
            format!("({} {l} {r})", op.tag())
        }
        Expr::Call(f, args) => {
            let args: Vec<String> = args.iter().map(|a| collect_subtrees(a, out)).collect();
            format!("(call:{} {})", f.name(), args.join(" "))
        }
    };
    out.push(text.clone());
    text
}

/// Every subtree of the program: each expression node plus one `let` node per
/// binding, with identifiers and literals replaced by `ID` and `NUM`.
pub fn ast_subtrees(p: &Program) -> Vec<String> {
    let mut out = Vec::new();
    for s in &p.statements {
        let rhs = collect_subtrees(&s.value, &mut out);
        out.push(format!("(let {rhs})"));
    }
    collect_subtrees(&p.result, &mut out);
    out
}

fn multiset<T: Eq + Hash>(items: impl IntoIterator<Item = T>) -> HashMap<T, usize> {
    let mut m = HashMap::new();
    for x in items {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

/// Clipped multiset overlap relative to the reference size; 1 when the
/// reference is empty.
fn overlap<T: Eq + Hash>(reference: Vec<T>, candidate: Vec<T>) -> f64 {
    if reference.is_empty() {
        return 1.0;
    }
    let total = reference.len() as f64;
    let r = multiset(reference);
    let c = multiset(candidate);
    let hits: usize = c
        .iter()
        .map(|(k, &n)| n.min(r.get(k).copied().unwrap_or(0)))
        .sum();
    hits as f64 / total
}

/// Fraction of reference subtrees found in the candidate.
pub fn ast_match(reference: &Program, candidate: &Program) -> f64 {
    overlap(ast_subtrees(reference), ast_subtrees(candidate))
}

/// `(defined, used)` edges, all with relation `computedFrom`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataflowGraph {
    pub edges: Vec<(String, String)>,
}

impl DataflowGraph {
    pub const RELATION: &'static str = "computedFrom";
    pub const RESULT: &'static str = "ret";
}

/// One edge per variable occurrence; let-bound names become `v0, v1, …` in
/// definition order, inputs keep their names, the result defines `ret`.
pub fn extract_dfg(p: &Program) -> DataflowGraph {
    let mut names: HashMap<&str, String> = HashMap::new();
    let mut edges = Vec::new();
    let rename = |names: &HashMap<&str, String>, v: &str| {
        names.get(v).cloned().unwrap_or_else(|| v.to_string())
    };
    for (i, s) in p.statements.iter().enumerate() {
        let def = format!("v{i}");
        for v in s.value.variables() {
            edges.push((def.clone(), rename(&names, v)));
        }
        names.insert(&s.name, def);
    }
    for v in p.result.variables() {
        edges.push((DataflowGraph::RESULT.to_string(), rename(&names, v)));
    }
    DataflowGraph { edges }
}

/// Fraction of reference dataflow edges found in the candidate.
pub fn dataflow_match(reference: &Program, candidate: &Program) -> f64 {
    overlap(extract_dfg(reference).edges, extract_dfg(candidate).edges)
}
