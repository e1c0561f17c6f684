use std::fmt::Write as _;

use super::OperatorKind;
use crate::dsl::Program;
use crate::tasks::{TaskKind, TaskSpec};

const GRAMMAR: &str = "\
    program := { \"let\" name \"=\" expr \";\" } \"return\" expr
    expr    := number | name | \"-\" expr | expr (\"+\" | \"-\" | \"*\" | \"/\") expr
             | \"(\" expr \")\" | builtin \"(\" expr { \",\" expr } \")\"
    builtin := min(a, b) | max(a, b) | abs(a) | sqrt(a) | exp(a) | log(a)
             | pow(a, b) | if_gt(a, b, x, y)   (x if a > b else y)
    Division, sqrt, log, exp and pow are guarded and never fail.";

fn task_description(kind: TaskKind) -> (&'static str, &'static [(&'static str, &'static str)]) {
    match kind {
        TaskKind::Obp => (
            "Online bin packing: items arrive one at a time and must be placed immediately. \
             The program scores every open bin that can hold the item; the item goes to the \
             highest-scoring bin, or to a new bin if none fits. Goal: use as few bins as possible.",
            &[
                ("item", "size of the arriving item"),
                ("cap", "remaining capacity of the bin being scored"),
            ],
        ),
        TaskKind::Tsp => (
            "Traveling salesman, constructive: starting from city 0, the program scores every \
             unvisited city and the lowest-scoring one is visited next; the tour returns to \
             city 0. Goal: minimize the total tour length.",
            &[
                (
                    "d_cm",
                    "distance from the current city to the candidate city",
                ),
                (
                    "d_md",
                    "distance from the candidate city back to the start city",
                ),
                ("n_u", "number of cities still unvisited"),
                (
                    "avg_md",
                    "mean distance from the candidate city to the other unvisited cities",
                ),
            ],
        ),
        TaskKind::Symreg => (
            "Symbolic regression: the program maps x to a prediction of an unknown curve. \
             Goal: minimize the mean squared error over the sample points.",
            &[("x", "the input value")],
        ),
    }
}

fn instruction(op: OperatorKind, parents: usize) -> String {
    match op {
        OperatorKind::E1 => format!(
            "Above are {parents} programs seen so far. Create a new program whose form is \
             completely different from all of them."
        ),
        OperatorKind::E2 => "Identify the common idea behind the two programs above, then write \
             a new program that combines their strengths while differing from both."
            .to_string(),
        OperatorKind::M1 => "Modify the structure of the program above to obtain a new program \
             that may perform better. Keep the overall idea but change part of the computation."
            .to_string(),
        OperatorKind::M2 => "Keep the structure of the program above exactly and only adjust its \
             numeric constants to obtain a better-performing variant."
            .to_string(),
    }
}

/// Renders the single user message sent to a chat model.
pub fn build_prompt(op: OperatorKind, parents: &[Program], task: &TaskSpec) -> String {
    let (description, vars) = task_description(task.kind());
    let mut out = String::new();
    let _ = writeln!(out, "{description}\n");
    let _ = writeln!(
        out,
        "Write the scoring program in this language:\n{GRAMMAR}\n"
    );
    let _ = writeln!(out, "Input variables:");
    for (name, doc) in vars {
        let _ = writeln!(out, "  {name}: {doc}");
    }
    out.push('\n');
    let heading = match op {
        OperatorKind::E1 => "Examples seen so far:",
        OperatorKind::E2 => "Parent programs:",
        OperatorKind::M1 | OperatorKind::M2 => "Parent program:",
    };
    let _ = writeln!(out, "{heading}");
    for (i, parent) in parents.iter().enumerate() {
        let _ = writeln!(out, "Program {}:\n```\n{}\n```", i + 1, parent.to_source());
    }
    out.push('\n');
    let _ = writeln!(out, "{}", instruction(op, parents.len()));
    out.push_str(
        "Reply with the complete new program inside one fenced code block and nothing else \
         inside the fence.",
    );
    out
}
