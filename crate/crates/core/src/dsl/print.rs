use std::collections::HashMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ast::{Expr, Program};

const PREC_NEG: u8 = 3;
const PREC_ATOM: u8 = 4;

fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Binary(op, ..) => op.precedence(),
        Expr::Neg(_) => PREC_NEG,
        _ => PREC_ATOM,
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_number(value: f64) -> String {
    // `Display` for f64 emits the shortest round-trip digits without exponent.
    let s = format!("{value}");
    debug_assert_eq!(s.parse::<f64>().ok(), Some(value));
    s
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => f.write_str(&format_number(*v)),
            Expr::Var(name) => f.write_str(name),
            Expr::Neg(inner) => {
                f.write_str("-")?;
                write_child(f, inner, precedence(inner) < PREC_NEG)
            }
            Expr::Binary(op, lhs, rhs) => {
                let p = op.precedence();
                write_child(f, lhs, precedence(lhs) < p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, rhs, precedence(rhs) <= p)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Program {
    /// Serializes in the fixed layout: one `let` per line, `return` last.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for stmt in &self.statements {
            let _ = writeln!(out, "let {} = {};", stmt.name, stmt.value);
        }
        let _ = write!(out, "return {}", self.result);
        out
    }

    /// Copy with let-bindings renamed `v0, v1, ...` in definition order.
    pub fn alpha_normalized(&self) -> Program {
        let names: HashMap<String, String> = self
            .statements
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.clone(), format!("v{i}")))
            .collect();
        let lookup = |n: &str| names.get(n).cloned();
        let mut out = self.clone();
        for stmt in &mut out.statements {
            stmt.name = names[&stmt.name].clone();
            stmt.value.rename_vars(&lookup);
        }
        out.result.rename_vars(&lookup);
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_source())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub text: String,
    pub id: String,
}

/// Lowercase hex SHA-256 of the UTF-8 bytes.
pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn canonicalize(program: &Program) -> CanonicalForm {
    let text = program.alpha_normalized().to_source();
    let id = sha256_hex(&text);
    CanonicalForm { text, id }
}
