//! The candidate-algorithm language: a scalar scoring function made of
//! let-bindings and a returned expression.
//!
//! ```text
//! program := { "let" ident "=" expr ";" } "return" expr [";"]
//! expr    := term { ("+" | "-") term }
//! term    := unary { ("*" | "/") unary }
//! unary   := "-" unary | primary
//! primary := number | ident | builtin "(" expr { "," expr } ")" | "(" expr ")"
//! ```
//!
//! Every operator is total: division, `sqrt`, `log`, `exp` and `pow` are
//! guarded, so evaluation only fails when a value overflows.

mod ast;
mod eval;
mod lexer;
mod parser;
mod print;
mod random;

use thiserror::Error;

pub use ast::{BinOp, Expr, Func, LetBinding, Program, Site};
pub use eval::{evaluate, prim, CompiledProgram, Scratch};
pub use lexer::{tokenize, tokenize_fallback, Token, TokenKind, KEYWORDS};
pub use parser::{parse, parse_lenient};
pub use print::{canonicalize, format_number, sha256_hex, CanonicalForm};
pub use random::{graft, random_expr, random_literal, random_program, MAX_RANDOM_BINDINGS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("lex error at {line}:{column}: unexpected character {found:?}")]
    Lex {
        line: usize,
        column: usize,
        found: char,
    },
    #[error("syntax error at {line}:{column}: {message}, found `{found}`")]
    Syntax {
        line: usize,
        column: usize,
        found: String,
        message: String,
    },
    #[error("undefined variable `{0}`")]
    UndefinedVariable(String),
    #[error("duplicate binding `{0}`")]
    DuplicateBinding(String),
    #[error("input `{0}` is not bound in the environment")]
    MissingInput(String),
    #[error("evaluation produced a non-finite value")]
    NonFiniteResult,
    #[error("no expression node at site {0}")]
    InvalidSite(usize),
}
