use super::ast::{BinOp, Expr, Func, LetBinding, Program};
use super::lexer::{lex, Spanned, TokenKind};
use super::DslError;

/// Parses DSL source against a fixed set of input variables.
pub fn parse(source: &str, input_vars: &[&str]) -> Result<Program, DslError> {
    let program = parse_unscoped(source, Some(input_vars))?;
    program.validate()?;
    Ok(program)
}

/// Parses DSL source, treating every free identifier as an input variable
/// (in order of first appearance). Used for logs whose task signature is
/// unknown.
pub fn parse_lenient(source: &str) -> Result<Program, DslError> {
    let mut program = parse_unscoped(source, None)?;
    let mut bound: Vec<&str> = Vec::new();
    let mut free: Vec<String> = Vec::new();
    let mut note_free = |expr: &Expr, bound: &[&str]| {
        for v in expr.variables() {
            if !bound.contains(&v) && !free.iter().any(|f| f == v) {
                free.push(v.to_string());
            }
        }
    };
    for stmt in &program.statements {
        note_free(&stmt.value, &bound);
        bound.push(&stmt.name);
    }
    note_free(&program.result, &bound);
    program.input_vars = free;
    program.validate()?;
    Ok(program)
}

fn parse_unscoped(source: &str, input_vars: Option<&[&str]>) -> Result<Program, DslError> {
    let tokens = lex(source)?;
    let end = end_position(source);
    let mut parser = Parser {
        tokens,
        pos: 0,
        end,
    };
    let program = parser.program(input_vars.unwrap_or(&[]))?;
    Ok(program)
}

fn end_position(source: &str) -> (usize, usize) {
    let line = source.matches('\n').count() + 1;
    let last = source.rsplit('\n').next().unwrap_or("");
    (line, last.chars().count() + 1)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn peek_text(&self) -> Option<&str> {
        self.peek().map(|s| s.token.text.as_str())
    }

    fn error(&self, message: &str) -> DslError {
        match self.peek() {
            Some(s) => DslError::Syntax {
                line: s.line,
                column: s.column,
                found: s.token.text.clone(),
                message: message.to_string(),
            },
            None => DslError::Syntax {
                line: self.end.0,
                column: self.end.1,
                found: "<end of input>".to_string(),
                message: message.to_string(),
            },
        }
    }

    fn expect(&mut self, text: &str) -> Result<(), DslError> {
        if self.peek_text() == Some(text) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{text}`")))
        }
    }

    fn program(&mut self, input_vars: &[&str]) -> Result<Program, DslError> {
        let mut statements = Vec::new();
        while self.peek_text() == Some("let") {
            self.pos += 1;
            let name = match self.peek() {
                Some(s) if s.token.kind == TokenKind::Identifier => s.token.text.clone(),
                _ => return Err(self.error("expected binding name")),
            };
            self.pos += 1;
            self.expect("=")?;
            let value = self.expr()?;
            self.expect(";")?;
            statements.push(LetBinding { name, value });
        }
        self.expect("return")?;
        let result = self.expr()?;
        if self.peek_text() == Some(";") {
            self.pos += 1;
        }
        if self.peek().is_some() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(Program {
            input_vars: input_vars.iter().map(|s| s.to_string()).collect(),
            statements,
            result,
        })
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek_text() {
                Some("+") => BinOp::Add,
                Some("-") => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_text() {
                Some("*") => BinOp::Mul,
                Some("/") => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if self.peek_text() == Some("-") {
            self.pos += 1;
            return Ok(Expr::neg(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, DslError> {
        let Some(tok) = self.peek().map(|s| s.token.clone()) else {
            return Err(self.error("expected expression"));
        };
        match tok.kind {
            TokenKind::Number => {
                let value: f64 = tok
                    .text
                    .parse()
                    .map_err(|_| self.error("malformed number"))?;
                if !value.is_finite() {
                    return Err(self.error("number out of range"));
                }
                self.pos += 1;
                Ok(Expr::Num(value))
            }
            TokenKind::Identifier => {
                self.pos += 1;
                if self.peek_text() == Some("(") {
                    self.pos -= 1;
                    return Err(self.error("unknown function"));
                }
                Ok(Expr::Var(tok.text))
            }
            TokenKind::FunctionName => {
                let func = Func::from_name(&tok.text).expect("classified as function");
                self.pos += 1;
                self.expect("(")?;
                let mut args = Vec::with_capacity(func.arity());
                for i in 0..func.arity() {
                    if i > 0 {
                        self.expect(",")?;
                    }
                    args.push(self.expr()?);
                }
                self.expect(")")?;
                Ok(Expr::Call(func, args))
            }
            TokenKind::Punct if tok.text == "(" => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(inner)
            }
            _ => Err(self.error("expected expression")),
        }
    }
}
