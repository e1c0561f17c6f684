use std::collections::HashMap;

use super::ast::{BinOp, Expr, Func, Program};
use super::DslError;

pub const DIV_EPS: f64 = 1e-9;
pub const LOG_FLOOR: f64 = 1e-9;
pub const EXP_CAP: f64 = 50.0;
pub const POW_EPS: f64 = 1e-9;

/// Guarded primitives giving every operator a total real-valued meaning.
pub mod prim {
    use super::*;

    pub fn div(x: f64, y: f64) -> f64 {
        // sign(0) = +1
        let denom = if y >= 0.0 {
            y.max(DIV_EPS)
        } else {
            -(-y).max(DIV_EPS)
        };
        x / denom
    }

    pub fn sqrt(x: f64) -> f64 {
        x.abs().sqrt()
    }

    pub fn log(x: f64) -> f64 {
        x.max(LOG_FLOOR).ln()
    }

    pub fn exp(x: f64) -> f64 {
        x.min(EXP_CAP).exp()
    }

    pub fn pow(x: f64, y: f64) -> f64 {
        let magnitude = exp(y * (x.abs() + POW_EPS).ln());
        let odd_integer = y.fract() == 0.0 && (y % 2.0).abs() == 1.0;
        if x < 0.0 && odd_integer {
            -magnitude
        } else {
            magnitude
        }
    }

    pub fn if_gt(a: f64, b: f64, x: f64, y: f64) -> f64 {
        if a > b {
            x
        } else {
            y
        }
    }

    pub fn binary(op: BinOp, x: f64, y: f64) -> f64 {
        match op {
            BinOp::Add => x + y,
            BinOp::Sub => x - y,
            BinOp::Mul => x * y,
            BinOp::Div => div(x, y),
        }
    }

    pub fn call(func: Func, args: &[f64]) -> f64 {
        match func {
            Func::Min => args[0].min(args[1]),
            Func::Max => args[0].max(args[1]),
            Func::Abs => args[0].abs(),
            Func::Sqrt => sqrt(args[0]),
            Func::Exp => exp(args[0]),
            Func::Log => log(args[0]),
            Func::Pow => pow(args[0], args[1]),
            Func::IfGt => if_gt(args[0], args[1], args[2], args[3]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Const(f64),
    Load(usize),
    Neg,
    Bin(BinOp),
    Call(Func),
    /// Pops the stack top into a slot.
    Store(usize),
}

/// A program lowered to postfix code over numbered slots: inputs occupy
/// slots `0..inputs`, let-bindings the slots after them.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledProgram {
    code: Vec<Instr>,
    inputs: usize,
    slots: usize,
}

#[derive(Debug, Default)]
pub struct Scratch {
    slots: Vec<f64>,
    stack: Vec<f64>,
}

impl CompiledProgram {
    pub fn new(program: &Program) -> CompiledProgram {
        let mut names: HashMap<&str, usize> = program
            .input_vars
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut code = Vec::new();
        for stmt in &program.statements {
            lower(&stmt.value, &names, &mut code);
            let slot = names.len();
            code.push(Instr::Store(slot));
            names.insert(&stmt.name, slot);
        }
        lower(&program.result, &names, &mut code);
        CompiledProgram {
            code,
            inputs: program.input_vars.len(),
            slots: names.len(),
        }
    }

    pub fn input_count(&self) -> usize {
        self.inputs
    }

    /// Evaluates with inputs given in `input_vars` order.
    pub fn eval(&self, inputs: &[f64]) -> Result<f64, DslError> {
        self.eval_with(inputs, &mut Scratch::default())
    }

    pub fn eval_with(&self, inputs: &[f64], scratch: &mut Scratch) -> Result<f64, DslError> {
        assert_eq!(inputs.len(), self.inputs, "input arity");
        let Scratch { slots, stack } = scratch;
        slots.clear();
        slots.extend_from_slice(inputs);
        slots.resize(self.slots, 0.0);
        stack.clear();
        let mut args = [0.0f64; 4];
        for instr in &self.code {
            let value = match *instr {
                Instr::Const(v) => v,
                Instr::Load(slot) => slots[slot],
                Instr::Store(slot) => {
                    slots[slot] = stack.pop().expect("stack underflow");
                    continue;
                }
                Instr::Neg => -stack.pop().expect("stack underflow"),
                Instr::Bin(op) => {
                    let y = stack.pop().expect("stack underflow");
                    let x = stack.pop().expect("stack underflow");
                    prim::binary(op, x, y)
                }
                Instr::Call(func) => {
                    let n = func.arity();
                    let base = stack.len() - n;
                    args[..n].copy_from_slice(&stack[base..]);
                    stack.truncate(base);
                    prim::call(func, &args[..n])
                }
            };
            if !value.is_finite() {
                return Err(DslError::NonFiniteResult);
            }
            stack.push(value);
        }
        Ok(stack.pop().expect("result on stack"))
    }
}

fn lower(expr: &Expr, names: &HashMap<&str, usize>, code: &mut Vec<Instr>) {
    match expr {
        Expr::Num(v) => code.push(Instr::Const(*v)),
        Expr::Var(name) => code.push(Instr::Load(names[name.as_str()])),
        Expr::Neg(inner) => {
            lower(inner, names, code);
            code.push(Instr::Neg);
        }
        Expr::Binary(op, l, r) => {
            lower(l, names, code);
            lower(r, names, code);
            code.push(Instr::Bin(*op));
        }
        Expr::Call(func, args) => {
            for arg in args {
                lower(arg, names, code);
            }
            code.push(Instr::Call(*func));
        }
    }
}

/// Evaluates a program under a name-to-value environment.
pub fn evaluate(program: &Program, env: &HashMap<String, f64>) -> Result<f64, DslError> {
    let inputs = program
        .input_vars
        .iter()
        .map(|name| {
            env.get(name)
                .copied()
                .ok_or_else(|| DslError::MissingInput(name.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    CompiledProgram::new(program).eval(&inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    const OBP: &[&str] = &["item", "cap"];

    fn env(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn run(src: &str, pairs: &[(&str, f64)]) -> Result<f64, DslError> {
        evaluate(&parse(src, OBP).unwrap(), &env(pairs))
    }

    /// Independent recursive interpreter used as an oracle.
    fn oracle(expr: &Expr, env: &HashMap<String, f64>) -> f64 {
        match expr {
            Expr::Num(v) => *v,
            Expr::Var(n) => env[n],
            Expr::Neg(e) => -oracle(e, env),
            Expr::Binary(op, l, r) => {
                let (a, b) = (oracle(l, env), oracle(r, env));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            a / 1e-9
                        } else if b.abs() < 1e-9 {
                            a / (1e-9 * b.signum())
                        } else {
                            a / b
                        }
                    }
                }
            }
            Expr::Call(f, args) => {
                let v: Vec<f64> = args.iter().map(|a| oracle(a, env)).collect();
                match f {
                    Func::Max => {
                        if v[0] >= v[1] {
                            v[0]
                        } else {
                            v[1]
                        }
                    }
                    Func::Min => {
                        if v[0] <= v[1] {
                            v[0]
                        } else {
                            v[1]
                        }
                    }
                    Func::IfGt => {
                        if v[0] > v[1] {
                            v[2]
                        } else {
                            v[3]
                        }
                    }
                    _ => unimplemented!("oracle covers the example only"),
                }
            }
        }
    }

    #[test]
    fn arithmetic() {
        assert_eq!(
            run("return item + cap", &[("item", 2.0), ("cap", 3.0)]),
            Ok(5.0)
        );
    }

    #[test]
    fn guarded_division_by_zero() {
        let v = run("return item / 0.0", &[("item", 1.0), ("cap", 0.0)]).unwrap();
        assert!((v - 1e9).abs() <= 1e9 * 1e-12, "{v}");
        let v = run("return item / (0 - 0.0)", &[("item", 1.0), ("cap", 0.0)]).unwrap();
        assert!(v > 0.0, "sign(0) is +1");
        let v = run(
            "return item / -0.0000000001",
            &[("item", 1.0), ("cap", 0.0)],
        )
        .unwrap();
        assert!((v + 1e9).abs() <= 1e9 * 1e-12, "{v}");
    }

    #[test]
    fn if_gt_example_matches_oracle() {
        let src = "let a = max(item, cap); return if_gt(a, 4.0, 1.0, 0.0)";
        let p = parse(src, OBP).unwrap();
        let e = env(&[("item", 2.0), ("cap", 5.0)]);
        let mut scope = e.clone();
        scope.insert("a".into(), oracle(&p.statements[0].value, &e));
        let expected = oracle(&p.result, &scope);
        assert_eq!(expected, 1.0);
        assert_eq!(evaluate(&p, &e), Ok(expected));
    }

    #[test]
    fn guarded_unary_functions() {
        let e = [("item", -4.0), ("cap", 0.0)];
        assert_eq!(run("return sqrt(item)", &e), Ok(2.0));
        assert_eq!(run("return log(item)", &e), Ok(1e-9f64.ln()));
        assert_eq!(run("return exp(1000)", &e), Ok(50f64.exp()));
        assert_eq!(run("return abs(item)", &e), Ok(4.0));
    }

    #[test]
    fn pow_sign_rule() {
        let expected = (3.0 * (2.0f64 + 1e-9).ln()).exp();
        assert_eq!(prim::pow(-2.0, 3.0), -expected);
        assert_eq!(prim::pow(2.0, 3.0), expected);
        let even = (2.0 * (2.0f64 + 1e-9).ln()).exp();
        assert_eq!(prim::pow(-2.0, 2.0), even);
        assert!(prim::pow(-2.0, 0.5) > 0.0);
        assert!(prim::pow(0.0, -3.0).is_finite());
    }

    #[test]
    fn overflow_is_non_finite() {
        let src = "let a = exp(50) * exp(50) * exp(50) * exp(50); return a * a * a * a";
        assert_eq!(
            run(src, &[("item", 0.0), ("cap", 0.0)]),
            Err(DslError::NonFiniteResult)
        );
    }

    #[test]
    fn missing_input() {
        assert_eq!(
            run("return item", &[("item", 1.0)]),
            Err(DslError::MissingInput("cap".into()))
        );
    }
}
