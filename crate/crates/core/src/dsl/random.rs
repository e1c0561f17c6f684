use rand::Rng;

use super::ast::{BinOp, Expr, Func, LetBinding, Program, Site};
use super::DslError;

/// Largest number of let-bindings a random program receives.
pub const MAX_RANDOM_BINDINGS: usize = 3;

const LEAF_PROBABILITY: f64 = 0.3;
const VAR_PROBABILITY: f64 = 0.7;

/// Random literal on the grid 0.1, 0.2, ..., 10.0.
pub fn random_literal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(1..=100u32) as f64 / 10.0
}

fn random_leaf<R: Rng + ?Sized>(rng: &mut R, scope: &[String]) -> Expr {
    if !scope.is_empty() && rng.random_bool(VAR_PROBABILITY) {
        Expr::Var(scope[rng.random_range(0..scope.len())].clone())
    } else {
        Expr::Num(random_literal(rng))
    }
}

/// Grow-method expression sampling with depth at most `max_depth`.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, scope: &[String], max_depth: usize) -> Expr {
    grow(rng, scope, max_depth.max(1), true)
}

fn grow<R: Rng + ?Sized>(rng: &mut R, scope: &[String], depth: usize, root: bool) -> Expr {
    if depth <= 1 || (!root && rng.random_bool(LEAF_PROBABILITY)) {
        return random_leaf(rng, scope);
    }
    // 4 binary operators (weight 2 each), negation, 8 built-ins.
    let choice = rng.random_range(0..17u32);
    let child = |rng: &mut R| grow(rng, scope, depth - 1, false);
    match choice {
        0..=7 => {
            let op = BinOp::ALL[(choice / 2) as usize];
            let lhs = child(rng);
            let rhs = child(rng);
            Expr::binary(op, lhs, rhs)
        }
        8 => Expr::neg(child(rng)),
        _ => {
            let func = Func::ALL[(choice - 9) as usize];
            let args = (0..func.arity()).map(|_| child(rng)).collect();
            Expr::Call(func, args)
        }
    }
}

/// Samples a program with 0 to 3 let-bindings whose expressions all have
/// depth at most `max_depth`.
pub fn random_program<R: Rng + ?Sized>(
    rng: &mut R,
    input_vars: &[&str],
    max_depth: usize,
) -> Program {
    let mut scope: Vec<String> = input_vars.iter().map(|s| s.to_string()).collect();
    let bindings = rng.random_range(0..=MAX_RANDOM_BINDINGS);
    let mut statements = Vec::with_capacity(bindings);
    for i in 0..bindings {
        let value = random_expr(rng, &scope, max_depth);
        let name = format!("t{i}");
        statements.push(LetBinding {
            name: name.clone(),
            value,
        });
        scope.push(name);
    }
    let result = random_expr(rng, &scope, max_depth);
    Program {
        input_vars: input_vars.iter().map(|s| s.to_string()).collect(),
        statements,
        result,
    }
}

/// Replaces the node at `site` with `donor`. Donor identifiers that are not
/// visible at the site are rewritten to a uniformly chosen visible one (or
/// the literal 1 if nothing is visible).
pub fn graft<R: Rng + ?Sized>(
    host: &Program,
    donor: &Expr,
    site: Site,
    rng: &mut R,
) -> Result<Program, DslError> {
    let (stmt, local) = host.locate(site).ok_or(DslError::InvalidSite(site.0))?;
    let scope = host.scope_before(stmt);
    let mut donor = donor.clone();
    donor.for_each_mut(&mut |e| {
        if let Expr::Var(name) = e {
            if !scope.contains(name) {
                *e = if scope.is_empty() {
                    Expr::Num(1.0)
                } else {
                    Expr::Var(scope[rng.random_range(0..scope.len())].clone())
                };
            }
        }
    });
    let mut out = host.clone();
    let node = out
        .expression_mut(stmt)
        .node_at_mut(local)
        .ok_or(DslError::InvalidSite(site.0))?;
    *node = donor;
    debug_assert!(out.validate().is_ok());
    Ok(out)
}
