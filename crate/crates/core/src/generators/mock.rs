use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Generated, GenerationRequest, Generator, GeneratorError, OperatorKind};
use crate::dsl::{graft, random_expr, random_program, Expr, Program, Site};

/// Standard deviation of the log-normal literal perturbation used by M2.
pub const M2_SIGMA: f64 = 0.3;
/// Depth of the fresh expression M1 splices in.
pub const M1_DEPTH: usize = 2;

/// Operator semantics realized directly on DSL programs, standing in for an
/// LLM.
///
/// * E1: a fresh random program (parents only count toward arity).
/// * E2: a random subtree of parent 1 grafted at a random site of parent 2,
///   then one fresh component spliced in as for M1.
/// * M1: a random subtree replaced by a fresh expression of depth <= 2.
/// * M2: every literal scaled by `exp(N(0, 0.3))`; a literal-free parent gets
///   one random subtree `s` rewritten to `c * s` instead.
pub fn mock_generate(
    op: OperatorKind,
    parents: &[Program],
    input_vars: &[&str],
    max_depth: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Program, GeneratorError> {
    let expected = op.parent_count();
    let arity_ok = match op {
        OperatorKind::E1 => (1..=expected).contains(&parents.len()),
        _ => parents.len() == expected,
    };
    if !arity_ok {
        return Err(GeneratorError::ArityMismatch {
            op,
            expected,
            found: parents.len(),
        });
    }
    let scale = Normal::new(0.0, M2_SIGMA).expect("valid sigma");
    let program = match op {
        OperatorKind::E1 => random_program(rng, input_vars, max_depth),
        OperatorKind::E2 => {
            let (donor_parent, host) = (&parents[0], &parents[1]);
            let donor_site = Site(rng.random_range(0..donor_parent.site_count()));
            let donor = donor_parent
                .subtree(donor_site)
                .expect("site in range")
                .clone();
            let site = Site(rng.random_range(0..host.site_count()));
            let child = graft(host, &donor, site, rng).expect("site in range");
            splice_fresh(&child, rng)
        }
        OperatorKind::M1 => splice_fresh(&parents[0], rng),
        OperatorKind::M2 => {
            let mut child = parents[0].clone();
            if child.literal_count() > 0 {
                let mut scale_literal = |e: &mut Expr| {
                    if let Expr::Num(v) = e {
                        let factor = scale.sample(rng).exp();
                        *v = clamp_literal(*v * factor);
                    }
                };
                for stmt in &mut child.statements {
                    stmt.value.for_each_mut(&mut scale_literal);
                }
                child.result.for_each_mut(&mut scale_literal);
                child
            } else {
                let site = Site(rng.random_range(0..child.site_count()));
                let factor = clamp_literal(scale.sample(rng).exp());
                let target = child.subtree(site).expect("site in range").clone();
                let scaled = Expr::binary(crate::dsl::BinOp::Mul, Expr::Num(factor), target);
                graft(&child, &scaled, site, rng).expect("site in range")
            }
        }
    };
    Ok(program)
}

/// Replaces a uniformly chosen subtree with a fresh expression of depth at
/// most [`M1_DEPTH`] over the variables in scope there.
fn splice_fresh(p: &Program, rng: &mut ChaCha8Rng) -> Program {
    let site = Site(rng.random_range(0..p.site_count()));
    let scope = p.scope_at(site).expect("site in range");
    let fresh = random_expr(rng, &scope, M1_DEPTH);
    graft(p, &fresh, site, rng).expect("site in range")
}

fn clamp_literal(v: f64) -> f64 {
    v.clamp(f64::MIN_POSITIVE, 1e12)
}

/// Deterministic offline generator.
#[derive(Debug, Clone)]
pub struct MockGenerator {
    pub max_depth: usize,
}

impl Default for MockGenerator {
    fn default() -> Self {
        MockGenerator { max_depth: 4 }
    }
}

impl Generator for MockGenerator {
    fn name(&self) -> &str {
        "mock"
    }

    fn generate(
        &self,
        request: &GenerationRequest<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Generated, GeneratorError> {
        let program = mock_generate(
            request.op,
            request.parents,
            request.task.input_vars(),
            self.max_depth,
            rng,
        )?;
        Ok(Generated {
            code: program.to_source(),
            note: None,
        })
    }
}
