//! Restarting descent-direction local search.

use rand::Rng;

use crate::archive::Evaluator;
use crate::descent::{find_descent_step, step_blocked, DdParams};
use crate::error::EvalError;
use crate::heuristics::{Incumbent, RunResult};
use crate::inner_max::inner_maximise;
use crate::rng::distance;

/// Halvings of a blocked step before the direction is abandoned.
const STEP_HALVINGS: usize = 3;

/// Local descent from random starts until the budget is spent.
///
/// Each local search estimates the worst case at the current point, moves
/// away from the high cost points around it, and restarts from a fresh
/// uniform point once no acceptable direction is left.
pub fn run_dd_restart<R: Rng + ?Sized>(
    evaluator: &mut Evaluator<'_>,
    params: &DdParams,
    b_in: usize,
    rng: &mut R,
) -> Result<RunResult, EvalError> {
    let problem = evaluator.problem();
    let domain = problem.domain();
    let gamma = problem.gamma();
    let mut incumbent = Incumbent::default();

    'restart: loop {
        let mut x = domain.sample_uniform(rng);
        loop {
            let out = inner_maximise(evaluator, &x, b_in.max(1), None, rng)?;
            if out.is_complete() {
                incumbent.offer(&x, out.estimate, evaluator.ledger().used());
            } else if out.evaluations_used > 0 {
                incumbent.note_fallback(&x, out.estimate);
            }
            if out.budget_exhausted {
                break 'restart;
            }
            let g = out.estimate;
            let Some(step) = find_descent_step(evaluator.archive(), &x, g, params, gamma).step
            else {
                continue 'restart;
            };
            let threshold = g - step.sigma;
            let mut rho = step.rho;
            let mut target = advance(&x, &step.direction, rho);
            let mut halvings = 0;
            while step_blocked(evaluator.archive(), &x, &target, gamma, threshold) {
                if halvings == STEP_HALVINGS {
                    continue 'restart;
                }
                halvings += 1;
                rho /= 2.0;
                target = advance(&x, &step.direction, rho);
            }
            domain.clamp(&mut target);
            if distance(&target, &x) <= f64::EPSILON * gamma {
                continue 'restart;
            }
            x = target;
        }
    }
    Ok(incumbent.finish(evaluator))
}

fn advance(x: &[f64], d: &[f64], rho: f64) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + rho * b).collect()
}

