//! Exploratory search that jumps to the centre of the largest region free
//! of high cost points.

use rand::Rng;

use crate::archive::Evaluator;
use crate::error::EvalError;
use crate::heuristics::{Incumbent, RunResult};
use crate::inner_max::inner_maximise;
use crate::leh::{largest_empty_hypersphere, LehGaParams};

/// Baseline empty-hypersphere search.
///
/// Ends when the budget is spent or when no point of the box lies at least
/// `gamma` from every point worse than the incumbent.
pub fn run_leh_baseline<R: Rng + ?Sized>(
    evaluator: &mut Evaluator<'_>,
    ga: &LehGaParams,
    b_in: usize,
    rng: &mut R,
) -> Result<RunResult, EvalError> {
    let problem = evaluator.problem();
    let domain = problem.domain();
    let gamma = problem.gamma();
    let b_in = b_in.max(1);
    let mut incumbent = Incumbent::default();

    let mut x = domain.sample_uniform(rng);
    loop {
        let tau = incumbent.value();
        let stop = tau.is_finite().then_some(tau);
        let out = inner_maximise(evaluator, &x, b_in, stop, rng)?;
        if out.is_complete() {
            incumbent.offer(&x, out.estimate, evaluator.ledger().used());
        } else if out.budget_exhausted && out.evaluations_used > 0 {
            incumbent.note_fallback(&x, out.estimate);
        }
        if out.budget_exhausted {
            break;
        }
        let next = largest_empty_hypersphere(evaluator.archive(), incumbent.value(), domain, ga, rng);
        if next.min_distance < gamma {
            break;
        }
        x = next.point;
    }
    Ok(incumbent.finish(evaluator))
}
