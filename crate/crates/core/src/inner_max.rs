//! Worst-case estimation in the uncertainty ball by uniform sampling.

use rand::Rng;

use crate::archive::{Evaluation, Evaluator};
use crate::error::EvalError;
use crate::rng::sample_in_ball;

/// Result of one inner maximisation.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerMaxOutcome {
    /// Maximum value seen during this call; `-inf` if nothing was evaluated.
    pub estimate: f64,
    pub argmax: Vec<f64>,
    pub evaluations_used: usize,
    /// The running maximum exceeded the stopping threshold.
    pub stopped_early: bool,
    /// The global budget ran out; the caller must end its search.
    pub budget_exhausted: bool,
}

impl InnerMaxOutcome {
    /// A full estimate that the outer search may use as `g~(x_c)`.
    pub fn is_complete(&self) -> bool {
        !self.stopped_early && !self.budget_exhausted
    }
}

/// Estimate the worst case around `center`: evaluate the center, then up to
/// `b_in - 1` uniform points of the uncertainty ball.
///
/// With `stop_above = Some(tau)` the call returns as soon as the running
/// maximum strictly exceeds `tau`. When the ledger reaches zero the outcome
/// carries `budget_exhausted`, even if the final sample completed the loop.
pub fn inner_maximise<R: Rng + ?Sized>(
    evaluator: &mut Evaluator<'_>,
    center: &[f64],
    b_in: usize,
    stop_above: Option<f64>,
    rng: &mut R,
) -> Result<InnerMaxOutcome, EvalError> {
    let gamma = evaluator.problem().gamma();
    let mut out = InnerMaxOutcome {
        estimate: f64::NEG_INFINITY,
        argmax: center.to_vec(),
        evaluations_used: 0,
        stopped_early: false,
        budget_exhausted: false,
    };

    let mut candidate = center.to_vec();
    for i in 0..b_in.max(1) {
        if i > 0 {
            candidate = sample_in_ball(center, gamma, rng);
        }
        let value = match evaluator.evaluate(&candidate)? {
            Evaluation::Value(v) => v,
            Evaluation::Exhausted => {
                out.budget_exhausted = true;
                return Ok(out);
            }
        };
        out.evaluations_used += 1;
        if value > out.estimate {
            out.estimate = value;
            out.argmax.clone_from(&candidate);
        }
        if stop_above.is_some_and(|tau| out.estimate > tau) {
            out.stopped_early = true;
            return Ok(out);
        }
        if evaluator.ledger().is_exhausted() {
            out.budget_exhausted = true;
            return Ok(out);
        }
    }
    Ok(out)
}
