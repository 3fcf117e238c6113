//! Experiment harness: worst-case re-estimation, run matrices, result
//! files and statistics.

pub mod config;
pub mod experiment;
pub mod external;
pub mod records;
pub mod report;
pub mod stats;

use rand::Rng;

use crate::error::ObjectiveError;
use crate::problem::Problem;
use crate::rng::sample_in_ball;

pub use config::{ExperimentConfig, ExternalSpec, InstanceSpec, ParamTable};
pub use experiment::{execute_run, run_experiment, run_seed, ExperimentOutput};
pub use external::ExternalObjective;
pub use records::{read_records, read_traces, write_records, RecordWriter, RunRecord, TraceRecord};
pub use report::{incumbent_series, summarize, StatsOptions, StatsReport};
pub use stats::{best_equivalent, rank_sum_normal, rank_sum_test, wilcoxon_rank_sum};

/// Independent worst-case estimate at `solution`: the maximum of `f` over
/// the solution and `sample_count` uniform points of its uncertainty ball.
/// Spends no run budget.
///
/// # Panics
/// If `sample_count` is zero.
pub fn post_process<R: Rng + ?Sized>(
    problem: &Problem,
    solution: &[f64],
    sample_count: usize,
    rng: &mut R,
) -> Result<f64, ObjectiveError> {
    assert!(sample_count >= 1, "post-processing needs at least one sample");
    let mut worst = problem.objective_value(solution)?;
    for _ in 0..sample_count {
        let p = sample_in_ball(solution, problem.gamma(), rng);
        worst = worst.max(problem.objective_value(&p)?);
    }
    Ok(worst)
}
