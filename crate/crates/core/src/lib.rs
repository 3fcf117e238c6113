//! Particle swarm and neighbourhood heuristics for min-max robust
//! optimisation under implementation uncertainty.
//!
//! The outer search minimises `g(x) = max_{|dx| <= gamma} f(x + dx)` over a
//! box, treating `f` as a black box with a fixed evaluation budget.

pub mod archive;
pub mod bench;
pub mod descent;
pub mod error;
pub mod heuristics;
pub mod inner_max;
pub mod leh;
pub mod problem;
pub mod rng;
pub mod testbed;
pub mod tuning;

pub use archive::{neighborhood_max, BudgetLedger, Evaluation, Evaluator, HistoryArchive};
pub use heuristics::{run_heuristic, HeuristicKind, HeuristicParams, RunResult};
pub use error::{EvalError, Error, ObjectiveError, Result};
pub use problem::{BoxDomain, FnObjective, Objective, Problem};
pub use rng::{sample_in_ball, RngStream};
pub use testbed::TestFunction;
