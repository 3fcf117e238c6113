//! Budget accounting and the history of every objective evaluation.

use crate::error::EvalError;
use crate::problem::Problem;
use crate::rng::distance_sq;

/// Countdown of objective evaluations still allowed in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetLedger {
    initial: usize,
    remaining: usize,
}

impl BudgetLedger {
    pub fn new(budget: usize) -> Self {
        Self {
            initial: budget,
            remaining: budget,
        }
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn used(&self) -> usize {
        self.initial - self.remaining
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining == 0
    }

    fn consume(&mut self) {
        debug_assert!(self.remaining > 0);
        self.remaining -= 1;
    }
}

/// Append-only record of evaluated points and their objective values.
#[derive(Debug, Clone)]
pub struct HistoryArchive {
    dimension: usize,
    coords: Vec<f64>,
    values: Vec<f64>,
}

impl HistoryArchive {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            coords: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dimension..(k + 1) * self.dimension]
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.coords
            .chunks_exact(self.dimension)
            .zip(self.values.iter().copied())
    }

    fn push(&mut self, x: &[f64], value: f64) {
        debug_assert_eq!(x.len(), self.dimension);
        self.coords.extend_from_slice(x);
        self.values.push(value);
    }

    /// Archived entries within Euclidean distance `radius` of `center`.
    pub fn within<'a>(
        &'a self,
        center: &'a [f64],
        radius: f64,
    ) -> impl Iterator<Item = (&'a [f64], f64)> + 'a {
        let r2 = radius * radius;
        self.iter()
            .filter(move |(p, _)| distance_sq(p, center) <= r2)
    }
}

/// Outcome of a budget-tracked evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    Value(f64),
    /// The ledger was already empty; nothing was evaluated.
    Exhausted,
}

/// Evaluate `x` against the budget: on success the ledger drops by one and
/// `(x, f(x))` is appended to the archive.
///
/// Non-finite inputs and objective failures are rejected without consuming
/// budget.
pub fn evaluate(
    problem: &Problem,
    x: &[f64],
    ledger: &mut BudgetLedger,
    archive: &mut HistoryArchive,
) -> Result<Evaluation, EvalError> {
    if x.len() != problem.dimension() {
        return Err(EvalError::DimensionMismatch {
            expected: problem.dimension(),
            got: x.len(),
        });
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite(i));
    }
    if ledger.is_exhausted() {
        return Ok(Evaluation::Exhausted);
    }
    let value = problem.objective_value(x)?;
    ledger.consume();
    archive.push(x, value);
    Ok(Evaluation::Value(value))
}

/// The archived point of maximum value within `radius` of `center`; the
/// earliest entry wins ties.
pub fn neighborhood_max<'a>(
    archive: &'a HistoryArchive,
    center: &[f64],
    radius: f64,
) -> Option<(&'a [f64], f64)> {
    let r2 = radius * radius;
    let mut best: Option<(&[f64], f64)> = None;
    for (p, v) in archive.iter() {
        if distance_sq(p, center) <= r2 && best.is_none_or(|(_, b)| v > b) {
            best = Some((p, v));
        }
    }
    best
}

/// Per-run evaluation context: the problem plus this run's ledger and archive.
#[derive(Debug, Clone)]
pub struct Evaluator<'p> {
    problem: &'p Problem,
    ledger: BudgetLedger,
    archive: HistoryArchive,
}

impl<'p> Evaluator<'p> {
    pub fn new(problem: &'p Problem, budget: usize) -> Self {
        Self {
            problem,
            ledger: BudgetLedger::new(budget),
            archive: HistoryArchive::new(problem.dimension()),
        }
    }

    pub fn evaluate(&mut self, x: &[f64]) -> Result<Evaluation, EvalError> {
        evaluate(self.problem, x, &mut self.ledger, &mut self.archive)
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }

    pub fn ledger(&self) -> &BudgetLedger {
        &self.ledger
    }

    pub fn archive(&self) -> &HistoryArchive {
        &self.archive
    }

    pub fn into_archive(self) -> HistoryArchive {
        self.archive
    }
}
