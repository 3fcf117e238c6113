//! Problem definition: an objective over all of n-space, a box-shaped
//! feasible region, and the radius of the implementation-uncertainty ball.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, ObjectiveError, Result};

/// A black-box objective `f: R^n -> R`.
///
/// Implementations must be total on the whole space, not just on the box,
/// because uncertainty samples around boundary points fall outside it.
pub trait Objective: Send + Sync {
    fn value(&self, x: &[f64]) -> Result<f64, ObjectiveError>;
}

/// Adapter turning a plain closure into an [`Objective`].
pub struct FnObjective<F>(pub F);

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn value(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        Ok((self.0)(x))
    }
}

/// Axis-aligned box `prod [l_i, u_i]` with `l_i < u_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidProblem("domain has dimension 0".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidProblem(format!(
                "lower bounds have {} entries, upper bounds {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !l.is_finite() || !u.is_finite() || l >= u {
                return Err(Error::InvalidProblem(format!(
                    "dimension {i}: bounds [{l}, {u}] are not a proper interval"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lower, upper]^n`.
    pub fn cube(lower: f64, upper: f64, n: usize) -> Result<Self> {
        Self::new(vec![lower; n], vec![upper; n])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// Boundary counts as inside.
    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dimension());
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    /// Each coordinate independently uniform on `[l_i, u_i]`.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l + rng.random::<f64>() * (u - l))
            .collect()
    }

    /// Componentwise projection onto the box.
    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }
}

/// Free-function form of [`BoxDomain::contains`].
pub fn contains(domain: &BoxDomain, x: &[f64]) -> bool {
    domain.contains(x)
}

/// Free-function form of [`BoxDomain::sample_uniform`].
pub fn sample_uniform_box<R: Rng + ?Sized>(domain: &BoxDomain, rng: &mut R) -> Vec<f64> {
    domain.sample_uniform(rng)
}

/// A min-max robust problem instance: minimise over the box the worst value
/// of the objective within Euclidean distance `gamma`.
#[derive(Clone)]
pub struct Problem {
    objective: Arc<dyn Objective>,
    domain: BoxDomain,
    gamma: f64,
}

impl Problem {
    pub fn new(objective: Arc<dyn Objective>, domain: BoxDomain, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "uncertainty radius must be positive, got {gamma}"
            )));
        }
        Ok(Self {
            objective,
            domain,
            gamma,
        })
    }

    pub fn from_fn<F>(f: F, domain: BoxDomain, gamma: f64) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(Arc::new(FnObjective(f)), domain, gamma)
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Raw objective call; no budget accounting.
    pub fn objective_value(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        self.objective.value(x)
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("domain", &self.domain)
            .field("gamma", &self.gamma)
            .finish_non_exhaustive()
    }
}
