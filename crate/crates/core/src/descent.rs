//! Descent directions away from high cost points.
//!
//! The direction problem `min_{|d|<=1} max_h d.u_h` (with `u_h` the unit
//! vectors from the candidate to each high cost point) is solved through its
//! dual: the optimum equals `-min_{c in conv{u_h}} |c|`, attained at
//! `d = -c/|c|`. The dual is a minimum-norm-point problem, solved here with
//! Wolfe's algorithm.

use rand::Rng;

use crate::archive::HistoryArchive;
use crate::problem::BoxDomain;
use crate::rng::{distance, distance_sq};

/// Archived points near `x` whose value is within `sigma` of the estimate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HighCostSet {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub threshold: f64,
}

impl HighCostSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `H_sigma(x)`: archived points within `gamma` of `x` with value
/// `>= g_estimate - sigma`.
pub fn high_cost_set(
    archive: &HistoryArchive,
    x: &[f64],
    gamma: f64,
    sigma: f64,
    g_estimate: f64,
) -> HighCostSet {
    let threshold = g_estimate - sigma;
    let mut set = HighCostSet {
        threshold,
        ..Default::default()
    };
    for (p, v) in archive.within(x, gamma) {
        if v >= threshold {
            set.points.push(p.to_vec());
            set.values.push(v);
        }
    }
    set
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionResult {
    /// Unit vector when `found`, zero otherwise.
    pub direction: Vec<f64>,
    /// Optimal value of the direction problem, `-|c|`.
    pub beta: f64,
    pub found: bool,
}

/// Distance below which a high cost point is treated as coincident with the
/// candidate and dropped.
pub const COINCIDENT_TOL: f64 = 1e-12;

const MNP_TOL: f64 = 1e-12;

/// Point of minimum Euclidean norm in the convex hull of `vectors`.
///
/// # Panics
/// If `vectors` is empty.
pub fn min_norm_point(vectors: &[Vec<f64>]) -> Vec<f64> {
    assert!(!vectors.is_empty(), "min_norm_point needs at least one vector");
    let dim = vectors[0].len();
    let m = vectors.len();
    let cap = (10 * m * dim).max(100);

    let norms: Vec<f64> = vectors.iter().map(|v| dot(v, v)).collect();
    let max_sq = norms.iter().copied().fold(0.0, f64::max);
    let first = argmin(&norms);

    let mut support = vec![first];
    let mut weights = vec![1.0];
    let mut x = vectors[first].clone();

    for _ in 0..cap {
        let xx = dot(&x, &x);
        let (j, xpj) = vectors
            .iter()
            .enumerate()
            .map(|(k, v)| (k, dot(&x, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if xx - xpj <= MNP_TOL * max_sq.max(f64::MIN_POSITIVE) || support.contains(&j) {
            break;
        }
        support.push(j);
        weights.push(0.0);

        // minor cycles
        loop {
            let Some(mu) = affine_min_norm(vectors, &support) else {
                // numerically dependent support; keep the previous iterate
                support.pop();
                weights.pop();
                return combine(vectors, &support, &weights, dim);
            };
            if mu.iter().all(|&v| v > MNP_TOL) {
                weights = mu;
                break;
            }
            let mut theta = 1.0_f64;
            let mut leaving = 0;
            for (i, (&w, &u)) in weights.iter().zip(&mu).enumerate() {
                if u <= MNP_TOL && w - u > 0.0 {
                    let t = w / (w - u);
                    if t < theta {
                        theta = t;
                        leaving = i;
                    }
                }
            }
            for (w, u) in weights.iter_mut().zip(&mu) {
                *w = (1.0 - theta) * *w + theta * u;
            }
            weights[leaving] = 0.0;
            let mut k = 0;
            support.retain(|_| {
                let keep = weights[k] > MNP_TOL;
                k += 1;
                keep
            });
            weights.retain(|&w| w > MNP_TOL);
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            if support.len() == 1 {
                weights = vec![1.0];
                break;
            }
        }
        x = combine(vectors, &support, &weights, dim);
    }
    x
}

/// Minimum-norm point of the affine hull of the support, as barycentric
/// weights. `None` when the support is (numerically) affinely dependent.
fn affine_min_norm(vectors: &[Vec<f64>], support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len();
    // bordered KKT system [G 1; 1^T 0] [mu; nu] = [0; 1]
    let size = k + 1;
    let mut a = vec![0.0; size * size];
    let mut b = vec![0.0; size];
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[r * size + c] = dot(&vectors[i], &vectors[j]);
        }
        a[r * size + k] = 1.0;
        a[k * size + r] = 1.0;
    }
    b[k] = 1.0;
    let sol = solve_dense(&mut a, &mut b, size)?;
    Some(sol[..k].to_vec())
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))?;
        if a[pivot * n + col].abs() <= 1e-13 * scale {
            return None;
        }
        if pivot != col {
            for c in 0..n {
                a.swap(pivot * n + c, col * n + c);
            }
            b.swap(pivot, col);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            if f != 0.0 {
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r * n + c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn combine(vectors: &[Vec<f64>], support: &[usize], weights: &[f64], dim: usize) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    for (&i, &w) in support.iter().zip(weights) {
        for (xi, vi) in x.iter_mut().zip(&vectors[i]) {
            *xi += w * vi;
        }
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Direction pointing optimally away from every high cost point.
///
/// Points within [`COINCIDENT_TOL`] of `x` are ignored; if none remain the
/// result is not found.
pub fn solve_direction(x: &[f64], hcps: &HighCostSet, epsilon: f64) -> DirectionResult {
    let units: Vec<Vec<f64>> = hcps
        .points
        .iter()
        .filter_map(|h| {
            let r = distance(h, x);
            (r >= COINCIDENT_TOL).then(|| h.iter().zip(x).map(|(hi, xi)| (hi - xi) / r).collect())
        })
        .collect();
    let not_found = |beta| DirectionResult {
        direction: vec![0.0; x.len()],
        beta,
        found: false,
    };
    if units.is_empty() {
        return not_found(0.0);
    }
    let c = min_norm_point(&units);
    let norm = dot(&c, &c).sqrt();
    if norm >= epsilon {
        DirectionResult {
            direction: c.iter().map(|v| -v / norm).collect(),
            beta: -norm,
            found: true,
        }
    } else {
        not_found(-norm)
    }
}

/// Smallest step along `d` that leaves every high cost point on or outside
/// the uncertainty sphere of `x + rho d`.
///
/// Each point contributes the larger root of `|h - x - rho d| = gamma`;
/// a negative discriminant (rounding at distance ~gamma) is clamped to 0.
pub fn step_size(x: &[f64], d: &[f64], hcps: &HighCostSet, gamma: f64) -> f64 {
    hcps.points
        .iter()
        .map(|h| {
            let diff: Vec<f64> = h.iter().zip(x).map(|(hi, xi)| hi - xi).collect();
            let a = dot(d, &diff);
            let disc = (a * a - dot(&diff, &diff) + gamma * gamma).max(0.0);
            a + disc.sqrt()
        })
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0)
}

/// Parameters of the descent-direction component.
///
/// `sigma_init` and `sigma_limit` are fractions of the local value spread
/// (estimate minus the lowest archived value in the neighbourhood), so one
/// setting transfers across functions of different scale. `min_step` is a
/// fraction of `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdParams {
    pub sigma_init: f64,
    pub sigma_limit: f64,
    pub sigma_no: usize,
    pub epsilon: f64,
    pub c3: f64,
    pub min_step: f64,
}

impl Default for DdParams {
    fn default() -> Self {
        Self {
            sigma_init: 0.1,
            sigma_limit: 1e-4,
            sigma_no: 3,
            epsilon: 1e-6,
            c3: 1.0,
            min_step: 0.01,
        }
    }
}

/// An accepted descent step.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentStep {
    pub direction: Vec<f64>,
    pub rho: f64,
    pub beta: f64,
    pub sigma: f64,
    pub hcps: HighCostSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentSearch {
    pub step: Option<DescentStep>,
    /// Number of direction solves performed (at most `sigma_no + 1`).
    pub attempts: usize,
}

/// Look for a descent step at `x`, lowering sigma in `sigma_no` equal
/// decrements from its initial value to its limit whenever no direction
/// (or only a step shorter than `min_step * gamma`) exists.
pub fn find_descent_step(
    archive: &HistoryArchive,
    x: &[f64],
    g_estimate: f64,
    params: &DdParams,
    gamma: f64,
) -> DescentSearch {
    let neighbourhood: Vec<(&[f64], f64)> = archive.within(x, gamma).collect();
    let mut search = DescentSearch {
        step: None,
        attempts: 0,
    };
    if neighbourhood.is_empty() {
        return search;
    }
    let low = neighbourhood
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    let spread = (g_estimate - low).max(0.0);
    let sigma_hi = params.sigma_init * spread;
    let sigma_lo = params.sigma_limit.min(params.sigma_init) * spread;
    let reductions = params.sigma_no;
    let decrement = if reductions == 0 {
        0.0
    } else {
        (sigma_hi - sigma_lo) / reductions as f64
    };

    for k in 0..=reductions {
        let sigma = if k == reductions && k > 0 {
            sigma_lo
        } else {
            sigma_hi - k as f64 * decrement
        };
        let threshold = g_estimate - sigma;
        let mut hcps = HighCostSet {
            threshold,
            ..Default::default()
        };
        for (p, v) in &neighbourhood {
            if *v >= threshold {
                hcps.points.push(p.to_vec());
                hcps.values.push(*v);
            }
        }
        search.attempts += 1;
        if !hcps.is_empty() {
            let dir = solve_direction(x, &hcps, params.epsilon);
            if dir.found {
                let rho = step_size(x, &dir.direction, &hcps, gamma);
                if rho >= params.min_step * gamma {
                    search.step = Some(DescentStep {
                        direction: dir.direction,
                        rho,
                        beta: dir.beta,
                        sigma,
                        hcps,
                    });
                    return search;
                }
            }
        }
        if decrement == 0.0 {
            break;
        }
    }
    search
}

/// The unscaled descent vector at `x_c`: `rho d` for a feasible point with a
/// descent step, the zero vector if none is found, and for an infeasible
/// point a `±gamma` push back into the box along each violated coordinate.
pub fn dd_vector(
    x_c: &[f64],
    archive: &HistoryArchive,
    g_estimate: Option<f64>,
    params: &DdParams,
    domain: &BoxDomain,
    gamma: f64,
) -> Vec<f64> {
    let n = x_c.len();
    if domain.contains(x_c) {
        let Some(g) = g_estimate else {
            return vec![0.0; n];
        };
        match find_descent_step(archive, x_c, g, params, gamma).step {
            Some(step) => step.direction.iter().map(|d| step.rho * d).collect(),
            None => vec![0.0; n],
        }
    } else {
        x_c.iter()
            .enumerate()
            .map(|(i, &v)| {
                if v <= domain.lower()[i] {
                    gamma
                } else if v >= domain.upper()[i] {
                    -gamma
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// `C3 r3 ∘ dd` with `r3 ~ U(0,1)^n`. With `C3 == 0` nothing is computed
/// and no random numbers are drawn.
pub fn dd_velocity_component<R: Rng + ?Sized>(
    x_c: &[f64],
    archive: &HistoryArchive,
    g_estimate: Option<f64>,
    params: &DdParams,
    domain: &BoxDomain,
    gamma: f64,
    rng: &mut R,
) -> Vec<f64> {
    if params.c3 == 0.0 {
        return vec![0.0; x_c.len()];
    }
    let raw = dd_vector(x_c, archive, g_estimate, params, domain, gamma);
    raw.into_iter()
        .map(|v| params.c3 * rng.random::<f64>() * v)
        .collect()
}

/// True if some archived point outside the current neighbourhood of `x`,
/// with value at least `threshold`, lies strictly inside the uncertainty
/// ball of `target`.
pub(crate) fn step_blocked(
    archive: &HistoryArchive,
    x: &[f64],
    target: &[f64],
    gamma: f64,
    threshold: f64,
) -> bool {
    let g2 = gamma * gamma;
    let inner = (gamma - COINCIDENT_TOL).max(0.0);
    archive.iter().any(|(p, v)| {
        v >= threshold && distance_sq(p, x) > g2 && distance_sq(p, target) < inner * inner
    })
}
