//! Largest empty hypersphere search and dormant particle relocation.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::archive::{neighborhood_max, Evaluation, Evaluator, HistoryArchive};
use crate::error::EvalError;
use crate::heuristics::rpso::{Best, Particle};
use crate::problem::BoxDomain;

/// Real-coded GA settings for the empty hypersphere search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LehGaParams {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Standard deviation of a mutation, as a fraction of the box width.
    pub mutation_scale: f64,
}

impl Default for LehGaParams {
    fn default() -> Self {
        Self {
            population_size: 75,
            generations: 15,
            tournament_size: 3,
            crossover_rate: 0.9,
            mutation_rate: 0.5,
            mutation_scale: 0.3,
        }
    }
}

/// Relocation settings for the swarm variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LehParams {
    pub ga: LehGaParams,
    pub dormancy_limit: usize,
    pub placement_limit: usize,
}

impl Default for LehParams {
    fn default() -> Self {
        Self {
            ga: LehGaParams::default(),
            dormancy_limit: 2,
            placement_limit: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LehOutcome {
    pub point: Vec<f64>,
    /// Distance from `point` to the nearest high cost point; `+inf` if
    /// there are none.
    pub min_distance: f64,
    /// Best min-distance after each generation (initial population first).
    pub history: Vec<f64>,
}

/// Static k-d tree over the high cost points, stored implicitly: the
/// median of every index range is its split point.
struct KdPoints {
    coords: Vec<f64>,
    n: usize,
}

impl KdPoints {
    fn new(flat: Vec<f64>, n: usize) -> Self {
        let mut rows: Vec<&[f64]> = flat.chunks_exact(n).collect();
        let len = rows.len();
        Self::build(&mut rows, 0, n);
        let coords = rows.concat();
        debug_assert_eq!(coords.len(), len * n);
        KdPoints { coords, n }
    }

    fn build(rows: &mut [&[f64]], depth: usize, n: usize) {
        if rows.len() <= 1 {
            return;
        }
        let axis = depth % n;
        let mid = rows.len() / 2;
        rows.select_nth_unstable_by(mid, |a, b| a[axis].total_cmp(&b[axis]));
        let (left, right) = rows.split_at_mut(mid);
        Self::build(left, depth + 1, n);
        Self::build(&mut right[1..], depth + 1, n);
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    fn min_sq_distance(&self, p: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        self.search(p, 0, self.coords.len() / self.n, 0, &mut best);
        best
    }

    fn search(&self, p: &[f64], lo: usize, hi: usize, depth: usize, best: &mut f64) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let h = self.row(mid);
        let mut d = 0.0;
        for (a, b) in h.iter().zip(p) {
            d += (a - b) * (a - b);
            if d >= *best {
                break;
            }
        }
        if d < *best {
            *best = d;
        }
        let axis = depth % self.n;
        let gap = p[axis] - h[axis];
        let (near, far) = if gap < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(p, near.0, near.1, depth + 1, best);
        if gap * gap < *best {
            self.search(p, far.0, far.1, depth + 1, best);
        }
    }
}

/// Approximately the point of `domain` furthest from every archived point
/// with value above `threshold`.
pub fn largest_empty_hypersphere<R: Rng + ?Sized>(
    archive: &HistoryArchive,
    threshold: f64,
    domain: &BoxDomain,
    ga: &LehGaParams,
    rng: &mut R,
) -> LehOutcome {
    let n = domain.dimension();
    let hcps: Vec<f64> = archive
        .iter()
        .filter(|(_, v)| *v > threshold)
        .flat_map(|(p, _)| p.iter().copied())
        .collect();
    if hcps.is_empty() {
        return LehOutcome {
            point: domain.sample_uniform(rng),
            min_distance: f64::INFINITY,
            history: Vec::new(),
        };
    }
    let nearest = KdPoints::new(hcps, n);
    let fitness = |p: &[f64]| nearest.min_sq_distance(p);

    let size = ga.population_size.max(2);
    let mut pop: Vec<Vec<f64>> = (0..size).map(|_| domain.sample_uniform(rng)).collect();
    let mut fit: Vec<f64> = pop.iter().map(|p| fitness(p)).collect();
    let mut history = Vec::with_capacity(ga.generations + 1);
    let mut elite = argmax(&fit);
    history.push(fit[elite].sqrt());

    let sigmas: Vec<f64> = (0..n)
        .map(|i| (ga.mutation_scale * domain.width(i)).max(f64::MIN_POSITIVE))
        .collect();
    for _ in 0..ga.generations {
        let mut next = Vec::with_capacity(size);
        next.push(pop[elite].clone());
        while next.len() < size {
            let a = &pop[tournament(&fit, ga.tournament_size, rng)];
            let b = &pop[tournament(&fit, ga.tournament_size, rng)];
            let mut child: Vec<f64> = if rng.random::<f64>() < ga.crossover_rate {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| {
                        let u = rng.random_range(-0.25..1.25);
                        x + u * (y - x)
                    })
                    .collect()
            } else {
                a.clone()
            };
            for (i, c) in child.iter_mut().enumerate() {
                if rng.random::<f64>() < ga.mutation_rate {
                    let noise = Normal::new(0.0, sigmas[i]).expect("positive sigma");
                    *c += noise.sample(rng);
                }
            }
            domain.clamp(&mut child);
            next.push(child);
        }
        pop = next;
        fit = pop.iter().map(|p| fitness(p)).collect();
        elite = argmax(&fit);
        history.push(fit[elite].sqrt());
    }
    LehOutcome {
        point: pop.swap_remove(elite),
        min_distance: fit[elite].sqrt(),
        history,
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn tournament<R: Rng + ?Sized>(fit: &[f64], size: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..fit.len());
    for _ in 1..size.max(1) {
        let c = rng.random_range(0..fit.len());
        if fit[c] > fit[best] {
            best = c;
        }
    }
    best
}

/// What the dormancy check decided for one particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DormancyCheck {
    pub to_be_evaluated: bool,
    pub relocated: bool,
    /// Single-point evaluations spent placing a relocated particle.
    pub evaluations: usize,
    /// The budget ran out during placement.
    pub exhausted: bool,
}

/// Dormancy test and relocation for a particle already moved to its
/// candidate position.
///
/// A particle that is infeasible, or whose archive neighbourhood already
/// holds a value above its personal best, is not evaluated and its dormancy
/// count grows. Past the limit it is re-initialised at an empty hypersphere
/// centre chosen against the global best threshold; each placement attempt
/// costs one evaluation and the first point below the threshold is kept.
pub fn relocate_if_dormant<R: Rng + ?Sized>(
    particle: &mut Particle,
    global_best: Option<&Best>,
    evaluator: &mut Evaluator<'_>,
    params: &LehParams,
    rng: &mut R,
) -> Result<DormancyCheck, EvalError> {
    let problem = evaluator.problem();
    let gamma = problem.gamma();
    let mut check = DormancyCheck {
        to_be_evaluated: true,
        relocated: false,
        evaluations: 0,
        exhausted: false,
    };
    let feasible = problem.domain().contains(&particle.position);
    let dominated = feasible
        && particle.best.as_ref().is_some_and(|b| {
            neighborhood_max(evaluator.archive(), &particle.position, gamma)
                .is_some_and(|(_, v)| v > b.value)
        });
    if !feasible || dominated {
        check.to_be_evaluated = false;
        particle.dormancy += 1;
    }
    if particle.dormancy <= params.dormancy_limit {
        return Ok(check);
    }

    let tau = global_best.map_or(f64::INFINITY, |b| b.value);
    let mut point = None;
    for _ in 0..params.placement_limit.max(1) {
        let p = largest_empty_hypersphere(
            evaluator.archive(),
            tau,
            problem.domain(),
            &params.ga,
            rng,
        )
        .point;
        match evaluator.evaluate(&p)? {
            Evaluation::Exhausted => {
                check.exhausted = true;
                break;
            }
            Evaluation::Value(v) => {
                check.evaluations += 1;
                point = Some(p);
                if v < tau {
                    break;
                }
            }
        }
    }
    if evaluator.ledger().is_exhausted() {
        check.exhausted = true;
    }
    if let Some(p) = point {
        particle.reset_at(p, rng);
        check.relocated = true;
        check.to_be_evaluated = true;
    }
    Ok(check)
}
