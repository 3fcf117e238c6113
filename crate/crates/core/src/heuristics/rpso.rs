//! Robust particle swarm with optional descent-direction velocity and
//! empty-hypersphere relocation.

use rand::Rng;

use crate::archive::{neighborhood_max, Evaluator};
use crate::descent::{dd_velocity_component, DdParams};
use crate::error::EvalError;
use crate::heuristics::{Incumbent, RunResult};
use crate::inner_max::inner_maximise;
use crate::leh::{relocate_if_dormant, LehParams};

/// A point together with its worst-case estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Best {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best: Option<Best>,
    pub dormancy: usize,
    /// Estimate from the inner maximisation at the current position, if it
    /// was evaluated there.
    pub last_estimate: Option<f64>,
}

impl Particle {
    /// Fresh particle at `position` with velocity drawn from `U(0, 0.1)^n`.
    pub fn new<R: Rng + ?Sized>(position: Vec<f64>, rng: &mut R) -> Self {
        let velocity = initial_velocity(position.len(), rng);
        Self {
            position,
            velocity,
            best: None,
            dormancy: 0,
            last_estimate: None,
        }
    }

    /// Back to initialisation state, placed at `position`.
    pub fn reset_at<R: Rng + ?Sized>(&mut self, position: Vec<f64>, rng: &mut R) {
        *self = Self::new(position, rng);
    }
}

fn initial_velocity<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| 0.1 * rng.random::<f64>()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub global_best: Option<Best>,
    pub iteration: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpsoParams {
    pub swarm_size: usize,
    pub c1: f64,
    pub c2: f64,
    pub omega: f64,
    pub b_in: usize,
    pub use_dd: bool,
    pub use_leh: bool,
    pub dd: DdParams,
    pub leh: LehParams,
}

impl Default for RpsoParams {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            c1: 1.5,
            c2: 1.5,
            omega: 0.7,
            b_in: 50,
            use_dd: false,
            use_leh: false,
            dd: DdParams::default(),
            leh: LehParams::default(),
        }
    }
}

/// `omega v + C1 r1 (x* - x) + C2 r2 (x^ - x) + dd` with explicit random
/// vectors. A missing best contributes nothing.
#[allow(clippy::too_many_arguments)]
pub fn velocity_with(
    particle: &Particle,
    global_best: Option<&Best>,
    omega: f64,
    c1: f64,
    c2: f64,
    r1: &[f64],
    r2: &[f64],
    dd_component: &[f64],
) -> Vec<f64> {
    let x = &particle.position;
    let own = particle.best.as_ref().map_or(x.as_slice(), |b| &b.point);
    let social = global_best.map_or(x.as_slice(), |b| &b.point);
    (0..x.len())
        .map(|i| {
            omega * particle.velocity[i]
                + c1 * r1[i] * (own[i] - x[i])
                + c2 * r2[i] * (social[i] - x[i])
                + dd_component[i]
        })
        .collect()
}

/// Draws `r1` then `r2` and applies [`velocity_with`].
pub fn update_velocity<R: Rng + ?Sized>(
    particle: &Particle,
    global_best: Option<&Best>,
    params: &RpsoParams,
    dd_component: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let n = particle.position.len();
    let r1: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let r2: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    velocity_with(
        particle,
        global_best,
        params.omega,
        params.c1,
        params.c2,
        &r1,
        &r2,
        dd_component,
    )
}

/// Run one swarm search until the evaluator's budget is spent.
pub fn run_rpso<R: Rng + ?Sized>(
    evaluator: &mut Evaluator<'_>,
    params: &RpsoParams,
    rng: &mut R,
) -> Result<RunResult, EvalError> {
    let problem = evaluator.problem();
    let domain = problem.domain();
    let gamma = problem.gamma();
    let b_in = params.b_in.max(1);
    let mut incumbent = Incumbent::default();
    let mut swarm = SwarmState {
        particles: Vec::with_capacity(params.swarm_size.max(1)),
        global_best: None,
        iteration: 0,
    };

    'search: loop {
        for j in 0..params.swarm_size.max(1) {
            let mut to_be_evaluated = true;
            if swarm.iteration == 0 {
                let x = domain.sample_uniform(rng);
                swarm.particles.push(Particle::new(x, rng));
            } else {
                let particle = &swarm.particles[j];
                let dd = if params.use_dd {
                    let g = if domain.contains(&particle.position) {
                        particle.last_estimate.or_else(|| {
                            neighborhood_max(evaluator.archive(), &particle.position, gamma)
                                .map(|(_, v)| v)
                        })
                    } else {
                        None
                    };
                    dd_velocity_component(
                        &particle.position,
                        evaluator.archive(),
                        g,
                        &params.dd,
                        domain,
                        gamma,
                        rng,
                    )
                } else {
                    vec![0.0; particle.position.len()]
                };
                let v = update_velocity(particle, swarm.global_best.as_ref(), params, &dd, rng);
                let particle = &mut swarm.particles[j];
                for (x, dv) in particle.position.iter_mut().zip(&v) {
                    *x += dv;
                }
                particle.velocity = v;
                particle.last_estimate = None;
                if params.use_leh {
                    let check = relocate_if_dormant(
                        particle,
                        swarm.global_best.as_ref(),
                        evaluator,
                        &params.leh,
                        rng,
                    )?;
                    if check.exhausted {
                        break 'search;
                    }
                    to_be_evaluated = check.to_be_evaluated;
                } else {
                    to_be_evaluated = domain.contains(&particle.position);
                }
            }
            if !to_be_evaluated {
                continue;
            }

            let particle = &mut swarm.particles[j];
            let tau = if params.use_leh {
                Some(particle.best.as_ref().map_or(f64::INFINITY, |b| b.value))
            } else {
                None
            };
            let out = inner_maximise(evaluator, &particle.position, b_in, tau, rng)?;
            if out.evaluations_used > 0 {
                particle.last_estimate = Some(out.estimate);
            }
            if out.is_complete() {
                let g = out.estimate;
                if particle.best.as_ref().is_none_or(|b| g < b.value) {
                    particle.best = Some(Best {
                        point: particle.position.clone(),
                        value: g,
                    });
                }
                if swarm.global_best.as_ref().is_none_or(|b| g < b.value) {
                    let best = Best {
                        point: particle.position.clone(),
                        value: g,
                    };
                    incumbent.offer(&best.point, g, evaluator.ledger().used());
                    swarm.global_best = Some(best);
                }
            } else if out.budget_exhausted && out.evaluations_used > 0 {
                incumbent.note_fallback(&particle.position, out.estimate);
            }
            if out.budget_exhausted {
                break 'search;
            }
        }
        swarm.iteration += 1;
    }
    Ok(incumbent.finish(evaluator))
}
