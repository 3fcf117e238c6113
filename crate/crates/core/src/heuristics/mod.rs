//! The outer minimisation searches.

pub mod dd;
pub mod leh;
pub mod rpso;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::archive::Evaluator;
use crate::descent::DdParams;
use crate::error::{EvalError, Error};
use crate::leh::LehParams;
use rpso::{Best, RpsoParams};

pub use dd::run_dd_restart;
pub use leh::run_leh_baseline;
pub use rpso::{run_rpso, update_velocity, Particle, SwarmState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeuristicKind {
    Dd,
    Leh,
    Rpso,
    RpsoDd,
    RpsoLeh,
    RpsoLehDd,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 6] = [
        HeuristicKind::Dd,
        HeuristicKind::Leh,
        HeuristicKind::Rpso,
        HeuristicKind::RpsoDd,
        HeuristicKind::RpsoLeh,
        HeuristicKind::RpsoLehDd,
    ];

    pub fn id(self) -> &'static str {
        match self {
            HeuristicKind::Dd => "dd",
            HeuristicKind::Leh => "leh",
            HeuristicKind::Rpso => "rpso",
            HeuristicKind::RpsoDd => "rpso-dd",
            HeuristicKind::RpsoLeh => "rpso-leh",
            HeuristicKind::RpsoLehDd => "rpso-leh-dd",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            HeuristicKind::Dd => "d.d.",
            HeuristicKind::Leh => "LEH",
            HeuristicKind::Rpso => "rPSO",
            HeuristicKind::RpsoDd => "rPSOdd",
            HeuristicKind::RpsoLeh => "rPSOleh",
            HeuristicKind::RpsoLehDd => "rPSOlehdd",
        }
    }

    pub fn uses_swarm(self) -> bool {
        matches!(
            self,
            HeuristicKind::Rpso
                | HeuristicKind::RpsoDd
                | HeuristicKind::RpsoLeh
                | HeuristicKind::RpsoLehDd
        )
    }

    pub fn uses_dd(self) -> bool {
        matches!(
            self,
            HeuristicKind::Dd | HeuristicKind::RpsoDd | HeuristicKind::RpsoLehDd
        )
    }

    pub fn uses_leh(self) -> bool {
        matches!(
            self,
            HeuristicKind::Leh | HeuristicKind::RpsoLeh | HeuristicKind::RpsoLehDd
        )
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for HeuristicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        HeuristicKind::ALL
            .into_iter()
            .find(|h| h.id() == key || h.display_name().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::UnknownHeuristic(s.to_string()))
    }
}

/// Every tunable setting; each heuristic reads the subset it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicParams {
    pub b_in: usize,
    pub swarm_size: usize,
    pub c1: f64,
    pub c2: f64,
    pub omega: f64,
    pub dd: DdParams,
    pub leh: LehParams,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        let swarm = RpsoParams::default();
        Self {
            b_in: swarm.b_in,
            swarm_size: swarm.swarm_size,
            c1: swarm.c1,
            c2: swarm.c2,
            omega: swarm.omega,
            dd: DdParams::default(),
            leh: LehParams::default(),
        }
    }
}

impl HeuristicParams {
    pub const NAMES: [&'static str; 19] = [
        "b_in",
        "swarm_size",
        "c1",
        "c2",
        "omega",
        "c3",
        "sigma_init",
        "sigma_limit",
        "sigma_no",
        "epsilon",
        "min_step",
        "ga_population",
        "ga_generations",
        "ga_tournament",
        "ga_crossover_rate",
        "ga_mutation_rate",
        "ga_mutation_scale",
        "dormancy_limit",
        "placement_limit",
    ];

    /// Set a parameter by name. Integer parameters round to the nearest
    /// non-negative integer.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), Error> {
        if !value.is_finite() {
            return Err(Error::Config(format!("{name} must be finite, got {value}")));
        }
        let int = value.round().max(0.0) as usize;
        match name {
            "b_in" => self.b_in = int.max(1),
            "swarm_size" => self.swarm_size = int.max(1),
            "c1" => self.c1 = value,
            "c2" => self.c2 = value,
            "omega" => self.omega = value,
            "c3" => self.dd.c3 = value,
            "sigma_init" => self.dd.sigma_init = value,
            "sigma_limit" => self.dd.sigma_limit = value,
            "sigma_no" => self.dd.sigma_no = int.max(1),
            "epsilon" => self.dd.epsilon = value,
            "min_step" => self.dd.min_step = value,
            "ga_population" => self.leh.ga.population_size = int.max(2),
            "ga_generations" => self.leh.ga.generations = int,
            "ga_tournament" => self.leh.ga.tournament_size = int.max(1),
            "ga_crossover_rate" => self.leh.ga.crossover_rate = value.clamp(0.0, 1.0),
            "ga_mutation_rate" => self.leh.ga.mutation_rate = value.clamp(0.0, 1.0),
            "ga_mutation_scale" => self.leh.ga.mutation_scale = value,
            "dormancy_limit" => self.leh.dormancy_limit = int,
            "placement_limit" => self.leh.placement_limit = int.max(1),
            _ => return Err(Error::UnknownParameter(name.to_string())),
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "b_in" => self.b_in as f64,
            "swarm_size" => self.swarm_size as f64,
            "c1" => self.c1,
            "c2" => self.c2,
            "omega" => self.omega,
            "c3" => self.dd.c3,
            "sigma_init" => self.dd.sigma_init,
            "sigma_limit" => self.dd.sigma_limit,
            "sigma_no" => self.dd.sigma_no as f64,
            "epsilon" => self.dd.epsilon,
            "min_step" => self.dd.min_step,
            "ga_population" => self.leh.ga.population_size as f64,
            "ga_generations" => self.leh.ga.generations as f64,
            "ga_tournament" => self.leh.ga.tournament_size as f64,
            "ga_crossover_rate" => self.leh.ga.crossover_rate,
            "ga_mutation_rate" => self.leh.ga.mutation_rate,
            "ga_mutation_scale" => self.leh.ga.mutation_scale,
            "dormancy_limit" => self.leh.dormancy_limit as f64,
            "placement_limit" => self.leh.placement_limit as f64,
            _ => return None,
        })
    }

    pub fn rpso(&self, kind: HeuristicKind) -> RpsoParams {
        RpsoParams {
            swarm_size: self.swarm_size,
            c1: self.c1,
            c2: self.c2,
            omega: self.omega,
            b_in: self.b_in,
            use_dd: kind.uses_dd(),
            use_leh: kind.uses_leh(),
            dd: self.dd,
            leh: self.leh,
        }
    }
}

/// Outcome of one heuristic run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub solution: Vec<f64>,
    pub heuristic_estimate: f64,
    pub evaluations_used: usize,
    /// `(evaluations used, incumbent estimate)` at each improvement.
    pub trace: Vec<(usize, f64)>,
}

/// Run `kind` on the evaluator's problem until its budget is spent.
pub fn run_heuristic<R: Rng + ?Sized>(
    kind: HeuristicKind,
    evaluator: &mut Evaluator<'_>,
    params: &HeuristicParams,
    rng: &mut R,
) -> Result<RunResult, EvalError> {
    match kind {
        HeuristicKind::Dd => run_dd_restart(evaluator, &params.dd, params.b_in, rng),
        HeuristicKind::Leh => run_leh_baseline(evaluator, &params.leh.ga, params.b_in, rng),
        _ => run_rpso(evaluator, &params.rpso(kind), rng),
    }
}

/// Best robust point found so far, with its improvement trace.
#[derive(Debug, Default)]
pub(crate) struct Incumbent {
    best: Option<Best>,
    fallback: Option<Best>,
    trace: Vec<(usize, f64)>,
}

impl Incumbent {
    pub(crate) fn value(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.value)
    }

    /// Strict improvement only; ties keep the older point.
    pub(crate) fn offer(&mut self, point: &[f64], value: f64, used: usize) -> bool {
        if value < self.value() {
            self.best = Some(Best {
                point: point.to_vec(),
                value,
            });
            self.trace.push((used, value));
            true
        } else {
            false
        }
    }

    /// Remember the first partially evaluated point, used only if the
    /// budget runs out before any estimate completes.
    pub(crate) fn note_fallback(&mut self, point: &[f64], value: f64) {
        if self.fallback.is_none() {
            self.fallback = Some(Best {
                point: point.to_vec(),
                value,
            });
        }
    }

    pub(crate) fn finish(self, evaluator: &Evaluator<'_>) -> RunResult {
        let domain = evaluator.problem().domain();
        let best = self.best.or(self.fallback).unwrap_or_else(|| Best {
            point: (0..domain.dimension())
                .map(|i| domain.lower()[i] + 0.5 * domain.width(i))
                .collect(),
            value: f64::NAN,
        });
        RunResult {
            solution: best.point,
            heuristic_estimate: best.value,
            evaluations_used: evaluator.ledger().used(),
            trace: self.trace,
        }
    }
}
