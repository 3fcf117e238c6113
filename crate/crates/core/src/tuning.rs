//! Evolutionary parameter tuning by average rank over a set of instances.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::bench::experiment::execute_run;
use crate::bench::{InstanceSpec, ParamTable};
use crate::error::{Error, Result};
use crate::heuristics::{HeuristicKind, HeuristicParams};
use crate::rng::{derive_seed, RngStream};
use crate::testbed::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneScale {
    Linear,
    Log,
    Integer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gene {
    pub name: &'static str,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub scale: GeneScale,
}

impl Gene {
    fn to_unit(&self, v: f64) -> f64 {
        match self.scale {
            GeneScale::Log => (v.ln() - self.lower.ln()) / (self.upper.ln() - self.lower.ln()),
            _ => (v - self.lower) / (self.upper - self.lower),
        }
    }

    fn from_unit(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let v = match self.scale {
            GeneScale::Log => (self.lower.ln() + u * (self.upper.ln() - self.lower.ln())).exp(),
            _ => self.lower + u * (self.upper - self.lower),
        };
        let v = v.clamp(self.lower, self.upper);
        if self.scale == GeneScale::Integer {
            v.round()
        } else {
            v
        }
    }
}

/// Tuned subset of a heuristic's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGenome {
    pub genes: Vec<Gene>,
}

fn gene(name: &'static str, lower: f64, upper: f64, scale: GeneScale) -> Gene {
    Gene {
        name,
        value: lower,
        lower,
        upper,
        scale,
    }
}

impl ParamGenome {
    /// Genes tuned for `kind`, initialised from `base` (clipped to range).
    pub fn for_heuristic(kind: HeuristicKind, base: &HeuristicParams) -> Self {
        use GeneScale::*;
        let mut genes = vec![gene("b_in", 5.0, 200.0, Integer)];
        if kind.uses_swarm() {
            genes.extend([
                gene("swarm_size", 2.0, 60.0, Integer),
                gene("c1", 0.0, 3.0, Linear),
                gene("c2", 0.0, 3.0, Linear),
                gene("omega", 0.0, 1.2, Linear),
            ]);
        }
        if kind.uses_dd() {
            genes.extend([
                gene("sigma_init", 1e-3, 1.0, Log),
                gene("sigma_limit", 1e-6, 1e-2, Log),
                gene("min_step", 1e-4, 0.5, Log),
            ]);
            if kind.uses_swarm() {
                genes.push(gene("c3", 0.0, 3.0, Linear));
            }
        }
        if kind.uses_leh() {
            genes.extend([
                gene("ga_population", 4.0, 60.0, Integer),
                gene("ga_generations", 2.0, 60.0, Integer),
                gene("ga_crossover_rate", 0.0, 1.0, Linear),
                gene("ga_mutation_rate", 0.0, 1.0, Linear),
                gene("ga_mutation_scale", 0.005, 0.5, Log),
            ]);
            if kind.uses_swarm() {
                genes.push(gene("dormancy_limit", 0.0, 10.0, Integer));
            }
        }
        for g in &mut genes {
            let v = base.get(g.name).expect("tuned names are parameters");
            g.value = v.clamp(g.lower, g.upper);
            if g.scale == Integer {
                g.value = g.value.round();
            }
        }
        Self { genes }
    }

    /// `base` with every gene written over it.
    pub fn apply(&self, base: &HeuristicParams) -> HeuristicParams {
        let mut p = *base;
        for g in &self.genes {
            p.set(g.name, g.value).expect("tuned names are parameters");
        }
        p
    }

    fn randomised<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut out = self.clone();
        for g in &mut out.genes {
            g.value = g.from_unit(rng.random());
        }
        out
    }

    fn key(&self) -> Vec<u64> {
        self.genes.iter().map(|g| g.value.to_bits()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningConfig {
    pub heuristic: HeuristicKind,
    pub dimension: usize,
    pub instances: Vec<TestFunction>,
    pub samples: usize,
    pub population: usize,
    pub generations: usize,
    pub budget: usize,
    pub post_samples: usize,
    pub seed: u64,
    pub base: HeuristicParams,
}

/// Instances whose robust optimum sits away from the nominal one.
pub const DEFAULT_TUNING_SET: [TestFunction; 4] = [
    TestFunction::MultipeakF1,
    TestFunction::BrankesMultipeak,
    TestFunction::Pickelhaube,
    TestFunction::Sawtooth,
];

impl TuningConfig {
    pub fn new(heuristic: HeuristicKind, dimension: usize) -> Self {
        Self {
            heuristic,
            dimension,
            instances: DEFAULT_TUNING_SET.to_vec(),
            samples: 5,
            population: 12,
            generations: 10,
            budget: 5000,
            post_samples: 10_000,
            seed: 1,
            base: HeuristicParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationLog {
    pub generation: usize,
    pub best_utility: f64,
    pub mean_utility: f64,
    pub best: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningOutcome {
    pub best: ParamGenome,
    pub utility: f64,
    pub params: HeuristicParams,
    /// Utilities of the final population, in population order.
    pub final_utilities: Vec<f64>,
    pub log: Vec<GenerationLog>,
}

impl TuningOutcome {
    pub fn params_table(&self, kind: HeuristicKind, dimension: usize) -> ParamTable {
        let mut t = ParamTable::default();
        t.insert(kind, dimension, self.params);
        t
    }
}

/// Average rank across instances of each genome's per-instance mean
/// (rank 1 is best, ties share the average rank, NaN ranks last).
pub fn rank_utilities(means: &[Vec<f64>]) -> Vec<f64> {
    let pop = means.len();
    if pop == 0 {
        return Vec::new();
    }
    let instances = means[0].len();
    let mut total = vec![0.0; pop];
    for k in 0..instances {
        let key = |g: usize| {
            let v = means[g][k];
            if v.is_nan() { f64::INFINITY } else { v }
        };
        let mut order: Vec<usize> = (0..pop).collect();
        order.sort_by(|&a, &b| key(a).total_cmp(&key(b)));
        let mut i = 0;
        while i < pop {
            let mut j = i + 1;
            while j < pop && key(order[j]) == key(order[i]) {
                j += 1;
            }
            let rank = (i + j + 1) as f64 / 2.0;
            for &g in &order[i..j] {
                total[g] += rank;
            }
            i = j;
        }
    }
    total.iter().map(|t| t / instances.max(1) as f64).collect()
}

/// Run the tuner with real heuristic runs scored by post-processed worst
/// case.
pub fn tune(config: &TuningConfig) -> Result<TuningOutcome> {
    for f in &config.instances {
        f.check_dimension(config.dimension)?;
    }
    let instances: Vec<InstanceSpec> = config
        .instances
        .iter()
        .map(|&f| InstanceSpec::Builtin(f, config.dimension))
        .collect();
    tune_with(config, |params, instance, seed| {
        let (record, _) = execute_run(
            &instances[instance],
            config.heuristic,
            params,
            config.budget,
            config.post_samples,
            seed,
        );
        record.worst_case
    })
}

/// The tuner over an arbitrary scorer `score(params, instance index, seed)`
/// where lower is better and NaN marks a failed run.
pub fn tune_with<F>(config: &TuningConfig, score: F) -> Result<TuningOutcome>
where
    F: Fn(&HeuristicParams, usize, u64) -> f64 + Sync,
{
    if config.instances.is_empty() {
        return Err(Error::Config("tuning needs at least one instance".into()));
    }
    if config.samples == 0 || config.population == 0 {
        return Err(Error::Config("tuning samples and population must be positive".into()));
    }
    let mut rng = RngStream::new(derive_seed(config.seed, 0x7475_6e65));
    let seed_of = |inst: usize, sample: usize| derive_seed(derive_seed(config.seed, inst as u64), sample as u64);
    let base = ParamGenome::for_heuristic(config.heuristic, &config.base);
    let mut population: Vec<ParamGenome> = std::iter::once(base.clone())
        .chain((1..config.population).map(|_| base.randomised(&mut rng)))
        .collect();
    let mut cache: HashMap<Vec<u64>, Vec<f64>> = HashMap::new();
    let mut log = Vec::new();

    let evaluate = |population: &[ParamGenome], cache: &mut HashMap<Vec<u64>, Vec<f64>>| -> Vec<f64> {
        let todo: Vec<&ParamGenome> = population
            .iter()
            .filter(|g| !cache.contains_key(&g.key()))
            .collect();
        let jobs: Vec<(usize, usize, usize)> = (0..todo.len())
            .flat_map(|g| {
                (0..config.instances.len())
                    .flat_map(move |i| (0..config.samples).map(move |s| (g, i, s)))
            })
            .collect();
        let scores: Vec<f64> = jobs
            .par_iter()
            .map(|&(g, i, s)| score(&todo[g].apply(&config.base), i, seed_of(i, s)))
            .collect();
        for (g, genome) in todo.iter().enumerate() {
            let means = (0..config.instances.len())
                .map(|i| {
                    let start = (g * config.instances.len() + i) * config.samples;
                    let ok: Vec<f64> = scores[start..start + config.samples]
                        .iter()
                        .copied()
                        .filter(|v| !v.is_nan())
                        .collect();
                    if ok.is_empty() {
                        f64::NAN
                    } else {
                        ok.iter().sum::<f64>() / ok.len() as f64
                    }
                })
                .collect();
            cache.insert(genome.key(), means);
        }
        let means: Vec<Vec<f64>> = population.iter().map(|g| cache[&g.key()].clone()).collect();
        rank_utilities(&means)
    };

    let mut utilities = evaluate(&population, &mut cache);
    let generations = if population.len() < 2 { 0 } else { config.generations };
    for generation in 0..=generations {
        let elite = argmin(&utilities);
        log.push(GenerationLog {
            generation,
            best_utility: utilities[elite],
            mean_utility: utilities.iter().sum::<f64>() / utilities.len() as f64,
            best: population[elite]
                .genes
                .iter()
                .map(|g| (g.name.to_string(), g.value))
                .collect(),
        });
        log::info!(
            "tuning {} n={} generation {generation}: best utility {:.3}",
            config.heuristic,
            config.dimension,
            utilities[elite]
        );
        if generation == generations {
            break;
        }
        let mut next = vec![population[elite].clone()];
        while next.len() < population.len() {
            let a = &population[tournament(&utilities, &mut rng)];
            let b = &population[tournament(&utilities, &mut rng)];
            next.push(offspring(a, b, &mut rng));
        }
        population = next;
        utilities = evaluate(&population, &mut cache);
    }

    let best_index = argmin(&utilities);
    let best = population[best_index].clone();
    Ok(TuningOutcome {
        params: best.apply(&config.base),
        utility: utilities[best_index],
        best,
        final_utilities: utilities,
        log,
    })
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

fn tournament<R: Rng + ?Sized>(utilities: &[f64], rng: &mut R) -> usize {
    let mut best = rng.random_range(0..utilities.len());
    for _ in 0..2 {
        let c = rng.random_range(0..utilities.len());
        if utilities[c] < utilities[best] {
            best = c;
        }
    }
    best
}

fn offspring<R: Rng + ?Sized>(a: &ParamGenome, b: &ParamGenome, rng: &mut R) -> ParamGenome {
    let mut child = a.clone();
    let rate = 1.0 / a.genes.len() as f64;
    let noise = Normal::new(0.0, 0.1).expect("valid");
    for (g, other) in child.genes.iter_mut().zip(&b.genes) {
        let (ua, ub) = (g.to_unit(g.value), g.to_unit(other.value));
        let mut u = ua + rng.random_range(-0.25..1.25) * (ub - ua);
        if rng.random::<f64>() < rate.max(0.2) {
            u += noise.sample(rng);
        }
        g.value = g.from_unit(u);
    }
    child
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: HeuristicKind, population: usize) -> TuningConfig {
        TuningConfig {
            population,
            generations: 3,
            samples: 2,
            ..TuningConfig::new(kind, 2)
        }
    }

    #[test]
    fn ranks_average_ties_and_fail_last() {
        let u = rank_utilities(&[vec![1.0, 5.0], vec![1.0, f64::NAN], vec![0.5, 2.0]]);
        assert_eq!(u, vec![(2.5 + 2.0) / 2.0, (2.5 + 3.0) / 2.0, 1.0]);
    }

    #[test]
    fn single_genome_is_returned_unchanged() {
        let cfg = small(HeuristicKind::Rpso, 1);
        let out = tune_with(&cfg, |p, _, _| p.omega * 1000.0).unwrap();
        assert_eq!(out.params, cfg.base);
        assert_eq!(out.utility, 1.0);
    }

    #[test]
    fn dominating_genome_has_rank_one() {
        let cfg = TuningConfig {
            generations: 0,
            ..small(HeuristicKind::Leh, 2)
        };
        let out = tune_with(&cfg, |p, i, _| p.b_in as f64 + i as f64).unwrap();
        assert_eq!(out.utility, 1.0);
        assert_eq!(out.final_utilities.iter().copied().fold(0.0, f64::max), 2.0);
    }

    #[test]
    fn scale_free_selection() {
        let cfg = small(HeuristicKind::Leh, 6);
        let a = tune_with(&cfg, |p, i, _| p.b_in as f64 + i as f64).unwrap();
        let b = tune_with(&cfg, |p, i, _| 10.0 * (p.b_in as f64 + i as f64)).unwrap();
        assert_eq!(a.best, b.best);
        assert!(a.final_utilities.iter().all(|u| a.utility <= *u));
    }

    #[test]
    fn genome_respects_ranges() {
        let base = HeuristicParams::default();
        let g = ParamGenome::for_heuristic(HeuristicKind::RpsoLehDd, &base);
        let names: Vec<_> = g.genes.iter().map(|g| g.name).collect();
        assert!(names.contains(&"c3") && names.contains(&"dormancy_limit"));
        assert!(!names.contains(&"sigma_no") && !names.contains(&"placement_limit"));
        let mut rng = RngStream::new(4);
        for _ in 0..100 {
            let r = g.randomised(&mut rng);
            for x in &r.genes {
                assert!(x.value >= x.lower && x.value <= x.upper);
                if x.scale == GeneScale::Integer {
                    assert_eq!(x.value, x.value.round());
                }
            }
        }
        let dd = ParamGenome::for_heuristic(HeuristicKind::Dd, &base);
        assert!(!dd.genes.iter().any(|g| g.name == "c3" || g.name == "swarm_size"));
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = small(HeuristicKind::RpsoDd, 5);
        let f = |p: &HeuristicParams, i: usize, s: u64| (p.c1 - 1.0).abs() + i as f64 + (s % 7) as f64;
        assert_eq!(tune_with(&cfg, f).unwrap(), tune_with(&cfg, f).unwrap());
    }
}
