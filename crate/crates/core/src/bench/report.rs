//! Summary tables over result records.

use std::fmt::Write as _;

use crate::bench::records::RunRecord;
use crate::bench::stats::{best_equivalent, compare, wilcoxon_rank_sum, Comparison};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsOptions {
    pub alpha: f64,
    pub bonferroni: bool,
    pub one_to_one: bool,
}

impl Default for StatsOptions {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            bonferroni: true,
            one_to_one: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub instance: String,
    pub dimension: usize,
    pub heuristic: String,
    pub runs: usize,
    pub failures: usize,
    /// Mean post-processed worst case over successful runs.
    pub mean: f64,
    pub best_equivalent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairTest {
    pub instance: String,
    pub dimension: usize,
    pub a: String,
    pub b: String,
    pub p_value: f64,
}

/// Percentages of instances on which `a` is better than, equivalent to,
/// or worse than `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSummary {
    pub a: String,
    pub b: String,
    pub better: f64,
    pub equal: f64,
    pub worse: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StatsReport {
    pub instances: Vec<(String, usize)>,
    pub heuristics: Vec<String>,
    pub cells: Vec<CellSummary>,
    pub pairwise: Vec<PairTest>,
    /// Fraction of instances on which each heuristic is best-equivalent.
    pub best_share: Vec<(String, f64)>,
    pub one_to_one: Vec<PairSummary>,
}

fn push_unique<T: PartialEq>(v: &mut Vec<T>, x: T) {
    if !v.contains(&x) {
        v.push(x);
    }
}

pub fn summarize(records: &[RunRecord], options: &StatsOptions) -> StatsReport {
    let mut report = StatsReport::default();
    for r in records {
        push_unique(&mut report.instances, (r.instance.clone(), r.dimension));
        push_unique(&mut report.heuristics, r.heuristic.clone());
    }
    let samples_of = |inst: &(String, usize), h: &str| -> (Vec<f64>, usize, usize) {
        let mut values = Vec::new();
        let mut runs = 0;
        for r in records
            .iter()
            .filter(|r| r.instance == inst.0 && r.dimension == inst.1 && r.heuristic == h)
        {
            runs += 1;
            if !r.is_failure() {
                values.push(r.worst_case);
            }
        }
        let failures = runs - values.len();
        (values, runs, failures)
    };

    let mut best_counts = vec![(0usize, 0usize); report.heuristics.len()];
    let mut pair_counts = vec![[0usize; 3]; report.heuristics.len() * report.heuristics.len()];
    for inst in &report.instances {
        let present: Vec<(usize, Vec<f64>, usize, usize)> = report
            .heuristics
            .iter()
            .enumerate()
            .filter_map(|(k, h)| {
                let (v, runs, failures) = samples_of(inst, h);
                (runs > 0).then_some((k, v, runs, failures))
            })
            .collect();
        let testable: Vec<&(usize, Vec<f64>, usize, usize)> =
            present.iter().filter(|p| p.1.len() >= 2).collect();
        let flags = if testable.len() >= 2 {
            let samples: Vec<Vec<f64>> = testable.iter().map(|p| p.1.clone()).collect();
            best_equivalent(&samples, options.alpha, options.bonferroni)
        } else {
            vec![true; testable.len()]
        };
        for (k, values, runs, failures) in &present {
            let flag = testable
                .iter()
                .position(|p| p.0 == *k)
                .is_some_and(|i| flags[i]);
            best_counts[*k].1 += 1;
            if flag {
                best_counts[*k].0 += 1;
            }
            let mean = if values.is_empty() {
                f64::NAN
            } else {
                values.iter().sum::<f64>() / values.len() as f64
            };
            report.cells.push(CellSummary {
                instance: inst.0.clone(),
                dimension: inst.1,
                heuristic: report.heuristics[*k].clone(),
                runs: *runs,
                failures: *failures,
                mean,
                best_equivalent: flag,
            });
        }
        for (i, a) in testable.iter().enumerate() {
            for b in &testable[i + 1..] {
                report.pairwise.push(PairTest {
                    instance: inst.0.clone(),
                    dimension: inst.1,
                    a: report.heuristics[a.0].clone(),
                    b: report.heuristics[b.0].clone(),
                    p_value: wilcoxon_rank_sum(&a.1, &b.1),
                });
            }
        }
        if options.one_to_one {
            let h = report.heuristics.len();
            for a in &testable {
                for b in &testable {
                    if a.0 != b.0 {
                        let slot = match compare(&a.1, &b.1, options.alpha) {
                            Comparison::Better => 0,
                            Comparison::Equal => 1,
                            Comparison::Worse => 2,
                        };
                        pair_counts[a.0 * h + b.0][slot] += 1;
                    }
                }
            }
        }
    }

    report.best_share = report
        .heuristics
        .iter()
        .zip(&best_counts)
        .map(|(h, (best, total))| (h.clone(), if *total == 0 { 0.0 } else { *best as f64 / *total as f64 }))
        .collect();
    if options.one_to_one {
        let h = report.heuristics.len();
        for a in 0..h {
            for b in 0..h {
                let c = pair_counts[a * h + b];
                let total = (c[0] + c[1] + c[2]) as f64;
                if a == b || total == 0.0 {
                    continue;
                }
                report.one_to_one.push(PairSummary {
                    a: report.heuristics[a].clone(),
                    b: report.heuristics[b].clone(),
                    better: 100.0 * c[0] as f64 / total,
                    equal: 100.0 * c[1] as f64 / total,
                    worse: 100.0 * c[2] as f64 / total,
                });
            }
        }
    }
    report
}

impl StatsReport {
    pub fn cell(&self, instance: &str, dimension: usize, heuristic: &str) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.instance == instance && c.dimension == dimension && c.heuristic == heuristic)
    }

    /// Aligned text: one row per instance, `*` marks best-equivalent means.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<22}", "instance");
        for h in &self.heuristics {
            let _ = write!(out, "{h:>14}");
        }
        out.push('\n');
        for (name, dim) in &self.instances {
            let _ = write!(out, "{:<22}", format!("{name} ({dim}D)"));
            for h in &self.heuristics {
                let text = match self.cell(name, *dim, h) {
                    Some(c) => format!("{:.4}{}", c.mean, if c.best_equivalent { "*" } else { " " }),
                    None => "-".to_string(),
                };
                let _ = write!(out, "{text:>14}");
            }
            out.push('\n');
        }
        out.push_str("\nbest-equivalent share\n");
        for (h, share) in &self.best_share {
            let _ = writeln!(out, "{h:<14}{:>8.2}%", 100.0 * share);
        }
        if !self.one_to_one.is_empty() {
            out.push_str("\none-to-one (better / equal / worse)\n");
            for p in &self.one_to_one {
                let _ = writeln!(
                    out,
                    "{:<14} vs {:<14}{:>7.1}% /{:>6.1}% /{:>6.1}%",
                    p.a, p.b, p.better, p.equal, p.worse
                );
            }
        }
        out
    }

    /// Per-cell CSV: `instance,dimension,heuristic,runs,failures,mean,best_equivalent`.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("instance,dimension,heuristic,runs,failures,mean,best_equivalent\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.instance, c.dimension, c.heuristic, c.runs, c.failures, c.mean, c.best_equivalent
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: &str, heuristic: &str, seed: u64, worst: f64) -> RunRecord {
        RunRecord {
            instance: instance.into(),
            dimension: 2,
            heuristic: heuristic.into(),
            seed,
            evals_used: 10,
            estimate: worst,
            worst_case: worst,
            wall_ms: 1,
            solution: vec![0.0, 0.0],
        }
    }

    #[test]
    fn single_cell_mean() {
        let recs: Vec<_> = [1.0, 2.0, 6.0].iter().enumerate().map(|(i, v)| rec("sphere", "rpso", i as u64, *v)).collect();
        let r = summarize(&recs, &StatsOptions::default());
        assert_eq!(r.cells.len(), 1);
        assert_eq!(r.cells[0].mean, 3.0);
        assert!(r.cells[0].best_equivalent);
    }

    #[test]
    fn dominance_shows_in_tables() {
        let mut recs = Vec::new();
        for i in 0..30u64 {
            for inst in ["a", "b"] {
                recs.push(rec(inst, "good", i, i as f64));
                recs.push(rec(inst, "bad", i, 100.0 + i as f64));
            }
        }
        recs.push(RunRecord {
            worst_case: f64::NAN,
            estimate: f64::NAN,
            ..rec("a", "bad", 99, 0.0)
        });
        let opts = StatsOptions {
            one_to_one: true,
            ..StatsOptions::default()
        };
        let r = summarize(&recs, &opts);
        assert_eq!(r.best_share, vec![("good".into(), 1.0), ("bad".into(), 0.0)]);
        let bad_a = r.cell("a", 2, "bad").unwrap();
        assert_eq!((bad_a.runs, bad_a.failures), (31, 1));
        let p = &r.one_to_one[0];
        assert_eq!((p.a.as_str(), p.better, p.equal, p.worse), ("good", 100.0, 0.0, 0.0));
        for p in &r.one_to_one {
            assert!((p.better + p.equal + p.worse - 100.0).abs() < 1e-9);
        }
        assert!(r.render_text().contains("good"));
        assert_eq!(r.render_csv().lines().count(), 5);
    }
}

/// Mean incumbent per `(instance, dimension, heuristic)` at every multiple
/// of `step` evaluations, over the runs that have an incumbent by then.
/// Rows are `(instance, dimension, heuristic, evals, mean, runs)`.
pub fn incumbent_series(
    traces: &[crate::bench::records::TraceRecord],
    step: usize,
    horizon: usize,
) -> Vec<(String, usize, String, usize, f64, usize)> {
    let step = step.max(1);
    let mut groups: Vec<((String, usize, String), Vec<&crate::bench::records::TraceRecord>)> = Vec::new();
    for t in traces {
        let key = (t.instance.clone(), t.dimension, t.heuristic.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(t),
            None => groups.push((key, vec![t])),
        }
    }
    let mut rows = Vec::new();
    for ((inst, dim, h), runs) in groups {
        let mut evals = step;
        while evals <= horizon {
            let values: Vec<f64> = runs
                .iter()
                .filter_map(|t| {
                    t.trace
                        .iter()
                        .take_while(|(e, _)| *e <= evals)
                        .last()
                        .map(|(_, v)| *v)
                })
                .collect();
            if !values.is_empty() {
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                rows.push((inst.clone(), dim, h.clone(), evals, mean, values.len()));
            }
            evals += step;
        }
    }
    rows
}
