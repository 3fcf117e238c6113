use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use robust_swarm::bench::{
    incumbent_series, read_records, read_traces, run_experiment, summarize, ExperimentConfig,
    ExperimentOutput, ParamTable, StatsOptions,
};
use robust_swarm::tuning::{tune, TuningConfig};
use robust_swarm::{HeuristicKind, TestFunction};

/// Robust min-max optimisation benchmark harness.
#[derive(Parser)]
#[command(name = "rswarm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a run matrix described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Results CSV, written after each cell.
        #[arg(long)]
        out: PathBuf,
        /// Optional incumbent trace CSV.
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Summarise a results CSV.
    Stats {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Compare at `alpha` without dividing by the number of pairs.
        #[arg(long)]
        no_bonferroni: bool,
        /// Add better/equal/worse percentages per heuristic pair.
        #[arg(long)]
        one_to_one: bool,
        /// Also write per-cell means and flags as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Emit per-run and incumbent-trace series for plotting.
    PlotData {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        traces: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Evaluation spacing of the incumbent series.
        #[arg(long, default_value_t = 100)]
        step: usize,
    },
    /// Tune one heuristic at one dimension and write a params file.
    Tune {
        #[arg(long)]
        heuristic: HeuristicKind,
        #[arg(long)]
        dimension: usize,
        /// Comma separated tuning instances (default: the standard four).
        #[arg(long, value_delimiter = ',')]
        instances: Vec<TestFunction>,
        #[arg(long, default_value_t = 12)]
        population: usize,
        #[arg(long, default_value_t = 10)]
        generations: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 5000)]
        budget: usize,
        #[arg(long, default_value_t = 10_000)]
        post_samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Params file; existing entries for other cells are kept.
        #[arg(long)]
        out: PathBuf,
    },
    /// List test instances and heuristics.
    List,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Cmd::Run {
            config,
            out,
            traces,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            log::info!(
                "{} instances x {} heuristics x {} runs, budget {}",
                cfg.instances.len(),
                cfg.heuristics.len(),
                cfg.runs,
                cfg.budget
            );
            let records = run_experiment(
                &cfg,
                &ExperimentOutput {
                    results: Some(out.clone()),
                    traces,
                },
            )?;
            let failed = records.iter().filter(|r| r.is_failure()).count();
            println!("{} runs written to {} ({failed} failed)", records.len(), out.display());
        }
        Cmd::Stats {
            results,
            alpha,
            no_bonferroni,
            one_to_one,
            csv,
        } => {
            let records = read_records(&results)?;
            if records.is_empty() {
                bail!("{} holds no runs", results.display());
            }
            let report = summarize(
                &records,
                &StatsOptions {
                    alpha,
                    bonferroni: !no_bonferroni,
                    one_to_one,
                },
            );
            print!("{}", report.render_text());
            if let Some(path) = csv {
                write_file(&path, &report.render_csv())?;
            }
        }
        Cmd::PlotData {
            results,
            traces,
            out_dir,
            step,
        } => {
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            let records = read_records(&results)?;
            let mut runs = String::from("instance,dimension,heuristic,seed,estimate,worst_case\n");
            for r in &records {
                runs.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.instance, r.dimension, r.heuristic, r.seed, r.estimate, r.worst_case
                ));
            }
            write_file(&out_dir.join("runs.csv"), &runs)?;
            if let Some(path) = traces {
                let traces = read_traces(&path)?;
                let horizon = records.iter().map(|r| r.evals_used).max().unwrap_or(0);
                let mut out = String::from("instance,dimension,heuristic,evals,mean_incumbent,runs\n");
                for (i, d, h, e, m, n) in incumbent_series(&traces, step, horizon) {
                    out.push_str(&format!("{i},{d},{h},{e},{m},{n}\n"));
                }
                write_file(&out_dir.join("incumbent.csv"), &out)?;
            }
            println!("series written to {}", out_dir.display());
        }
        Cmd::Tune {
            heuristic,
            dimension,
            instances,
            population,
            generations,
            samples,
            budget,
            post_samples,
            seed,
            out,
        } => {
            let mut cfg = TuningConfig::new(heuristic, dimension);
            if !instances.is_empty() {
                cfg.instances = instances;
            }
            cfg.population = population;
            cfg.generations = generations;
            cfg.samples = samples;
            cfg.budget = budget;
            cfg.post_samples = post_samples;
            cfg.seed = seed;
            let mut table = if out.exists() {
                ParamTable::load(&out)?
            } else {
                ParamTable::default()
            };
            cfg.base = table.get(heuristic, dimension);
            let outcome = tune(&cfg)?;
            for entry in &outcome.log {
                println!(
                    "generation {:>3}  best utility {:.3}  mean {:.3}",
                    entry.generation, entry.best_utility, entry.mean_utility
                );
            }
            table.insert(heuristic, dimension, outcome.params);
            write_file(&out, &table.render())?;
            println!("best utility {:.3}; parameters written to {}", outcome.utility, out.display());
        }
        Cmd::List => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "instances (name: dimensions, bounds, gamma)")?;
            for f in TestFunction::ALL {
                let dims: Vec<String> = TestFunction::grid()
                    .into_iter()
                    .filter(|(g, _)| *g == f)
                    .map(|(_, n)| n.to_string())
                    .collect();
                let (lo, hi) = f.bounds();
                writeln!(
                    stdout,
                    "  {:<20} {:<18} [{lo}, {hi}]  {}",
                    f.cli_name(),
                    dims.join(","),
                    f.gamma()
                )?;
            }
            writeln!(stdout, "heuristics")?;
            for h in HeuristicKind::ALL {
                writeln!(stdout, "  {:<12} {}", h.id(), h.display_name())?;
            }
        }
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
