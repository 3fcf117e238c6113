//! Run matrices.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::archive::Evaluator;
use crate::bench::config::{ExperimentConfig, InstanceSpec};
use crate::bench::post_process;
use crate::bench::records::{write_trace_rows, RecordWriter, RunRecord, TraceRecord, TRACE_HEADER};
use crate::error::{Error, Result};
use crate::heuristics::{run_heuristic, HeuristicKind, HeuristicParams};
use crate::rng::{derive_seed, RngStream};

/// Salt separating the post-processing stream from the run stream.
const POST_SALT: u64 = 0x706f_7374;

/// Where a matrix writes its output as cells complete.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub results: Option<PathBuf>,
    pub traces: Option<PathBuf>,
}

/// Seed of run `index`; shared by every cell so heuristics see common
/// random starts.
pub fn run_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64)
}

/// One seeded run plus post-processing. Any error or panic becomes a
/// failure record.
pub fn execute_run(
    instance: &InstanceSpec,
    kind: HeuristicKind,
    params: &HeuristicParams,
    budget: usize,
    post_samples: usize,
    seed: u64,
) -> (RunRecord, TraceRecord) {
    let started = Instant::now();
    let mut record = RunRecord {
        instance: instance.name().to_string(),
        dimension: instance.dimension(),
        heuristic: kind.id().to_string(),
        seed,
        evals_used: 0,
        estimate: f64::NAN,
        worst_case: f64::NAN,
        wall_ms: 0,
        solution: Vec::new(),
    };
    let mut trace = TraceRecord {
        instance: record.instance.clone(),
        dimension: record.dimension,
        heuristic: record.heuristic.clone(),
        seed,
        trace: Vec::new(),
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<_> {
        let problem = instance.build()?;
        let mut evaluator = Evaluator::new(&problem, budget);
        let mut rng = RngStream::new(seed);
        let result = run_heuristic(kind, &mut evaluator, params, &mut rng)?;
        let mut post_rng = RngStream::new(derive_seed(seed, POST_SALT));
        let worst = post_process(&problem, &result.solution, post_samples, &mut post_rng)?;
        Ok((result, worst))
    }));
    match outcome {
        Ok(Ok((result, worst))) => {
            record.evals_used = result.evaluations_used;
            record.estimate = result.heuristic_estimate;
            record.worst_case = worst;
            record.solution = result.solution;
            trace.trace = result.trace;
        }
        Ok(Err(e)) => log::warn!(
            "{} n={} {} seed {seed}: run failed: {e}",
            record.instance,
            record.dimension,
            record.heuristic
        ),
        Err(_) => log::warn!(
            "{} n={} {} seed {seed}: run panicked",
            record.instance,
            record.dimension,
            record.heuristic
        ),
    }
    record.wall_ms = started.elapsed().as_millis() as u64;
    (record, trace)
}

/// Execute every `(instance, heuristic, run)` of the matrix. Runs inside a
/// cell go in parallel; records are ordered by cell then run index and
/// written after each cell.
pub fn run_experiment(config: &ExperimentConfig, output: &ExperimentOutput) -> Result<Vec<RunRecord>> {
    let mut writer = output.results.as_ref().map(RecordWriter::create).transpose()?;
    let mut traces = match &output.traces {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            let mut w = BufWriter::new(file);
            writeln!(w, "{TRACE_HEADER}").map_err(|e| Error::io(path, e))?;
            Some((w, path))
        }
        None => None,
    };

    let mut records = Vec::with_capacity(config.instances.len() * config.heuristics.len() * config.runs);
    for instance in &config.instances {
        for &kind in &config.heuristics {
            let params = config.params.get(kind, instance.dimension());
            let cell: Vec<(RunRecord, TraceRecord)> = (0..config.runs)
                .into_par_iter()
                .map(|r| {
                    execute_run(
                        instance,
                        kind,
                        &params,
                        config.budget,
                        config.post_samples,
                        run_seed(config.seed, r),
                    )
                })
                .collect();
            let failures = cell.iter().filter(|(r, _)| r.is_failure()).count();
            log::info!(
                "{} n={} {}: {} runs, {} failed",
                instance.name(),
                instance.dimension(),
                kind,
                cell.len(),
                failures
            );
            for (record, trace) in cell {
                if let Some(w) = writer.as_mut() {
                    w.write(&record)?;
                }
                if let Some((w, path)) = traces.as_mut() {
                    write_trace_rows(w, &trace).map_err(|e| Error::io(&**path, e))?;
                }
                records.push(record);
            }
            if let Some(w) = writer.as_mut() {
                w.flush()?;
            }
            if let Some((w, path)) = traces.as_mut() {
                w.flush().map_err(|e| Error::io(&**path, e))?;
            }
        }
    }
    Ok(records)
}
