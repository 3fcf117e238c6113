//! Result rows and their CSV form.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const RESULTS_HEADER: [&str; 8] = [
    "instance",
    "dimension",
    "heuristic",
    "seed",
    "evals_used",
    "estimate",
    "worst_case",
    "wall_ms",
];

/// One heuristic run and its post-processed worst case. Failed runs carry
/// NaN estimates and an empty solution.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub dimension: usize,
    pub heuristic: String,
    pub seed: u64,
    pub evals_used: usize,
    pub estimate: f64,
    pub worst_case: f64,
    pub wall_ms: u64,
    pub solution: Vec<f64>,
}

impl RunRecord {
    pub fn is_failure(&self) -> bool {
        self.worst_case.is_nan()
    }

    fn fields(&self) -> Vec<String> {
        let mut out = vec![
            self.instance.clone(),
            self.dimension.to_string(),
            self.heuristic.clone(),
            self.seed.to_string(),
            self.evals_used.to_string(),
            self.estimate.to_string(),
            self.worst_case.to_string(),
            self.wall_ms.to_string(),
        ];
        out.extend(self.solution.iter().map(f64::to_string));
        out
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.display().to_string(),
        source,
    }
}

/// Incremental results writer; the header is written on creation.
pub struct RecordWriter {
    inner: csv::Writer<File>,
    path: PathBuf,
}

impl RecordWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut inner = csv::WriterBuilder::new().flexible(true).from_writer(file);
        let mut header: Vec<&str> = RESULTS_HEADER.to_vec();
        header.push("solution...");
        inner.write_record(&header).map_err(csv_err(&path))?;
        Ok(Self { inner, path })
    }

    pub fn write(&mut self, record: &RunRecord) -> Result<()> {
        self.inner
            .write_record(record.fields())
            .map_err(csv_err(&self.path))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn write_records(path: impl AsRef<Path>, records: &[RunRecord]) -> Result<()> {
    let mut w = RecordWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.flush()
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(csv_err(path))?;
    let display = path.display().to_string();
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(csv_err(path))?;
        let line = i + 2;
        let bad = |reason: String| Error::Parse {
            path: display.clone(),
            line,
            reason,
        };
        if row.len() < RESULTS_HEADER.len() {
            return Err(bad(format!("expected at least {} fields", RESULTS_HEADER.len())));
        }
        fn num<T: std::str::FromStr>(s: &str, what: &str) -> std::result::Result<T, String> {
            s.trim().parse().map_err(|_| format!("bad {what} {s:?}"))
        }
        let parsed = (|| -> std::result::Result<RunRecord, String> {
            Ok(RunRecord {
                instance: row[0].to_string(),
                dimension: num(&row[1], "dimension")?,
                heuristic: row[2].to_string(),
                seed: num(&row[3], "seed")?,
                evals_used: num(&row[4], "evals_used")?,
                estimate: num(&row[5], "estimate")?,
                worst_case: num(&row[6], "worst_case")?,
                wall_ms: num(&row[7], "wall_ms")?,
                solution: row
                    .iter()
                    .skip(RESULTS_HEADER.len())
                    .map(|s| num(s, "coordinate"))
                    .collect::<std::result::Result<_, _>>()?,
            })
        })();
        out.push(parsed.map_err(bad)?);
    }
    Ok(out)
}

/// Incumbent improvement trace of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub instance: String,
    pub dimension: usize,
    pub heuristic: String,
    pub seed: u64,
    pub trace: Vec<(usize, f64)>,
}

pub const TRACE_HEADER: &str = "instance,dimension,heuristic,seed,evals,incumbent";

pub fn write_trace_rows<W: Write>(out: &mut W, t: &TraceRecord) -> std::io::Result<()> {
    for (evals, value) in &t.trace {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            t.instance, t.dimension, t.heuristic, t.seed, evals, value
        )?;
    }
    Ok(())
}

pub fn read_traces(path: impl AsRef<Path>) -> Result<Vec<TraceRecord>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut out: Vec<TraceRecord> = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(csv_err(path))?;
        let bad = || Error::Parse {
            path: path.display().to_string(),
            line: i + 2,
            reason: "malformed trace row".into(),
        };
        if row.len() != 6 {
            return Err(bad());
        }
        let dimension: usize = row[1].parse().map_err(|_| bad())?;
        let seed: u64 = row[3].parse().map_err(|_| bad())?;
        let evals: usize = row[4].parse().map_err(|_| bad())?;
        let value: f64 = row[5].parse().map_err(|_| bad())?;
        let same = out.last().is_some_and(|t| {
            t.instance == row[0] && t.dimension == dimension && t.heuristic == row[2] && t.seed == seed
        });
        if !same {
            out.push(TraceRecord {
                instance: row[0].to_string(),
                dimension,
                heuristic: row[2].to_string(),
                seed,
                trace: Vec::new(),
            });
        }
        out.last_mut().expect("pushed").trace.push((evals, value));
    }
    Ok(out)
}
