//! Experiment configuration and parameter files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::bench::external::ExternalObjective;
use crate::error::{Error, Result};
use crate::heuristics::{HeuristicKind, HeuristicParams};
use crate::problem::{BoxDomain, Problem};
use crate::testbed::TestFunction;

/// A black-box objective run as a child process.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalSpec {
    pub command: String,
    pub lower: f64,
    pub upper: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSpec {
    Builtin(TestFunction, usize),
    External(ExternalSpec, usize),
}

impl InstanceSpec {
    pub fn name(&self) -> &str {
        match self {
            InstanceSpec::Builtin(f, _) => f.cli_name(),
            InstanceSpec::External(..) => "external",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            InstanceSpec::Builtin(_, n) | InstanceSpec::External(_, n) => *n,
        }
    }

    /// A fresh problem; external instances spawn their own child.
    pub fn build(&self) -> Result<Problem> {
        match self {
            InstanceSpec::Builtin(f, n) => f.instance(*n),
            InstanceSpec::External(spec, n) => {
                let domain = BoxDomain::cube(spec.lower, spec.upper, *n)?;
                let objective = ExternalObjective::spawn(&spec.command)?;
                Problem::new(Arc::new(objective), domain, spec.gamma)
            }
        }
    }
}

/// Parameters per `(heuristic, dimension)`, falling back to defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamTable {
    entries: BTreeMap<(HeuristicKind, usize), HeuristicParams>,
}

impl ParamTable {
    pub fn get(&self, kind: HeuristicKind, dimension: usize) -> HeuristicParams {
        self.entries
            .get(&(kind, dimension))
            .copied()
            .unwrap_or_default()
    }

    pub fn insert(&mut self, kind: HeuristicKind, dimension: usize, params: HeuristicParams) {
        self.entries.insert((kind, dimension), params);
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parse `heuristic.dimension.parameter=value` lines; `#` starts a
    /// comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut table = ParamTable::default();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| Error::Parse {
                path: origin.to_string(),
                line: i + 1,
                reason,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected heuristic.dimension.parameter=value".into()))?;
            let mut parts = key.trim().splitn(3, '.');
            let (Some(h), Some(d), Some(p)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad(format!("malformed key {key:?}")));
            };
            let kind: HeuristicKind = h.parse().map_err(|e: Error| bad(e.to_string()))?;
            let dim: usize = d.trim().parse().map_err(|_| bad(format!("bad dimension {d:?}")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad value {value:?}")))?;
            let entry = table.entries.entry((kind, dim)).or_default();
            entry.set(p.trim(), v).map_err(|e| bad(e.to_string()))?;
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for ((kind, dim), params) in &self.entries {
            for name in HeuristicParams::NAMES {
                let value = params.get(name).expect("listed name");
                let _ = writeln!(out, "{}.{}.{}={}", kind.id(), dim, name, value);
            }
        }
        out
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// A run matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSpec>,
    pub heuristics: Vec<HeuristicKind>,
    pub budget: usize,
    pub runs: usize,
    pub seed: u64,
    pub post_samples: usize,
    pub params: ParamTable,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            instances: Vec::new(),
            heuristics: HeuristicKind::ALL.to_vec(),
            budget: 5000,
            runs: 50,
            seed: 1,
            post_samples: 100_000,
            params: ParamTable::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parse the flat `key = value` format. `params_file` is resolved
    /// against `base_dir`.
    pub fn parse(text: &str, origin: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut instances_raw: Option<(usize, String)> = None;
        let mut external: BTreeMap<&str, (usize, String)> = BTreeMap::new();
        let mut params_file: Option<PathBuf> = None;

        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| Error::Parse {
                path: origin.to_string(),
                line: i + 1,
                reason,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |what: &str| -> Result<u64> {
                value
                    .parse::<u64>()
                    .map_err(|_| bad(format!("{what} must be a non-negative integer")))
            };
            match key {
                "instances" => instances_raw = Some((i + 1, value.to_string())),
                "heuristics" => {
                    cfg.heuristics = if value.eq_ignore_ascii_case("all") {
                        HeuristicKind::ALL.to_vec()
                    } else {
                        split_list(value)
                            .map(|h| h.parse().map_err(|e: Error| bad(e.to_string())))
                            .collect::<Result<_>>()?
                    }
                }
                "budget" => cfg.budget = int("budget")? as usize,
                "runs" => cfg.runs = int("runs")? as usize,
                "seed" => cfg.seed = int("seed")?,
                "post_samples" => cfg.post_samples = int("post_samples")? as usize,
                "params_file" => params_file = Some(base_dir.join(value)),
                "external_command" | "external_lower" | "external_upper" | "external_gamma" => {
                    let k = match key {
                        "external_command" => "command",
                        "external_lower" => "lower",
                        "external_upper" => "upper",
                        _ => "gamma",
                    };
                    external.insert(k, (i + 1, value.to_string()));
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }

        let external_spec = || -> Result<ExternalSpec> {
            let get = |k: &str| {
                external
                    .get(k)
                    .ok_or_else(|| Error::Config(format!("external instance needs external_{k}")))
            };
            let float = |k: &str| -> Result<f64> {
                let (line, v) = get(k)?;
                v.parse().map_err(|_| Error::Parse {
                    path: origin.to_string(),
                    line: *line,
                    reason: format!("external_{k} must be a number"),
                })
            };
            Ok(ExternalSpec {
                command: get("command")?.1.clone(),
                lower: float("lower")?,
                upper: float("upper")?,
                gamma: float("gamma")?,
            })
        };

        let (line, raw) =
            instances_raw.ok_or_else(|| Error::Config(format!("{origin}: missing `instances`")))?;
        cfg.instances = if raw.eq_ignore_ascii_case("all") {
            TestFunction::grid()
                .into_iter()
                .map(|(f, n)| InstanceSpec::Builtin(f, n))
                .collect()
        } else {
            let mut out = Vec::new();
            for item in split_list(&raw) {
                let bad = |reason: String| Error::Parse {
                    path: origin.to_string(),
                    line,
                    reason,
                };
                let (name, dim) = item
                    .rsplit_once(':')
                    .ok_or_else(|| bad(format!("instance {item:?} needs name:dimension")))?;
                let n: usize = dim
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("bad dimension in {item:?}")))?;
                if name.trim().eq_ignore_ascii_case("external") {
                    out.push(InstanceSpec::External(external_spec()?, n));
                } else {
                    let f: TestFunction = name.parse().map_err(|e: Error| bad(e.to_string()))?;
                    f.check_dimension(n).map_err(|e| bad(e.to_string()))?;
                    out.push(InstanceSpec::Builtin(f, n));
                }
            }
            out
        };

        if cfg.instances.is_empty() || cfg.heuristics.is_empty() {
            return Err(Error::Config(format!("{origin}: empty run matrix")));
        }
        if cfg.runs == 0 || cfg.budget == 0 || cfg.post_samples == 0 {
            return Err(Error::Config(format!(
                "{origin}: runs, budget and post_samples must be at least 1"
            )));
        }
        if let Some(p) = params_file {
            cfg.params = ParamTable::load(p)?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, &path.display().to_string(), base)
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split([',', ' ', '\t']).map(str::trim).filter(|x| !x.is_empty())
}
