//! Batch experiments over (instance, alpha, delta, bound, algorithm) grids.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{
    run, Algorithm, AlgorithmConfig, RunResult, DEFAULT_BETA, DEFAULT_CROSSOVER_PROB, DEFAULT_MU, DEFAULT_STRIDE,
};
use crate::error::{Error, Result};
use crate::fitness::{check_alpha, Bound, FitnessConfig};
use crate::format::read_instance;
use crate::generate::{generate_instance, preset, CapacityRule, InstanceKind, DEFAULT_RANGE};
use crate::instance::{check_delta, Instance};
use crate::rng::derive_seed;
use crate::stats::{mean, pairwise_markers, sample_std, CompetitorMark};

pub const DEFAULT_SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Budget 10^5, 10 runs.
    Desk,
    /// Budget 10^6, 30 runs.
    Paper,
}

impl Profile {
    pub fn budget(self) -> u64 {
        match self {
            Profile::Desk => 100_000,
            Profile::Paper => 1_000_000,
        }
    }

    pub fn runs(self) -> usize {
        match self {
            Profile::Desk => 10,
            Profile::Paper => 30,
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(Error::Config(format!("unknown profile {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: InstanceKind,
    pub n: usize,
    #[serde(default = "default_range")]
    pub range: u64,
    pub capacity: CapacityRule,
    #[serde(default)]
    pub seed: u64,
    pub name: Option<String>,
}

fn default_range() -> u64 {
    DEFAULT_RANGE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    Preset {
        preset: String,
        #[serde(default)]
        seed: u64,
    },
    File {
        path: PathBuf,
    },
    Generate {
        generate: GeneratorSpec,
    },
}

impl InstanceSource {
    /// Loads or generates the instance; relative paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<Instance> {
        match self {
            InstanceSource::Preset { preset: name, seed } => preset(name, *seed),
            InstanceSource::File { path } => read_instance(base.join(path)),
            InstanceSource::Generate { generate: g } => {
                let inst = generate_instance(g.kind, g.n, g.range, g.capacity, g.seed)?;
                Ok(match &g.name {
                    Some(name) => inst.with_name(name.clone()),
                    None => inst,
                })
            }
        }
    }
}

/// One algorithm column of the experiment. Unset parameters take the
/// library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmTemplate {
    pub algorithm: Algorithm,
    /// Column label; defaults to the algorithm label.
    pub name: Option<String>,
    pub mu: Option<usize>,
    pub crossover_prob: Option<f64>,
    pub beta: Option<f64>,
}

impl AlgorithmTemplate {
    pub fn new(algorithm: Algorithm) -> Self {
        AlgorithmTemplate {
            algorithm,
            name: None,
            mu: None,
            crossover_prob: None,
            beta: None,
        }
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.algorithm.label().to_string())
    }

    fn configure(&self, budget: u64, seed: u64, stride: u64) -> AlgorithmConfig {
        AlgorithmConfig {
            algorithm: self.algorithm,
            mu: self.mu.unwrap_or(DEFAULT_MU),
            crossover_prob: self.crossover_prob.unwrap_or(DEFAULT_CROSSOVER_PROB),
            beta: self.beta.unwrap_or(DEFAULT_BETA),
            budget,
            seed,
            stride,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub trajectories: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSource>,
    pub alphas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub bounds: Vec<Bound>,
    pub algorithms: Vec<AlgorithmTemplate>,
    pub runs: Option<usize>,
    pub budget: Option<u64>,
    #[serde(default)]
    pub master_seed: u64,
    pub significance: Option<f64>,
    pub stride: Option<u64>,
    pub output: Option<OutputSpec>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Replaces budget and run count with the profile's.
    pub fn apply_profile(&mut self, profile: Profile) {
        self.budget = Some(profile.budget());
        self.runs = Some(profile.runs());
    }

    pub fn runs(&self) -> usize {
        self.runs.unwrap_or(Profile::Desk.runs())
    }

    pub fn budget(&self) -> u64 {
        self.budget.unwrap_or(Profile::Desk.budget())
    }

    fn validate(&self) -> Result<()> {
        if self.runs() == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.instances.is_empty() || self.alphas.is_empty() || self.deltas.is_empty() {
            return Err(Error::Config("instances, alphas and deltas must be non-empty".into()));
        }
        if self.bounds.is_empty() || self.algorithms.is_empty() {
            return Err(Error::Config("bounds and algorithms must be non-empty".into()));
        }
        for &a in &self.alphas {
            check_alpha(a).map_err(|e| Error::Config(e.to_string()))?;
        }
        for &d in &self.deltas {
            check_delta(d).map_err(|e| Error::Config(e.to_string()))?;
        }
        let mut labels = HashSet::new();
        for t in &self.algorithms {
            if !labels.insert(t.label()) {
                return Err(Error::Config(format!("duplicate algorithm label {:?}", t.label())));
            }
        }
        if let Some(s) = self.significance {
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::Config(format!("significance must lie in (0, 1), got {s}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub capacity: u64,
    pub alpha: f64,
    pub delta: f64,
    pub bound: Bound,
    pub algorithm: String,
    pub mean: f64,
    pub std: f64,
    /// Best discounted profit of every run, in run order.
    pub runs: Vec<f64>,
    pub markers: Vec<CompetitorMark>,
}

impl ResultRow {
    /// Markers rendered as `name^(+) name^(*)`.
    pub fn stat(&self) -> String {
        self.markers
            .iter()
            .map(|m| format!("{}^({})", m.competitor, m.marker))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Per-run trajectory, for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub capacity: u64,
    pub alpha: f64,
    pub delta: f64,
    pub bound: Bound,
    pub algorithm: String,
    pub run: usize,
    pub result: RunResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutput {
    pub rows: Vec<ResultRow>,
    pub records: Vec<RunRecord>,
}

/// Seed of one run, a pure function of the cell's identity.
pub fn run_seed(master: u64, instance: &str, alpha: f64, delta: f64, bound: Bound, algorithm: &str, run: usize) -> u64 {
    derive_seed(
        master,
        &[
            instance,
            &format!("{alpha:e}"),
            &format!("{delta:e}"),
            bound.label(),
            algorithm,
            &run.to_string(),
        ],
    )
}

/// Runs every cell of the grid. Config paths resolve against `base`.
pub fn run_batch(cfg: &ExperimentConfig, base: &Path) -> Result<Vec<ResultRow>> {
    Ok(run_batch_detailed(cfg, base)?.rows)
}

pub fn run_batch_detailed(cfg: &ExperimentConfig, base: &Path) -> Result<BatchOutput> {
    cfg.validate()?;
    let instances = cfg.instances.iter().map(|s| s.load(base)).collect::<Result<Vec<_>>>()?;
    let mut names = HashSet::new();
    for inst in &instances {
        if !names.insert(inst.name()) {
            return Err(Error::Config(format!("duplicate instance name {:?}", inst.name())));
        }
    }
    let runs = cfg.runs();
    let budget = cfg.budget();
    let stride = cfg.stride.unwrap_or(DEFAULT_STRIDE);

    struct Task<'a> {
        instance: &'a Instance,
        fit: FitnessConfig,
        template: &'a AlgorithmTemplate,
        run: usize,
    }

    let mut tasks = Vec::new();
    for instance in &instances {
        for &alpha in &cfg.alphas {
            for &delta in &cfg.deltas {
                for &bound in &cfg.bounds {
                    let fit = FitnessConfig::new(bound, alpha, delta)?;
                    for template in &cfg.algorithms {
                        template
                            .configure(budget, 0, stride)
                            .validate(instance.n())
                            .map_err(|e| Error::Config(format!("{}: {e}", template.label())))?;
                        for run in 0..runs {
                            tasks.push(Task {
                                instance,
                                fit,
                                template,
                                run,
                            });
                        }
                    }
                }
            }
        }
    }

    let results: Vec<RunResult> = tasks
        .par_iter()
        .map(|t| {
            let label = t.template.label();
            let seed = run_seed(
                cfg.master_seed,
                t.instance.name(),
                t.fit.alpha,
                t.fit.delta,
                t.fit.bound,
                &label,
                t.run,
            );
            let instance = t.instance.clone().with_delta(t.fit.delta)?;
            run(&instance, &t.fit, &t.template.configure(budget, seed, stride))
        })
        .collect::<Result<_>>()?;

    let significance = cfg.significance.unwrap_or(DEFAULT_SIGNIFICANCE);
    let per_group = cfg.algorithms.len() * runs;
    let mut rows = Vec::with_capacity(tasks.len() / runs);
    let mut records = Vec::with_capacity(tasks.len());
    for (group_tasks, group_results) in tasks.chunks(per_group).zip(results.chunks(per_group)) {
        let head = &group_tasks[0];
        let values: Vec<Vec<f64>> = group_results
            .chunks(runs)
            .map(|c| c.iter().map(|r| r.best_fitness.phat).collect())
            .collect();
        let labels: Vec<String> = cfg.algorithms.iter().map(|t| t.label()).collect();
        let markers = if labels.len() >= 2 {
            let input: Vec<(&str, &[f64])> = labels
                .iter()
                .map(|s| s.as_str())
                .zip(values.iter().map(|v| v.as_slice()))
                .collect();
            pairwise_markers(&input, significance)?
        } else {
            vec![Vec::new()]
        };
        for ((label, runs_values), marks) in labels.iter().zip(&values).zip(markers) {
            rows.push(ResultRow {
                instance: head.instance.name().to_string(),
                capacity: head.instance.capacity(),
                alpha: head.fit.alpha,
                delta: head.fit.delta,
                bound: head.fit.bound,
                algorithm: label.clone(),
                mean: mean(runs_values),
                std: sample_std(runs_values),
                runs: runs_values.clone(),
                markers: marks,
            });
        }
        for (t, r) in group_tasks.iter().zip(group_results) {
            records.push(RunRecord {
                instance: t.instance.name().to_string(),
                capacity: t.instance.capacity(),
                alpha: t.fit.alpha,
                delta: t.fit.delta,
                bound: t.fit.bound,
                algorithm: t.template.label(),
                run: t.run,
                result: r.clone(),
            });
        }
    }
    Ok(BatchOutput { rows, records })
}

pub const CSV_HEADER: [&str; 9] = [
    "instance",
    "B",
    "alpha",
    "delta",
    "bound",
    "algorithm",
    "mean",
    "std",
    "stat",
];

pub fn rows_to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.capacity.to_string(),
            r.alpha.to_string(),
            r.delta.to_string(),
            r.bound.label().to_string(),
            r.algorithm.clone(),
            r.mean.to_string(),
            r.std.to_string(),
            r.stat(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_to_json(rows: &[ResultRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

pub fn rows_from_json(text: &str) -> Result<Vec<ResultRow>> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// One line per trajectory point:
/// `instance,B,alpha,delta,bound,algorithm,run,seed,evaluations,violation,phat`.
pub fn trajectories_to_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(e.to_string());
    w.write_record([
        "instance",
        "B",
        "alpha",
        "delta",
        "bound",
        "algorithm",
        "run",
        "seed",
        "evaluations",
        "violation",
        "phat",
    ])
    .map_err(csv_err)?;
    for rec in records {
        for p in &rec.result.trajectory {
            w.write_record([
                rec.instance.clone(),
                rec.capacity.to_string(),
                rec.alpha.to_string(),
                rec.delta.to_string(),
                rec.bound.label().to_string(),
                rec.algorithm.clone(),
                rec.run.to_string(),
                rec.result.seed.to_string(),
                p.evaluations.to_string(),
                p.violation.to_string(),
                p.phat.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes the rows to `path` in `format`.
pub fn emit_results(rows: &[ResultRow], format: OutputFormat, path: &Path) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => rows_to_csv(rows)?,
        OutputFormat::Json => rows_to_json(rows),
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
