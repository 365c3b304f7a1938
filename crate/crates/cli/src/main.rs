use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use stochknap::engine::{run, Algorithm, AlgorithmConfig, RunResult};
use stochknap::experiment::{
    emit_results, rows_to_csv, rows_to_json, run_batch_detailed, trajectories_to_csv, ExperimentConfig, OutputFormat,
    Profile,
};
use stochknap::fitness::{fitness, Bound, FitnessConfig};
use stochknap::format::read_instance;
use stochknap::generate::{generate_instance, CapacityRule, InstanceKind, PRESETS};
use stochknap::instance::{Instance, Solution};
use stochknap::oracle::estimate_violation_probability;

/// Evolutionary algorithms for the knapsack problem with stochastic profits.
#[derive(Parser)]
#[command(name = "stochknap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one evolutionary algorithm on one instance.
    Solve(SolveArgs),
    /// Run a grid of experiments described by a TOML file.
    Experiment(ExperimentArgs),
    /// Check a solution's profit guarantee by Monte Carlo simulation.
    Validate(ValidateArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Instance file.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Generated instance `kind:n:R:seed[:capacity]`; capacity is an integer
    /// B or a fraction of the total weight such as 0.5.
    #[arg(long)]
    generate: Option<String>,
}

impl Source {
    fn load(&self) -> Result<Instance, String> {
        match (&self.instance, &self.generate) {
            (Some(path), _) => read_instance(path).map_err(|e| e.to_string()),
            (None, Some(spec)) => parse_generate(spec),
            (None, None) => Err("one of --instance or --generate is required".into()),
        }
    }
}

fn parse_generate(spec: &str) -> Result<Instance, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(format!("--generate expects kind:n:R:seed[:capacity], got {spec:?}"));
    }
    let kind = InstanceKind::parse(parts[0]).ok_or_else(|| format!("unknown instance kind {:?}", parts[0]))?;
    let n: usize = parts[1]
        .parse()
        .map_err(|_| format!("invalid item count {:?}", parts[1]))?;
    let range: u64 = parts[2].parse().map_err(|_| format!("invalid range {:?}", parts[2]))?;
    let seed: u64 = parts[3].parse().map_err(|_| format!("invalid seed {:?}", parts[3]))?;
    let capacity = match parts.get(4) {
        Some(c) if c.contains('.') => {
            CapacityRule::Fraction(c.parse().map_err(|_| format!("invalid capacity fraction {c:?}"))?)
        }
        Some(c) => CapacityRule::Fixed(c.parse().map_err(|_| format!("invalid capacity {c:?}"))?),
        // published capacity for the matching benchmark size, else half the total weight
        None => PRESETS
            .iter()
            .find(|(_, k, size, _)| *k == kind && *size == n)
            .map(|&(.., b)| CapacityRule::Fixed(b))
            .unwrap_or(CapacityRule::Fraction(0.5)),
    };
    generate_instance(kind, n, range, capacity, seed).map_err(|e| e.to_string())
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    #[arg(long, value_parser = parse_bound)]
    bound: Bound,
    #[arg(long)]
    alpha: f64,
    /// Profit half-width; defaults to the instance's.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    #[arg(long, default_value_t = 10)]
    mu: usize,
    #[arg(long, default_value_t = 0.8)]
    pc: f64,
    #[arg(long, default_value_t = 1.5)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluations between trajectory samples.
    #[arg(long, default_value_t = 1000)]
    stride: u64,
    /// Write the run result as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the budget and run count of the config file.
    #[arg(long, value_parser = parse_profile)]
    profile: Option<Profile>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Output file; stdout if neither this nor the config names one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-run trajectories as CSV.
    #[arg(long)]
    trajectories: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: Source,
    /// Bit string, one character per item.
    #[arg(long)]
    solution: String,
    #[arg(long, value_parser = parse_bound)]
    bound: Bound,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: stochknap::Error| e.to_string())
}

fn parse_bound(s: &str) -> Result<Bound, String> {
    s.parse().map_err(|e: stochknap::Error| e.to_string())
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse().map_err(|e: stochknap::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: stochknap::Error| e.to_string())
}

#[derive(Serialize)]
struct SolveReport<'a> {
    instance: &'a str,
    n: usize,
    capacity: u64,
    fitness: &'a FitnessConfig,
    algorithm: &'a AlgorithmConfig,
    solution: String,
    result: &'a RunResult,
}

fn solve(args: SolveArgs) -> Result<(), String> {
    let mut instance = args.source.load()?;
    let delta = args.delta.unwrap_or(instance.delta());
    instance = instance.with_delta(delta).map_err(|e| e.to_string())?;
    let fit = FitnessConfig::new(args.bound, args.alpha, delta).map_err(|e| e.to_string())?;
    let alg = AlgorithmConfig {
        algorithm: args.algo,
        mu: args.mu,
        crossover_prob: args.pc,
        beta: args.beta,
        budget: args.budget,
        seed: args.seed,
        stride: args.stride,
    };
    let result = run(&instance, &fit, &alg).map_err(|e| e.to_string())?;
    println!("phat {}", result.best_fitness.phat);
    println!("violation {}", result.best_fitness.violation);
    println!("solution {}", result.best_solution);
    if let Some(out) = &args.out {
        let report = SolveReport {
            instance: instance.name(),
            n: instance.n(),
            capacity: instance.capacity(),
            fitness: &fit,
            algorithm: &alg,
            solution: result.best_solution.to_string(),
            result: &result,
        };
        let mut text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        text.push('\n');
        std::fs::write(out, text).map_err(|e| format!("{}: {e}", out.display()))?;
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<(), String> {
    let mut cfg = ExperimentConfig::read(&args.config).map_err(|e| e.to_string())?;
    if let Some(profile) = args.profile {
        cfg.apply_profile(profile);
    }
    let base = args.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let output = cfg.output.clone();
    let format = args
        .format
        .or_else(|| output.as_ref().and_then(|o| o.format))
        .unwrap_or(OutputFormat::Csv);
    // paths from the config file resolve against its directory
    let out = args
        .out
        .or_else(|| output.as_ref().and_then(|o| o.path.as_ref()).map(|p| base.join(p)));
    let trajectories = args.trajectories.or_else(|| {
        output
            .as_ref()
            .and_then(|o| o.trajectories.as_ref())
            .map(|p| base.join(p))
    });

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = args.workers {
        if w == 0 {
            return Err("--workers must be at least 1".into());
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| e.to_string())?;
    let batch = pool
        .install(|| run_batch_detailed(&cfg, &base))
        .map_err(|e| e.to_string())?;

    match &out {
        Some(path) => emit_results(&batch.rows, format, path).map_err(|e| e.to_string())?,
        None => {
            let text = match format {
                OutputFormat::Csv => rows_to_csv(&batch.rows).map_err(|e| e.to_string())?,
                OutputFormat::Json => rows_to_json(&batch.rows),
            };
            print!("{text}");
        }
    }
    if let Some(path) = trajectories {
        let text = trajectories_to_csv(&batch.records).map_err(|e| e.to_string())?;
        std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<(), String> {
    let mut instance = args.source.load()?;
    let delta = args.delta.unwrap_or(instance.delta());
    instance = instance.with_delta(delta).map_err(|e| e.to_string())?;
    let x: Solution = args.solution.parse().map_err(|e: stochknap::Error| e.to_string())?;
    if x.len() != instance.n() {
        return Err(format!(
            "solution has {} bits but the instance has {} items",
            x.len(),
            instance.n()
        ));
    }
    let fit = FitnessConfig::new(args.bound, args.alpha, delta).map_err(|e| e.to_string())?;
    let f = fitness(&instance, &x, &fit).map_err(|e| e.to_string())?;
    let est =
        estimate_violation_probability(&instance, &x, f.phat, args.samples, args.seed).map_err(|e| e.to_string())?;
    println!("phat {}", f.phat);
    println!("violation {}", f.violation);
    println!("estimate {}", est.estimate);
    println!("std_error {}", est.std_error);
    let verdict = if est.within(args.alpha, 3.0) { "PASS" } else { "FAIL" };
    println!("{verdict} (alpha {})", args.alpha);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Experiment(args) => experiment(args),
        Command::Validate(args) => validate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
