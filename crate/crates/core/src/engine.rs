//! The (1+1) EA, the (1+1) EA with heavy-tailed mutation and the (mu+1) EA
//! with discounted greedy uniform crossover, all under a fixed budget of
//! fitness evaluations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::crossover::discounted_greedy_uniform_crossover;
use crate::error::{Error, Result};
use crate::fitness::{fitness, FitnessConfig, FitnessValue};
use crate::instance::{Instance, Solution};
use crate::mutation::{heavy_tail_mutation, standard_bit_mutation, PowerLaw};
use crate::rng::{substream, RandomStream, StreamRng};

pub const DEFAULT_MU: usize = 10;
pub const DEFAULT_CROSSOVER_PROB: f64 = 0.8;
pub const DEFAULT_BETA: f64 = 1.5;
pub const DEFAULT_STRIDE: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "1p1")]
    OnePlusOne,
    #[serde(rename = "1p1-ht")]
    OnePlusOneHT,
    #[serde(rename = "mu1")]
    MuPlusOne,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::OnePlusOne, Algorithm::OnePlusOneHT, Algorithm::MuPlusOne];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::OnePlusOne => "1p1",
            Algorithm::OnePlusOneHT => "1p1-ht",
            Algorithm::MuPlusOne => "mu1",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    Standard,
    HeavyTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    /// Population size; only used by the (mu+1) EA.
    pub mu: usize,
    pub crossover_prob: f64,
    pub beta: f64,
    pub budget: u64,
    pub seed: u64,
    /// Evaluations between trajectory samples.
    pub stride: u64,
}

impl AlgorithmConfig {
    pub fn new(algorithm: Algorithm, budget: u64, seed: u64) -> Self {
        AlgorithmConfig {
            algorithm,
            mu: DEFAULT_MU,
            crossover_prob: DEFAULT_CROSSOVER_PROB,
            beta: DEFAULT_BETA,
            budget,
            seed,
            stride: DEFAULT_STRIDE,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if self.stride == 0 {
            return Err(Error::Config("trajectory stride must be at least 1".into()));
        }
        let heavy_tail = matches!(self.algorithm, Algorithm::OnePlusOneHT | Algorithm::MuPlusOne);
        if heavy_tail {
            if n < 2 {
                return Err(Error::Config("heavy-tail mutation needs n >= 2".into()));
            }
            if !self.beta.is_finite() {
                return Err(Error::Config(format!("beta must be finite, got {}", self.beta)));
            }
        }
        if self.algorithm == Algorithm::MuPlusOne {
            if self.mu < 2 {
                return Err(Error::Config(format!("(mu+1) EA needs mu >= 2, got {}", self.mu)));
            }
            if self.budget < self.mu as u64 {
                return Err(Error::Config(format!(
                    "budget {} is smaller than the population size {}",
                    self.budget, self.mu
                )));
            }
            if !(0.0..=1.0).contains(&self.crossover_prob) {
                return Err(Error::Config(format!(
                    "crossover probability must lie in [0, 1], got {}",
                    self.crossover_prob
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub evaluations: u64,
    pub violation: u64,
    pub phat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_solution: Solution,
    pub best_fitness: FitnessValue,
    pub evaluations_used: u64,
    pub seed: u64,
    /// Best fitness so far, sampled every `stride` evaluations and at the end.
    pub trajectory: Vec<TrajectoryPoint>,
}

/// Counts fitness evaluations and tracks the best value seen.
struct Evaluator<'a> {
    instance: &'a Instance,
    cfg: &'a FitnessConfig,
    stride: u64,
    used: u64,
    best: Option<(Solution, FitnessValue)>,
    trajectory: Vec<TrajectoryPoint>,
}

impl<'a> Evaluator<'a> {
    fn new(instance: &'a Instance, cfg: &'a FitnessConfig, stride: u64) -> Self {
        Evaluator {
            instance,
            cfg,
            stride,
            used: 0,
            best: None,
            trajectory: Vec::new(),
        }
    }

    fn evaluate(&mut self, x: &Solution) -> Result<FitnessValue> {
        let f = fitness(self.instance, x, self.cfg)?;
        self.used += 1;
        let improved = match &self.best {
            Some((_, best)) => f.at_least(best),
            None => true,
        };
        if improved {
            self.best = Some((x.clone(), f));
        }
        if self.used.is_multiple_of(self.stride) {
            self.record();
        }
        Ok(f)
    }

    fn record(&mut self) {
        if let Some((_, best)) = &self.best {
            self.trajectory.push(TrajectoryPoint {
                evaluations: self.used,
                violation: best.violation,
                phat: best.phat,
            });
        }
    }

    fn finish(mut self, seed: u64) -> RunResult {
        if self.trajectory.last().map(|p| p.evaluations) != Some(self.used) {
            self.record();
        }
        let (best_solution, best_fitness) = self.best.expect("at least one evaluation");
        RunResult {
            best_solution,
            best_fitness,
            evaluations_used: self.used,
            seed,
            trajectory: self.trajectory,
        }
    }
}

fn random_solution<R: RandomStream + ?Sized>(n: usize, rng: &mut R) -> Solution {
    Solution::from_bits((0..n).map(|_| rng.unit() < 0.5).collect())
}

/// Runs the algorithm selected in `alg`.
pub fn run(instance: &Instance, fit: &FitnessConfig, alg: &AlgorithmConfig) -> Result<RunResult> {
    match alg.algorithm {
        Algorithm::OnePlusOne => run_one_plus_one(instance, fit, alg, Mutation::Standard),
        Algorithm::OnePlusOneHT => run_one_plus_one(instance, fit, alg, Mutation::HeavyTail),
        Algorithm::MuPlusOne => run_mu_plus_one(instance, fit, alg),
    }
}

/// (1+1) EA: mutate the current solution and keep the offspring if it is at
/// least as good. The random initial solution costs one evaluation.
pub fn run_one_plus_one(
    instance: &Instance,
    fit: &FitnessConfig,
    alg: &AlgorithmConfig,
    mutation: Mutation,
) -> Result<RunResult> {
    let n = instance.n();
    let mut checked = *alg;
    checked.algorithm = match mutation {
        Mutation::Standard => Algorithm::OnePlusOne,
        Mutation::HeavyTail => Algorithm::OnePlusOneHT,
    };
    checked.validate(n)?;

    let mut init_rng = substream(alg.seed, "init");
    let mut mutation_rng = substream(alg.seed, "mutation");
    let law = (mutation == Mutation::HeavyTail).then(|| PowerLaw::for_length(alg.beta, n));
    let mut eval = Evaluator::new(instance, fit, alg.stride);

    let mut x = random_solution(n, &mut init_rng);
    let mut fx = eval.evaluate(&x)?;
    while eval.used < alg.budget {
        let y = match &law {
            None => standard_bit_mutation(&x, &mut mutation_rng),
            Some(law) => heavy_tail_mutation(&x, law, &mut mutation_rng),
        };
        let fy = eval.evaluate(&y)?;
        if fy.at_least(&fx) {
            x = y;
            fx = fy;
        }
    }
    Ok(eval.finish(alg.seed))
}

/// (mu+1) EA. Each iteration either crosses two distinct random parents
/// (probability `crossover_prob`) or copies one random parent, then applies
/// heavy-tail mutation. After crossover the offspring replaces the first
/// parent if at least as good as it, else the second parent if at least as
/// good as that one. After the copy branch it competes only with the parent
/// it was copied from.
pub fn run_mu_plus_one(instance: &Instance, fit: &FitnessConfig, alg: &AlgorithmConfig) -> Result<RunResult> {
    let n = instance.n();
    let mut checked = *alg;
    checked.algorithm = Algorithm::MuPlusOne;
    checked.validate(n)?;

    let mut init_rng = substream(alg.seed, "init");
    let mut parent_rng = substream(alg.seed, "parents");
    let mut coin_rng = substream(alg.seed, "crossover");
    let mut mutation_rng = substream(alg.seed, "mutation");
    let law = PowerLaw::for_length(alg.beta, n);
    let mut eval = Evaluator::new(instance, fit, alg.stride);

    let mut population: Vec<(Solution, FitnessValue)> = Vec::with_capacity(alg.mu);
    for _ in 0..alg.mu {
        let x = random_solution(n, &mut init_rng);
        let f = eval.evaluate(&x)?;
        population.push((x, f));
    }

    while eval.used < alg.budget {
        if coin_rng.unit() < alg.crossover_prob {
            let (i, j) = two_distinct(alg.mu, &mut parent_rng);
            let child = discounted_greedy_uniform_crossover(&population[i].0, &population[j].0, instance, fit);
            let z = heavy_tail_mutation(&child, &law, &mut mutation_rng);
            let fz = eval.evaluate(&z)?;
            if fz.at_least(&population[i].1) {
                population[i] = (z, fz);
            } else if fz.at_least(&population[j].1) {
                population[j] = (z, fz);
            }
        } else {
            let i = parent_rng.index(alg.mu);
            let z = heavy_tail_mutation(&population[i].0, &law, &mut mutation_rng);
            let fz = eval.evaluate(&z)?;
            if fz.at_least(&population[i].1) {
                population[i] = (z, fz);
            }
        }
    }
    Ok(eval.finish(alg.seed))
}

fn two_distinct(len: usize, rng: &mut StreamRng) -> (usize, usize) {
    let i = rng.index(len);
    let mut j = rng.index(len - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}
