//! Evolutionary algorithms for the knapsack problem with stochastic profits.
//!
//! Each item has a deterministic weight and a random profit. Instead of the
//! expected profit, solutions are scored by a profit level they reach with
//! probability at least `1 - alpha`, certified through Chebyshev
//! (Cantelli) or Hoeffding tail bounds. Three evolutionary algorithms
//! optimize the resulting lexicographic penalty fitness; Monte Carlo and
//! exhaustive-search oracles check the guarantees, and an experiment
//! harness runs and compares them over parameter grids.

pub mod crossover;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod fitness;
pub mod format;
pub mod generate;
pub mod instance;
pub mod mutation;
pub mod oracle;
pub mod rng;
pub mod stats;

pub use crossover::{discount_value, discounted_greedy_uniform_crossover};
pub use engine::{run, run_mu_plus_one, run_one_plus_one, Algorithm, AlgorithmConfig, Mutation, RunResult};
pub use error::{Error, Result};
pub use experiment::{run_batch, ExperimentConfig, OutputFormat, Profile, ResultRow};
pub use fitness::{
    compare_lex, fitness, preferred_bound, profit_cheb, profit_hoef, Bound, FitnessConfig, FitnessValue,
};
pub use format::{parse_instance, read_instance, serialize_instance};
pub use generate::{generate_instance, CapacityRule, InstanceKind};
pub use instance::{Aggregates, Instance, Item, ProfitModel, Solution};
pub use oracle::{brute_force_best, estimate_violation_probability, variance_crosscheck, ViolationEstimate};
pub use stats::{kruskal_wallis, pairwise_markers, Marker};
