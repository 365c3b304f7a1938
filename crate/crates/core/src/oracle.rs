//! Independent checks: Monte Carlo estimates of the profit chance
//! constraint and exhaustive search on small instances.

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{fitness, FitnessConfig, FitnessValue};
use crate::instance::{uniform_variance, Instance, ProfitKind, Solution};
use crate::rng::{derive_seed, RandomStream, StreamRng};

/// Largest instance `brute_force_best` accepts.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Samples per independent shard. Shard boundaries depend only on the
/// sample count, so results do not depend on the thread count.
const SHARD_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationEstimate {
    pub level: f64,
    pub samples: u64,
    pub violations: u64,
    pub estimate: f64,
    pub std_error: f64,
}

impl ViolationEstimate {
    fn new(level: f64, samples: u64, violations: u64) -> Self {
        let estimate = violations as f64 / samples as f64;
        ViolationEstimate {
            level,
            samples,
            violations,
            estimate,
            std_error: (estimate * (1.0 - estimate) / samples as f64).sqrt(),
        }
    }

    /// `estimate <= alpha + k * std_error`.
    pub fn within(&self, alpha: f64, k: f64) -> bool {
        self.estimate <= alpha + k * self.std_error
    }
}

/// Draws of the total profit of `x` under the instance's profit model.
struct ProfitSampler {
    base: f64,
    width: f64,
    ones: usize,
}

impl ProfitSampler {
    fn new(instance: &Instance, x: &Solution) -> Self {
        let ProfitKind::UniformIndependent = instance.profit_model().kind;
        let delta = instance.delta();
        let agg = instance.aggregates(x);
        ProfitSampler {
            base: agg.mu - delta * agg.ones as f64,
            width: 2.0 * delta,
            ones: agg.ones,
        }
    }

    /// One realised total: each selected item contributes `mu_i - delta + 2 delta U`.
    #[inline]
    fn draw<R: RandomStream + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut spread = 0.0;
        for _ in 0..self.ones {
            spread += rng.unit();
        }
        self.base + self.width * spread
    }
}

fn shards(samples: u64, seed: u64) -> impl ParallelIterator<Item = (u64, StreamRng)> {
    let count = samples.div_ceil(SHARD_SIZE);
    (0..count).into_par_iter().map(move |s| {
        let len = SHARD_SIZE.min(samples - s * SHARD_SIZE);
        let rng = StreamRng::seed_from_u64(derive_seed(seed, &["shard", &s.to_string()]));
        (len, rng)
    })
}

/// Monte Carlo estimate of `Pr(p(x) < level)`, drawing every selected
/// item's profit uniformly from `[mu_i - delta, mu_i + delta]`.
pub fn estimate_violation_probability(
    instance: &Instance,
    x: &Solution,
    level: f64,
    samples: u64,
    seed: u64,
) -> Result<ViolationEstimate> {
    if samples == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    let sampler = ProfitSampler::new(instance, x);
    let violations: u64 = shards(samples, seed)
        .map(|(len, mut rng)| (0..len).filter(|_| sampler.draw(&mut rng) < level).count() as u64)
        .sum();
    Ok(ViolationEstimate::new(level, samples, violations))
}

/// Analytic `ones * delta^2 / 3` next to the sample variance of simulated
/// total profits.
pub fn variance_crosscheck(instance: &Instance, x: &Solution, samples: u64, seed: u64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    let sampler = ProfitSampler::new(instance, x);
    let analytic = uniform_variance(sampler.ones, instance.delta());
    let parts: Vec<Moments> = shards(samples, seed)
        .map(|(len, mut rng)| {
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(sampler.draw(&mut rng));
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    Ok((analytic, total.sample_variance()))
}

/// Running mean and sum of squared deviations (Welford / Chan et al.).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, value: f64) {
        self.count += 1;
        let d = value - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (value - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count as f64 / count as f64,
            m2: self.m2 + other.m2 + d * d * (self.count as f64 * other.count as f64) / count as f64,
        }
    }

    fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

/// Exhaustive maximum of the lexicographic fitness over all `2^n` bit
/// vectors. Among equally fit vectors the one with the smallest binary
/// value wins, reading the first item as the most significant bit.
pub fn brute_force_best(instance: &Instance, cfg: &FitnessConfig) -> Result<(Solution, FitnessValue)> {
    let n = instance.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best: Option<(u64, FitnessValue)> = None;
    for mask in 0..(1u64 << n) {
        let x = from_mask(mask, n);
        let f = fitness(instance, &x, cfg)?;
        let better = match &best {
            None => true,
            Some((_, b)) => f.compare(b).is_gt(),
        };
        if better {
            best = Some((mask, f));
        }
    }
    let (mask, f) = best.expect("at least one vector");
    Ok((from_mask(mask, n), f))
}

fn from_mask(mask: u64, n: usize) -> Solution {
    Solution::from_bits((0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect())
}
