//! Benchmark instance generation in the style of Pisinger's knapsack
//! instance classes.

use rand::Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Item, ProfitModel};
use crate::rng::StreamRng;

pub const DEFAULT_RANGE: u64 = 10_000;

/// Coefficient range of the presets. Their capacities only bind at this scale.
pub const PRESET_RANGE: u64 = 1_000;

/// Largest multiplicity of a core item in bounded instances.
pub const MAX_MULTIPLICITY: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Uncorrelated,
    BoundedStronglyCorrelated,
}

impl InstanceKind {
    pub fn short_name(self) -> &'static str {
        match self {
            InstanceKind::Uncorrelated => "uncorr",
            InstanceKind::BoundedStronglyCorrelated => "strong",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uncorr" | "uncorrelated" => Some(InstanceKind::Uncorrelated),
            "strong" | "bounded_strongly_correlated" | "bsc" => Some(InstanceKind::BoundedStronglyCorrelated),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityRule {
    Fixed(u64),
    /// `B = round(c * total weight)`.
    Fraction(f64),
}

impl CapacityRule {
    fn resolve(self, total_weight: u64) -> Result<u64> {
        match self {
            CapacityRule::Fixed(b) => Ok(b),
            CapacityRule::Fraction(c) if c.is_finite() && c >= 0.0 => Ok((c * total_weight as f64).round() as u64),
            CapacityRule::Fraction(c) => Err(Error::Domain(format!("capacity fraction must be >= 0, got {c}"))),
        }
    }
}

/// Generates an instance with `n` items and coefficients in `1..=range`.
///
/// Uncorrelated items draw weight and expected profit independently.
/// Bounded strongly correlated items come from a bounded knapsack core with
/// `mu = w + range / 10` and multiplicities in `1..=MAX_MULTIPLICITY`; each
/// core item is expanded into that many identical 0/1 items and the list is
/// cut at exactly `n` items.
///
/// Profits are integers and the profit half-width is left at 0; it is
/// supplied later per experiment.
pub fn generate_instance(
    kind: InstanceKind,
    n: usize,
    range: u64,
    capacity: CapacityRule,
    seed: u64,
) -> Result<Instance> {
    if n == 0 {
        return Err(Error::Domain("item count must be positive".into()));
    }
    if range == 0 {
        return Err(Error::Domain("coefficient range must be positive".into()));
    }
    let mut rng = StreamRng::seed_from_u64(seed);
    let items: Vec<Item> = match kind {
        InstanceKind::Uncorrelated => (0..n)
            .map(|_| {
                let weight = rng.gen_range(1..=range);
                let mu = rng.gen_range(1..=range) as f64;
                Item { mu, weight }
            })
            .collect(),
        InstanceKind::BoundedStronglyCorrelated => {
            let mut items = Vec::with_capacity(n);
            while items.len() < n {
                let weight = rng.gen_range(1..=range);
                let mu = (weight + range / 10) as f64;
                let copies = rng.gen_range(1..=MAX_MULTIPLICITY) as usize;
                let take = copies.min(n - items.len());
                items.extend(std::iter::repeat_n(Item { mu, weight }, take));
            }
            items
        }
    };
    let total: u64 = items.iter().map(|it| it.weight).sum();
    let capacity = capacity.resolve(total)?;
    Instance::new(
        format!("{}_{}", kind.short_name(), n),
        capacity,
        items,
        ProfitModel::uniform(0.0)?,
    )
}

/// Benchmark presets named like `uncorr_100`, carrying the published
/// capacities for each (class, size) pair.
pub const PRESETS: &[(&str, InstanceKind, usize, u64)] = &[
    ("uncorr_100", InstanceKind::Uncorrelated, 100, 2407),
    ("strong_100", InstanceKind::BoundedStronglyCorrelated, 100, 4187),
    ("uncorr_300", InstanceKind::Uncorrelated, 300, 6853),
    ("strong_300", InstanceKind::BoundedStronglyCorrelated, 300, 13821),
    ("uncorr_500", InstanceKind::Uncorrelated, 500, 11243),
    ("strong_500", InstanceKind::BoundedStronglyCorrelated, 500, 22223),
];

/// Generates a preset instance with [`PRESET_RANGE`] and its fixed capacity.
pub fn preset(name: &str, seed: u64) -> Result<Instance> {
    let &(_, kind, n, capacity) = PRESETS
        .iter()
        .find(|(p, ..)| *p == name)
        .ok_or_else(|| Error::Config(format!("unknown preset {name:?}")))?;
    generate_instance(kind, n, PRESET_RANGE, CapacityRule::Fixed(capacity), seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncorrelated_with_fixed_capacity() {
        let inst = generate_instance(InstanceKind::Uncorrelated, 100, 10_000, CapacityRule::Fixed(2407), 1).unwrap();
        assert_eq!(inst.capacity(), 2407);
        assert_eq!(inst.n(), 100);
        for it in inst.items() {
            assert!((1..=10_000).contains(&it.weight));
            assert!((1.0..=10_000.0).contains(&it.mu));
            assert_eq!(it.mu.fract(), 0.0);
        }
    }

    #[test]
    fn unit_range_forces_values() {
        for seed in 0..5 {
            let inst = generate_instance(InstanceKind::Uncorrelated, 1, 1, CapacityRule::Fixed(1), seed).unwrap();
            assert_eq!(inst.items(), &[Item { mu: 1.0, weight: 1 }]);
            assert_eq!(inst.capacity(), 1);
        }
    }

    #[test]
    fn strongly_correlated_identity_and_capacity() {
        let inst = generate_instance(
            InstanceKind::BoundedStronglyCorrelated,
            5,
            100,
            CapacityRule::Fraction(0.5),
            7,
        )
        .unwrap();
        assert_eq!(inst.n(), 5);
        for it in inst.items() {
            assert_eq!(it.mu, it.weight as f64 + 10.0);
        }
        let total = inst.total_weight();
        assert_eq!(inst.capacity(), (0.5 * total as f64).round() as u64);
    }

    #[test]
    fn bounded_instances_repeat_core_items() {
        let inst = generate_instance(
            InstanceKind::BoundedStronglyCorrelated,
            300,
            10_000,
            CapacityRule::Fixed(13_821),
            3,
        )
        .unwrap();
        // consecutive identical items form runs of length <= MAX_MULTIPLICITY
        let mut run = 1;
        let mut saw_repeat = false;
        for pair in inst.items().windows(2) {
            if pair[0] == pair[1] {
                run += 1;
                saw_repeat = true;
            } else {
                run = 1;
            }
            assert!(run <= MAX_MULTIPLICITY as usize * 2);
        }
        assert!(saw_repeat);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = preset("strong_100", 11).unwrap();
        let b = preset("strong_100", 11).unwrap();
        let c = preset("strong_100", 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.capacity(), 4187);
    }

    #[test]
    fn rejects_degenerate_arguments() {
        assert!(generate_instance(InstanceKind::Uncorrelated, 0, 10, CapacityRule::Fixed(1), 0).is_err());
        assert!(generate_instance(InstanceKind::Uncorrelated, 3, 0, CapacityRule::Fixed(1), 0).is_err());
        assert!(preset("uncorr_42", 0).is_err());
    }
}
