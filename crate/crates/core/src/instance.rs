//! Instances, solutions and their aggregate sums.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How item profits vary around their expectations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProfitKind {
    /// `p_i` uniform on `[mu_i - delta, mu_i + delta]`, independent across items.
    UniformIndependent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfitModel {
    pub kind: ProfitKind,
    /// Half-width of every profit interval.
    pub delta: f64,
}

impl ProfitModel {
    pub fn uniform(delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(ProfitModel {
            kind: ProfitKind::UniformIndependent,
            delta,
        })
    }

    /// Variance of the total profit of `ones` chosen items.
    pub fn variance(&self, ones: usize) -> f64 {
        match self.kind {
            ProfitKind::UniformIndependent => uniform_variance(ones, self.delta),
        }
    }
}

/// `ones * delta^2 / 3`: the variance of a sum of `ones` independent
/// uniform variables on intervals of half-width `delta`.
pub fn uniform_variance(ones: usize, delta: f64) -> f64 {
    ones as f64 * delta * delta / 3.0
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta must be finite and >= 0, got {delta}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Item {
    /// Expected profit.
    pub mu: f64,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    name: String,
    capacity: u64,
    items: Vec<Item>,
    profit_model: ProfitModel,
}

impl Instance {
    pub fn new(name: impl Into<String>, capacity: u64, items: Vec<Item>, profit_model: ProfitModel) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Domain("an instance needs at least one item".into()));
        }
        for (i, item) in items.iter().enumerate() {
            if item.weight == 0 {
                return Err(Error::Domain(format!("item {} has weight 0", i + 1)));
            }
            if !(item.mu.is_finite() && item.mu >= 0.0) {
                return Err(Error::Domain(format!(
                    "item {} has invalid expected profit {}",
                    i + 1,
                    item.mu
                )));
            }
        }
        check_delta(profit_model.delta)?;
        Ok(Instance {
            name: name.into(),
            capacity,
            items,
            profit_model,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn profit_model(&self) -> ProfitModel {
        self.profit_model
    }

    pub fn delta(&self) -> f64 {
        self.profit_model.delta
    }

    pub fn total_weight(&self) -> u64 {
        self.items.iter().map(|it| it.weight).sum()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same items and capacity under a different profit half-width.
    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        self.profit_model.delta = delta;
        Ok(self)
    }

    pub fn with_capacity(mut self, capacity: u64) -> Self {
        self.capacity = capacity;
        self
    }

    /// Exact sums over the chosen items.
    ///
    /// Panics if `x` does not have one bit per item.
    pub fn aggregates(&self, x: &Solution) -> Aggregates {
        assert_eq!(
            x.len(),
            self.n(),
            "solution length {} does not match instance size {}",
            x.len(),
            self.n()
        );
        let mut weight = 0u64;
        let mut mu = 0.0;
        let mut ones = 0usize;
        for (item, &bit) in self.items.iter().zip(x.bits()) {
            if bit {
                weight += item.weight;
                mu += item.mu;
                ones += 1;
            }
        }
        Aggregates {
            weight,
            mu,
            ones,
            variance: self.profit_model.variance(ones),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregates {
    pub weight: u64,
    pub mu: f64,
    pub ones: usize,
    pub variance: f64,
}

/// A bit vector selecting items.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Solution(Vec<bool>);

impl Solution {
    pub fn zeros(n: usize) -> Self {
        Solution(vec![false; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Solution(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Indices of the chosen items.
    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn hamming(&self, other: &Solution) -> usize {
        assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Solution({self})")
    }
}

impl FromStr for Solution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Domain(format!("invalid bit {other:?} in solution string"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Solution)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// mu = (10, 8, 6), w = (5, 4, 3).
    pub fn three_items(capacity: u64, delta: f64) -> Instance {
        let items = [(10.0, 5), (8.0, 4), (6.0, 3)]
            .into_iter()
            .map(|(mu, weight)| Item { mu, weight })
            .collect();
        Instance::new("tiny", capacity, items, ProfitModel::uniform(delta).unwrap()).unwrap()
    }

    pub fn bits(s: &str) -> Solution {
        s.parse().unwrap()
    }
}
