//! Standard bit mutation and heavy-tailed mutation.

use crate::instance::Solution;
use crate::rng::RandomStream;

/// Flips each bit independently with probability `1/n`.
pub fn standard_bit_mutation<R: RandomStream + ?Sized>(x: &Solution, rng: &mut R) -> Solution {
    let rate = 1.0 / x.len() as f64;
    flip_with_rate(x, rate, rng)
}

fn flip_with_rate<R: RandomStream + ?Sized>(x: &Solution, rate: f64, rng: &mut R) -> Solution {
    let mut y = x.clone();
    for i in 0..y.len() {
        if rng.unit() < rate {
            y.flip(i);
        }
    }
    y
}

/// Discrete power law on `1..=support_max` with `Pr(k) ∝ k^-beta`.
///
/// The cumulative table is built once; sampling is a binary search.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLaw {
    beta: f64,
    cumulative: Vec<f64>,
}

impl PowerLaw {
    /// Panics unless `support_max >= 1` and `beta` is finite.
    pub fn new(beta: f64, support_max: usize) -> Self {
        assert!(support_max >= 1, "power law needs a non-empty support");
        assert!(beta.is_finite(), "power law exponent must be finite");
        let weights: Vec<f64> = (1..=support_max).map(|k| (k as f64).powf(-beta)).collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        *cumulative.last_mut().expect("non-empty") = 1.0;
        PowerLaw { beta, cumulative }
    }

    /// The law used by heavy-tailed mutation on `n` bits: support `1..=n/2`.
    pub fn for_length(beta: f64, n: usize) -> Self {
        PowerLaw::new(beta, n / 2)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn support_max(&self) -> usize {
        self.cumulative.len()
    }

    /// `Pr(theta = k)`.
    pub fn pmf(&self, k: usize) -> f64 {
        match k {
            0 => 0.0,
            1 => self.cumulative[0],
            k if k <= self.support_max() => self.cumulative[k - 1] - self.cumulative[k - 2],
            _ => 0.0,
        }
    }

    pub fn sample<R: RandomStream + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.unit();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1) + 1
    }
}

/// Draws `theta` from `law` once, then flips each bit independently with
/// probability `theta / n`. May return an unchanged copy.
///
/// Panics if `law` does not have support `1..=n/2` or `n < 2`.
pub fn heavy_tail_mutation<R: RandomStream + ?Sized>(x: &Solution, law: &PowerLaw, rng: &mut R) -> Solution {
    let n = x.len();
    assert!(n >= 2, "heavy-tail mutation needs at least 2 bits");
    assert_eq!(law.support_max(), n / 2, "power law support must be n/2");
    let theta = law.sample(rng);
    flip_with_rate(x, theta as f64 / n as f64, rng)
}

#[cfg(test)]
pub(crate) mod scripted {
    use crate::rng::RandomStream;
    use std::collections::VecDeque;

    /// Replays a fixed list of unit draws.
    pub struct Scripted(pub VecDeque<f64>);

    impl Scripted {
        pub fn new(draws: &[f64]) -> Self {
            Scripted(draws.iter().copied().collect())
        }
    }

    impl RandomStream for Scripted {
        fn unit(&mut self) -> f64 {
            self.0.pop_front().expect("script exhausted")
        }

        fn index(&mut self, bound: usize) -> usize {
            ((self.unit() * bound as f64) as usize).min(bound - 1)
        }
    }
}
