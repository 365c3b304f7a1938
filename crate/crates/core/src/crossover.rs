//! Discounted greedy uniform crossover.

use std::cmp::Ordering;

use crate::error::Result;
use crate::fitness::{check_alpha, FitnessConfig};
use crate::instance::{check_delta, Instance, Solution};

/// Expected profit of an item minus the extra Hoeffding discount incurred
/// by adding it to a solution that already holds `ones_z` items.
pub fn discount_value(mu_i: f64, delta: f64, alpha: f64, ones_z: usize) -> Result<f64> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    Ok(mu_i - delta * marginal_uncertainty(alpha, ones_z))
}

/// `sqrt(2 ln(1/alpha) (k+1)) - sqrt(2 ln(1/alpha) k)`.
fn marginal_uncertainty(alpha: f64, k: usize) -> f64 {
    let log = (1.0 / alpha).ln();
    (log * 2.0 * (k + 1) as f64).sqrt() - (log * 2.0 * k as f64).sqrt()
}

/// Keeps the bits on which `x` and `y` agree, then adds the disputed items
/// greedily by discounted profit per unit weight while they fit.
///
/// All discounts are computed once against the common part. Ties in the
/// ratio go to the lower item index.
///
/// Panics if `x` and `y` differ in length or do not match `instance`.
pub fn discounted_greedy_uniform_crossover(
    x: &Solution,
    y: &Solution,
    instance: &Instance,
    cfg: &FitnessConfig,
) -> Solution {
    assert_eq!(x.len(), y.len(), "crossover parents differ in length");
    assert_eq!(x.len(), instance.n(), "crossover parents do not match the instance");

    let mut z = Solution::zeros(x.len());
    let mut disputed = Vec::new();
    let mut weight = 0u64;
    let mut ones = 0usize;
    for (i, item) in instance.items().iter().enumerate() {
        match (x.get(i), y.get(i)) {
            (true, true) => {
                z.set(i, true);
                weight += item.weight;
                ones += 1;
            }
            (false, false) => {}
            _ => disputed.push(i),
        }
    }
    if disputed.is_empty() {
        return z;
    }

    let discount = cfg.delta * marginal_uncertainty(cfg.alpha, ones);
    let items = instance.items();
    let mut scored: Vec<(usize, f64)> = disputed
        .into_iter()
        .map(|i| (i, (items[i].mu - discount) / items[i].weight as f64))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));

    for (i, _) in scored {
        let w = items[i].weight;
        if weight + w <= instance.capacity() {
            z.set(i, true);
            weight += w;
        }
    }
    z
}
