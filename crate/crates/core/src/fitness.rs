//! Discounted profits from tail inequalities and the lexicographic
//! penalty fitness built on them.
//!
//! A feasible solution with expected profit `mu` is scored by how much
//! profit it keeps with probability at least `1 - alpha`:
//!
//! * Chebyshev (Cantelli): `mu - sqrt((1 - alpha) / alpha) * sqrt(v)`, valid
//!   for any profit distribution with variance `v`.
//! * Hoeffding: `mu - delta * sqrt(ln(1 / alpha) * 2 * |x|)`, valid for
//!   independent profits on intervals of half-width `delta`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{check_delta, uniform_variance, Aggregates, Instance, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Chebyshev,
    Hoeffding,
}

impl Bound {
    pub fn label(self) -> &'static str {
        match self {
            Bound::Chebyshev => "cheb",
            Bound::Hoeffding => "hoef",
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Bound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cheb" | "chebyshev" => Ok(Bound::Chebyshev),
            "hoef" | "hoeffding" => Ok(Bound::Hoeffding),
            other => Err(Error::Config(format!("unknown bound {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessConfig {
    pub bound: Bound,
    pub alpha: f64,
    pub delta: f64,
}

impl FitnessConfig {
    pub fn new(bound: Bound, alpha: f64, delta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_delta(delta)?;
        Ok(FitnessConfig { bound, alpha, delta })
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Constraint violation and discounted profit, compared lexicographically:
/// lower violation first, then higher profit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    pub violation: u64,
    pub phat: f64,
}

impl FitnessValue {
    pub fn is_feasible(&self) -> bool {
        self.violation == 0
    }

    /// `Greater` means `self` is the better value.
    pub fn compare(&self, other: &FitnessValue) -> Ordering {
        compare_lex(self, other)
    }

    /// `f(self) >= f(other)` in the lexicographic order.
    pub fn at_least(&self, other: &FitnessValue) -> bool {
        self.compare(other) != Ordering::Less
    }
}

/// Lexicographic comparison; `Greater` means `a` is better.
///
/// Profits are compared exactly on their computed values.
pub fn compare_lex(a: &FitnessValue, b: &FitnessValue) -> Ordering {
    b.violation
        .cmp(&a.violation)
        .then_with(|| a.phat.partial_cmp(&b.phat).unwrap_or(Ordering::Equal))
}

/// `max(w(x) - B, 0)`.
pub fn violation(instance: &Instance, agg: &Aggregates) -> u64 {
    agg.weight.saturating_sub(instance.capacity())
}

pub fn profit_cheb(mu: f64, variance: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if variance.is_nan() || variance < 0.0 {
        return Err(Error::Domain(format!("variance must be >= 0, got {variance}")));
    }
    Ok(mu - ((1.0 - alpha) / alpha).sqrt() * variance.sqrt())
}

pub fn profit_hoef(mu: f64, delta: f64, ones: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    Ok(mu - delta * ((1.0 / alpha).ln() * 2.0 * ones as f64).sqrt())
}

/// Evaluates `x` under `cfg`. The profit half-width comes from `cfg`, not
/// from the instance.
pub fn fitness(instance: &Instance, x: &Solution, cfg: &FitnessConfig) -> Result<FitnessValue> {
    let agg = instance.aggregates(x);
    fitness_of(instance, &agg, cfg)
}

pub fn fitness_of(instance: &Instance, agg: &Aggregates, cfg: &FitnessConfig) -> Result<FitnessValue> {
    let phat = match cfg.bound {
        Bound::Chebyshev => profit_cheb(agg.mu, uniform_variance(agg.ones, cfg.delta), cfg.alpha)?,
        Bound::Hoeffding => profit_hoef(agg.mu, cfg.delta, agg.ones, cfg.alpha)?,
    };
    Ok(FitnessValue {
        violation: violation(instance, agg),
        phat,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    Chebyshev,
    Hoeffding,
    Tie,
}

/// `ln(1/alpha) * alpha / (1 - alpha)`; compared against 1/6 it decides
/// which bound yields the larger discounted profit on uniform profits,
/// independently of `delta` and of the solution.
pub fn bound_gap_statistic(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((1.0 / alpha).ln() * alpha / (1.0 - alpha))
}

/// Which bound gives the larger (tighter) discounted profit at `alpha` for
/// uniform-independent profits.
pub fn preferred_bound(alpha: f64) -> Result<Preference> {
    let g = bound_gap_statistic(alpha)?;
    Ok(match g.partial_cmp(&(1.0 / 6.0)) {
        Some(Ordering::Less) => Preference::Hoeffding,
        Some(Ordering::Greater) => Preference::Chebyshev,
        _ => Preference::Tie,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::{bits, three_items};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn violation_cases() {
        let inst = three_items(7, 0.0);
        let agg = |w| Aggregates {
            weight: w,
            mu: 0.0,
            ones: 0,
            variance: 0.0,
        };
        assert_eq!(violation(&inst, &agg(7)), 0);
        assert_eq!(violation(&inst, &agg(12)), 5);
        let empty = three_items(0, 0.0);
        assert_eq!(violation(&empty, &agg(0)), 0);
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(profit_cheb(50.0, 0.0, 0.01).unwrap(), 50.0);
        // (1 - 0.1) / 0.1 = 9
        assert!(close(
            profit_cheb(100.0, 300.0, 0.1).unwrap(),
            48.038_475_772_933_68,
            1e-9
        ));
        assert!(close(profit_cheb(10.0, 4.0, 0.5).unwrap(), 8.0, 1e-12));
    }

    #[test]
    fn hoeffding_values() {
        assert_eq!(profit_hoef(0.0, 25.0, 0, 0.1).unwrap(), 0.0);
        assert!(close(
            profit_hoef(100.0, 25.0, 1, 0.1).unwrap(),
            46.350_849_342_766_32,
            1e-9
        ));
        assert!(close(
            profit_hoef(100.0, 25.0, 4, 0.01).unwrap(),
            -51.742_712_938_514_64,
            1e-9
        ));
        assert_eq!(profit_hoef(123.0, 0.0, 9, 0.01).unwrap(), 123.0);
    }

    #[test]
    fn alpha_outside_unit_interval_is_rejected() {
        for alpha in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(profit_cheb(1.0, 1.0, alpha).is_err());
            assert!(profit_hoef(1.0, 1.0, 1, alpha).is_err());
            assert!(preferred_bound(alpha).is_err());
            assert!(FitnessConfig::new(Bound::Hoeffding, alpha, 1.0).is_err());
        }
    }

    #[test]
    fn deterministic_profits_are_undiscounted() {
        let inst = three_items(7, 0.0);
        let x = bits("011");
        for bound in [Bound::Chebyshev, Bound::Hoeffding] {
            for alpha in [0.1, 0.01, 0.001] {
                let f = fitness(&inst, &x, &FitnessConfig::new(bound, alpha, 0.0).unwrap()).unwrap();
                assert_eq!(
                    f,
                    FitnessValue {
                        violation: 0,
                        phat: 14.0
                    }
                );
            }
        }
    }

    #[test]
    fn hand_computed_fitness() {
        let inst = three_items(7, 3.0);
        let cfg = FitnessConfig::new(Bound::Chebyshev, 0.5, 3.0).unwrap();
        let f = fitness(&inst, &bits("011"), &cfg).unwrap();
        assert_eq!(f.violation, 0);
        assert!(close(f.phat, 11.550_510_257_216_82, 1e-9));
        assert_eq!(fitness(&inst, &bits("111"), &cfg).unwrap().violation, 5);
    }

    #[test]
    fn lexicographic_order() {
        let v = |violation, phat| FitnessValue { violation, phat };
        assert_eq!(compare_lex(&v(0, 5.0), &v(3, 100.0)), Ordering::Greater);
        assert_eq!(compare_lex(&v(0, 5.0), &v(0, 5.0)), Ordering::Equal);
        assert_eq!(compare_lex(&v(2, 1.0), &v(2, 3.0)), Ordering::Less);
        assert!(v(1, -4.0).at_least(&v(1, -4.0)));
        assert!(!v(1, 9.0).at_least(&v(0, -9.0)));
    }

    #[test]
    fn preferred_bound_threshold() {
        assert_eq!(preferred_bound(0.1).unwrap(), Preference::Chebyshev);
        assert_eq!(preferred_bound(0.01).unwrap(), Preference::Hoeffding);
        assert_eq!(preferred_bound(0.001).unwrap(), Preference::Hoeffding);
        assert_eq!(preferred_bound(0.05).unwrap(), Preference::Hoeffding);
        assert_eq!(preferred_bound(0.06).unwrap(), Preference::Chebyshev);
        assert!(close(bound_gap_statistic(0.05).unwrap(), 0.157_670_119_660_736, 1e-12));
        assert!(close(bound_gap_statistic(0.06).unwrap(), 0.179_579_407_452_768, 1e-12));
    }

    fn arb_fitness() -> impl Strategy<Value = FitnessValue> {
        (0u64..4, prop_oneof![Just(0.0), Just(1.0), -10.0f64..10.0])
            .prop_map(|(violation, phat)| FitnessValue { violation, phat })
    }

    proptest! {
        #[test]
        fn cheb_increasing_in_alpha(mu in -1e4f64..1e4, v in 1e-3f64..1e6, a in 0.001f64..0.98, step in 1e-3f64..0.01) {
            let b = a + step;
            prop_assert!(profit_cheb(mu, v, b).unwrap() > profit_cheb(mu, v, a).unwrap());
        }

        #[test]
        fn hoef_increasing_in_alpha(mu in -1e4f64..1e4, d in 0.1f64..100.0, k in 1usize..500, a in 0.001f64..0.98, step in 1e-3f64..0.01) {
            let b = a + step;
            prop_assert!(profit_hoef(mu, d, k, b).unwrap() > profit_hoef(mu, d, k, a).unwrap());
        }

        #[test]
        fn discount_grows_with_uncertainty(mu in 0f64..1e4, d in 0.1f64..100.0, k in 1usize..500, a in 0.001f64..0.99) {
            prop_assert!(profit_cheb(mu, d * d * 2.0, a).unwrap() < profit_cheb(mu, d * d, a).unwrap());
            prop_assert!(profit_hoef(mu, d * 1.5, k, a).unwrap() < profit_hoef(mu, d, k, a).unwrap());
            prop_assert!(profit_hoef(mu, d, k + 1, a).unwrap() < profit_hoef(mu, d, k, a).unwrap());
        }

        #[test]
        fn sign_of_gap_follows_preferred_bound(mu in 0f64..1e5, d in 0.5f64..100.0, k in 1usize..500,
                                              a in prop_oneof![Just(0.1), Just(0.01), Just(0.001), 0.001f64..0.5]) {
            let cheb = profit_cheb(mu, uniform_variance(k, d), a).unwrap();
            let hoef = profit_hoef(mu, d, k, a).unwrap();
            match preferred_bound(a).unwrap() {
                Preference::Hoeffding => prop_assert!(hoef > cheb),
                Preference::Chebyshev => prop_assert!(cheb > hoef),
                Preference::Tie => {}
            }
        }

        #[test]
        fn compare_lex_is_a_total_preorder(a in arb_fitness(), b in arb_fitness(), c in arb_fitness()) {
            prop_assert_eq!(compare_lex(&a, &a), Ordering::Equal);
            prop_assert_eq!(compare_lex(&a, &b), compare_lex(&b, &a).reverse());
            if a.at_least(&b) && b.at_least(&c) {
                prop_assert!(a.at_least(&c));
            }
            // matches the predicate (u(a) < u(b)) or (u(a) = u(b) and p(a) >= p(b))
            let predicate = a.violation < b.violation || (a.violation == b.violation && a.phat >= b.phat);
            prop_assert_eq!(a.at_least(&b), predicate);
        }
    }
}
