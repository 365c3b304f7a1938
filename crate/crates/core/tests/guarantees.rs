use proptest::prelude::*;
use stochknap::fitness::{bound_gap_statistic, Preference};
use stochknap::rng::{substream, RandomStream};
use stochknap::{
    brute_force_best, estimate_violation_probability, fitness, generate_instance, preferred_bound, profit_cheb,
    profit_hoef, run, Algorithm, AlgorithmConfig, Bound, CapacityRule, FitnessConfig, InstanceKind, Solution,
};

#[test]
fn strongly_correlated_guarantees_hold_at_large_delta() {
    let inst = generate_instance(
        InstanceKind::BoundedStronglyCorrelated,
        60,
        1000,
        CapacityRule::Fraction(0.3),
        8,
    )
    .and_then(|i| i.with_delta(80.0))
    .unwrap();
    let mut rng = substream(31, "solutions");
    for bound in [Bound::Chebyshev, Bound::Hoeffding] {
        for alpha in [0.2, 0.05, 0.01] {
            let cfg = FitnessConfig::new(bound, alpha, 80.0).unwrap();
            for k in 0..10 {
                let x = Solution::from_bits((0..60).map(|_| rng.unit() < 0.3).collect());
                let phat = fitness(&inst, &x, &cfg).unwrap().phat;
                let est = estimate_violation_probability(&inst, &x, phat, 200_000, k).unwrap();
                assert!(est.within(alpha, 3.0), "{bound} alpha {alpha}: {est:?}");
            }
        }
    }
}

#[test]
fn violation_estimate_is_thread_count_independent() {
    let inst = generate_instance(InstanceKind::Uncorrelated, 30, 100, CapacityRule::Fraction(0.5), 2)
        .and_then(|i| i.with_delta(20.0))
        .unwrap();
    let x = Solution::from_bits((0..30).map(|i| i % 3 == 0).collect());
    let level = inst.aggregates(&x).mu - 15.0;
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| estimate_violation_probability(&inst, &x, level, 300_000, 5).unwrap());
    let b = four.install(|| estimate_violation_probability(&inst, &x, level, 300_000, 5).unwrap());
    assert_eq!(a, b);
}

#[test]
fn deterministic_profits_reduce_to_classic_knapsack() {
    for seed in 0..8 {
        let inst = generate_instance(InstanceKind::Uncorrelated, 12, 50, CapacityRule::Fraction(0.4), seed).unwrap();
        for bound in [Bound::Chebyshev, Bound::Hoeffding] {
            let cfg = FitnessConfig::new(bound, 0.01, 0.0).unwrap();
            let (x, best) = brute_force_best(&inst, &cfg).unwrap();
            assert_eq!(best.phat, inst.aggregates(&x).mu);
            // plain 0/1 knapsack optimum by dynamic programming over capacity
            let b = inst.capacity() as usize;
            let mut dp = vec![0.0f64; b + 1];
            for item in inst.items() {
                let w = item.weight as usize;
                for c in (w..=b).rev() {
                    dp[c] = dp[c].max(dp[c - w] + item.mu);
                }
            }
            assert_eq!(best.phat, dp[b]);
        }
    }
}

#[test]
fn algorithms_never_beat_the_exhaustive_optimum() {
    let inst = generate_instance(
        InstanceKind::BoundedStronglyCorrelated,
        14,
        200,
        CapacityRule::Fraction(0.5),
        3,
    )
    .and_then(|i| i.with_delta(10.0))
    .unwrap();
    let cfg = FitnessConfig::new(Bound::Chebyshev, 0.05, 10.0).unwrap();
    let (_, best) = brute_force_best(&inst, &cfg).unwrap();
    for algorithm in Algorithm::ALL {
        for seed in 0..5 {
            let r = run(&inst, &cfg, &AlgorithmConfig::new(algorithm, 5_000, seed)).unwrap();
            assert!(best.at_least(&r.best_fitness));
            assert_eq!(r.evaluations_used, 5_000);
        }
    }
}

proptest! {
    #[test]
    fn preferred_bound_predicts_the_larger_profit(
        alpha in 0.0005f64..0.5,
        ones in 1usize..500,
        delta in 0.5f64..100.0,
        mu in 0.0f64..1e5,
    ) {
        let cheb = profit_cheb(mu, ones as f64 * delta * delta / 3.0, alpha).unwrap();
        let hoef = profit_hoef(mu, delta, ones, alpha).unwrap();
        let g = bound_gap_statistic(alpha).unwrap();
        prop_assume!((g - 1.0 / 6.0).abs() > 1e-9);
        match preferred_bound(alpha).unwrap() {
            Preference::Chebyshev => prop_assert!(cheb > hoef),
            Preference::Hoeffding => prop_assert!(hoef > cheb),
            Preference::Tie => unreachable!(),
        }
    }
}
