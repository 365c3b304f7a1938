//! Kruskal–Wallis H test and Bonferroni-corrected pairwise markers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KruskalWallis {
    pub h: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Kruskal–Wallis test with average ranks for ties and the usual tie
/// correction. When every value is tied the statistic is defined as 0 with
/// p-value 1.
pub fn kruskal_wallis(groups: &[&[f64]]) -> Result<KruskalWallis> {
    if groups.len() < 2 {
        return Err(Error::Domain("Kruskal-Wallis needs at least 2 groups".into()));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::Domain("Kruskal-Wallis groups must be non-empty".into()));
    }
    if groups.iter().flat_map(|g| g.iter()).any(|v| v.is_nan()) {
        return Err(Error::Domain("Kruskal-Wallis input contains NaN".into()));
    }
    let df = groups.len() - 1;

    let mut pooled: Vec<(f64, usize)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, values)| values.iter().map(move |&v| (v, g)))
        .collect();
    pooled.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("no NaN"));
    let total = pooled.len() as f64;

    let mut rank_sums = vec![0.0; groups.len()];
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start + 1;
        while end < pooled.len() && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        // ranks start..end (0-based) share the average 1-based rank
        let avg = (start + end + 1) as f64 / 2.0;
        for &(_, g) in &pooled[start..end] {
            rank_sums[g] += avg;
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        start = end;
    }

    let correction = 1.0 - tie_term / (total * total * total - total);
    if correction <= 0.0 {
        return Ok(KruskalWallis {
            h: 0.0,
            df,
            p_value: 1.0,
        });
    }
    let grand = (total + 1.0) / 2.0;
    let spread: f64 = rank_sums
        .iter()
        .zip(groups)
        .map(|(r, g)| {
            let len = g.len() as f64;
            let dev = r / len - grand;
            len * dev * dev
        })
        .sum();
    let h = 12.0 * spread / (total * (total + 1.0)) / correction;
    Ok(KruskalWallis {
        h,
        df,
        p_value: chi_square_sf(h, df as f64),
    })
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma_q(df / 2.0, x / 2.0)
}

/// `Q(a, x) = Γ(a, x) / Γ(a)` for `a > 0`, `x >= 0`.
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "Q(a, x) needs a > 0 and x >= 0");
    if x == 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut denom = a;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Modified Lentz evaluation of the continued fraction for `Q(a, x)`.
fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let step = d * c;
        h *= step;
        if (step - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Lanczos approximation (g = 7, 9 coefficients).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Outcome of comparing a column algorithm against one competitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Marker {
    /// The column algorithm is significantly better.
    #[serde(rename = "+")]
    Better,
    /// The competitor is significantly better.
    #[serde(rename = "-")]
    Worse,
    #[serde(rename = "*")]
    NoDifference,
}

impl Marker {
    pub fn symbol(self) -> &'static str {
        match self {
            Marker::Better => "+",
            Marker::Worse => "-",
            Marker::NoDifference => "*",
        }
    }

    pub fn reverse(self) -> Marker {
        match self {
            Marker::Better => Marker::Worse,
            Marker::Worse => Marker::Better,
            Marker::NoDifference => Marker::NoDifference,
        }
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitorMark {
    pub competitor: String,
    pub marker: Marker,
}

/// For every group (column), its markers against every other group, in
/// input order. Each pair is tested once with a two-group Kruskal–Wallis
/// test at `alpha_sig / pairs`; the higher mean wins a significant pair.
pub fn pairwise_markers(groups: &[(&str, &[f64])], alpha_sig: f64) -> Result<Vec<Vec<CompetitorMark>>> {
    let k = groups.len();
    if k < 2 {
        return Err(Error::Domain("pairwise comparison needs at least 2 groups".into()));
    }
    if !(alpha_sig > 0.0 && alpha_sig < 1.0) {
        return Err(Error::Domain(format!(
            "significance level must lie in (0, 1), got {alpha_sig}"
        )));
    }
    let pairs = (k * (k - 1) / 2) as f64;
    let threshold = alpha_sig / pairs;

    let mut table = vec![vec![Marker::NoDifference; k]; k];
    for a in 0..k {
        for b in (a + 1)..k {
            let test = kruskal_wallis(&[groups[a].1, groups[b].1])?;
            let marker = if test.p_value < threshold {
                let (ma, mb) = (mean(groups[a].1), mean(groups[b].1));
                if ma > mb {
                    Marker::Better
                } else if mb > ma {
                    Marker::Worse
                } else {
                    Marker::NoDifference
                }
            } else {
                Marker::NoDifference
            };
            table[a][b] = marker;
            table[b][a] = marker.reverse();
        }
    }
    Ok((0..k)
        .map(|a| {
            (0..k)
                .filter(|&b| b != a)
                .map(|b| CompetitorMark {
                    competitor: groups[b].0.to_string(),
                    marker: table[a][b],
                })
                .collect()
        })
        .collect())
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (divisor `len - 1`); 0 for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}
