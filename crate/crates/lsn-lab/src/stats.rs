//! Small statistics toolbox for the experiment harness and tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Wilson 95% score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054_f64; // 97.5% normal quantile
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // the closed form hits the boundary exactly at s = 0 and s = trials
    let lo = if successes == 0 {
        0.0
    } else {
        ((center - spread) / denom).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        ((center + spread) / denom).min(1.0)
    };
    (lo, hi)
}

fn binomial_tail_ge(n: u64, k: u64, p: f64) -> f64 {
    // Pr[X >= k] by direct summation
    let mut term = (1.0 - p).powi(n as i32);
    let mut cdf_below = 0.0;
    for i in 0..k {
        cdf_below += term;
        term *= (n - i) as f64 / (i + 1) as f64 * p / (1.0 - p);
    }
    (1.0 - cdf_below).clamp(0.0, 1.0)
}

fn binomial_tail_le(n: u64, k: u64, p: f64) -> f64 {
    let mut term = (1.0 - p).powi(n as i32);
    let mut cdf = 0.0;
    for i in 0..=k {
        cdf += term;
        if i < n {
            term *= (n - i) as f64 / (i + 1) as f64 * p / (1.0 - p);
        }
    }
    cdf.clamp(0.0, 1.0)
}

/// Exact (brute-force) Clopper-Pearson 95% interval, by bisecting the
/// binomial tail probabilities.
pub fn clopper_pearson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let alpha = 0.05;
    let lo = if successes == 0 {
        0.0
    } else {
        bisect(|p| binomial_tail_ge(trials, successes, p) - alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        bisect(|p| alpha / 2.0 - binomial_tail_le(trials, successes, p))
    };
    (lo, hi)
}

fn bisect(f: impl Fn(f64) -> f64) -> f64 {
    // f is increasing in p for both tails as arranged by the callers
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Pearson chi-square statistic against the given expected counts.
pub fn chi_square_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            if e <= 0.0 {
                0.0
            } else {
                (o as f64 - e).powi(2) / e
            }
        })
        .sum()
}

/// Upper-tail p-value of a chi-square statistic.
pub fn chi_square_pvalue(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    1.0 - dist.cdf(statistic)
}

/// Chi-square test of uniformity over `cells` categories.
pub fn uniformity_pvalue(observed: &[u64]) -> (f64, f64) {
    let total: u64 = observed.iter().sum();
    let cells = observed.len();
    let expected = vec![total as f64 / cells as f64; cells];
    let stat = chi_square_statistic(observed, &expected);
    (stat, chi_square_pvalue(stat, cells - 1))
}

/// Two-sample Kolmogorov-Smirnov statistic over a shared category order.
pub fn ks_two_sample(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ta: f64 = a.iter().sum::<u64>() as f64;
    let tb: f64 = b.iter().sum::<u64>() as f64;
    let (mut ca, mut cb, mut worst) = (0.0, 0.0, 0.0_f64);
    for (&x, &y) in a.iter().zip(b) {
        ca += x as f64 / ta;
        cb += y as f64 / tb;
        worst = worst.max((ca - cb).abs());
    }
    worst
}

/// KS rejection threshold at significance `alpha` for sample sizes (na, nb).
pub fn ks_threshold(alpha: f64, na: u64, nb: u64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt()
}
