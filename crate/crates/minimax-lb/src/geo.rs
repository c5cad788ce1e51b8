//! Tails of sums of independent geometric variables on `{1, 2, ...}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::Serialize;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Largest DP table (`m * j` cells) evaluated exactly.
const EXACT_CELLS: u64 = 50_000_000;

/// Independent stream for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `P(Y_1 + ... + Y_m > j)` with `Y_i` geometric of success probability
/// `p[i]`, by convolving the point masses up to `j`.
pub fn geo_tail_exact(p: &[f64], j: u64) -> f64 {
    let m = p.len() as u64;
    if j < m {
        return 1.0;
    }
    let j = j as usize;
    // dp[s] = P(partial sum = s), s <= j
    let mut dp = vec![0.0; j + 1];
    dp[0] = 1.0;
    let mut next = vec![0.0; j + 1];
    for &pi in p {
        next[0] = 0.0;
        for s in 1..=j {
            next[s] = pi * dp[s - 1] + (1.0 - pi) * next[s - 1];
        }
        std::mem::swap(&mut dp, &mut next);
    }
    (1.0 - dp.iter().sum::<f64>()).clamp(0.0, 1.0)
}

/// Closed form of the two-variable tail.
pub fn f2j_closed_form(p1: f64, p2: f64, j: u64) -> f64 {
    let (a, b) = (1.0 - p1, 1.0 - p2);
    let jf = j as f64;
    if p1 == p2 {
        return jf * p1 * a.powf(jf - 1.0) + a.powf(jf);
    }
    if (p1 - p2).abs() > 1e-4 * p1.max(p2) {
        return (p2 * a.powf(jf) - p1 * b.powf(jf)) / (p2 - p1);
    }
    // Same quantity with the difference quotient expanded, which avoids the
    // cancellation when the probabilities nearly coincide.
    let mut acc = 0.0;
    for r in 0..j {
        acc += a.powi(r as i32) * b.powi((j - 1 - r) as i32);
    }
    p2 * acc + b.powf(jf)
}

/// `f(p) - f(p̄, ..., p̄)` where `p̄` is the mean probability.
pub fn averaging_gap(p: &[f64], j: u64) -> f64 {
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    geo_tail_exact(p, j) - geo_tail_exact(&vec![mean; p.len()], j)
}

/// One-sided lower confidence bound for a Bernoulli rate (Wilson score).
pub fn wilson_lower(successes: u64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let nf = trials as f64;
    let phat = successes as f64 / nf;
    let z2 = z * z;
    let centre = phat + z2 / (2.0 * nf);
    let half = z * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((centre - half) / (1.0 + z2 / nf)).max(0.0)
}

pub fn sample_sum<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> u64 {
    p.iter()
        .map(|&pi| {
            if pi >= 1.0 {
                1
            } else {
                Geometric::new(pi).expect("probability in (0, 1)").sample(rng) + 1
            }
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeoReport {
    pub m: usize,
    pub threshold: u64,
    pub exact: Option<f64>,
    pub estimate: f64,
    pub lower_99: f64,
    pub trials: u64,
    pub pass: bool,
}

/// Checks `P(sum > m² / (4 Σp)) >= 1/9`. Uses the exact tail when the DP is
/// small enough and a Monte Carlo estimate with a 99% lower bound otherwise.
pub fn verify_geo_concentration<R: Rng + ?Sized>(p: &[f64], trials: u64, rng: &mut R) -> GeoReport {
    let m = p.len();
    let total: f64 = p.iter().sum();
    let threshold = ((m * m) as f64 / (4.0 * total)).floor() as u64;
    if (m as u64).saturating_mul(threshold) <= EXACT_CELLS {
        let tail = geo_tail_exact(p, threshold);
        return GeoReport { m, threshold, exact: Some(tail), estimate: tail, lower_99: tail, trials: 0, pass: tail >= 1.0 / 9.0 };
    }
    let seed: u64 = rng.random();
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| sample_sum(p, &mut trial_rng(seed, t)) > threshold)
        .count() as u64;
    let estimate = hits as f64 / trials.max(1) as f64;
    let lower_99 = wilson_lower(hits, trials, Z99);
    GeoReport { m, threshold, exact: None, estimate, lower_99, trials, pass: lower_99 >= 1.0 / 9.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn enumerated_two_variable_tails() {
        // P(Y1 + Y2 = 2) = p1 p2.
        assert!((geo_tail_exact(&[0.5, 0.5], 2) - 0.75).abs() < 1e-15);
        assert!((geo_tail_exact(&[0.5, 0.25], 2) - 0.875).abs() < 1e-15);
        assert!((f2j_closed_form(0.5, 0.5, 2) - 0.75).abs() < 1e-15);
        assert!((f2j_closed_form(0.5, 0.25, 2) - 0.875).abs() < 1e-15);
    }

    #[test]
    fn short_thresholds_are_certain() {
        assert_eq!(geo_tail_exact(&[0.3, 0.9, 0.5], 2), 1.0);
        assert_eq!(geo_tail_exact(&[0.3], 0), 1.0);
    }

    #[test]
    fn equal_probability_cases_concentrate() {
        let mut rng = trial_rng(1, 0);
        for m in [2usize, 4, 8] {
            let r = verify_geo_concentration(&vec![1.0 / m as f64; m], 1000, &mut rng);
            assert!(r.exact.is_some());
            assert!(r.pass, "{r:?}");
        }
        let r = verify_geo_concentration(&[0.5, 0.5], 10, &mut rng);
        assert_eq!((r.threshold, r.exact), (1, Some(1.0)));
    }

    #[test]
    fn monte_carlo_matches_exact() {
        let p = [0.2, 0.5, 0.35];
        let j = 9;
        let exact = geo_tail_exact(&p, j);
        let trials = 200_000u64;
        let hits = (0..trials).filter(|&t| sample_sum(&p, &mut trial_rng(7, t)) > j).count();
        let est = hits as f64 / trials as f64;
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((est - exact).abs() < 3.0 * se, "{est} vs {exact}");
    }

    #[test]
    fn wilson_bound_is_below_rate() {
        let lo = wilson_lower(500, 1000, Z99);
        assert!(lo < 0.5 && lo > 0.45);
    }

    proptest! {
        #[test]
        fn closed_form_agrees_with_dp(p1 in 0.01f64..1.0, p2 in 0.01f64..1.0, j in 1u64..60) {
            let a = f2j_closed_form(p1, p2, j);
            let b = geo_tail_exact(&[p1, p2], j);
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }

        #[test]
        fn closed_form_is_continuous_at_equal(p in 0.05f64..0.95, j in 1u64..40) {
            let a = f2j_closed_form(p, p, j);
            let b = f2j_closed_form(p, p + 1e-9, j);
            prop_assert!((a - b).abs() < 1e-7);
        }

        #[test]
        fn averaging_lowers_the_tail(p in proptest::collection::vec(0.02f64..1.0, 3), j in 1u64..=8) {
            prop_assert!(averaging_gap(&p, j) >= -1e-12);
        }
    }
}
