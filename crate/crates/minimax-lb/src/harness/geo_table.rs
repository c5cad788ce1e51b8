//! Tail tables for sums of equal-probability geometric variables.

use std::io::Write;

use super::fmt17;
use crate::error::Result;
use crate::geo::{geo_tail_exact, sample_sum, trial_rng, wilson_lower, Z99};

/// For each `m` and `p` (where `p = 0` means `1/m`): the threshold
/// `⌊m / (4p)⌋`, its exact tail, and a Monte Carlo estimate with a 99% lower
/// bound.
pub fn write_geo_table<W: Write>(ms: &[usize], ps: &[f64], trials: u64, seed: u64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "p", "threshold", "exact_tail", "mc_estimate", "mc_lower_99", "pass"])?;
    for &m in ms {
        for &p0 in ps {
            let p = if p0 > 0.0 { p0 } else { 1.0 / m as f64 };
            let probs = vec![p; m];
            let threshold = ((m * m) as f64 / (4.0 * p * m as f64)).floor() as u64;
            let exact = geo_tail_exact(&probs, threshold);
            let hits = (0..trials).filter(|&t| sample_sum(&probs, &mut trial_rng(seed, t)) > threshold).count() as u64;
            let est = if trials > 0 { hits as f64 / trials as f64 } else { f64::NAN };
            w.write_record([
                m.to_string(),
                fmt17(p),
                threshold.to_string(),
                fmt17(exact),
                fmt17(est),
                fmt17(wilson_lower(hits, trials, Z99)),
                (exact >= 1.0 / 9.0).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_probability_table() {
        let mut buf = Vec::new();
        write_geo_table(&[2, 8], &[0.0, 0.5], 2000, 1, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().skip(1).all(|l| l.ends_with("true")));
    }
}
