//! Experiment runner and the pieces behind the `mlb` subcommands.

pub mod catalog;
pub mod config;
pub mod curve;
pub mod geo_table;
pub mod run;
pub mod verify;

/// Decimal rendering with 17 significant digits, which round-trips every
/// `f64`. Very large or small magnitudes fall back to exponent notation.
pub fn fmt17(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-20..=20).contains(&exp) {
        let prec = (16 - exp).max(0) as usize;
        format!("{v:.prec$}")
    } else {
        format!("{v:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::fmt17;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 12345.678, -2.5e-7, 1e-4, 6.02e23, 0.0] {
            let s = fmt17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt17(8.0), "8.0000000000000000");
        assert_eq!(fmt17(f64::NAN), "NaN");
    }
}
