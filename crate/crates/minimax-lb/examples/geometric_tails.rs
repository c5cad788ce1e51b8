//! Tails of sums of geometric variables: exact dynamic program against
//! simulation, and the stopping-time tail of uniform sampling.

use minimax_lb::geo::{geo_tail_exact, verify_geo_concentration, trial_rng};
use minimax_lb::instance::Sampling;
use minimax_lb::zero_chain::stopping_tail;

fn main() {
    for m in [2usize, 4, 8] {
        let p = vec![1.0 / m as f64; m];
        let j = (m * m) as u64 / 4 / (p.iter().sum::<f64>() as u64).max(1);
        println!("m = {m}, p = 1/m: P(sum > {j}) = {:.6}", geo_tail_exact(&p, j));
    }
    let report = verify_geo_concentration(&[0.1, 0.05, 0.2], 20_000, &mut trial_rng(1, 0));
    println!("{report:?}");
    let tail = stopping_tail(&Sampling::uniform(8), 7, 100_000, 11);
    println!("n = 8: P(T_8 > 16) ~ {:.5} (99% lower bound {:.5})", tail.estimate, tail.lower_99);
}
