//! Evaluate every lower-bound curve at one parameter point.

use minimax_lb::bounds::{lower_bound_curve, Case, LowerBoundQuery, Params};

fn main() {
    let params = Params { n: 16, l: 64.0, mu_x: 1.0, mu_y: 1.0, r_x: 1.0, r_y: 1.0, delta: 1.0 };
    for case in Case::ALL {
        let q = LowerBoundQuery { case, params, eps: 1e-6 };
        match lower_bound_curve(&q) {
            Ok(v) => println!("{case:>9}: {v:.4e}"),
            Err(e) => println!("{case:>9}: {e}"),
        }
    }
}
