//! Closed-form saddle point and restricted gaps, with a brute-force bracket
//! for comparison.

use minimax_lb::brute::restricted_gap_brute;
use minimax_lb::minimax::make_scsc;
use minimax_lb::minimization::make_c;
use minimax_lb::reference::{primal_dual_gap, restricted_gap, saddle_point_scsc};

fn main() -> minimax_lb::Result<()> {
    let inst = make_scsc(16.0, 1.0, 1.0, 1.0, 1.0, 4, 8)?;
    let sp = saddle_point_scsc(&inst)?;
    let y = sp.y_star.clone().unwrap_or_default();
    println!("saddle value {:.10}, gap there {:.2e}", inst.value(&sp.x_star, &y), primal_dual_gap(&inst, &sp.x_star, &y)?);

    let c = make_c(2.0, 1.0, 3, 5)?;
    println!("k  exact gap     brute lower   brute upper");
    for k in 1..5 {
        let b = restricted_gap_brute(&c, k, 20_000)?;
        println!("{k}  {:.6e}  {:.6e}  {:.6e}", restricted_gap(&c, k)?, b.lower, b.upper);
    }
    Ok(())
}
