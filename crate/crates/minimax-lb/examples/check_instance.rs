//! Run the per-instance invariants on a good instance and on one whose
//! declared smoothness is too small.

use minimax_lb::harness::verify::verify_instance;
use minimax_lb::minimization::make_sc;

fn main() -> minimax_lb::Result<()> {
    let good = make_sc(16.0, 1.0, 1.0, 4, 5)?;
    let mut bad = good.clone();
    bad.regularity.l *= 0.5;
    for (label, inst) in [("declared", &good), ("halved L", &bad)] {
        for c in verify_instance(inst, 1) {
            println!("{label:>9} {:<10} {} {}", c.name, if c.pass { "ok" } else { "FAIL" }, c.detail);
        }
    }
    Ok(())
}
