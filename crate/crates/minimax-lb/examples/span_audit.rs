//! Record a run and check that every iterate stays in the span of what the
//! oracle has revealed.

use minimax_lb::algorithms::{protocol_audit, run, Algorithm, AlgorithmSpec, StopRule};
use minimax_lb::geo::trial_rng;
use minimax_lb::minimax::make_csc;

fn main() -> minimax_lb::Result<()> {
    let inst = make_csc(4.0, 1.0, 1.0, 1.0, 3, 8)?;
    let stop = StopRule { max_queries: 300, eps: None, halt_at_eps: false, budget: None, record: true };
    for algorithm in Algorithm::ALL {
        let trace = run(&inst, &AlgorithmSpec::new(algorithm), &stop, &mut trial_rng(2, 0))?;
        let report = protocol_audit(&trace)?;
        println!(
            "{algorithm:>13}: {} iterates, worst residual {:.1e}, {}",
            report.iterates,
            report.worst_relative,
            if report.pass() { "compliant" } else { "VIOLATION" }
        );
    }
    Ok(())
}
