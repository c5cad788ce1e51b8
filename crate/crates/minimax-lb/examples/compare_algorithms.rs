//! Run every shipped algorithm on a strongly convex instance and compare
//! queries to reach a target suboptimality.

use minimax_lb::algorithms::{run, Algorithm, AlgorithmSpec, StopRule};
use minimax_lb::geo::trial_rng;
use minimax_lb::minimization::make_sc;

fn main() -> minimax_lb::Result<()> {
    let inst = make_sc(32.0, 1.0, 1.0, 8, 20)?;
    let eps = 1e-4;
    let stop = StopRule { max_queries: 400_000, eps: Some(eps), halt_at_eps: true, budget: None, record: false };
    for algorithm in Algorithm::ALL {
        let trace = run(&inst, &AlgorithmSpec::new(algorithm), &stop, &mut trial_rng(5, 0))?;
        match trace.queries_to_eps {
            Some(q) => println!("{algorithm:>13}: {q} queries to {eps:e}"),
            None => println!("{algorithm:>13}: not reached, final {:.3e} ({:?})", trace.final_score, trace.stop),
        }
    }
    Ok(())
}
