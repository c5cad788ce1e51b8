//! Build the strongly-convex-strongly-concave hard instance for a parameter
//! set and report the chain length, horizon and query budget it implies.

use minimax_lb::bounds::{lower_bound_curve, select_m_n, Case, LowerBoundQuery, Params};
use minimax_lb::harness::catalog::build_instance;

fn main() -> minimax_lb::Result<()> {
    let q = LowerBoundQuery {
        case: Case::Scsc,
        params: Params { n: 4, l: 16.0, mu_x: 1.0, mu_y: 1.0, r_x: 1.0, r_y: 1.0, delta: 1.0 },
        eps: 3e-5,
    };
    let plan = select_m_n(&q)?;
    let (inst, _) = build_instance(&q)?;
    println!("kind {}  n = {}  dims = ({}, {})", inst.kind, inst.n, inst.dim_x, inst.dim_y);
    println!("chain m = {}, horizon M = {}, budget N = {}", plan.m, plan.depth, plan.budget);
    println!("L = {}, L' = {}", inst.regularity.l, inst.regularity.l_avg);
    println!("lower bound curve: {:.1} queries", lower_bound_curve(&q)?);
    let origin = (vec![0.0; inst.dim_x], vec![0.0; inst.dim_y]);
    println!("f(0, 0) = {}", inst.value(&origin.0, &origin.1));
    Ok(())
}
