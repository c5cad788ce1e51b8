//! Query the proximal incremental oracle and watch the ledger.

use minimax_lb::minimization::make_sc;
use minimax_lb::oracle::{pifo, QueryCounter};

fn main() -> minimax_lb::Result<()> {
    let inst = make_sc(32.0, 1.0, 1.0, 4, 6)?;
    let mut counter = QueryCounter::new(inst.n);
    let x = vec![0.1; inst.dim_x];

    let r = pifo(&inst, 0, &x, &[], None, &mut counter)?;
    println!("f_0(x) = {:.6}, grad = {:.4?}", r.value, r.grad_x);

    let r = pifo(&inst, 2, &x, &[], Some(0.05), &mut counter)?;
    println!("prox_2(x) = {:.4?}", r.prox_x.unwrap());

    // Points outside the ball come back projected.
    let far = vec![5.0; inst.dim_x];
    let r = pifo(&inst, 1, &far, &[], None, &mut counter)?;
    println!("projection of (5, ..., 5) has norm {:.6}", r.proj_x.iter().map(|v| v * v).sum::<f64>().sqrt());

    println!("queries: total {} per component {:?}", counter.total(), counter.per_component());
    Ok(())
}
