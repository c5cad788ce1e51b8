//! A prox-only walk from the origin: the iterate gains one chain coordinate
//! only when the sampled component is the one that owns the next link.

use minimax_lb::geo::trial_rng;
use minimax_lb::minimax::make_tilde_r;
use minimax_lb::prox::prox;
use minimax_lb::zero_chain::ChainCase;
use rand::Rng;

fn main() -> minimax_lb::Result<()> {
    let n = 3;
    let inst = make_tilde_r(12, 1.0, (0.5, 0.5), n)?;
    let case = ChainCase::of(&inst)?;
    let mut rng = trial_rng(3, 0);
    let (mut x, mut y) = (vec![0.0; inst.dim_x], vec![0.0; inst.dim_y]);
    for t in 0..24 {
        let i = rng.random_range(0..n);
        let (u, v) = prox(&inst, i, &x, &y, 0.5)?;
        x = u;
        y = v;
        println!("step {t:2}: drew {i}, depth {}", case.depth_of(&x, &y));
    }
    Ok(())
}
