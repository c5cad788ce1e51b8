use rand::Rng;

use super::{Algorithm, AlgorithmSpec, Session, StopRule, Trace};
use crate::error::Result;
use crate::instance::Instance;

/// Stochastic gradient descent-ascent with importance weights and
/// projection. Plain stochastic gradient descent on minimization kinds.
pub fn run_sgda<R: Rng + ?Sized>(inst: &Instance, spec: &AlgorithmSpec, stop: &StopRule, rng: &mut R) -> Result<Trace> {
    let mut s = Session::new(inst, spec, stop)?;
    let eta = spec.step.unwrap_or(1.0 / (3.0 * s.smoothness()));
    let mut go = s.observe();
    while go {
        let (i, w) = s.draw(rng);
        let (x, y) = (s.x().to_vec(), s.y().to_vec());
        let r = s.query(i, &x, &y, None)?;
        let nx: Vec<f64> = x.iter().zip(&r.grad_x).map(|(a, g)| a - eta * w * g).collect();
        let ny: Vec<f64> = y.iter().zip(&r.grad_y).map(|(a, g)| a + eta * w * g).collect();
        go = s.commit(&nx, &ny);
    }
    let mut t = s.finish();
    t.algorithm = Algorithm::Sgda;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Algorithm;
    use crate::geo::trial_rng;
    use crate::minimax::{make_1d, make_tilde_r, OneDim};
    use crate::zero_chain::ChainCase;

    #[test]
    fn zero_step_keeps_the_iterate() {
        let inst = make_tilde_r(5, 1.0, (0.5, 0.5), 2).unwrap();
        let spec = AlgorithmSpec::new(Algorithm::Sgda).with_step(0.0);
        let t = run_sgda(&inst, &spec, &StopRule::queries(5), &mut trial_rng(1, 0)).unwrap();
        assert!(t.x.iter().chain(&t.y).all(|&v| v == 0.0));
        assert_eq!(t.queries, 5);
    }

    #[test]
    fn never_drawing_the_first_component_keeps_x_at_zero() {
        let inst = make_1d(OneDim::HScsc, 2.0, 4, 1.0, Some(1.0)).unwrap();
        let spec = AlgorithmSpec::new(Algorithm::Sgda).with_forced(vec![1, 2, 3]);
        let t = run_sgda(&inst, &spec, &StopRule::queries(30), &mut trial_rng(1, 0)).unwrap();
        assert_eq!(t.x, vec![0.0]);
    }

    #[test]
    fn depth_never_exceeds_activating_draws() {
        let n = 3;
        let inst = make_tilde_r(12, 1.0, (0.5, 0.5), n).unwrap();
        let mut rng = trial_rng(2, 0);
        let spec = AlgorithmSpec::new(Algorithm::Sgda).with_step(0.2);
        let mut s = Session::new(&inst, &spec, &StopRule::queries(200)).unwrap();
        let mut depth = 0;
        let mut activations = 0;
        while s.observe() {
            let (i, w) = s.draw(&mut rng);
            if inst.sampling.order[i] == activations % n {
                activations += 1;
            }
            let (x, y) = (s.x().to_vec(), s.y().to_vec());
            let r = s.query(i, &x, &y, None).unwrap();
            let nx: Vec<f64> = x.iter().zip(&r.grad_x).map(|(a, g)| a - 0.2 * w * g).collect();
            let ny: Vec<f64> = y.iter().zip(&r.grad_y).map(|(a, g)| a + 0.2 * w * g).collect();
            s.commit(&nx, &ny);
            depth = ChainCase::Tilde.depth_of(s.x(), s.y());
            assert!(depth <= activations, "depth {depth} > {activations}");
        }
        assert!(depth > 0);
    }
}
