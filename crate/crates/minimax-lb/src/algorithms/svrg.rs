use rand::Rng;

use super::{AlgorithmSpec, Session, StopRule, Trace};
use crate::error::Result;
use crate::instance::Instance;

/// Epoch-based variance reduction. Each epoch anchors at the current iterate
/// with a full gradient (`n` queries), then takes `epoch_len` corrected
/// stochastic steps at two queries each. Ascent on the dual block.
pub fn run_svrg_vr<R: Rng + ?Sized>(inst: &Instance, spec: &AlgorithmSpec, stop: &StopRule, rng: &mut R) -> Result<Trace> {
    let mut s = Session::new(inst, spec, stop)?;
    let eta = spec.step.unwrap_or(1.0 / (3.0 * s.smoothness()));
    let epoch = spec.epoch_len.unwrap_or(inst.n).max(1);
    let nf = inst.n as f64;
    let mut go = s.observe();
    'outer: while go {
        let (wx, wy) = (s.x().to_vec(), s.y().to_vec());
        let mut full_x = vec![0.0; inst.dim_x];
        let mut full_y = vec![0.0; inst.dim_y];
        for i in 0..inst.n {
            let r = s.query(i, &wx, &wy, None)?;
            full_x.iter_mut().zip(&r.grad_x).for_each(|(a, g)| *a += g / nf);
            full_y.iter_mut().zip(&r.grad_y).for_each(|(a, g)| *a += g / nf);
        }
        for _ in 0..epoch {
            let (i, w) = s.draw(rng);
            let (x, y) = (s.x().to_vec(), s.y().to_vec());
            let cur = s.query(i, &x, &y, None)?;
            let old = s.query(i, &wx, &wy, None)?;
            let vx = (0..x.len()).map(|j| w * (cur.grad_x[j] - old.grad_x[j]) + full_x[j]);
            let vy = (0..y.len()).map(|j| w * (cur.grad_y[j] - old.grad_y[j]) + full_y[j]);
            let nx: Vec<f64> = x.iter().zip(vx).map(|(a, v)| a - eta * v).collect();
            let ny: Vec<f64> = y.iter().zip(vy).map(|(a, v)| a + eta * v).collect();
            go = s.commit(&nx, &ny);
            if !go {
                break 'outer;
            }
        }
    }
    Ok(s.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Algorithm;
    use crate::geo::trial_rng;
    use crate::minimization::make_sc;

    #[test]
    fn one_epoch_costs_n_plus_two_per_step() {
        let inst = make_sc(16.0, 1.0, 1.0, 4, 6).unwrap();
        let mut spec = AlgorithmSpec::new(Algorithm::Svrg);
        spec.epoch_len = Some(5);
        let t = run_svrg_vr(&inst, &spec, &StopRule::queries(4 + 2 * 5), &mut trial_rng(0, 0)).unwrap();
        assert_eq!(t.queries, 14);
    }

    #[test]
    fn unit_epochs_are_gradient_descent() {
        let inst = make_sc(16.0, 1.0, 1.0, 4, 6).unwrap();
        let eta = 0.02;
        let mut spec = AlgorithmSpec::new(Algorithm::Svrg).with_step(eta);
        spec.epoch_len = Some(1);
        let t = run_svrg_vr(&inst, &spec, &StopRule::queries(6 * 10), &mut trial_rng(0, 0)).unwrap();
        let mut x = vec![0.0; inst.dim_x];
        for _ in 0..10 {
            let g = inst.grad(&x, &[]).0;
            x = inst.project_x(&x.iter().zip(&g).map(|(a, g)| a - eta * g).collect::<Vec<_>>());
        }
        for (a, b) in t.x.iter().zip(&x) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn reaches_a_small_gap_on_sc() {
        let inst = make_sc(16.0, 1.0, 1.0, 4, 6).unwrap();
        let mut stop = StopRule::queries(200_000);
        stop.eps = Some(1e-6);
        stop.halt_at_eps = true;
        let t = run_svrg_vr(&inst, &AlgorithmSpec::new(Algorithm::Svrg), &stop, &mut trial_rng(3, 0)).unwrap();
        assert!(t.queries_to_eps.is_some(), "{:?}", t.evaluations.last());
    }
}
