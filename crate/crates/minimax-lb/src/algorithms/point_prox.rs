use rand::Rng;

use super::{AlgorithmSpec, Session, StopRule, Trace};
use crate::error::{Error, Result};
use crate::instance::Instance;

/// Incremental proximal point: each step replaces the iterate with the prox
/// point of the drawn component at weight `gamma / (n p_i)`.
pub fn run_point_prox<R: Rng + ?Sized>(inst: &Instance, spec: &AlgorithmSpec, stop: &StopRule, rng: &mut R) -> Result<Trace> {
    let mut s = Session::new(inst, spec, stop)?;
    let max_weight = 1.0 / (inst.n as f64 * s.min_prob());
    let gamma = match spec.gamma {
        Some(g) => g,
        None => {
            let g = 1.0 / s.smoothness();
            match inst.prox_limit {
                Some(limit) => g.min(0.5 * limit / max_weight),
                None => g,
            }
        }
    };
    if let Some(limit) = inst.prox_limit {
        if gamma * max_weight >= limit {
            return Err(Error::ProxWeight { gamma: gamma * max_weight, limit });
        }
    }
    let mut go = s.observe();
    while go {
        let (i, w) = s.draw(rng);
        let (x, y) = (s.x().to_vec(), s.y().to_vec());
        let r = s.query(i, &x, &y, Some(gamma * w))?;
        go = s.commit(&r.prox_x.unwrap(), &r.prox_y.unwrap());
    }
    Ok(s.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Algorithm;
    use crate::geo::trial_rng;
    use crate::minimization::make_gsc_1d;
    use crate::oracle::{pifo, QueryCounter};
    use crate::linalg::{dist, norm};
    use crate::minimax::make_tilde_r;

    #[test]
    fn later_components_leave_the_origin_fixed() {
        let inst = make_gsc_1d(4.0, 1.0, 4).unwrap();
        let spec = AlgorithmSpec::new(Algorithm::PointProx).with_forced(vec![1, 2, 3]);
        let t = run_point_prox(&inst, &spec, &StopRule::queries(12), &mut trial_rng(0, 0)).unwrap();
        assert_eq!(t.x, vec![0.0]);
    }

    #[test]
    fn component_saddle_point_is_a_fixed_point() {
        // Proximal point on a single component converges to its saddle
        // point, where one more prox step must not move.
        let inst = make_tilde_r(6, 1.0, (0.5, 0.5), 3).unwrap();
        let mut spec = AlgorithmSpec::new(Algorithm::PointProx).with_forced(vec![0]);
        spec.gamma = Some(5.0);
        let t = run_point_prox(&inst, &spec, &StopRule::queries(400), &mut trial_rng(0, 0)).unwrap();
        let mut c = QueryCounter::new(3);
        let r = pifo(&inst, 0, &t.x, &t.y, Some(5.0), &mut c).unwrap();
        let moved = dist(&r.prox_x.unwrap(), &t.x) + dist(&r.prox_y.unwrap(), &t.y);
        assert!(moved < 1e-8, "{moved}");
        assert!(norm(&t.x) > 0.1);
    }
}
