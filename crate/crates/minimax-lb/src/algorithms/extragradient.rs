use super::{AlgorithmSpec, Session, StopRule, Trace};
use crate::error::Result;
use crate::instance::Instance;

/// Full-batch extragradient. Each iteration evaluates every component at the
/// current point and at the extrapolated point, so it costs `2n` queries.
pub fn run_extragradient(inst: &Instance, spec: &AlgorithmSpec, stop: &StopRule) -> Result<Trace> {
    let mut s = Session::new(inst, spec, stop)?;
    let eta = spec.step.unwrap_or(1.0 / (2.0 * s.smoothness()));
    let mut go = s.observe();
    while go {
        let (x, y) = (s.x().to_vec(), s.y().to_vec());
        let (gx, gy) = full_gradient(&mut s, &x, &y)?;
        let hx = inst.project_x(&step(&x, &gx, -eta));
        let hy = inst.project_y(&step(&y, &gy, eta));
        s.visit(&hx, &hy);
        let (gx, gy) = full_gradient(&mut s, &hx, &hy)?;
        go = s.commit(&step(&x, &gx, -eta), &step(&y, &gy, eta));
    }
    Ok(s.finish())
}

fn step(v: &[f64], g: &[f64], eta: f64) -> Vec<f64> {
    v.iter().zip(g).map(|(a, g)| a + eta * g).collect()
}

fn full_gradient(s: &mut Session<'_>, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = s.inst.n;
    let mut gx = vec![0.0; x.len()];
    let mut gy = vec![0.0; y.len()];
    for i in 0..n {
        let r = s.query(i, x, y, None)?;
        gx.iter_mut().zip(&r.grad_x).for_each(|(a, g)| *a += g / n as f64);
        gy.iter_mut().zip(&r.grad_y).for_each(|(a, g)| *a += g / n as f64);
    }
    Ok((gx, gy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Algorithm;
    use crate::minimax::make_scsc;

    #[test]
    fn each_iteration_costs_two_passes() {
        let inst = make_scsc(16.0, 1.0, 1.0, 1.0, 1.0, 4, 4).unwrap();
        let t = run_extragradient(&inst, &AlgorithmSpec::new(Algorithm::Extragradient), &StopRule::queries(24)).unwrap();
        assert_eq!(t.queries, 24);
    }

    #[test]
    fn gap_shrinks_on_scsc() {
        let inst = make_scsc(16.0, 1.0, 1.0, 1.0, 1.0, 4, 4).unwrap();
        let t = run_extragradient(&inst, &AlgorithmSpec::new(Algorithm::Extragradient), &StopRule::queries(8 * 400)).unwrap();
        let first = t.evaluations[1].score;
        let last = t.final_score;
        assert!(last < 1e-3 * first, "{first} -> {last}");
    }
}
