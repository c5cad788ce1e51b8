//! Subspace propagation of the chain instances and the stopping times of
//! the component draws that drive it.
//!
//! `F_k` is the span of the first `k` coordinates. Components are 0-based, so
//! the draw that extends `F_k` is the base component `k mod n`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geo::{trial_rng, wilson_lower, Z99};
use crate::instance::{Base, Instance, Sampling};
use crate::linalg::subspace_index;
use crate::oracle::{pifo, QueryCounter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainCase {
    /// Bilinear chain with a lagging dual block: `(F_k, F_{k-1})`.
    Tilde,
    /// Bilinear chain with matched blocks: `(F_k, F_k)`.
    Hat,
    /// Minimization chain, primal block only.
    Minimization,
}

impl ChainCase {
    pub fn of(inst: &Instance) -> Result<Self> {
        match inst.base {
            Base::Tilde { .. } => Ok(ChainCase::Tilde),
            Base::Hat { .. } => Ok(ChainCase::Hat),
            Base::Chain { .. } => Ok(ChainCase::Minimization),
            _ => Err(Error::Unsupported(format!("{} has no single chain", inst.kind))),
        }
    }

    /// Chain depth of a point: the smallest `k` whose subspace pair holds it.
    pub fn depth_of(self, x: &[f64], y: &[f64]) -> usize {
        let kx = subspace_index(x, 0.0);
        let ky = subspace_index(y, 0.0);
        match self {
            ChainCase::Tilde => kx.max(if ky > 0 { ky + 1 } else { 0 }),
            ChainCase::Hat => kx.max(ky),
            ChainCase::Minimization => kx,
        }
    }

    /// The subspace pair `(x, y)` of depth `k`, as coordinate counts.
    pub fn pair(self, k: usize) -> Subspaces {
        match self {
            ChainCase::Tilde => Subspaces { x: k, y: k.saturating_sub(1) },
            ChainCase::Hat => Subspaces { x: k, y: k },
            ChainCase::Minimization => Subspaces { x: k, y: 0 },
        }
    }
}

/// Dimensions of a coordinate subspace pair `(F_x, F_y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Subspaces {
    pub x: usize,
    pub y: usize,
}

impl Subspaces {
    pub fn contains(&self, other: &Subspaces) -> bool {
        other.x <= self.x && other.y <= self.y
    }
}

/// Subspace pair reachable in one query of base component `component` from
/// depth `k` on a chain of length `m` split over `n` components.
pub fn predict_next_subspace(case: ChainCase, m: usize, k: usize, component: usize, n: usize) -> Result<Subspaces> {
    let limit = match case {
        ChainCase::Hat => m.saturating_sub(1),
        _ => m,
    };
    if k >= limit {
        return Err(Error::OutOfRange { index: k, range: format!("0..{limit}") });
    }
    if component >= n {
        return Err(Error::OutOfRange { index: component, range: format!("0..{n}") });
    }
    let next = if component == k % n { k + 1 } else { k };
    Ok(case.pair(next))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpReport {
    pub case: ChainCase,
    pub k: usize,
    /// Exposed index that was queried.
    pub index: usize,
    /// Base component behind `index`.
    pub component: usize,
    pub predicted: Subspaces,
    pub observed: Subspaces,
    /// Largest magnitude of any output coordinate outside `predicted`.
    pub off_subspace: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Outputs of nonconvex chains come from Newton solves; everything else is
/// closed form and must be exactly zero off the predicted subspace.
pub fn jump_tolerance(inst: &Instance) -> f64 {
    match inst.base {
        Base::Hat { .. } => 1e-10,
        Base::Chain { c2, .. } if c2 != 0.0 => 1e-10,
        _ => 0.0,
    }
}

/// Queries exposed component `i` at `(x, y)` and compares the support of the
/// gradient and (when `gamma` is given) prox outputs with the prediction for
/// the depth of the point.
pub fn check_jump(inst: &Instance, x: &[f64], y: &[f64], i: usize, gamma: Option<f64>) -> Result<JumpReport> {
    let case = ChainCase::of(inst)?;
    let m = inst.chain_len().expect("chain base");
    let k = case.depth_of(x, y);
    inst.check_index(i)?;
    let component = inst.sampling.order[i];
    let predicted = predict_next_subspace(case, m, k, component, inst.n)?;
    let mut counter = QueryCounter::new(inst.n);
    let r = pifo(inst, i, x, y, gamma, &mut counter)?;
    let xs: Vec<&[f64]> = [Some(&r.grad_x), r.prox_x.as_ref()].into_iter().flatten().map(|v| v.as_slice()).collect();
    let ys: Vec<&[f64]> = [Some(&r.grad_y), r.prox_y.as_ref()].into_iter().flatten().map(|v| v.as_slice()).collect();
    let tolerance = jump_tolerance(inst);
    let observed = Subspaces {
        x: xs.iter().map(|v| subspace_index(v, tolerance)).max().unwrap_or(0),
        y: ys.iter().map(|v| subspace_index(v, tolerance)).max().unwrap_or(0),
    };
    let tail = |vs: &[&[f64]], from: usize| {
        vs.iter().flat_map(|v| v.iter().skip(from)).fold(0.0f64, |a, b| a.max(b.abs()))
    };
    let off_subspace = tail(&xs, predicted.x).max(tail(&ys, predicted.y));
    Ok(JumpReport {
        case,
        k,
        index: i,
        component,
        predicted,
        observed,
        off_subspace,
        tolerance,
        pass: off_subspace <= tolerance,
    })
}

/// Random point of depth exactly `k`, with unit-scale Gaussian-like entries.
pub fn random_point_at_depth<R: Rng + ?Sized>(inst: &Instance, k: usize, rng: &mut R) -> Result<(Vec<f64>, Vec<f64>)> {
    let case = ChainCase::of(inst)?;
    let pair = case.pair(k);
    if pair.x > inst.dim_x || pair.y > inst.dim_y {
        return Err(Error::OutOfRange { index: k, range: format!("0..={}", inst.dim_x) });
    }
    let scale = inst.scale.beta;
    let mut fill = |len: usize, active: usize| -> Vec<f64> {
        (0..len)
            .map(|j| {
                if j < active {
                    // keep entries away from zero so the depth is exact
                    let v: f64 = rng.random_range(0.1..1.0);
                    if rng.random::<bool>() { v * scale } else { -v * scale }
                } else {
                    0.0
                }
            })
            .collect()
    };
    let x = fill(inst.dim_x, pair.x);
    let y = fill(inst.dim_y, pair.y);
    Ok((x, y))
}

/// Stopping times of the draw sequence: `T_k` is the first draw after
/// `T_{k-1}` whose base component is `(k - 1) mod n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeoProcess {
    /// Success probability of step `k = 1..=K`.
    pub probs: Vec<f64>,
    /// `T_0 = 0, T_1, ..., T_K`.
    pub stopping_times: Vec<u64>,
    /// `Y_k = T_k - T_{k-1}`.
    pub increments: Vec<u64>,
}

/// Probability of drawing each base component.
pub fn base_probabilities(sampling: &Sampling) -> Vec<f64> {
    let mut p = vec![0.0; sampling.probs.len()];
    for (i, &c) in sampling.order.iter().enumerate() {
        p[c] = sampling.probs[i];
    }
    p
}

pub fn simulate_stopping_times<R: Rng + ?Sized>(sampling: &Sampling, steps: usize, rng: &mut R) -> GeoProcess {
    let n = sampling.probs.len();
    let base = base_probabilities(sampling);
    let probs = (1..=steps).map(|k| base[(k - 1) % n]).collect();
    let mut stopping_times = Vec::with_capacity(steps + 1);
    stopping_times.push(0u64);
    let mut t = 0u64;
    for k in 1..=steps {
        let target = (k - 1) % n;
        loop {
            t += 1;
            if sampling.order[sampling.sample(rng)] == target {
                break;
            }
        }
        stopping_times.push(t);
    }
    let increments = stopping_times.windows(2).map(|w| w[1] - w[0]).collect();
    GeoProcess { probs, stopping_times, increments }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StoppingTail {
    pub depth: usize,
    pub threshold: f64,
    pub estimate: f64,
    pub lower_99: f64,
    pub trials: u64,
    pub pass: bool,
}

/// Monte Carlo estimate of `P(T_{M+1} > n (M+1) / 4)` with a 99% lower
/// confidence bound, passing when the bound is at least 1/9.
pub fn stopping_tail(sampling: &Sampling, depth: usize, trials: u64, seed: u64) -> StoppingTail {
    let n = sampling.probs.len();
    let threshold = (n * (depth + 1)) as f64 / 4.0;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let g = simulate_stopping_times(sampling, depth + 1, &mut trial_rng(seed, t));
            g.stopping_times[depth + 1] as f64 > threshold
        })
        .count() as u64;
    let lower_99 = wilson_lower(hits, trials, Z99);
    StoppingTail {
        depth,
        threshold,
        estimate: hits as f64 / trials.max(1) as f64,
        lower_99,
        trials,
        pass: lower_99 >= 1.0 / 9.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimax::{make_hat_r, make_tilde_r};
    use crate::minimization::make_r;

    #[test]
    fn printed_predictions() {
        let t = predict_next_subspace(ChainCase::Tilde, 5, 0, 0, 2).unwrap();
        assert_eq!(t, Subspaces { x: 1, y: 0 });
        let t = predict_next_subspace(ChainCase::Tilde, 5, 0, 1, 2).unwrap();
        assert_eq!(t, Subspaces { x: 0, y: 0 });
        let h = predict_next_subspace(ChainCase::Hat, 5, 1, 1, 3).unwrap();
        assert_eq!(h, Subspaces { x: 2, y: 2 });
        assert!(predict_next_subspace(ChainCase::Hat, 5, 4, 1, 3).is_err());
        assert!(predict_next_subspace(ChainCase::Tilde, 5, 5, 0, 3).is_err());
    }

    #[test]
    fn origin_is_silent_off_the_first_component() {
        let inst = make_tilde_r(6, 1.0, (0.5, 0.5), 3).unwrap();
        for i in 1..3 {
            let r = check_jump(&inst, &[0.0; 6], &[0.0; 6], i, Some(0.4)).unwrap();
            assert!(r.pass);
            assert_eq!(r.observed, Subspaces { x: 0, y: 0 });
        }
    }

    #[test]
    fn tilde_jump_from_depth_three() {
        let inst = make_tilde_r(8, 1.0, (0.5, 0.5), 2).unwrap();
        let mut rng = trial_rng(3, 0);
        let (x, y) = random_point_at_depth(&inst, 3, &mut rng).unwrap();
        let r = check_jump(&inst, &x, &y, 1, Some(0.3)).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.observed, Subspaces { x: 4, y: 3 });
    }

    #[test]
    fn hat_at_the_end_is_out_of_range() {
        let inst = make_hat_r(5, 1.0, (1.0, 1.0, 1.0), 2).unwrap();
        let mut rng = trial_rng(4, 0);
        let (x, y) = random_point_at_depth(&inst, 4, &mut rng).unwrap();
        assert!(matches!(check_jump(&inst, &x, &y, 0, None), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn minimization_chain_jumps_one_step() {
        let inst = make_r(7, 1.0, 1.0, (0.3, 0.0, 1.0), 3).unwrap();
        let mut rng = trial_rng(5, 0);
        for k in 0..7 {
            let (x, y) = random_point_at_depth(&inst, k, &mut rng).unwrap();
            for i in 0..3 {
                let r = check_jump(&inst, &x, &y, i, Some(0.5)).unwrap();
                assert!(r.pass, "{r:?}");
                let expect = if i == k % 3 { k + 1 } else { k };
                assert_eq!(r.observed.x, expect);
            }
        }
    }

    #[test]
    fn stopping_times_are_reproducible_and_increasing() {
        let s = Sampling::uniform(2);
        let a = simulate_stopping_times(&s, 20, &mut trial_rng(9, 1));
        let b = simulate_stopping_times(&s, 20, &mut trial_rng(9, 1));
        assert_eq!(a, b);
        assert!(a.increments.iter().all(|&y| y >= 1));
        assert!(a.stopping_times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn increments_have_geometric_means() {
        let inst = make_tilde_r(4, 1.0, (0.5, 0.5), 3).unwrap().with_distribution(&[0.5, 0.3, 0.2]).unwrap();
        let trials = 100_000u64;
        let mut sums = [0.0f64; 3];
        for t in 0..trials {
            let g = simulate_stopping_times(&inst.sampling, 3, &mut trial_rng(11, t));
            for (s, y) in sums.iter_mut().zip(&g.increments) {
                *s += *y as f64;
            }
        }
        let base = base_probabilities(&inst.sampling);
        for (k, s) in sums.iter().enumerate() {
            let mean = s / trials as f64;
            let expect = 1.0 / base[k];
            assert!((mean / expect - 1.0).abs() < 0.02, "step {k}: {mean} vs {expect}");
        }
    }
}
