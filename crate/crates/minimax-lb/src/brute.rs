//! Independent numerical checks of the restricted-gap formulas.
//!
//! Every restricted problem is solved by projected FISTA and then bracketed by
//! weak duality, so the reported `lower` is a certified lower bound on the
//! true restricted gap regardless of how far the iterations got.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Base, Instance};
use crate::linalg::{norm, norm_sq, project_ball};
use crate::reference::{ball_support, min_over_ball, ChainQuadratic, TildeParts};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn project_restricted(v: &mut Vec<f64>, k: usize, radius: f64) {
    for t in v.iter_mut().skip(k) {
        *t = 0.0;
    }
    if radius.is_finite() {
        *v = project_ball(v, radius);
    }
}

/// Minimizes a smooth convex `f` over `{|z| <= radius, z_j = 0 for j >= k}`
/// with backtracking FISTA and function-value restarts.
pub fn projected_fista<F>(f: F, start: &[f64], k: usize, radius: f64, iters: usize) -> Vec<f64>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = start.to_vec();
    project_restricted(&mut x, k, radius);
    let mut fx = f(&x).0;
    let mut z = x.clone();
    let mut t: f64 = 1.0;
    let mut lip = 1.0;
    for _ in 0..iters {
        let (fz, gz) = f(&z);
        let mut next;
        loop {
            next = z.iter().zip(&gz).map(|(a, g)| a - g / lip).collect::<Vec<_>>();
            project_restricted(&mut next, k, radius);
            let d: Vec<f64> = next.iter().zip(&z).map(|(a, b)| a - b).collect();
            let model = fz + gz.iter().zip(&d).map(|(g, d)| g * d).sum::<f64>() + 0.5 * lip * norm_sq(&d);
            if f(&next).0 <= model + 1e-15 * fz.abs() || lip > 1e30 {
                break;
            }
            lip *= 2.0;
        }
        let fnext = f(&next).0;
        if fnext > fx {
            // Restart from the best point.
            z = x.clone();
            t = 1.0;
            continue;
        }
        let moved = next.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next.iter().zip(&x).map(|(a, b)| a + (t - 1.0) / t_next * (a - b)).collect();
        x = next;
        fx = fnext;
        t = t_next;
        lip *= 0.95;
        if moved <= 1e-16 * (1.0 + norm(&x)) {
            break;
        }
    }
    x
}

/// `dS/dτ / τ` for the smoothed support function, the factor that maps the
/// inner vector to the best response.
fn response_factor(tau: f64, c: f64, r: f64) -> f64 {
    if c > 0.0 && tau <= c * r {
        1.0 / c
    } else if tau == 0.0 {
        0.0
    } else {
        r / tau
    }
}

fn smoothing_schedule(c: f64, scale: f64) -> Vec<f64> {
    if c > 0.0 {
        vec![0.0]
    } else {
        (1..=12).map(|e| scale * 10f64.powi(-e)).collect()
    }
}

/// Certified bracket on
/// `min_{x in X ∩ F_k} phi(x) - max_{y in Y ∩ F_k} psi(y)` for the bilinear
/// chain kinds, and on `min_{X ∩ F_k} f - min_X f` for convex minimization.
pub fn restricted_gap_brute(inst: &Instance, k: usize, iters: usize) -> Result<Bracket> {
    let dim = inst.dim_x;
    if k == 0 || k >= dim {
        return Err(Error::OutOfRange { index: k, range: format!("1..={}", dim - 1) });
    }
    match &inst.base {
        Base::Chain { c2, .. } if *c2 == 0.0 => minimization_bracket(inst, k, iters),
        Base::Tilde { .. } => {
            let t = TildeParts::of(inst).unwrap();
            if !(t.rx.is_finite() && t.ry.is_finite()) {
                return Err(Error::Unsupported("restricted gap needs bounded feasible sets".into()));
            }
            Ok(tilde_bracket(&t, k, iters))
        }
        _ => Err(Error::Unsupported(format!("restricted gap brute force for {}", inst.kind))),
    }
}

/// Certified lower bound on the smallest eigenvalue of the symmetric
/// tridiagonal matrix with diagonal `diag` and constant off-diagonal `off`,
/// by Sturm-count bisection.
pub(crate) fn min_eigenvalue(diag: &[f64], off: f64) -> f64 {
    let below = |s: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for (i, d) in diag.iter().enumerate() {
            q = d - s - if i == 0 { 0.0 } else { off * off / q };
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let spread = diag.iter().map(|d| d.abs()).fold(0.0, f64::max) + 2.0 * off.abs();
    let (mut lo, mut hi) = (-spread - 1.0, spread + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

fn minimization_bracket(inst: &Instance, k: usize, iters: usize) -> Result<Bracket> {
    let dim = inst.dim_x;
    let r = inst.feasible.rx();
    let f = |x: &[f64]| {
        let (g, _) = inst.grad(x, &[]);
        (inst.value(x, &[]), g)
    };
    let chain = ChainQuadratic::of(inst).ok_or_else(|| Error::Unsupported("nonconvex chain".into()))?;
    let curv = inst.scale.curvature();
    // Lower and upper bounds on the minimum over the restricted ball: the
    // better of the Frank-Wolfe gap and the strong-convexity model at the
    // final iterate.
    let bounds = |kk: usize| {
        let x = projected_fista(f, &vec![0.0; dim], kk, r, iters);
        let (fx, g) = f(&x);
        let gk = &g[..kk];
        let fw = gk.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() + r * norm(gk);
        let mut lower = fx - fw.max(0.0);
        let mu = curv * min_eigenvalue(&chain.diag[..kk], -1.0);
        if mu > 0.0 {
            let mut z: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - b / mu).collect();
            project_restricted(&mut z, kk, r);
            let d: Vec<f64> = z.iter().zip(&x).map(|(a, b)| a - b).collect();
            let model = fx + g.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() + 0.5 * mu * norm_sq(&d);
            lower = lower.max(model);
        }
        (lower.min(fx), fx)
    };
    let (lo_k, hi_k) = bounds(k);
    let (lo_all, hi_all) = bounds(dim);
    // Cross-check the unrestricted minimum against the secular solve.
    let exact = min_over_ball(inst)?.1;
    let lo_all = lo_all.min(exact);
    let hi_all = hi_all.max(exact).min(hi_all);
    Ok(Bracket { lower: lo_k - hi_all, upper: hi_k - lo_all })
}

fn tilde_bracket(t: &TildeParts, k: usize, iters: usize) -> Bracket {
    let m = t.spec.m;
    let start = vec![0.0; m];

    // Primal side: min over X ∩ F_k of phi.
    let mut x = start.clone();
    let mut y_cand = Vec::new();
    for delta in smoothing_schedule(t.c2, 1.0 + t.ry) {
        let phi_s = |x: &[f64]| {
            let g = t.coupling(x);
            let tau = (norm_sq(&g) + delta * delta).sqrt();
            let w = response_factor(tau, t.c2, t.ry);
            let resp: Vec<f64> = g.iter().map(|v| w * v).collect();
            let mut grad: Vec<f64> = x.iter().map(|v| t.c1 * v).collect();
            grad[0] -= 1.0;
            for (j, v) in resp.iter().enumerate() {
                t.spec.row_axpy(j + 1, *v, &mut grad);
            }
            let val = 0.5 * t.c1 * norm_sq(x) - x[0] + ball_support(tau, t.c2, t.ry);
            (val, grad)
        };
        x = projected_fista(phi_s, &x, k, t.rx, iters);
        let g = t.coupling(&x);
        let tau = (norm_sq(&g) + delta * delta).sqrt();
        let w = response_factor(tau, t.c2, t.ry);
        y_cand.push(g.iter().map(|v| w * v).collect::<Vec<f64>>());
    }
    let primal_upper = t.phi(&x);
    // psi restricted to X ∩ F_k, valid lower bound for every y in Y.
    let psi_k = |y: &[f64]| {
        let h = t.pull(y);
        -0.5 * t.c2 * norm_sq(y) - ball_support(norm(&h[..k]), t.c1, t.rx)
    };
    let primal_lower = y_cand.iter().map(|y| psi_k(y)).fold(f64::NEG_INFINITY, f64::max);

    // Dual side: max over Y ∩ F_k of psi.
    let mut y = start;
    let mut x_cand = Vec::new();
    for delta in smoothing_schedule(t.c1, 1.0 + t.rx) {
        let neg_psi = |y: &[f64]| {
            let h = t.pull(y);
            let tau = (norm_sq(&h) + delta * delta).sqrt();
            let w = response_factor(tau, t.c1, t.rx);
            let scaled: Vec<f64> = h.iter().map(|v| w * v).collect();
            let coupled = t.coupling(&scaled);
            let grad: Vec<f64> = y.iter().zip(&coupled).map(|(a, b)| t.c2 * a + b).collect();
            (0.5 * t.c2 * norm_sq(y) + ball_support(tau, t.c1, t.rx), grad)
        };
        y = projected_fista(neg_psi, &y, k, t.ry, iters);
        let h = t.pull(&y);
        let tau = (norm_sq(&h) + delta * delta).sqrt();
        let w = response_factor(tau, t.c1, t.rx);
        x_cand.push(h.iter().map(|v| -w * v).collect::<Vec<f64>>());
    }
    let dual_lower = t.psi(&y);
    let phi_k = |x: &[f64]| {
        let g = t.coupling(x);
        0.5 * t.c1 * norm_sq(x) - x[0] + ball_support(norm(&g[..k]), t.c2, t.ry)
    };
    let dual_upper = x_cand.iter().map(|x| phi_k(x)).fold(f64::INFINITY, f64::min);

    Bracket {
        lower: t.lambda * (primal_lower - dual_upper),
        upper: t.lambda * (primal_upper - dual_lower),
    }
}

/// Prox point of exposed component `i` found by extragradient on the
/// optimality operator of the prox subproblem, which is strongly monotone
/// whenever `gamma` is a valid weight. Uses only component gradients.
pub fn prox_by_extragradient(
    inst: &Instance,
    i: usize,
    x: &[f64],
    y: &[f64],
    gamma: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let dx = x.len();
    let op = |z: &[f64]| -> Result<Vec<f64>> {
        let e = inst.component(i, &z[..dx], &z[dx..])?;
        let mut g = Vec::with_capacity(z.len());
        g.extend(e.grad_x.iter().zip(&z[..dx]).zip(x).map(|((g, u), x)| g + (u - x) / gamma));
        g.extend(e.grad_y.iter().zip(&z[dx..]).zip(y).map(|((g, v), y)| -g + (v - y) / gamma));
        Ok(g)
    };
    let mut z: Vec<f64> = x.iter().chain(y).copied().collect();
    let lip = inst.regularity.l.max(inst.regularity.l_avg * (inst.n as f64).sqrt());
    let mut eta = 1.0 / (2.0 * (lip + 1.0 / gamma));
    for _ in 0..max_iters {
        let g = op(&z)?;
        if norm(&g) * gamma <= 1e-15 * (1.0 + norm(&z)) {
            break;
        }
        loop {
            let half: Vec<f64> = z.iter().zip(&g).map(|(a, b)| a - eta * b).collect();
            let gh = op(&half)?;
            let dg = g.iter().zip(&gh).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let dz = eta * norm(&g);
            if eta * dg <= 0.9 * dz || dz == 0.0 {
                z = z.iter().zip(&gh).map(|(a, b)| a - eta * b).collect();
                break;
            }
            eta *= 0.5;
        }
    }
    let v = z.split_off(dx);
    Ok((z, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimization::make_c;
    use crate::reference::restricted_gap;

    #[test]
    fn extragradient_prox_matches_closed_form() {
        let inst = crate::minimax::make_tilde_r(5, 1.0, (0.5, 0.5), 2).unwrap();
        let x = [0.3, -0.2, 0.1, 0.0, 0.4];
        let y = [0.1, 0.2, -0.3, 0.5, 0.0];
        let (u, v) = crate::prox::prox(&inst, 1, &x, &y, 0.2).unwrap();
        let (ub, vb) = prox_by_extragradient(&inst, 1, &x, &y, 0.2, 10_000).unwrap();
        let d = crate::linalg::dist(&u, &ub) + crate::linalg::dist(&v, &vb);
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn sturm_bisection_eigenvalue() {
        // 2 -1 / -1 2 has eigenvalues 1 and 3.
        let e = min_eigenvalue(&[2.0, 2.0], -1.0);
        assert!(e <= 1.0 && e > 1.0 - 1e-12);
    }

    #[test]
    fn fista_on_a_box_quadratic() {
        // min |x - (3, 4)|² over the unit ball: (0.6, 0.8).
        let f = |x: &[f64]| {
            let d = [x[0] - 3.0, x[1] - 4.0];
            (d[0] * d[0] + d[1] * d[1], vec![2.0 * d[0], 2.0 * d[1]])
        };
        let x = projected_fista(f, &[0.0, 0.0], 2, 1.0, 2000);
        assert!((x[0] - 0.6).abs() < 1e-9 && (x[1] - 0.8).abs() < 1e-9);
        let x = projected_fista(f, &[0.0, 0.0], 1, 1.0, 2000);
        assert!((x[0] - 1.0).abs() < 1e-9 && x[1] == 0.0);
    }

    #[test]
    fn convex_chain_bracket_contains_formula() {
        let inst = make_c(2.0, 1.0, 3, 5).unwrap();
        for k in 1..5 {
            let b = restricted_gap_brute(&inst, k, 20_000).unwrap();
            let exact = restricted_gap(&inst, k).unwrap();
            assert!(b.lower <= exact * (1.0 + 1e-9) && exact <= b.upper * (1.0 + 1e-9), "k={k} {b:?} {exact}");
            assert!(b.width() <= 1e-7 * exact, "width {} vs {exact}", b.width());
        }
    }
}
