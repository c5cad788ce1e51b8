//! Closed-form optima, envelope functions, gaps and the printed restricted-gap
//! bounds used to certify the hard instances.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Base, Instance, Kind, Shape1d, Side};
use crate::linalg::{gamma_deriv, gamma_value, norm, norm_sq, solve_tridiagonal, BSpec};

/// A closed-form optimum together with the norm of the aggregate first-order
/// system evaluated there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferencePoint {
    pub x_star: Vec<f64>,
    pub y_star: Option<Vec<f64>>,
    pub value: f64,
    pub residual: f64,
}

fn unsupported(what: &str, inst: &Instance) -> Error {
    Error::Unsupported(format!("{what} is not available for {}", inst.kind))
}

fn alpha_q(inst: &Instance) -> Result<(f64, f64)> {
    let alpha = inst.alpha.ok_or_else(|| unsupported("alpha", inst))?;
    Ok((alpha, (alpha - 1.0) / (alpha + 1.0)))
}

/// Saddle point of the strongly-convex-strongly-concave instance.
pub fn saddle_point_scsc(inst: &Instance) -> Result<ReferencePoint> {
    if inst.kind != Kind::Scsc {
        return Err(unsupported("closed-form saddle point", inst));
    }
    let (alpha, q) = alpha_q(inst)?;
    let m = inst.dim_x;
    let reg = inst.regularity;
    let beta = inst.scale.beta;
    let xi = (reg.l * reg.l - 2.0 * reg.mu_x * reg.mu_x).sqrt() / (2.0 * inst.n as f64);
    let powers: Vec<f64> = (1..=m as i32).map(|j| q.powi(j)).collect();
    let cx = beta * reg.mu_y / ((1.0 - q) * xi);
    let x: Vec<f64> = powers.iter().map(|p| cx * p).collect();
    let mut y: Vec<f64> = powers.iter().map(|p| beta * p).collect();
    y[m - 1] *= ((alpha + 1.0) / 2.0).sqrt();
    let (gx, gy) = inst.grad(&x, &y);
    let residual = (norm_sq(&gx) + norm_sq(&gy)).sqrt();
    let value = inst.value(&x, &y);
    Ok(ReferencePoint { x_star: x, y_star: Some(y), value, residual })
}

/// Minimizer of the strongly convex or convex minimization instance.
pub fn minimizer_closed_form(inst: &Instance) -> Result<ReferencePoint> {
    let m = inst.dim_x;
    let r = inst.feasible.rx();
    let x: Vec<f64> = match inst.kind {
        Kind::Sc => {
            let (alpha, q) = alpha_q(inst)?;
            let c = 2.0 * r * alpha.sqrt() / (alpha - 1.0);
            (1..=m as i32).map(|j| c * q.powi(j)).collect()
        }
        Kind::C => {
            let l = inst.regularity.l;
            let xi = 0.5 * 3f64.sqrt() * r * l / ((m + 1) as f64).powf(1.5);
            (0..m).map(|j| 2.0 * xi / l * (m - j) as f64).collect()
        }
        _ => return Err(unsupported("closed-form minimizer", inst)),
    };
    let (g, _) = inst.grad(&x, &[]);
    Ok(ReferencePoint { value: inst.value(&x, &[]), residual: norm(&g), x_star: x, y_star: None })
}

/// Printed optimal value of the SC and C instances.
pub fn printed_optimal_value(inst: &Instance) -> Result<f64> {
    let r = inst.feasible.rx();
    match inst.kind {
        Kind::Sc => {
            let (alpha, _) = alpha_q(inst)?;
            Ok(-inst.regularity.mu_x * r * r * alpha / (alpha + 1.0))
        }
        Kind::C => {
            let m = inst.dim_x as f64;
            let l = inst.regularity.l;
            let xi = 0.5 * 3f64.sqrt() * r * l / (m + 1.0).powf(1.5);
            Ok(-m * xi * xi / (inst.n as f64 * l))
        }
        _ => Err(unsupported("printed optimal value", inst)),
    }
}

/// `max_{0 <= s <= r} (t s - c s²/2)`: the support function of a ball under
/// an isotropic quadratic penalty.
pub(crate) fn ball_support(t: f64, c: f64, r: f64) -> f64 {
    if c > 0.0 && t <= c * r {
        0.5 * t * t / c
    } else if r.is_infinite() {
        if t == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        t * r - 0.5 * c * r * r
    }
}

/// Maximizer of `g·v - c/2 |v|²` over `|v| <= r`.
pub(crate) fn ball_response(g: &[f64], c: f64, r: f64) -> Result<Vec<f64>> {
    let t = norm(g);
    if c > 0.0 && t <= c * r {
        Ok(g.iter().map(|v| v / c).collect())
    } else if t == 0.0 {
        Ok(vec![0.0; g.len()])
    } else if r.is_infinite() {
        Err(Error::Unsupported("unbounded inner problem".into()))
    } else {
        Ok(g.iter().map(|v| r * v / t).collect())
    }
}

/// Pieces of the bilinear-chain aggregate in unscaled coordinates:
/// `y·Bx + c1/2 |x|² - c2/2 |y|² - x_0`.
pub(crate) struct TildeParts {
    pub spec: BSpec,
    pub c1: f64,
    pub c2: f64,
    pub lambda: f64,
    pub beta: f64,
    pub rx: f64,
    pub ry: f64,
}

impl TildeParts {
    pub fn of(inst: &Instance) -> Option<Self> {
        match inst.base {
            Base::Tilde { m, zeta, c1, c2 } => Some(TildeParts {
                spec: BSpec { m, omega: 0.0, zeta },
                c1,
                c2,
                lambda: inst.scale.lambda,
                beta: inst.scale.beta,
                rx: inst.feasible.rx() / inst.scale.beta,
                ry: inst.feasible.ry() / inst.scale.beta,
            }),
            _ => None,
        }
    }

    /// `B x`, indexed by the dual coordinate.
    pub fn coupling(&self, x: &[f64]) -> Vec<f64> {
        (1..=self.spec.m).map(|l| self.spec.row_dot(l, x)).collect()
    }

    /// `Bᵀ y - e_0`.
    pub fn pull(&self, y: &[f64]) -> Vec<f64> {
        let mut h = vec![0.0; self.spec.m];
        for (j, &v) in y.iter().enumerate() {
            self.spec.row_axpy(j + 1, v, &mut h);
        }
        h[0] -= 1.0;
        h
    }

    pub fn phi(&self, x: &[f64]) -> f64 {
        let g = self.coupling(x);
        0.5 * self.c1 * norm_sq(x) - x[0] + ball_support(norm(&g), self.c2, self.ry)
    }

    pub fn psi(&self, y: &[f64]) -> f64 {
        let h = self.pull(y);
        -0.5 * self.c2 * norm_sq(y) - ball_support(norm(&h), self.c1, self.rx)
    }
}

/// Convex quadratic minimization chain `1/2 xᵀA x - c3 x_0` in unscaled
/// coordinates, with `A = BᵀB + c1 I` tridiagonal.
pub(crate) struct ChainQuadratic {
    pub diag: Vec<f64>,
    pub c3: f64,
}

impl ChainQuadratic {
    pub fn of(inst: &Instance) -> Option<Self> {
        match inst.base {
            Base::Chain { m, omega, zeta, c1, c2: 0.0, c3 } => {
                let mut diag = vec![c1; m];
                diag[0] += omega * omega;
                diag[m - 1] += zeta * zeta;
                for (j, d) in diag.iter_mut().enumerate() {
                    if j >= 1 {
                        *d += 1.0;
                    }
                    if j + 1 < m {
                        *d += 1.0;
                    }
                }
                Some(ChainQuadratic { diag, c3 })
            }
            _ => None,
        }
    }

    /// Minimizer over `|x| <= r` within the first `k` coordinates, by the
    /// secular equation on the shift of the leading block.
    pub fn min_ball(&self, k: usize, r: f64) -> Result<Vec<f64>> {
        let m = self.diag.len();
        let solve = |shift: f64| -> Result<Vec<f64>> {
            let diag: Vec<f64> = self.diag[..k].iter().map(|d| d + shift).collect();
            let off = vec![-1.0; k.saturating_sub(1)];
            let mut rhs = vec![0.0; k];
            rhs[0] = self.c3;
            solve_tridiagonal(&diag, &off, &off, &rhs)
        };
        let pad = |mut v: Vec<f64>| {
            v.resize(m, 0.0);
            v
        };
        if let Ok(z) = solve(0.0) {
            let inside = z.iter().all(|v| v.is_finite()) && norm(&z) <= r;
            let pd = {
                // Leading minors of a tridiagonal matrix by recurrence.
                let mut prev = 1.0;
                let mut cur = self.diag[0];
                let mut ok = cur > 0.0;
                for j in 1..k {
                    let next = self.diag[j] * cur - prev;
                    prev = cur;
                    cur = next;
                    ok &= cur > 0.0;
                }
                ok
            };
            if inside && pd {
                return Ok(pad(z));
            }
        }
        if r.is_infinite() {
            return Err(Error::Unsupported("unbounded quadratic chain".into()));
        }
        let mut lo = 0.0;
        let mut hi = self.c3.abs() / r + 1.0;
        while norm(&solve(hi)?) > r {
            hi *= 2.0;
        }
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match solve(mid) {
                Ok(z) if norm(&z) > r => lo = mid,
                Ok(_) => hi = mid,
                Err(_) => lo = mid,
            }
        }
        let z = solve(hi)?;
        let t = norm(&z);
        Ok(pad(if t > r { z.iter().map(|v| v * r / t).collect() } else { z }))
    }
}

/// Minimizer and minimum of a convex minimization instance over its ball,
/// restricted to the first `k` coordinates.
pub fn min_over_ball_restricted(inst: &Instance, k: usize) -> Result<(Vec<f64>, f64)> {
    if k == 0 || k > inst.dim_x {
        return Err(Error::OutOfRange { index: k, range: format!("1..={}", inst.dim_x) });
    }
    match &inst.base {
        Base::Chain { .. } => {
            let chain = ChainQuadratic::of(inst).ok_or_else(|| unsupported("ball minimization", inst))?;
            let beta = inst.scale.beta;
            let z = chain.min_ball(k, inst.feasible.rx() / beta)?;
            let x: Vec<f64> = z.iter().map(|v| v * beta).collect();
            let f = inst.value(&x, &[]);
            Ok((x, f))
        }
        Base::Line1d { l, r } => {
            let x = vec![(*r).clamp(-inst.feasible.rx(), inst.feasible.rx())];
            Ok((x.clone(), 0.5 * l * x[0] * x[0] - l * r * x[0]))
        }
        _ => Err(unsupported("ball minimization", inst)),
    }
}

pub fn min_over_ball(inst: &Instance) -> Result<(Vec<f64>, f64)> {
    min_over_ball_restricted(inst, inst.dim_x)
}

/// Value of the aggregate of one side of a separable composite.
fn side_value(side: &Side, v: &[f64]) -> f64 {
    match side {
        Side::Ridge { mu } => 0.5 * mu * norm_sq(v),
        Side::Chain(inner) => inner.value(v, &[]),
    }
}

fn side_min(side: &Side) -> Result<(Vec<f64>, f64)> {
    match side {
        Side::Ridge { .. } => Err(Error::Unsupported("ridge minimum needs a dimension".into())),
        Side::Chain(inner) => min_over_ball(inner),
    }
}

fn side_min_value(side: &Side) -> Result<f64> {
    match side {
        Side::Ridge { .. } => Ok(0.0),
        Side::Chain(_) => Ok(side_min(side)?.1),
    }
}

/// Primal envelope `max_{y in Y} f(x, y)`.
pub fn phi_eval(inst: &Instance, x: &[f64]) -> Result<f64> {
    inst.check_point(x, &vec![0.0; inst.dim_y])?;
    match &inst.base {
        Base::Tilde { .. } => {
            let t = TildeParts::of(inst).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| v / t.beta).collect();
            Ok(t.lambda * t.phi(&xs))
        }
        Base::Hat { .. } => hat_phi(inst, x).map(|(v, _)| v),
        Base::Split { x: sx, y: sy } => Ok(side_value(sx, x) - side_min_value(sy)?),
        Base::Saddle1d { shape, l, rx } => {
            let a = l * rx;
            let ry = inst.feasible.ry();
            Ok(match shape {
                Shape1d::Quadratic => 0.5 * l * x[0] * x[0] - a * x[0],
                Shape1d::Bilinear => ball_support((l * x[0] - a).abs(), 0.0, ry),
            })
        }
        _ => Err(unsupported("primal envelope", inst)),
    }
}

/// Dual envelope `min_{x in X} f(x, y)`.
pub fn psi_eval(inst: &Instance, y: &[f64]) -> Result<f64> {
    inst.check_point(&vec![0.0; inst.dim_x], y)?;
    match &inst.base {
        Base::Tilde { .. } => {
            let t = TildeParts::of(inst).unwrap();
            let ys: Vec<f64> = y.iter().map(|v| v / t.beta).collect();
            Ok(t.lambda * t.psi(&ys))
        }
        Base::Split { x: sx, y: sy } => Ok(side_min_value(sx)? - side_value(sy, y)),
        Base::Saddle1d { shape, l, rx } => {
            let a = l * rx;
            let rx_ball = inst.feasible.rx();
            Ok(match shape {
                Shape1d::Quadratic => {
                    let u = (a / l).clamp(-rx_ball, rx_ball);
                    0.5 * l * u * u - a * u - 0.5 * l * y[0] * y[0]
                }
                Shape1d::Bilinear => -ball_support((l * y[0]).abs(), 0.0, rx_ball) - a * y[0],
            })
        }
        _ => Err(unsupported("dual envelope", inst)),
    }
}

/// `phi(x) - psi(y)` for convex-concave kinds.
pub fn primal_dual_gap(inst: &Instance, x: &[f64], y: &[f64]) -> Result<f64> {
    if inst.is_minimization() || inst.regularity.mu_x < 0.0 {
        return Err(unsupported("primal-dual gap", inst));
    }
    Ok(phi_eval(inst, x)? - psi_eval(inst, y)?)
}

/// Best response `argmax_{y in Y} f(x, y)`.
pub fn best_response_y(inst: &Instance, x: &[f64]) -> Result<Vec<f64>> {
    match &inst.base {
        Base::Tilde { .. } => {
            let t = TildeParts::of(inst).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| v / t.beta).collect();
            let g = t.coupling(&xs);
            Ok(ball_response(&g, t.c2, t.ry)?.into_iter().map(|v| v * t.beta).collect())
        }
        Base::Split { y: sy, .. } => match sy {
            Side::Ridge { .. } => Ok(vec![0.0; inst.dim_y]),
            Side::Chain(_) => Ok(side_min(sy)?.0),
        },
        _ => Err(unsupported("best response", inst)),
    }
}

/// Best response `argmin_{x in X} f(x, y)`.
pub fn best_response_x(inst: &Instance, y: &[f64]) -> Result<Vec<f64>> {
    match &inst.base {
        Base::Tilde { .. } => {
            let t = TildeParts::of(inst).unwrap();
            let ys: Vec<f64> = y.iter().map(|v| v / t.beta).collect();
            let h: Vec<f64> = t.pull(&ys).into_iter().map(|v| -v).collect();
            Ok(ball_response(&h, t.c1, t.rx)?.into_iter().map(|v| v * t.beta).collect())
        }
        Base::Split { x: sx, .. } => match sx {
            Side::Ridge { .. } => Ok(vec![0.0; inst.dim_x]),
            Side::Chain(_) => Ok(side_min(sx)?.0),
        },
        _ => Err(unsupported("best response", inst)),
    }
}

/// Envelope of the nonconvex-strongly-concave chain and its gradient.
fn hat_phi(inst: &Instance, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let Base::Hat { m, omega, c1, c2, c3 } = inst.base else {
        return Err(unsupported("envelope gradient", inst));
    };
    if !(c1 > 0.0) || inst.feasible.ry.is_some() {
        return Err(unsupported("envelope gradient", inst));
    }
    let spec = BSpec { m, omega, zeta: 0.0 };
    let beta = inst.scale.beta;
    let xs: Vec<f64> = x.iter().map(|v| v / beta).collect();
    let mut g: Vec<f64> = (0..m).map(|l| spec.row_dot(l, &xs)).collect();
    g[0] -= 1.0;
    let mut value = 0.5 * norm_sq(&g) / c1;
    let mut grad = vec![0.0; m];
    for (l, gl) in g.iter().enumerate() {
        spec.row_axpy(l, gl / c1, &mut grad);
    }
    for j in 0..m - 1 {
        value += c2 * gamma_value(c3 * xs[j]);
        grad[j] += c2 * c3 * gamma_deriv(c3 * xs[j]);
    }
    let s = inst.scale.lambda / beta;
    Ok((inst.scale.lambda * value, grad.into_iter().map(|v| v * s).collect()))
}

/// Gradient of the primal envelope of the nonconvex-strongly-concave kinds.
pub fn grad_phi(inst: &Instance, x: &[f64]) -> Result<Vec<f64>> {
    inst.check_point(x, &vec![0.0; inst.dim_y])?;
    hat_phi(inst, x).map(|(_, g)| g)
}

/// `f(x) - min_X f` for convex minimization kinds.
pub fn suboptimality(inst: &Instance, x: &[f64]) -> Result<f64> {
    let (_, best) = min_over_ball(inst)?;
    Ok(inst.value(x, &[]) - best)
}

/// The natural accuracy measure of a kind: the primal-dual gap, the
/// suboptimality, or a gradient norm for nonconvex kinds.
pub fn score(inst: &Instance, x: &[f64], y: &[f64]) -> Result<f64> {
    match &inst.base {
        Base::Hat { .. } => Ok(norm(&grad_phi(inst, x)?)),
        Base::Chain { c2, .. } if *c2 > 0.0 => Ok(norm(&inst.grad(x, &[]).0)),
        Base::Chain { .. } | Base::Line1d { .. } => suboptimality(inst, x),
        _ => primal_dual_gap(inst, x, y),
    }
}

/// [`score`] with the optimal value of convex minimization kinds solved once.
#[derive(Clone, Debug)]
pub struct Scorer {
    best: Option<f64>,
}

impl Scorer {
    pub fn new(inst: &Instance) -> Result<Self> {
        let best = match &inst.base {
            Base::Chain { c2, .. } if *c2 > 0.0 => None,
            Base::Chain { .. } | Base::Line1d { .. } => Some(min_over_ball(inst)?.1),
            _ => None,
        };
        Ok(Scorer { best })
    }

    pub fn score(&self, inst: &Instance, x: &[f64], y: &[f64]) -> Result<f64> {
        match self.best {
            Some(best) => Ok(inst.value(x, y) - best),
            None => score(inst, x, y),
        }
    }
}

/// The printed lower bound (exact value for the convex minimization kind) of
/// the gap over points whose coordinates beyond `k` vanish.
pub fn restricted_gap(inst: &Instance, k: usize) -> Result<f64> {
    let m = inst.chain_len().ok_or_else(|| unsupported("restricted gap", inst))?;
    if k == 0 || k >= m {
        return Err(Error::OutOfRange { index: k, range: format!("1..={}", m - 1) });
    }
    let n = inst.n as f64;
    let reg = inst.regularity;
    let beta = inst.scale.beta;
    let kf = k as f64;
    match inst.kind {
        Kind::Scsc => {
            let (alpha, q) = alpha_q(inst)?;
            let xi2 = (reg.l * reg.l - 2.0 * reg.mu_x * reg.mu_x) / (4.0 * n * n);
            Ok(beta * beta * xi2 / ((alpha + 1.0) * reg.mu_x) * q.powi(2 * k as i32))
        }
        Kind::Csc => {
            let s = (reg.l * reg.l - 2.0 * reg.mu_y * reg.mu_y).sqrt();
            Ok(-kf * reg.mu_y * beta * beta / 2.0
                + inst.feasible.rx() * beta * s / (2.0 * n * (kf + 1.0).sqrt()))
        }
        Kind::Cc => Ok(reg.l * inst.feasible.rx() * inst.feasible.ry()
            / (2.0 * n * (m as f64 * (kf + 1.0)).sqrt())),
        Kind::Sc => {
            let (alpha, q) = alpha_q(inst)?;
            let r = inst.feasible.rx();
            Ok(reg.mu_x * r * r * alpha / (alpha + 1.0) * q.powi(2 * k as i32))
        }
        Kind::C => {
            let r = inst.feasible.rx();
            let xi = 0.5 * 3f64.sqrt() * r * reg.l / ((m + 1) as f64).powf(1.5);
            Ok(xi * xi * (m - k) as f64 / (n * reg.l))
        }
        _ => Err(unsupported("restricted gap", inst)),
    }
}

/// Aggregate first-order residual of a candidate saddle point: gradient norm
/// after accounting for active ball constraints.
pub fn saddle_residual(inst: &Instance, x: &[f64], y: &[f64]) -> f64 {
    let (gx, gy) = inst.grad(x, y);
    let px = inst.project_x(&x.iter().zip(&gx).map(|(a, g)| a - g).collect::<Vec<_>>());
    let py = inst.project_y(&y.iter().zip(&gy).map(|(a, g)| a + g).collect::<Vec<_>>());
    let rx: f64 = x.iter().zip(&px).map(|(a, b)| (a - b).powi(2)).sum();
    let ry: f64 = y.iter().zip(&py).map(|(a, b)| (a - b).powi(2)).sum();
    (rx + ry).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimax::{make_1d, make_cc, make_scsc, OneDim};
    use crate::minimization::{make_c, make_sc};

    #[test]
    fn q_from_alpha_three() {
        let alpha: f64 = 3.0;
        assert_eq!((alpha - 1.0) / (alpha + 1.0), 0.5);
    }

    #[test]
    fn scsc_saddle_point_is_feasible_and_stationary() {
        let inst = make_scsc(16.0, 1.0, 1.0, 1.0, 1.0, 4, 8).unwrap();
        let p = saddle_point_scsc(&inst).unwrap();
        assert!(norm(&p.x_star) <= 1.0 && norm(p.y_star.as_ref().unwrap()) <= 1.0);
        assert!(p.residual <= 1e-12, "residual {}", p.residual);
        let gap = primal_dual_gap(&inst, &p.x_star, p.y_star.as_ref().unwrap()).unwrap();
        assert!(gap.abs() <= 1e-12, "gap {gap}");
    }

    #[test]
    fn sc_and_c_printed_values() {
        let sc = make_sc(32.0, 1.0, 1.0, 8, 10).unwrap();
        let p = minimizer_closed_form(&sc).unwrap();
        let want = printed_optimal_value(&sc).unwrap();
        assert!(((p.value - want) / want).abs() < 1e-10);
        assert!(norm(&p.x_star) <= 1.0);
        let c = make_c(4.0, 2.0, 3, 7).unwrap();
        let p = minimizer_closed_form(&c).unwrap();
        let want = printed_optimal_value(&c).unwrap();
        assert!(((p.value - want) / want).abs() < 1e-10);
        assert!(p.residual < 1e-12);
        let (_, best) = min_over_ball(&c).unwrap();
        assert!((best - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn cc_envelopes() {
        let m = 5;
        let inst = make_cc(2.0, 1.5, 0.7, 3, m).unwrap();
        assert_eq!(phi_eval(&inst, &vec![0.0; m]).unwrap(), 0.0);
        let ys = vec![0.7 / (m as f64).sqrt(); m];
        assert!(psi_eval(&inst, &ys).unwrap().abs() < 1e-15);
        let bound = restricted_gap(&inst, m - 1).unwrap();
        assert!((bound - 2.0 * 1.5 * 0.7 / (2.0 * 3.0 * m as f64)).abs() < 1e-15);
    }

    #[test]
    fn one_dim_gaps() {
        let h = make_1d(OneDim::HCc, 2.0, 3, 1.5, Some(0.5)).unwrap();
        assert!((primal_dual_gap(&h, &[0.0], &[0.0]).unwrap() - 2.0 * 1.5 * 0.5).abs() < 1e-15);
        let h = make_1d(OneDim::HScsc, 2.0, 3, 1.5, Some(0.5)).unwrap();
        for y in [-0.5, 0.0, 0.3] {
            assert!(primal_dual_gap(&h, &[0.0], &[y]).unwrap() >= 2.0 * 1.5 * 1.5 / 2.0);
        }
    }

    #[test]
    fn c_restricted_gap_matches_secular_solve() {
        let inst = make_c(3.0, 1.0, 2, 6).unwrap();
        let best = min_over_ball(&inst).unwrap().1;
        for k in 1..6 {
            let restricted = min_over_ball_restricted(&inst, k).unwrap().1;
            let exact = restricted_gap(&inst, k).unwrap();
            assert!(((restricted - best) - exact).abs() <= 1e-10 * exact, "k={k}");
        }
    }
}
