//! Proximal maps of single components.
//!
//! After the dual block is eliminated in closed form, every chain kind reduces
//! to a separable problem in the primal block:
//!
//! ```text
//! min_u  Σ_j [ p_j/2 u_j² - q_j u_j + a_j Γ(d u_j) ]  +  Σ_pairs w/2 (u_j - u_{j+1} - t)²
//! ```
//!
//! The pairs of one component never share a coordinate, so the problem splits
//! into scalar and two-dimensional pieces. Quadratic pieces are solved exactly.
//! Pieces with Γ are solved globally: scalar ones through the real roots of a
//! cubic, pairs through a one-dimensional profile search bracketed by `Γ >= 0`.

use crate::error::{Error, Result};
use crate::instance::{owned_rows, Base, Instance, Shape1d, Side};
use crate::linalg::{gamma_deriv, gamma_second, gamma_value, BSpec, GAMMA_WEAK_CONVEXITY};

/// Separable problem described in the module docs.
#[derive(Clone, Debug)]
pub(crate) struct Blocks {
    p: Vec<f64>,
    q: Vec<f64>,
    a: Vec<f64>,
    d: f64,
    pairs: Vec<(usize, f64, f64)>,
}

impl Blocks {
    fn new(dim: usize, p: f64, d: f64) -> Self {
        Blocks { p: vec![p; dim], q: vec![0.0; dim], a: vec![0.0; dim], d, pairs: Vec::new() }
    }

    /// Adds `w/2 (coef u_j - t)²`.
    fn fold(&mut self, j: usize, coef: f64, w: f64, t: f64) {
        self.p[j] += w * coef * coef;
        self.q[j] += w * coef * t;
    }

    fn solve(&self) -> Result<Vec<f64>> {
        let dim = self.p.len();
        let mut u = vec![0.0; dim];
        let mut paired = vec![false; dim];
        for &(j, w, t) in &self.pairs {
            debug_assert!(!paired[j] && !paired[j + 1], "pairs overlap at {j}");
            paired[j] = true;
            paired[j + 1] = true;
            let s1 = Scalar { p: self.p[j], q: self.q[j], a: self.a[j], d: self.d };
            let s2 = Scalar { p: self.p[j + 1], q: self.q[j + 1], a: self.a[j + 1], d: self.d };
            let (u1, u2) = solve_pair(s1, s2, w, t)?;
            u[j] = u1;
            u[j + 1] = u2;
        }
        for j in 0..dim {
            if !paired[j] {
                u[j] = Scalar { p: self.p[j], q: self.q[j], a: self.a[j], d: self.d }.argmin();
            }
        }
        Ok(u)
    }
}

/// `p/2 u² - q u + a Γ(d u)` with `p > 0`, `a >= 0`, `d > 0`.
#[derive(Clone, Copy, Debug)]
struct Scalar {
    p: f64,
    q: f64,
    a: f64,
    d: f64,
}

impl Scalar {
    fn value(&self, u: f64) -> f64 {
        let g = if self.a != 0.0 { self.a * gamma_value(self.d * u) } else { 0.0 };
        0.5 * self.p * u * u - self.q * u + g
    }

    fn slope(&self, u: f64) -> f64 {
        self.p * u - self.q + self.a * self.d * gamma_deriv(self.d * u)
    }

    fn curvature(&self, u: f64) -> f64 {
        self.p + self.a * self.d * self.d * gamma_second(self.d * u)
    }

    /// Global minimizer. Stationary points solve the cubic
    /// `(p/d + 120ad) z³ - (q + 120ad) z² + (p/d) z - q = 0` in `z = d u`.
    fn argmin(&self) -> f64 {
        if self.a == 0.0 {
            return self.q / self.p;
        }
        let (p, q, a, d) = (self.p, self.q, self.a, self.d);
        let k = 120.0 * a * d;
        let roots = real_cubic_roots(p / d + k, -(q + k), p / d, -q);
        let mut best = if q == 0.0 { 0.0 } else { self.polish(roots[0] / d) };
        let mut best_val = self.value(best);
        for z in roots {
            let u = self.polish(z / d);
            let v = self.value(u);
            if v < best_val {
                best = u;
                best_val = v;
            }
        }
        best
    }

    fn polish(&self, mut u: f64) -> f64 {
        for _ in 0..40 {
            let g = self.slope(u);
            let h = self.curvature(u);
            if g == 0.0 || !(h > 0.0) {
                break;
            }
            let step = g / h;
            let next = u - step;
            if !(self.value(next) <= self.value(u) + 1e-15 * self.value(u).abs()) {
                break;
            }
            u = next;
            if step.abs() <= 1e-16 * (1.0 + u.abs()) {
                break;
            }
        }
        u
    }
}

/// Real roots of `a x³ + b x² + c x + d` with `a != 0`, polished by Newton.
fn real_cubic_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let (b, c, d) = (b / a, c / a, d / a);
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = 0.25 * q * q + p * p * p / 27.0;
    let mut roots = if disc > 0.0 {
        let s = (-0.5 * q - q.signum() * disc.sqrt()).cbrt();
        let t = if s != 0.0 { s - p / (3.0 * s) } else { 0.0 };
        vec![t - shift]
    } else if p == 0.0 {
        vec![-shift]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .collect()
    };
    for x in roots.iter_mut() {
        for _ in 0..4 {
            let f = ((*x + b) * *x + c) * *x + d;
            let df = (3.0 * *x + 2.0 * b) * *x + c;
            if df == 0.0 {
                break;
            }
            *x -= f / df;
        }
    }
    roots
}

/// Minimizes `s1(u1) + s2(u2) + w/2 (u1 - u2 - t)²`.
fn solve_pair(s1: Scalar, s2: Scalar, w: f64, t: f64) -> Result<(f64, f64)> {
    let quad = quadratic_pair(s1, s2, w, t);
    if s1.a == 0.0 && s2.a == 0.0 {
        return Ok(quad);
    }
    let h = |u1: f64, u2: f64| s1.value(u1) + s2.value(u2) + 0.5 * w * (u1 - u2 - t).powi(2);
    let zero_data = s1.q == 0.0 && s2.q == 0.0 && t == 0.0;
    let convex = s1.p > GAMMA_WEAK_CONVEXITY * s1.a * s1.d * s1.d
        && s2.p > GAMMA_WEAK_CONVEXITY * s2.a * s2.d * s2.d;
    let found = if convex {
        if zero_data {
            return Ok((0.0, 0.0));
        }
        newton_pair(s1, s2, w, t, quad)
    } else {
        profile_pair(s1, s2, w, t, quad)
    };
    if zero_data && h(0.0, 0.0) <= h(found.0, found.1) + 1e-13 * h(0.0, 0.0).abs() {
        return Ok((0.0, 0.0));
    }
    let (g1, g2) = pair_gradient(s1, s2, w, t, found);
    let scale = s1.p.max(s2.p) * (1.0 + found.0.abs() + found.1.abs()) + s1.q.abs() + s2.q.abs() + w * t.abs();
    if !(g1.abs() + g2.abs() <= 1e-8 * scale) {
        return Err(Error::NoConvergence(format!(
            "paired prox block: stationarity residual {} at {:?}",
            g1.abs() + g2.abs(),
            found
        )));
    }
    Ok(found)
}

fn quadratic_pair(s1: Scalar, s2: Scalar, w: f64, t: f64) -> (f64, f64) {
    let (a11, a22) = (s1.p + w, s2.p + w);
    let (r1, r2) = (s1.q + w * t, s2.q - w * t);
    let det = s1.p * s2.p + w * (s1.p + s2.p);
    ((a22 * r1 + w * r2) / det, (w * r1 + a11 * r2) / det)
}

fn pair_gradient(s1: Scalar, s2: Scalar, w: f64, t: f64, (u1, u2): (f64, f64)) -> (f64, f64) {
    let r = u1 - u2 - t;
    (s1.slope(u1) + w * r, s2.slope(u2) - w * r)
}

/// Damped Newton on a strictly convex pair.
fn newton_pair(s1: Scalar, s2: Scalar, w: f64, t: f64, start: (f64, f64)) -> (f64, f64) {
    let h = |u: (f64, f64)| s1.value(u.0) + s2.value(u.1) + 0.5 * w * (u.0 - u.1 - t).powi(2);
    let mut u = start;
    for _ in 0..200 {
        let (g1, g2) = pair_gradient(s1, s2, w, t, u);
        if g1 == 0.0 && g2 == 0.0 {
            break;
        }
        let (h11, h22) = (s1.curvature(u.0) + w, s2.curvature(u.1) + w);
        let det = h11 * h22 - w * w;
        let d1 = (h22 * g1 + w * g2) / det;
        let d2 = (w * g1 + h11 * g2) / det;
        let f0 = h(u);
        let mut step = 1.0;
        let mut next = (u.0 - d1, u.1 - d2);
        while h(next) > f0 + 1e-15 * f0.abs() && step > 1e-12 {
            step *= 0.5;
            next = (u.0 - step * d1, u.1 - step * d2);
        }
        let moved = (next.0 - u.0).abs() + (next.1 - u.1).abs();
        u = next;
        if moved <= 1e-16 * (1.0 + u.0.abs() + u.1.abs()) {
            break;
        }
    }
    u
}

/// Global search over `u1` with the inner problem in `u2` solved exactly.
fn profile_pair(s1: Scalar, s2: Scalar, w: f64, t: f64, quad: (f64, f64)) -> (f64, f64) {
    let inner = |u1: f64| Scalar { p: s2.p + w, q: s2.q + w * (u1 - t), a: s2.a, d: s2.d };
    let profile = |u1: f64| {
        let s = inner(u1);
        let u2 = s.argmin();
        (s1.value(u1) + s.value(u2) + 0.5 * w * (u1 - t).powi(2), u2)
    };
    // Γ >= 0, so the minimizer is within this distance of the quadratic one.
    let (p1, p2) = (s1.p + w, s2.p + w);
    let lam_min = 0.5 * ((p1 + p2) - ((p1 - p2).powi(2) + 4.0 * w * w).sqrt());
    let excess = s1.a * gamma_value(s1.d * quad.0) + s2.a * gamma_value(s2.d * quad.1);
    let radius = (2.0 * excess.max(0.0) / lam_min).sqrt() * (1.0 + 1e-9) + 1e-12;
    let grid = 512;
    let lo = quad.0 - radius;
    let h = 2.0 * radius / grid as f64;
    let mut best_k = 0;
    let mut best_v = f64::INFINITY;
    for k in 0..=grid {
        let v = profile(lo + h * k as f64).0;
        if v < best_v {
            best_v = v;
            best_k = k;
        }
    }
    // Golden section inside the neighbouring cells.
    let mut a = lo + h * (best_k.max(1) - 1) as f64;
    let mut b = lo + h * (best_k + 1).min(grid) as f64;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (profile(c).0, profile(d).0);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = profile(c).0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = profile(d).0;
        }
    }
    let u1 = 0.5 * (a + b);
    let start = (u1, profile(u1).1);
    polish_pair(s1, s2, w, t, start)
}

/// Plain Newton steps from a point already near a local minimum; each step is
/// kept only while the objective does not increase.
fn polish_pair(s1: Scalar, s2: Scalar, w: f64, t: f64, mut u: (f64, f64)) -> (f64, f64) {
    let h = |u: (f64, f64)| s1.value(u.0) + s2.value(u.1) + 0.5 * w * (u.0 - u.1 - t).powi(2);
    for _ in 0..20 {
        let (g1, g2) = pair_gradient(s1, s2, w, t, u);
        let (h11, h22) = (s1.curvature(u.0) + w, s2.curvature(u.1) + w);
        let det = h11 * h22 - w * w;
        if !(h11 > 0.0 && det > 0.0) {
            break;
        }
        let next = (u.0 - (h22 * g1 + w * g2) / det, u.1 - (w * g1 + h11 * g2) / det);
        let (n1, n2) = pair_gradient(s1, s2, w, t, next);
        if h(next) > h(u) + 1e-14 * h(u).abs() || n1.abs() + n2.abs() > g1.abs() + g2.abs() {
            break;
        }
        u = next;
        if n1 == 0.0 && n2 == 0.0 {
            break;
        }
    }
    u
}

fn check_gamma(inst: &Instance, gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("prox weight must be positive, got {gamma}")));
    }
    if let Some(limit) = inst.prox_limit {
        if gamma >= limit {
            return Err(Error::ProxWeight { gamma, limit });
        }
    }
    Ok(())
}

/// Proximal point of exposed component `i`: the saddle point of
/// `f_i(u, v) + |u - x|²/(2γ) - |v - y|²/(2γ)`, or the minimizer of
/// `f_i(u) + |u - x|²/(2γ)` for minimization kinds.
pub fn prox(inst: &Instance, i: usize, x: &[f64], y: &[f64], gamma: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    inst.check_index(i)?;
    inst.check_point(x, y)?;
    check_gamma(inst, gamma)?;
    let out = prox_base(inst, inst.sampling.order[i], x, y, gamma)?;
    debug_assert!({
        let r = prox_residual(inst, i, x, y, gamma, &out.0, &out.1);
        let s = 1.0 + crate::linalg::norm(x) + crate::linalg::norm(y) + crate::linalg::norm(&out.0);
        r <= 1e-7 * s / gamma
    });
    Ok(out)
}

/// Norm of the first-order conditions of the prox subproblem at `(u, v)`.
pub fn prox_residual(inst: &Instance, i: usize, x: &[f64], y: &[f64], gamma: f64, u: &[f64], v: &[f64]) -> f64 {
    let (_, gx, gy) = inst.eval_base(inst.sampling.order[i], u, v);
    let rx: f64 = gx.iter().zip(u).zip(x).map(|((g, u), x)| (g + (u - x) / gamma).powi(2)).sum();
    let ry: f64 = gy.iter().zip(v).zip(y).map(|((g, v), y)| (g - (v - y) / gamma).powi(2)).sum();
    (rx + ry).sqrt()
}

pub(crate) fn prox_base(inst: &Instance, c: usize, x: &[f64], y: &[f64], gamma: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = inst.n;
    let nf = n as f64;
    match &inst.base {
        Base::Tilde { .. } | Base::Hat { .. } | Base::Chain { .. } => {
            let beta = inst.scale.beta;
            let g = gamma * inst.scale.curvature();
            let xs: Vec<f64> = x.iter().map(|v| v / beta).collect();
            let ys: Vec<f64> = y.iter().map(|v| v / beta).collect();
            let (u, v) = match &inst.base {
                Base::Tilde { m, zeta, c1, c2 } => tilde_prox(c, n, *m, *zeta, (*c1, *c2), &xs, &ys, g)?,
                Base::Hat { m, omega, c1, c2, c3 } => hat_prox(c, n, *m, *omega, (*c1, *c2, *c3), &xs, &ys, g)?,
                Base::Chain { m, omega, zeta, c1, c2, c3 } => {
                    let spec = BSpec { m: *m, omega: *omega, zeta: *zeta };
                    (chain_prox(c, n, &spec, (*c1, *c2, *c3), &xs, g)?, vec![])
                }
                _ => unreachable!(),
            };
            Ok((u.into_iter().map(|t| t * beta).collect(), v.into_iter().map(|t| t * beta).collect()))
        }
        Base::Split { x: xs, y: ys } => Ok((side_prox(xs, c, x, gamma)?, side_prox(ys, c, y, gamma)?)),
        Base::Saddle1d { shape, l, rx } => {
            let lin = if c == 0 { nf * l * rx } else { 0.0 };
            let (x, y) = (x[0], y[0]);
            Ok(match shape {
                Shape1d::Quadratic => (vec![(x + gamma * lin) / (l * gamma + 1.0)], vec![y / (l * gamma + 1.0)]),
                Shape1d::Bilinear => {
                    let lg = l * gamma;
                    let u = (x - lg * y + lg * gamma * lin) / (1.0 + lg * lg);
                    (vec![u], vec![y + gamma * (l * u - lin)])
                }
            })
        }
        Base::Line1d { l, r } => {
            let lin = if c == 0 { nf * l * r } else { 0.0 };
            Ok((vec![(x[0] + gamma * lin) / (l * gamma + 1.0)], vec![]))
        }
    }
}

fn side_prox(side: &Side, c: usize, v: &[f64], gamma: f64) -> Result<Vec<f64>> {
    match side {
        Side::Ridge { mu } => Ok(v.iter().map(|t| t / (1.0 + gamma * mu)).collect()),
        Side::Chain(inner) => {
            check_gamma(inner, gamma)?;
            Ok(prox_base(inner, c, v, &[], gamma)?.0)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn tilde_prox(
    c: usize,
    n: usize,
    m: usize,
    zeta: f64,
    (c1, c2): (f64, f64),
    x: &[f64],
    y: &[f64],
    g: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let nf = n as f64;
    let ig = 1.0 / g;
    let denom = c2 + ig;
    let w = nf * nf / denom;
    let mut blocks = Blocks::new(m, c1 + ig, 1.0);
    for (q, xj) in blocks.q.iter_mut().zip(x) {
        *q = xj * ig;
    }
    if c == 0 {
        blocks.q[0] += nf;
    }
    for l in owned_rows(c, n, 1, m) {
        let t = -y[l - 1] * ig / nf;
        if l < m {
            blocks.pairs.push((l - 1, w, t));
        } else {
            blocks.fold(m - 1, zeta, w, t);
        }
    }
    let u = blocks.solve()?;
    let spec = BSpec { m, omega: 0.0, zeta };
    let mut v: Vec<f64> = y.iter().map(|t| t * ig / denom).collect();
    for l in owned_rows(c, n, 1, m) {
        v[l - 1] = (y[l - 1] * ig + nf * spec.row_dot(l, &u)) / denom;
    }
    Ok((u, v))
}

#[allow(clippy::too_many_arguments)]
fn hat_prox(
    c: usize,
    n: usize,
    m: usize,
    omega: f64,
    (c1, c2, c3): (f64, f64, f64),
    x: &[f64],
    y: &[f64],
    g: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let nf = n as f64;
    let ig = 1.0 / g;
    let denom = c1 + ig;
    let w = nf * nf / denom;
    let mut blocks = Blocks::new(m, ig, c3);
    for (q, xj) in blocks.q.iter_mut().zip(x) {
        *q = xj * ig;
    }
    for j in 0..m - 1 {
        blocks.a[j] = c2;
    }
    let lin = |l: usize| if c == 0 && l == 0 { -nf } else { 0.0 };
    for l in owned_rows(c, n, 0, m - 1) {
        let t = -(y[l] * ig + lin(l)) / nf;
        if l == 0 {
            blocks.fold(0, omega, w, t);
        } else {
            blocks.pairs.push((l - 1, w, t));
        }
    }
    let u = blocks.solve()?;
    let spec = BSpec { m, omega, zeta: 0.0 };
    let mut v: Vec<f64> = y.iter().map(|t| t * ig / denom).collect();
    for l in owned_rows(c, n, 0, m - 1) {
        v[l] = (y[l] * ig + nf * spec.row_dot(l, &u) + lin(l)) / denom;
    }
    Ok((u, v))
}

fn chain_prox(c: usize, n: usize, spec: &BSpec, (c1, c2, c3): (f64, f64, f64), x: &[f64], g: f64) -> Result<Vec<f64>> {
    let nf = n as f64;
    let m = spec.m;
    let ig = 1.0 / g;
    let mut blocks = Blocks::new(m, c1 + ig, 1.0);
    for (q, xj) in blocks.q.iter_mut().zip(x) {
        *q = xj * ig;
    }
    if c2 != 0.0 {
        for j in 0..m - 1 {
            blocks.a[j] = c2;
        }
    }
    if c == 0 {
        blocks.q[0] += c3 * nf;
    }
    for l in owned_rows(c, n, 0, m) {
        if l == 0 {
            blocks.fold(0, spec.omega, nf, 0.0);
        } else if l == m {
            blocks.fold(m - 1, spec.zeta, nf, 0.0);
        } else {
            blocks.pairs.push((l - 1, nf, 0.0));
        }
    }
    blocks.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_scalar(s: &Scalar) -> f64 {
        // Dense scan then local refinement.
        let r = 10.0 + 2.0 * (s.q / s.p).abs();
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=200_000 {
            let u = -r + 2.0 * r * k as f64 / 200_000.0;
            let v = s.value(u);
            if v < best.0 {
                best = (v, u);
            }
        }
        s.polish(best.1)
    }

    #[test]
    fn cubic_roots_known() {
        let mut r = real_cubic_roots(1.0, -6.0, 11.0, -6.0);
        r.sort_by(f64::total_cmp);
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let r = real_cubic_roots(2.0, 0.0, 0.0, -16.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn scalar_zero_data_gives_zero() {
        let s = Scalar { p: 30.0, q: 0.0, a: 1.0, d: 1.0 };
        assert_eq!(s.argmin(), 0.0);
    }

    #[test]
    fn pair_zero_data_gives_zero() {
        let s1 = Scalar { p: 26.0, q: 0.0, a: 1.0, d: 1.0 };
        let s2 = Scalar { p: 26.0, q: 0.0, a: 1.0, d: 1.0 };
        assert_eq!(solve_pair(s1, s2, 5.0, 0.0).unwrap(), (0.0, 0.0));
        let s2 = Scalar { a: 0.0, ..s2 };
        assert_eq!(solve_pair(s1, s2, 5.0, 0.0).unwrap(), (0.0, 0.0));
    }

    proptest! {
        #[test]
        fn scalar_matches_scan(p in 0.5f64..80.0, q in -50.0f64..50.0, a in 0.0f64..2.0, d in 0.3f64..2.0) {
            let s = Scalar { p, q, a, d };
            let u = s.argmin();
            let b = brute_scalar(&s);
            prop_assert!(s.value(u) <= s.value(b) + 1e-10 * (1.0 + s.value(b).abs()));
        }

        #[test]
        fn pair_is_stationary_and_beats_grid(p in 25.0f64..60.0, q1 in -20.0f64..20.0, q2 in -20.0f64..20.0,
                                            w in 0.1f64..30.0, t in -2.0f64..2.0, a2 in 0.0f64..1.0) {
            let s1 = Scalar { p, q: q1, a: 1.0, d: 1.0 };
            let s2 = Scalar { p, q: q2, a: a2, d: 1.0 };
            let (u1, u2) = solve_pair(s1, s2, w, t).unwrap();
            let h = |a: f64, b: f64| s1.value(a) + s2.value(b) + 0.5 * w * (a - b - t).powi(2);
            let f = h(u1, u2);
            for i in 0..=60 {
                for j in 0..=60 {
                    let a = -3.0 + 0.1 * i as f64;
                    let b = -3.0 + 0.1 * j as f64;
                    prop_assert!(f <= h(a, b) + 1e-9 * (1.0 + f.abs()));
                }
            }
        }
    }
}
