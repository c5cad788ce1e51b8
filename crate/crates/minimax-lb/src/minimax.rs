//! Factories for the saddle-point families.

use crate::error::{invalid, precondition, Result};
use crate::instance::{Base, Feasible, Instance, Kind, Regularity, Scale, Shape1d, Side, Target};
use crate::linalg::{GAMMA_SMOOTHNESS, GAMMA_WEAK_CONVEXITY};
use crate::minimization;

const SQRT2: f64 = std::f64::consts::SQRT_2;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(precondition(msg()))
    }
}

fn ensure_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("need n >= 2 components, got {n}")));
    }
    Ok(())
}

fn ensure_radius(name: &str, r: f64) -> Result<()> {
    if !(r > 0.0) {
        return Err(invalid(format!("{name} must be positive, got {r}")));
    }
    Ok(())
}

/// Prox weight bound below which the Γ-coupled prox subproblems have a
/// unique solution, in unscaled coordinates.
pub(crate) fn base_prox_limit(gamma_curvature: f64) -> f64 {
    (SQRT2 + 1.0) / (60.0 * gamma_curvature)
}

/// Bilinear chain `r̃` with quadratic regularizers `(c1, c2)`, unscaled.
pub fn make_tilde_r(m: usize, zeta: f64, c_tilde: (f64, f64), n: usize) -> Result<Instance> {
    ensure_n(n)?;
    let (c1, c2) = c_tilde;
    if m == 0 || !(c1 >= 0.0 && c2 >= 0.0) || !(0.0..=SQRT2 + 1e-12).contains(&zeta) {
        return Err(invalid(format!("bad chain parameters m={m}, zeta={zeta}, c=({c1}, {c2})")));
    }
    let nf = n as f64;
    let cm = c1.max(c2);
    let reg = Regularity {
        l: (4.0 * nf * nf + 2.0 * cm * cm).sqrt(),
        l_avg: (8.0 * nf + 2.0 * cm * cm).sqrt(),
        mu_x: c1,
        mu_y: c2,
    };
    Ok(Instance::assemble(
        Kind::TildeR,
        n,
        (m, m),
        Scale::UNIT,
        Base::Tilde { m, zeta, c1, c2 },
        Feasible::FREE,
        reg,
    ))
}

/// Regularity of `r̂` before scaling.
fn hat_regularity(n: usize, (c1, c2, c3): (f64, f64, f64)) -> Regularity {
    let nf = n as f64;
    let g = c2 * c3 * c3;
    Regularity {
        l: (4.0 * nf * nf + 2.0 * c1 * c1).sqrt() + GAMMA_SMOOTHNESS * g,
        l_avg: 2.0 * (4.0 * nf + c1 * c1 + 16200.0 * g * g).sqrt(),
        mu_x: -GAMMA_WEAK_CONVEXITY * g,
        mu_y: c1,
    }
}

/// Bilinear chain `r̂` with the nonconvex potential on the primal block, unscaled.
pub fn make_hat_r(m: usize, omega: f64, c_hat: (f64, f64, f64), n: usize) -> Result<Instance> {
    ensure_n(n)?;
    let (c1, c2, c3) = c_hat;
    if m < 2 || !(c1 >= 0.0 && c2 > 0.0 && c3 > 0.0) || !(0.0..=SQRT2 + 1e-12).contains(&omega) {
        return Err(invalid(format!(
            "bad chain parameters m={m}, omega={omega}, c=({c1}, {c2}, {c3})"
        )));
    }
    let mut inst = Instance::assemble(
        Kind::HatR,
        n,
        (m, m),
        Scale::UNIT,
        Base::Hat { m, omega, c1, c2, c3 },
        Feasible::FREE,
        hat_regularity(n, c_hat),
    );
    inst.prox_limit = Some(base_prox_limit(c2 * c3 * c3));
    Ok(inst)
}

/// Strongly-convex-strongly-concave instance on balls of radii `rx`, `ry`.
pub fn make_scsc(l: f64, mu_x: f64, mu_y: f64, rx: f64, ry: f64, n: usize, m: usize) -> Result<Instance> {
    ensure_n(n)?;
    ensure_radius("Rx", rx)?;
    ensure_radius("Ry", ry)?;
    ensure(m >= 2, || format!("m >= 2 required, got {m}"))?;
    ensure(mu_x >= mu_y && mu_y > 0.0, || format!("need mu_x >= mu_y > 0, got {mu_x}, {mu_y}"))?;
    let (kx, ky) = (l / mu_x, l / mu_y);
    ensure(kx >= 2.0 && ky >= 2.0, || format!("need kappa_x, kappa_y >= 2, got {kx}, {ky}"))?;
    let nf = n as f64;
    let alpha = ((kx - 2.0 / kx) * ky / (nf * nf) + 1.0).sqrt();
    let s = (kx * kx - 2.0).sqrt();
    let c1 = 2.0 * nf / s;
    let c2 = 2.0 * nf * kx / (ky * s);
    let beta = (2.0 * nf * rx * (alpha / (kx * kx - 2.0)).sqrt())
        .min(2.0 * nf * rx / (alpha + 1.0) * (2.0 * alpha / (kx * kx - 2.0)).sqrt())
        .min((2.0 * alpha).sqrt() * ry / (alpha - 1.0));
    let lambda = beta * beta / (2.0 * nf) * (l * l - 2.0 * mu_x * mu_x).sqrt();
    let zeta = (2.0 / (alpha + 1.0)).sqrt();
    let scale = Scale { lambda, beta };
    let cm = c1.max(c2);
    let reg = Regularity {
        l,
        l_avg: scale.curvature() * (8.0 * nf + 2.0 * cm * cm).sqrt(),
        mu_x,
        mu_y,
    };
    let mut inst = Instance::assemble(
        Kind::Scsc,
        n,
        (m, m),
        scale,
        Base::Tilde { m, zeta, c1, c2 },
        Feasible { rx: Some(rx), ry: Some(ry) },
        reg,
    );
    inst.alpha = Some(alpha);
    Ok(inst)
}

/// Convex-strongly-concave instance.
pub fn make_csc(l: f64, mu_y: f64, rx: f64, ry: f64, n: usize, m: usize) -> Result<Instance> {
    ensure_n(n)?;
    ensure_radius("Rx", rx)?;
    ensure_radius("Ry", ry)?;
    ensure(m >= 2, || format!("m >= 2 required, got {m}"))?;
    ensure(mu_y > 0.0 && l / mu_y >= 2.0, || format!("need L/mu_y >= 2, got {}", l / mu_y))?;
    let nf = n as f64;
    let k2 = l * l / (mu_y * mu_y) - 2.0;
    let c2 = 2.0 * nf / k2.sqrt();
    let beta = (rx * k2.sqrt() / (2.0 * nf * ((m + 1) as f64).powf(1.5))).min(ry / (m as f64).sqrt());
    let lambda = beta * beta * (l * l - 2.0 * mu_y * mu_y).sqrt() / (2.0 * nf);
    let scale = Scale { lambda, beta };
    let reg = Regularity {
        l,
        l_avg: scale.curvature() * (8.0 * nf + 2.0 * c2 * c2).sqrt(),
        mu_x: 0.0,
        mu_y,
    };
    Ok(Instance::assemble(
        Kind::Csc,
        n,
        (m, m),
        scale,
        Base::Tilde { m, zeta: 1.0, c1: 0.0, c2 },
        Feasible { rx: Some(rx), ry: Some(ry) },
        reg,
    ))
}

/// Convex-concave bilinear instance.
pub fn make_cc(l: f64, rx: f64, ry: f64, n: usize, m: usize) -> Result<Instance> {
    ensure_n(n)?;
    ensure_radius("Rx", rx)?;
    ensure_radius("Ry", ry)?;
    ensure(m >= 3, || format!("m >= 3 required, got {m}"))?;
    let nf = n as f64;
    let lambda = l * ry * ry / (2.0 * nf * m as f64);
    let beta = ry / (m as f64).sqrt();
    let scale = Scale { lambda, beta };
    let reg = Regularity { l, l_avg: scale.curvature() * (8.0 * nf).sqrt(), mu_x: 0.0, mu_y: 0.0 };
    Ok(Instance::assemble(
        Kind::Cc,
        n,
        (m, m),
        scale,
        Base::Tilde { m, zeta: 1.0, c1: 0.0, c2: 0.0 },
        Feasible { rx: Some(rx), ry: Some(ry) },
        reg,
    ))
}

struct NcscRecipe {
    alpha: f64,
    c: (f64, f64, f64),
    lambda: f64,
    beta: f64,
    m: usize,
}

fn ncsc_instance(kind: Kind, n: usize, r: NcscRecipe, l: f64, l_avg: Option<f64>, mus: (f64, f64), target: Target) -> Instance {
    let dim = r.m + 1;
    let omega = r.alpha.powf(0.25);
    let scale = Scale { lambda: r.lambda, beta: r.beta };
    let base_reg = hat_regularity(n, r.c);
    let curv = scale.curvature();
    let reg = Regularity {
        l: if l_avg.is_some() { curv * base_reg.l } else { l },
        l_avg: l_avg.unwrap_or(curv * base_reg.l_avg),
        mu_x: -mus.0,
        mu_y: mus.1,
    };
    let (c1, c2, c3) = r.c;
    let mut inst = Instance::assemble(
        kind,
        n,
        (dim, dim),
        scale,
        Base::Hat { m: dim, omega, c1, c2, c3 },
        Feasible::FREE,
        reg,
    );
    inst.alpha = Some(r.alpha);
    inst.prox_limit = Some(base_prox_limit(c2 * c3 * c3) / curv);
    inst.target = Some(target);
    inst
}

/// Nonconvex-strongly-concave instance. Its dimension is fixed by `eps`.
pub fn make_ncsc(l: f64, mu_x: f64, mu_y: f64, delta: f64, eps: f64, n: usize) -> Result<Instance> {
    ensure_n(n)?;
    ensure(mu_x > 0.0 && mu_y > 0.0 && delta > 0.0 && eps > 0.0, || {
        "mu_x, mu_y, Delta and eps must be positive".into()
    })?;
    ensure(l / mu_y >= 4.0, || format!("need L/mu_y >= 4, got {}", l / mu_y))?;
    let nf = n as f64;
    let alpha = 1f64
        .min(nf * nf * mu_y / (90.0 * l))
        .min(8.0 * (3f64.sqrt() + 1.0) * nf * nf * mu_x * mu_y / (45.0 * l * l));
    let bound = delta * l * l * alpha / (435456.0 * nf * nf * mu_y);
    ensure(eps * eps <= bound, || format!("need eps^2 <= Delta L^2 alpha / (435456 n^2 mu_y) = {bound}"))?;
    let m = (delta * l * l * alpha.sqrt() / (217728.0 * nf * nf * eps * eps * mu_y)).floor() as usize;
    ensure(m >= 2, || format!("derived chain length m = {m} < 2"))?;
    let lambda = 82944.0 * nf.powi(3) * mu_y * mu_y * eps * eps / (l.powi(3) * alpha);
    let beta = 2.0 * (lambda * nf / l).sqrt();
    let c = (4.0 * nf * mu_y / l, alpha.sqrt() * l / (4.0 * nf * mu_y), alpha.powf(0.25));
    Ok(ncsc_instance(
        Kind::Ncsc,
        n,
        NcscRecipe { alpha, c, lambda, beta, m },
        l,
        None,
        (mu_x, mu_y),
        Target { delta, eps },
    ))
}

/// Average-smooth nonconvex-strongly-concave instance.
pub fn make_ncsc_avg(l_prime: f64, mu_x: f64, mu_y: f64, delta: f64, eps: f64, n: usize) -> Result<Instance> {
    ensure_n(n)?;
    ensure(mu_x > 0.0 && mu_y > 0.0 && delta > 0.0 && eps > 0.0, || {
        "mu_x, mu_y, Delta and eps must be positive".into()
    })?;
    ensure(l_prime / mu_y >= 4.0, || format!("need L'/mu_y >= 4, got {}", l_prime / mu_y))?;
    let nf = n as f64;
    let lp = l_prime;
    let alpha = 1f64
        .min(32.0 * nf * mu_y / (135.0 * lp))
        .min(128.0 * (3f64.sqrt() + 1.0) * nf * mu_x * mu_y / (45.0 * lp * lp));
    let bound = delta * lp * lp * alpha / (6967296.0 * nf * mu_y);
    ensure(eps * eps <= bound, || format!("need eps^2 <= Delta L'^2 alpha / (6967296 n mu_y) = {bound}"))?;
    let m = (delta * lp * lp * alpha.sqrt() / (3483648.0 * nf * eps * eps * mu_y)).floor() as usize;
    ensure(m >= 2, || format!("derived chain length m = {m} < 2"))?;
    let lambda = 5308416.0 * nf.powf(1.5) * mu_y * mu_y * eps * eps / (lp.powi(3) * alpha);
    let beta = 4.0 * (lambda * nf.sqrt() / lp).sqrt();
    let c = (16.0 * nf.sqrt() * mu_y / lp, alpha.sqrt() * lp / (16.0 * nf.sqrt() * mu_y), alpha.powf(0.25));
    Ok(ncsc_instance(
        Kind::NcscAvg,
        n,
        NcscRecipe { alpha, c, lambda, beta, m },
        lp,
        Some(lp),
        (mu_x, mu_y),
        Target { delta, eps },
    ))
}

/// Parameters of an average-smooth lift. Each case names the target
/// average-smoothness `l_prime` and maps it to the per-component constant used
/// by the smooth construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lift {
    Scsc { l_prime: f64, mu_x: f64, mu_y: f64, rx: f64, ry: f64, n: usize, m: usize },
    Csc { l_prime: f64, mu_y: f64, rx: f64, ry: f64, n: usize, m: usize },
    Cc { l_prime: f64, rx: f64, ry: f64, n: usize, m: usize },
    Ncsc { l_prime: f64, mu_x: f64, mu_y: f64, delta: f64, eps: f64, n: usize },
    Sc { l_prime: f64, mu: f64, r: f64, n: usize, m: usize },
    C { l_prime: f64, r: f64, n: usize, m: usize },
    Nc { l_prime: f64, mu: f64, delta: f64, eps: f64, n: usize },
}

/// Per-component smoothness `L` paired with an average-smooth target `L'`.
pub fn lifted_smoothness(lift: &Lift) -> Option<f64> {
    let half = |n: usize| n as f64 / 2.0;
    match *lift {
        Lift::Scsc { l_prime, mu_x, n, .. } => {
            Some((half(n) * (l_prime * l_prime - 2.0 * mu_x * mu_x) + 2.0 * mu_x * mu_x).sqrt())
        }
        Lift::Csc { l_prime, mu_y, n, .. } => {
            Some((half(n) * (l_prime * l_prime - 2.0 * mu_y * mu_y) + 2.0 * mu_y * mu_y).sqrt())
        }
        Lift::Cc { l_prime, n, .. } | Lift::C { l_prime, n, .. } => Some(half(n).sqrt() * l_prime),
        Lift::Sc { l_prime, mu, n, .. } => {
            Some((half(n) * (l_prime * l_prime - mu * mu) - mu * mu).sqrt())
        }
        Lift::Ncsc { .. } | Lift::Nc { .. } => None,
    }
}

pub fn lift_to_average_smooth(lift: Lift) -> Result<Instance> {
    let l = lifted_smoothness(&lift);
    let need_n4 = |n: usize| ensure(n >= 4, || format!("average-smooth lift needs n >= 4, got {n}"));
    let mut inst = match lift {
        Lift::Scsc { l_prime, mu_x, mu_y, rx, ry, n, m } => {
            need_n4(n)?;
            ensure(l_prime / mu_x >= 2.0 && l_prime / mu_y >= 2.0, || "need L'/mu >= 2".into())?;
            make_scsc(l.unwrap(), mu_x, mu_y, rx, ry, n, m)?
        }
        Lift::Csc { l_prime, mu_y, rx, ry, n, m } => {
            need_n4(n)?;
            ensure(l_prime / mu_y >= 2.0, || "need L'/mu_y >= 2".into())?;
            make_csc(l.unwrap(), mu_y, rx, ry, n, m)?
        }
        Lift::Cc { rx, ry, n, m, .. } => make_cc(l.unwrap(), rx, ry, n, m)?,
        Lift::Ncsc { l_prime, mu_x, mu_y, delta, eps, n } => {
            return make_ncsc_avg(l_prime, mu_x, mu_y, delta, eps, n)
        }
        Lift::Sc { l_prime, mu, r, n, m } => {
            need_n4(n)?;
            ensure(l_prime / mu >= 2.0, || "need L'/mu >= 2".into())?;
            minimization::make_sc(l.unwrap(), mu, r, n, m)?
        }
        Lift::C { r, n, m, .. } => minimization::make_c(l.unwrap(), r, n, m)?,
        Lift::Nc { l_prime, mu, delta, eps, n } => {
            return minimization::make_nc_avg(l_prime, mu, delta, eps, n)
        }
    };
    inst.regularity.l_avg = match lift {
        Lift::Scsc { l_prime, .. }
        | Lift::Csc { l_prime, .. }
        | Lift::Cc { l_prime, .. }
        | Lift::Sc { l_prime, .. }
        | Lift::C { l_prime, .. } => l_prime,
        _ => unreachable!(),
    };
    Ok(inst)
}

/// Separable composites `X_i(x) - Y_i(y)` built around a minimization instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Composite {
    /// `mu_x/2 |x|² - f_SC,i(y)`.
    GScsc,
    /// `f_C,i(x) - mu_y/2 |y|²`.
    GCsc,
    /// `L/2 |x|² - g_SC,i(y)`.
    HCsc,
}

/// `ridge` is the quadratic weight on the free block and `ridge_radius` its
/// ball radius. The wrapped instance keeps its own radius.
pub fn make_composed(kind: Composite, ridge: f64, ridge_radius: Option<f64>, inner: Instance) -> Result<Instance> {
    if !inner.is_minimization() || inner.dim_y != 0 {
        return Err(invalid("composite needs a minimization instance to wrap"));
    }
    if !(ridge > 0.0) {
        return Err(invalid(format!("ridge weight must be positive, got {ridge}")));
    }
    let n = inner.n;
    let d = inner.dim_x;
    let ir = inner.regularity;
    let inner_r = inner.feasible.rx;
    let l = ridge.max(ir.l);
    let l_avg = ridge.max(ir.l_avg);
    let (k, x, y, feasible, mu) = match kind {
        Composite::GScsc => (
            Kind::AuxGScsc,
            Side::Ridge { mu: ridge },
            Side::Chain(Box::new(inner)),
            Feasible { rx: ridge_radius, ry: inner_r },
            (ridge, ir.mu_x),
        ),
        Composite::GCsc => (
            Kind::AuxGCsc,
            Side::Chain(Box::new(inner)),
            Side::Ridge { mu: ridge },
            Feasible { rx: inner_r, ry: ridge_radius },
            (ir.mu_x, ridge),
        ),
        Composite::HCsc => (
            Kind::AuxHCsc,
            Side::Ridge { mu: ridge },
            Side::Chain(Box::new(inner)),
            Feasible { rx: ridge_radius, ry: inner_r },
            (ridge, ir.mu_x),
        ),
    };
    let reg = Regularity { l, l_avg, mu_x: mu.0, mu_y: mu.1 };
    Ok(Instance::assemble(k, n, (d, d), Scale::UNIT, Base::Split { x, y }, feasible, reg))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OneDim {
    /// `L/2 (x² - y²)` with a linear pull on the first component.
    HScsc,
    /// `L x y` with a linear pull on the first component.
    HCc,
}

pub fn make_1d(kind: OneDim, l: f64, n: usize, rx: f64, ry: Option<f64>) -> Result<Instance> {
    ensure_n(n)?;
    ensure_radius("Rx", rx)?;
    if !(l > 0.0) {
        return Err(invalid("L must be positive"));
    }
    let (k, shape, mu) = match kind {
        OneDim::HScsc => (Kind::AuxHScsc1d, Shape1d::Quadratic, l),
        OneDim::HCc => (Kind::AuxHCc1d, Shape1d::Bilinear, 0.0),
    };
    let reg = Regularity { l, l_avg: l, mu_x: mu, mu_y: mu };
    Ok(Instance::assemble(
        k,
        n,
        (1, 1),
        Scale::UNIT,
        Base::Saddle1d { shape, l, rx },
        Feasible { rx: Some(rx), ry },
        reg,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tilde_gradient_example() {
        let inst = make_tilde_r(3, 1.0, (0.0, 0.0), 2).unwrap();
        let e = inst.component(1, &[1.0, 0.0, 0.0], &[0.0; 3]).unwrap();
        assert_eq!(e.grad_y, vec![2.0, 0.0, 0.0]);
        let z = inst.component(1, &[0.0; 3], &[0.0; 3]).unwrap();
        assert!(z.grad_x.iter().chain(&z.grad_y).all(|&v| v == 0.0));
        let first = inst.component(0, &[0.0; 3], &[0.0; 3]).unwrap();
        assert_eq!(first.grad_x, vec![-2.0, 0.0, 0.0]);
    }

    #[test]
    fn hat_origin_example() {
        let n = 3;
        let inst = make_hat_r(4, 1.0, (1.0, 0.5, 0.7), n).unwrap();
        let e = inst.component(0, &[0.0; 4], &[0.0; 4]).unwrap();
        assert_eq!(e.grad_y, vec![-3.0, 0.0, 0.0, 0.0]);
        assert!(e.grad_x.iter().all(|&v| v == 0.0));
        let v0 = 0.5 * 3.0 * crate::linalg::gamma_value(0.0);
        assert!((e.value - v0).abs() < 1e-12);
    }

    #[test]
    fn scsc_alpha_branch() {
        // kappa_x = kappa_y = n makes the alpha argument 1 - 2/n².
        let inst = make_scsc(2.0, 1.0, 1.0, 1.0, 1.0, 2, 4).unwrap();
        assert!((inst.alpha.unwrap() - 1.5f64.sqrt()).abs() < 1e-15);
        assert!(make_scsc(2.0, 1.5, 1.0, 1.0, 1.0, 2, 4).is_err());
    }

    #[test]
    fn csc_defaults() {
        let inst = make_csc(4.0, 1.0, 1e9, 1.0, 3, 5).unwrap();
        assert_eq!(inst.regularity.mu_x, 0.0);
        assert!((inst.scale.beta - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(inst.component(0, &[0.0; 5], &[0.0; 5]).unwrap().value, 0.0);
    }

    #[test]
    fn cc_scale() {
        let inst = make_cc(2.0, 1.0, 1.0, 2, 4).unwrap();
        assert!((inst.scale.lambda - 0.125).abs() < 1e-15);
        assert_eq!((inst.regularity.mu_x, inst.regularity.mu_y), (0.0, 0.0));
        assert!(make_cc(2.0, 1.0, 1.0, 2, 2).is_err());
    }

    #[test]
    fn lift_example() {
        let lift = Lift::Scsc { l_prime: 2.0, mu_x: 1.0, mu_y: 1.0, rx: 1.0, ry: 1.0, n: 8, m: 3 };
        let l = lifted_smoothness(&lift).unwrap();
        assert!((l - 10f64.sqrt()).abs() < 1e-15);
        assert!(8f64.sqrt() / 2.0 * 2.0 <= l && l <= 2.0 * 2.0);
        assert!(lift_to_average_smooth(Lift::Csc { l_prime: 4.0, mu_y: 1.0, rx: 1.0, ry: 1.0, n: 3, m: 3 }).is_err());
    }
}
