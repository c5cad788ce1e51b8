//! Factories for the minimization families.

use crate::error::{invalid, Result};
use crate::instance::{Base, Feasible, Instance, Kind, Regularity, Scale, Target};
use crate::linalg::{BSpec, GAMMA_SMOOTHNESS, GAMMA_WEAK_CONVEXITY};
use crate::minimax::{base_prox_limit, ensure};

fn ensure_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("need n >= 2 components, got {n}")));
    }
    Ok(())
}

/// Regularity of the unscaled chain. Fails on mixed curvature, which no
/// construction uses.
fn chain_regularity(n: usize, (c1, c2, _): (f64, f64, f64)) -> Result<Regularity> {
    let nf = n as f64;
    if c1 < 0.0 || c2 < 0.0 {
        return Err(invalid("c1 and c2 must be nonnegative"));
    }
    if c2 == 0.0 {
        Ok(Regularity {
            l: 2.0 * nf + c1,
            l_avg: ((4.0 / nf) * ((nf + c1).powi(2) + nf * nf) + c1 * c1).sqrt(),
            mu_x: c1,
            mu_y: 0.0,
        })
    } else if c1 == 0.0 {
        Ok(Regularity {
            l: 2.0 * nf + GAMMA_SMOOTHNESS * c2,
            l_avg: 4.0 * (nf + 4050.0 * c2 * c2).sqrt(),
            mu_x: -GAMMA_WEAK_CONVEXITY * c2,
            mu_y: 0.0,
        })
    } else {
        Err(invalid(format!("mixed curvature c1 = {c1}, c2 = {c2} is not supported")))
    }
}

fn chain_instance(
    kind: Kind,
    n: usize,
    spec: BSpec,
    c: (f64, f64, f64),
    scale: Scale,
    radius: Option<f64>,
) -> Result<Instance> {
    spec.validate()?;
    let base_reg = chain_regularity(n, c)?;
    let curv = scale.curvature();
    let reg = Regularity {
        l: curv * base_reg.l,
        l_avg: curv * base_reg.l_avg,
        mu_x: curv * base_reg.mu_x,
        mu_y: 0.0,
    };
    let mut inst = Instance::assemble(
        kind,
        n,
        (spec.m, 0),
        scale,
        Base::Chain { m: spec.m, omega: spec.omega, zeta: spec.zeta, c1: c.0, c2: c.1, c3: c.2 },
        Feasible { rx: radius, ry: None },
        reg,
    );
    if c.1 > 0.0 {
        inst.prox_limit = Some(base_prox_limit(c.1) / curv);
    }
    Ok(inst)
}

/// Unscaled minimization chain `r`.
pub fn make_r(m: usize, omega: f64, zeta: f64, c: (f64, f64, f64), n: usize) -> Result<Instance> {
    ensure_n(n)?;
    if m < 2 {
        return Err(invalid(format!("m >= 2 required, got {m}")));
    }
    chain_instance(Kind::RBase, n, BSpec::new(m, omega, zeta)?, c, Scale::UNIT, None)
}

/// Strongly convex instance on the ball of radius `r`.
pub fn make_sc(l: f64, mu: f64, r: f64, n: usize, m: usize) -> Result<Instance> {
    ensure_n(n)?;
    ensure(m >= 2, || format!("m >= 2 required, got {m}"))?;
    ensure(mu > 0.0 && l / mu >= 2.0, || format!("need L/mu >= 2, got {}", l / mu))?;
    ensure(r > 0.0, || "R must be positive".into())?;
    let nf = n as f64;
    let k1 = l / mu - 1.0;
    let alpha = (2.0 * k1 / nf + 1.0).sqrt();
    let c = (2.0 * nf / k1, 0.0, 1.0);
    let scale = Scale { lambda: 2.0 * mu * r * r * alpha * nf / k1, beta: 2.0 * r * alpha.sqrt() * nf / k1 };
    let spec = BSpec { m, omega: 0.0, zeta: (2.0 / (alpha + 1.0)).sqrt() };
    let mut inst = chain_instance(Kind::Sc, n, spec, c, scale, Some(r))?;
    inst.regularity.l = l;
    inst.regularity.mu_x = mu;
    inst.alpha = Some(alpha);
    Ok(inst)
}

/// Convex instance on the ball of radius `r`.
pub fn make_c(l: f64, r: f64, n: usize, m: usize) -> Result<Instance> {
    ensure_n(n)?;
    ensure(m >= 2, || format!("m >= 2 required, got {m}"))?;
    ensure(l > 0.0 && r > 0.0, || "L and R must be positive".into())?;
    let nf = n as f64;
    let m1 = (m + 1) as f64;
    let scale = Scale { lambda: 3.0 * l * r * r / (2.0 * nf * m1.powi(3)), beta: 3f64.sqrt() * r / m1.powf(1.5) };
    let spec = BSpec { m, omega: 0.0, zeta: 1.0 };
    let mut inst = chain_instance(Kind::C, n, spec, (0.0, 0.0, 1.0), scale, Some(r))?;
    inst.regularity.l = l;
    Ok(inst)
}

fn nc_instance(kind: Kind, n: usize, alpha: f64, m: usize, scale: Scale, target: Target) -> Result<Instance> {
    let spec = BSpec { m: m + 1, omega: alpha.powf(0.25), zeta: 0.0 };
    let mut inst = chain_instance(kind, n, spec, (0.0, alpha, alpha.sqrt()), scale, None)?;
    inst.alpha = Some(alpha);
    inst.target = Some(target);
    Ok(inst)
}

/// Nonconvex instance over `R^{m+1}`; `m` is derived from `eps`.
pub fn make_nc(l: f64, mu: f64, delta: f64, eps: f64, n: usize) -> Result<Instance> {
    ensure_n(n)?;
    ensure(l > 0.0 && mu > 0.0 && delta > 0.0 && eps > 0.0, || "L, mu, Delta, eps must be positive".into())?;
    let nf = n as f64;
    let alpha = 1f64.min((3f64.sqrt() + 1.0) * nf * mu / (30.0 * l)).min(nf / 180.0);
    let bound = delta * l * alpha / (81648.0 * nf);
    ensure(eps * eps <= bound, || format!("need eps^2 <= Delta L alpha / (81648 n) = {bound}"))?;
    let m = (delta * l * alpha.sqrt() / (40824.0 * nf * eps * eps)).floor() as usize;
    ensure(m >= 2, || format!("derived chain length m = {m} < 2"))?;
    let lambda = 3888.0 * nf * eps * eps / (l * alpha.powf(1.5));
    let scale = Scale { lambda, beta: (3.0 * lambda * nf / l).sqrt() };
    let mut inst = nc_instance(Kind::Nc, n, alpha, m, scale, Target { delta, eps })?;
    inst.regularity.l = l;
    inst.regularity.mu_x = -mu;
    Ok(inst)
}

/// Average-smooth nonconvex instance.
pub fn make_nc_avg(l_prime: f64, mu: f64, delta: f64, eps: f64, n: usize) -> Result<Instance> {
    ensure_n(n)?;
    ensure(l_prime > 0.0 && mu > 0.0 && delta > 0.0 && eps > 0.0, || {
        "L', mu, Delta, eps must be positive".into()
    })?;
    let nf = n as f64;
    let sn = nf.sqrt();
    let alpha = 1f64
        .min(8.0 * (3f64.sqrt() + 1.0) * sn * mu / (45.0 * l_prime))
        .min((nf / 270.0).sqrt());
    let bound = delta * l_prime * alpha / (435456.0 * sn);
    ensure(eps * eps <= bound, || format!("need eps^2 <= Delta L' alpha / (435456 sqrt n) = {bound}"))?;
    let m = (delta * l_prime * alpha.sqrt() / (217728.0 * sn * eps * eps)).floor() as usize;
    ensure(m >= 2, || format!("derived chain length m = {m} < 2"))?;
    let lambda = 20736.0 * sn * eps * eps / (l_prime * alpha.powf(1.5));
    let scale = Scale { lambda, beta: 4.0 * (lambda * sn / l_prime).sqrt() };
    let mut inst = nc_instance(Kind::NcAvg, n, alpha, m, scale, Target { delta, eps })?;
    inst.regularity.l_avg = l_prime;
    inst.regularity.mu_x = -mu;
    Ok(inst)
}

/// One-dimensional quadratic whose linear pull sits on the first component.
pub fn make_gsc_1d(l: f64, r: f64, n: usize) -> Result<Instance> {
    ensure_n(n)?;
    ensure(l > 0.0 && r > 0.0, || "L and R must be positive".into())?;
    Ok(Instance::assemble(
        Kind::AuxGSc1d,
        n,
        (1, 0),
        Scale::UNIT,
        Base::Line1d { l, r },
        Feasible { rx: Some(r), ry: None },
        Regularity { l, l_avg: l, mu_x: l, mu_y: 0.0 },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_origin_gradients() {
        let n = 3;
        let inst = make_r(5, 0.0, 1.0, (0.5, 0.0, 1.0), n).unwrap();
        for i in 1..n {
            assert!(inst.component(i, &[0.0; 5], &[]).unwrap().grad_x.iter().all(|&v| v == 0.0));
        }
        assert_eq!(inst.component(0, &[0.0; 5], &[]).unwrap().grad_x, vec![-3.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(make_r(5, 0.0, 1.0, (0.5, 0.1, 1.0), n).is_err());
    }

    #[test]
    fn average_constant_matches_formula() {
        let n = 4;
        let c1 = 0.7;
        let inst = make_r(5, 0.0, 1.0, (c1, 0.0, 1.0), n).unwrap();
        let nf = n as f64;
        let want = ((4.0 / nf) * ((nf + c1).powi(2) + nf * nf) + c1 * c1).sqrt();
        assert!((inst.regularity.l_avg - want).abs() < 1e-14);
    }

    #[test]
    fn sc_scaled_constants() {
        let inst = make_sc(32.0, 1.0, 1.0, 8, 6).unwrap();
        let curv = inst.scale.curvature();
        assert!((curv * 2.0 * 8.0 / 31.0 - 1.0).abs() < 1e-14, "scaled strong convexity is mu");
        assert!(inst.regularity.l_avg <= 32.0);
    }

    #[test]
    fn gsc_aggregate() {
        let inst = make_gsc_1d(2.0, 1.5, 4).unwrap();
        let (g, _) = inst.grad(&[0.0], &[]);
        assert!((g[0] + 3.0).abs() < 1e-15);
        assert!((inst.value(&[0.0], &[]) - inst.value(&[1.5], &[]) - 2.0 * 1.5 * 1.5 / 2.0).abs() < 1e-14);
    }

    #[test]
    fn nc_dimension_and_limit() {
        let inst = make_nc(10.0, 1.0, 1.0, 1e-4, 4).unwrap();
        let m = inst.chain_len().unwrap();
        assert!(m >= 3);
        assert!(inst.prox_limit.is_some());
        assert!(make_nc(10.0, 1.0, 1.0, 1.0, 4).is_err());
    }
}
