//! Lower-bound curves (with unit constants) and the recipes for
//! the chain length `m`, the reachable depth `M` and the query budget `N`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};
use crate::minimax::{lifted_smoothness, Lift};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Scsc,
    Csc,
    Cc,
    Ncsc,
    ScscAvg,
    CscAvg,
    CcAvg,
    NcscAvg,
    Sc,
    C,
    Nc,
    ScAvg,
    CAvg,
    NcAvg,
}

impl Case {
    pub const ALL: [Case; 14] = [
        Case::Scsc,
        Case::Csc,
        Case::Cc,
        Case::Ncsc,
        Case::ScscAvg,
        Case::CscAvg,
        Case::CcAvg,
        Case::NcscAvg,
        Case::Sc,
        Case::C,
        Case::Nc,
        Case::ScAvg,
        Case::CAvg,
        Case::NcAvg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Case::Scsc => "scsc",
            Case::Csc => "csc",
            Case::Cc => "cc",
            Case::Ncsc => "ncsc",
            Case::ScscAvg => "scsc_avg",
            Case::CscAvg => "csc_avg",
            Case::CcAvg => "cc_avg",
            Case::NcscAvg => "ncsc_avg",
            Case::Sc => "sc",
            Case::C => "c",
            Case::Nc => "nc",
            Case::ScAvg => "sc_avg",
            Case::CAvg => "c_avg",
            Case::NcAvg => "nc_avg",
        }
    }

    pub fn is_average_smooth(self) -> bool {
        matches!(self, Case::ScscAvg | Case::CscAvg | Case::CcAvg | Case::NcscAvg | Case::ScAvg | Case::CAvg | Case::NcAvg)
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Case {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        Case::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown case {s:?}")))
    }
}

/// Problem constants. `l` is the per-component smoothness, or the
/// average-smoothness for the `*_avg` cases. Minimization cases use `mu_x`
/// as the curvature and `r_x` as the radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub l: f64,
    #[serde(default)]
    pub mu_x: f64,
    #[serde(default)]
    pub mu_y: f64,
    #[serde(default = "one")]
    pub r_x: f64,
    #[serde(default = "one")]
    pub r_y: f64,
    #[serde(default = "one")]
    pub delta: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundQuery {
    pub case: Case,
    pub params: Params,
    pub eps: f64,
}

/// Chain length, reachable depth and query budget
/// `N = n (M + 1) / 4` (or `n m / 4` for the nonconvex cases).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainPlan {
    pub m: usize,
    pub depth: usize,
    pub budget: f64,
}

impl ChainPlan {
    /// Largest whole number of queries within the budget.
    pub fn budget_queries(&self) -> u64 {
        self.budget.floor() as u64
    }
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(precondition(msg()))
    }
}

fn positive(q: &LowerBoundQuery) -> Result<()> {
    let p = q.params;
    need(p.n >= 2, || format!("need n >= 2, got {}", p.n))?;
    need(q.eps > 0.0 && p.l > 0.0, || "eps and L must be positive".into())?;
    need(p.r_x > 0.0 && p.r_y > 0.0 && p.delta > 0.0, || "radii and Delta must be positive".into())
}

/// Lower-bound expression of the case with every hidden constant set to 1.
pub fn lower_bound_curve(q: &LowerBoundQuery) -> Result<f64> {
    positive(q)?;
    let p = q.params;
    let n = p.n as f64;
    let sn = n.sqrt();
    let n34 = n.powf(0.75);
    let eps = q.eps;
    let log = (1.0 / eps).ln();
    let (l, rx, ry, d) = (p.l, p.r_x, p.r_y, p.delta);
    let need_mu = |mu: f64, name: &str| need(mu > 0.0, || format!("{name} must be positive for {}", q.case));
    let val = match q.case {
        Case::Scsc => {
            need_mu(p.mu_x, "mu_x")?;
            need_mu(p.mu_y, "mu_y")?;
            ((n + l / p.mu_x) * (n + l / p.mu_y)).sqrt() * log
        }
        Case::Csc => {
            need_mu(p.mu_y, "mu_y")?;
            n + rx * (n * l / eps).sqrt() + rx * l / (p.mu_y * eps).sqrt() + (n * l / p.mu_y).sqrt() * log
        }
        Case::Cc => n + l * rx * ry / eps + (rx + ry) * (n * l / eps).sqrt(),
        Case::Ncsc => {
            need_mu(p.mu_y, "mu_y")?;
            n + d * l / (eps * eps) * (l / p.mu_y).sqrt().min((p.mu_x.abs() / p.mu_y).sqrt())
        }
        Case::ScscAvg => {
            need_mu(p.mu_x, "mu_x")?;
            need_mu(p.mu_y, "mu_y")?;
            sn * ((sn + l / p.mu_x) * (sn + l / p.mu_y)).sqrt() * log
        }
        Case::CscAvg => {
            need_mu(p.mu_y, "mu_y")?;
            n + rx * n34 * (l / eps).sqrt() + sn * rx * l / (p.mu_y * eps).sqrt() + n34 * (l / p.mu_y).sqrt() * log
        }
        Case::CcAvg => n + sn * l * rx * ry / eps + (rx + ry) * n34 * (l / eps).sqrt(),
        Case::NcscAvg => {
            need_mu(p.mu_y, "mu_y")?;
            n + d * sn * l / (eps * eps) * (l / p.mu_y).sqrt().min((p.mu_x.abs() / p.mu_y).sqrt())
        }
        Case::Sc => {
            need_mu(p.mu_x, "mu")?;
            let kappa = l / p.mu_x;
            if kappa >= n / 2.0 + 1.0 {
                (n + (n * kappa).sqrt()) * log
            } else {
                n + n / (1.0 + (n / kappa).ln().max(0.0)) * log
            }
        }
        Case::C => n + rx * (n * l / eps).sqrt(),
        Case::Nc => {
            need_mu(p.mu_x.abs(), "mu")?;
            n + d / (eps * eps) * l.min((n * p.mu_x.abs() * l).sqrt())
        }
        Case::ScAvg => {
            need_mu(p.mu_x, "mu")?;
            let kappa = l / p.mu_x;
            if kappa >= sn {
                (n + n34 * kappa.sqrt()) * log
            } else {
                n + n / (1.0 + (sn / kappa).ln().max(0.0)) * log
            }
        }
        Case::CAvg => n + rx * n34 * (l / eps).sqrt(),
        Case::NcAvg => {
            need_mu(p.mu_x.abs(), "mu")?;
            n + d / (eps * eps) * (sn * l).min(n34 * (p.mu_x.abs() * l).sqrt())
        }
    };
    Ok(val)
}

/// Checks the preconditions of a case, quoting the printed threshold
/// on failure.
pub fn validate(q: &LowerBoundQuery) -> Result<()> {
    select_m_n(q).map(|_| ())
}

fn floor_usize(v: f64) -> i64 {
    v.floor() as i64
}

/// The per-component smoothness the construction uses for `q`.
pub fn construction_smoothness(q: &LowerBoundQuery) -> Result<f64> {
    let p = q.params;
    let lift = match q.case {
        Case::ScscAvg => Lift::Scsc { l_prime: p.l, mu_x: p.mu_x, mu_y: p.mu_y, rx: p.r_x, ry: p.r_y, n: p.n, m: 2 },
        Case::CscAvg => Lift::Csc { l_prime: p.l, mu_y: p.mu_y, rx: p.r_x, ry: p.r_y, n: p.n, m: 2 },
        Case::CcAvg => Lift::Cc { l_prime: p.l, rx: p.r_x, ry: p.r_y, n: p.n, m: 3 },
        Case::ScAvg => Lift::Sc { l_prime: p.l, mu: p.mu_x, r: p.r_x, n: p.n, m: 2 },
        Case::CAvg => Lift::C { l_prime: p.l, r: p.r_x, n: p.n, m: 2 },
        _ => return Ok(p.l),
    };
    if matches!(q.case, Case::ScscAvg | Case::CscAvg | Case::ScAvg) {
        need(p.n >= 4, || format!("average-smooth lift needs n >= 4, got {}", p.n))?;
    }
    let l = lifted_smoothness(&lift).unwrap();
    need(l.is_finite() && l > 0.0, || "lifted smoothness is not positive".into())?;
    Ok(l)
}

/// Recipe for `(m, M, N)`.
pub fn select_m_n(q: &LowerBoundQuery) -> Result<ChainPlan> {
    positive(q)?;
    let p = q.params;
    let n = p.n as f64;
    let eps = q.eps;
    let l = construction_smoothness(q)?;
    let plan = |m: i64, depth: i64| -> Result<ChainPlan> {
        need(depth >= 1 && depth < m, || format!("derived depth M = {depth} must satisfy 1 <= M < m = {m}"))?;
        Ok(ChainPlan { m: m as usize, depth: depth as usize, budget: n * (depth + 1) as f64 / 4.0 })
    };
    match q.case {
        Case::Scsc | Case::ScscAvg => {
            let (mx, my) = (p.mu_x, p.mu_y);
            need(mx > 0.0 && my > 0.0, || "mu_x and mu_y must be positive".into())?;
            let (kx, ky) = (l / mx, l / my);
            need(ky >= kx && kx >= (n * n + 2.0).sqrt(), || {
                format!("need kappa_y >= kappa_x >= sqrt(n^2 + 2), got kappa_x = {kx}, kappa_y = {ky}")
            })?;
            let bound = (n * n * mx * p.r_x * p.r_x / (kx * ky)).min(my * p.r_y * p.r_y) / 1600.0;
            need(eps <= bound, || format!("need eps <= min(n^2 mu_x Rx^2 / (kx ky), mu_y Ry^2) / 1600 = {bound}"))?;
            let alpha = ((kx - 2.0 / kx) * ky / (n * n) + 1.0).sqrt();
            let m = floor_usize(alpha / 4.0 * ((mx * p.r_x * p.r_x).max(my * p.r_y * p.r_y) / (9.0 * eps)).ln()) + 1;
            let inst = crate::minimax::make_scsc(l, mx, my, p.r_x, p.r_y, p.n, m.max(2) as usize)?;
            let beta = inst.scale.beta;
            let xi2 = (l * l - 2.0 * mx * mx) / (4.0 * n * n);
            let q_ratio = (alpha - 1.0) / (alpha + 1.0);
            let depth = floor_usize((9.0 * (alpha + 1.0) * mx * eps / (beta * beta * xi2)).ln() / (2.0 * q_ratio.ln()));
            plan(m, depth)
        }
        Case::Csc | Case::CscAvg => {
            let my = p.mu_y;
            need(my > 0.0 && l / my >= 2.0, || format!("need L/mu_y >= 2, got {}", l / my))?;
            let bound = (l * l * p.r_x * p.r_x / (2592.0 * n * n * my)).min(my * p.r_y * p.r_y / 36.0);
            need(eps <= bound, || format!("need eps <= min(L^2 Rx^2 / (2592 n^2 mu_y), mu_y Ry^2 / 36) = {bound}"))?;
            let m = floor_usize(p.r_x / (6.0 * n) * ((l * l - 2.0 * my * my) / (my * eps)).sqrt()) - 2;
            plan(m, m / 2)
        }
        Case::Cc | Case::CcAvg => {
            let bound = l * p.r_x * p.r_y / (36.0 * 2f64.sqrt() * n);
            need(eps <= bound, || format!("need eps <= L Rx Ry / (36 sqrt 2 n) = {bound}"))?;
            let m = floor_usize(l * p.r_x * p.r_y / (9.0 * 2f64.sqrt() * n * eps)) - 1;
            plan(m, (m - 1) / 2)
        }
        Case::Sc | Case::ScAvg => {
            let mu = p.mu_x;
            need(mu > 0.0 && l / mu >= 2.0, || format!("need L/mu >= 2, got {}", l / mu))?;
            let alpha = (2.0 * (l / mu - 1.0) / n + 1.0).sqrt();
            let qr = (alpha - 1.0) / (alpha + 1.0);
            let r2 = p.r_x * p.r_x;
            let bound = mu * r2 / 18.0 * qr * qr;
            need(eps <= bound, || format!("need eps <= mu R^2 q^2 / 18 = {bound}"))?;
            let m = floor_usize(alpha / 4.0 * (mu * r2 / (9.0 * eps)).ln()) + 1;
            let gap0 = mu * r2 * alpha / (alpha + 1.0);
            let depth = floor_usize((9.0 * eps / gap0).ln() / (2.0 * qr.ln()));
            plan(m, depth)
        }
        Case::C | Case::CAvg => {
            let bound = p.r_x * p.r_x * l / (384.0 * n);
            need(eps <= bound, || format!("need eps <= R^2 L / (384 n) = {bound}"))?;
            let m = floor_usize((p.r_x * p.r_x * l / (24.0 * n * eps)).sqrt()) - 1;
            plan(m, (m - 1) / 2)
        }
        Case::Ncsc | Case::NcscAvg | Case::Nc | Case::NcAvg => {
            let inst = match q.case {
                Case::Ncsc => crate::minimax::make_ncsc(l, p.mu_x.abs(), p.mu_y, p.delta, eps, p.n)?,
                Case::NcscAvg => crate::minimax::make_ncsc_avg(l, p.mu_x.abs(), p.mu_y, p.delta, eps, p.n)?,
                Case::Nc => crate::minimization::make_nc(l, p.mu_x.abs(), p.delta, eps, p.n)?,
                _ => crate::minimization::make_nc_avg(l, p.mu_x.abs(), p.delta, eps, p.n)?,
            };
            let m = inst.dim_x - 1;
            Ok(ChainPlan { m, depth: m - 1, budget: n * m as f64 / 4.0 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(case: Case, n: usize, l: f64, mu_x: f64, mu_y: f64, eps: f64) -> LowerBoundQuery {
        LowerBoundQuery { case, params: Params { n, l, mu_x, mu_y, r_x: 1.0, r_y: 1.0, delta: 1.0 }, eps }
    }

    #[test]
    fn scsc_curve_value() {
        let v = lower_bound_curve(&query(Case::Scsc, 4, 16.0, 1.0, 1.0, 1e-3)).unwrap();
        assert!((v - 20.0 * 1000f64.ln()).abs() < 1e-9);
        assert!((v - 138.155).abs() < 1e-3);
    }

    #[test]
    fn budget_from_depth() {
        let plan = ChainPlan { m: 9, depth: 7, budget: 4.0 * 8.0 / 4.0 };
        assert_eq!(plan.budget_queries(), 8);
    }

    #[test]
    fn scsc_chain_length_formula() {
        // alpha = 4 and max(mu_x Rx², mu_y Ry²) / (9 eps) = e⁴ give m = 5.
        let alpha: f64 = 4.0;
        let m = (alpha / 4.0 * 4f64.exp().ln()).floor() as i64 + 1;
        assert_eq!(m, 5);
    }

    #[test]
    fn cc_avg_scales_with_root_n() {
        let a = query(Case::CcAvg, 4, 1.0, 0.0, 0.0, 1e-6);
        let b = query(Case::CcAvg, 16, 1.0, 0.0, 0.0, 1e-6);
        let term = |q: &LowerBoundQuery| (q.params.n as f64).sqrt() * q.params.l / q.eps;
        assert_eq!(term(&b) / term(&a), 2.0);
        assert!(lower_bound_curve(&b).unwrap() > lower_bound_curve(&a).unwrap());
    }

    #[test]
    fn preconditions_are_reported() {
        let err = select_m_n(&query(Case::Scsc, 4, 16.0, 1.0, 1.0, 1.0)).unwrap_err();
        assert!(err.to_string().contains("1600"));
        assert!(lower_bound_curve(&query(Case::Scsc, 4, 16.0, 0.0, 1.0, 1e-3)).is_err());
    }

    #[test]
    fn sc_plan_is_consistent() {
        let plan = select_m_n(&query(Case::Sc, 8, 32.0, 1.0, 0.0, 1e-3)).unwrap();
        assert_eq!((plan.m, plan.depth), (4, 3));
        assert_eq!(plan.budget_queries(), 8);
    }
}
