//! Instance construction from lower-bound parameters, and a small catalog with
//! one instance per kind for the property suites.

use crate::bounds::{construction_smoothness, select_m_n, Case, ChainPlan, LowerBoundQuery};
use crate::error::{invalid, Result};
use crate::instance::Instance;
use crate::minimax::{self, Composite, Lift, OneDim};
use crate::minimization;

/// Builds the hard instance of `q` with its planned chain length.
pub fn build_instance(q: &LowerBoundQuery) -> Result<(Instance, ChainPlan)> {
    let plan = select_m_n(q)?;
    let p = q.params;
    let (n, m) = (p.n, plan.m);
    let inst = match q.case {
        Case::Scsc => minimax::make_scsc(p.l, p.mu_x, p.mu_y, p.r_x, p.r_y, n, m)?,
        Case::Csc => minimax::make_csc(p.l, p.mu_y, p.r_x, p.r_y, n, m)?,
        Case::Cc => minimax::make_cc(p.l, p.r_x, p.r_y, n, m)?,
        Case::Ncsc => minimax::make_ncsc(p.l, p.mu_x.abs(), p.mu_y, p.delta, q.eps, n)?,
        Case::NcscAvg => minimax::make_ncsc_avg(p.l, p.mu_x.abs(), p.mu_y, p.delta, q.eps, n)?,
        Case::ScscAvg => minimax::lift_to_average_smooth(Lift::Scsc {
            l_prime: p.l,
            mu_x: p.mu_x,
            mu_y: p.mu_y,
            rx: p.r_x,
            ry: p.r_y,
            n,
            m,
        })?,
        Case::CscAvg => {
            minimax::lift_to_average_smooth(Lift::Csc { l_prime: p.l, mu_y: p.mu_y, rx: p.r_x, ry: p.r_y, n, m })?
        }
        Case::CcAvg => minimax::lift_to_average_smooth(Lift::Cc { l_prime: p.l, rx: p.r_x, ry: p.r_y, n, m })?,
        Case::Sc => minimization::make_sc(p.l, p.mu_x, p.r_x, n, m)?,
        Case::C => minimization::make_c(p.l, p.r_x, n, m)?,
        Case::Nc => minimization::make_nc(p.l, p.mu_x.abs(), p.delta, q.eps, n)?,
        Case::NcAvg => minimization::make_nc_avg(p.l, p.mu_x.abs(), p.delta, q.eps, n)?,
        Case::ScAvg => minimax::lift_to_average_smooth(Lift::Sc { l_prime: p.l, mu: p.mu_x, r: p.r_x, n, m })?,
        Case::CAvg => minimax::lift_to_average_smooth(Lift::C { l_prime: p.l, r: p.r_x, n, m })?,
    };
    debug_assert!(construction_smoothness(q).is_ok());
    Ok((inst, plan))
}

/// Instance at the largest tolerance on a geometric grid that `make`
/// accepts. The nonconvex recipes fix the chain length from the tolerance,
/// so this is also the shortest chain they can produce.
fn with_short_chain(make: impl Fn(f64) -> Result<Instance>) -> Result<Instance> {
    let mut eps = 1.0;
    let mut last_err = None;
    for _ in 0..4000 {
        match make(eps) {
            Ok(inst) => return Ok(inst),
            Err(e) => last_err = Some(e),
        }
        eps *= 0.99;
    }
    Err(last_err.unwrap_or_else(|| invalid("no admissible tolerance")))
}

/// One labelled instance per kind (two for the base chain, which has a
/// convex and a nonconvex mode). Chains have `m` links except for the
/// nonconvex recipes, which use their shortest admissible chain (at most 10
/// links).
pub fn small_catalog(n: usize, m: usize) -> Result<Vec<(String, Instance)>> {
    let m = m.max(3);
    let sc = minimization::make_sc(16.0, 1.0, 1.0, n, m)?;
    // The nonconvex chains have at least 2 / sqrt(alpha) links and alpha
    // shrinks with n, so small n would force long chains.
    let n_nc = n.max(8);
    let mut out = vec![
        ("TILDE_R".to_string(), minimax::make_tilde_r(m, 1.0, (0.5, 0.5), n)?),
        ("HAT_R".to_string(), minimax::make_hat_r(m, 1.0, (1.0, 0.5, 0.7), n)?),
        ("SCSC".to_string(), minimax::make_scsc(4.0 * n as f64, 1.0, 1.0, 1.0, 1.0, n, m)?),
        ("CSC".to_string(), minimax::make_csc(4.0, 1.0, 1.0, 1.0, n, m)?),
        ("CC".to_string(), minimax::make_cc(2.0, 1.0, 1.0, n, m)?),
        ("NCSC".to_string(), with_short_chain(|e| minimax::make_ncsc(8.0, 1.0, 2.0, 1.0, e, n_nc))?),
        ("NCSC_AVG".to_string(), with_short_chain(|e| minimax::make_ncsc_avg(8.0, 1.0, 2.0, 1.0, e, n_nc))?),
        ("AUX_G_SCSC".to_string(), minimax::make_composed(Composite::GScsc, 1.0, Some(1.0), sc.clone())?),
        (
            "AUX_G_CSC".to_string(),
            minimax::make_composed(Composite::GCsc, 1.0, Some(1.0), minimization::make_c(2.0, 1.0, n, m)?)?,
        ),
        ("AUX_H_CSC".to_string(), minimax::make_composed(Composite::HCsc, 2.0, Some(1.0), sc.clone())?),
        ("AUX_H_SCSC_1D".to_string(), minimax::make_1d(OneDim::HScsc, 2.0, n, 1.0, Some(1.0))?),
        ("AUX_H_CC_1D".to_string(), minimax::make_1d(OneDim::HCc, 2.0, n, 1.0, Some(1.0))?),
        ("R_BASE".to_string(), minimization::make_r(m, 0.0, 1.0, (0.5, 0.0, 1.0), n)?),
        ("R_BASE_NONCONVEX".to_string(), minimization::make_r(m, 1.0, 0.0, (0.0, 0.5, 1.0), n)?),
        ("SC".to_string(), sc),
        ("C".to_string(), minimization::make_c(2.0, 1.0, n, m)?),
        ("NC".to_string(), with_short_chain(|e| minimization::make_nc(8.0, 1.0, 1.0, e, n_nc))?),
        ("NC_AVG".to_string(), with_short_chain(|e| minimization::make_nc_avg(8.0, 1.0, 1.0, e, n_nc))?),
        ("AUX_G_SC_1D".to_string(), minimization::make_gsc_1d(2.0, 1.0, n)?),
    ];
    if n >= 4 {
        let lift = Lift::Scsc { l_prime: 4.0 * n as f64, mu_x: 1.0, mu_y: 1.0, rx: 1.0, ry: 1.0, n, m };
        out.push(("SCSC_LIFTED".to_string(), minimax::lift_to_average_smooth(lift)?));
        let lift = Lift::Sc { l_prime: 16.0, mu: 1.0, r: 1.0, n, m };
        out.push(("SC_LIFTED".to_string(), minimax::lift_to_average_smooth(lift)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Params;
    use crate::instance::Kind;

    #[test]
    fn catalog_covers_every_kind() {
        let cat = small_catalog(4, 6).unwrap();
        for kind in Kind::ALL {
            assert!(cat.iter().any(|(_, i)| i.kind == kind), "{kind} missing");
        }
        for (label, inst) in &cat {
            let cap = if label.starts_with("NC") { 11 } else { 6 };
            assert!(inst.dim_x <= cap, "{label} has dimension {}", inst.dim_x);
        }
    }

    #[test]
    fn sc_recipe_builds_the_planned_chain() {
        let q = LowerBoundQuery {
            case: Case::Sc,
            params: Params { n: 8, l: 32.0, mu_x: 1.0, mu_y: 0.0, r_x: 1.0, r_y: 1.0, delta: 1.0 },
            eps: 1e-3,
        };
        let (inst, plan) = build_instance(&q).unwrap();
        assert_eq!(inst.dim_x, plan.m);
        assert_eq!(inst.kind, Kind::Sc);
    }
}
