//! Invariant suites behind `mlb verify`. Each suite returns named checks;
//! the scope filter selects suites by substring.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::catalog::{build_instance, small_catalog};
use crate::algorithms::{protocol_audit, run, Algorithm, AlgorithmSpec, StopRule};
use crate::bounds::{select_m_n, Case, LowerBoundQuery, Params};
use crate::brute::{prox_by_extragradient, restricted_gap_brute};
use crate::error::Result;
use crate::geo::{averaging_gap, f2j_closed_form, geo_tail_exact, sample_sum, trial_rng};
use crate::instance::{Base, Instance, Side};
use crate::linalg::{dist, norm};
use crate::minimax::{lifted_smoothness, make_cc, make_csc, make_hat_r, make_scsc, make_tilde_r, Lift};
use crate::minimization::{make_c, make_r, make_sc};
use crate::prox::prox;
use crate::reference::{minimizer_closed_form, printed_optimal_value, restricted_gap, saddle_point_scsc, saddle_residual};
use crate::zero_chain::{check_jump, random_point_at_depth, stopping_tail, ChainCase};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: &str, name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { suite: suite.to_string(), name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const SUITES: [&str; 10] = [
    "zero_chain.jump",
    "zero_chain.geo",
    "reference.saddle",
    "reference.gap",
    "instances.regularity",
    "oracle.prox",
    "instances.gradient",
    "algorithms.reflection",
    "algorithms.shape",
    "algorithms.audit",
];

/// Runs every suite whose name contains `scope` (all suites when `None`).
pub fn verify(scope: Option<&str>, seed: u64) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .filter(|s| scope.is_none_or(|f| s.contains(f)))
        .map(|s| run_suite(s, seed))
        .collect()
}

pub fn run_suite(name: &str, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let checks = match name {
        "zero_chain.jump" => zero_chain_jump(seed),
        "zero_chain.geo" => zero_chain_geo(seed),
        "reference.saddle" => reference_saddle(),
        "reference.gap" => reference_gap(),
        "instances.regularity" => regularity(seed),
        "oracle.prox" => prox_equivalence(seed),
        "instances.gradient" => gradient(seed),
        "algorithms.reflection" => reflection(seed),
        "algorithms.shape" => shape(seed),
        "algorithms.audit" => audit(seed),
        other => Err(crate::error::Error::InvalidParameter(format!("unknown suite {other:?}"))),
    };
    let checks = checks.unwrap_or_else(|e| vec![Check::new(name, "setup", false, e.to_string())]);
    SuiteReport { suite: name.to_string(), seconds: start.elapsed().as_secs_f64(), checks }
}

/// Characteristic coordinate scale of an instance.
fn point_scale(inst: &Instance) -> f64 {
    match &inst.base {
        Base::Split { x, y } => [x, y]
            .iter()
            .map(|s| match s {
                Side::Chain(inner) => inner.scale.beta,
                Side::Ridge { .. } => 0.0,
            })
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE),
        _ => inst.scale.beta,
    }
}

fn random_point(inst: &Instance, rng: &mut ChaCha8Rng, spread: f64) -> (Vec<f64>, Vec<f64>) {
    let s = point_scale(inst) * spread;
    let x = (0..inst.dim_x).map(|_| s * rng.random_range(-1.0..1.0)).collect();
    let y = (0..inst.dim_y).map(|_| s * rng.random_range(-1.0..1.0)).collect();
    (x, y)
}

/// Bound on any single component's smoothness.
fn component_smoothness(inst: &Instance) -> f64 {
    inst.regularity.l.max(inst.regularity.l_avg * (inst.n as f64).sqrt())
}

fn uses_potential(inst: &Instance) -> bool {
    match &inst.base {
        Base::Hat { .. } => true,
        Base::Chain { c2, .. } => *c2 > 0.0,
        Base::Split { x, y } => [x, y].iter().any(|s| matches!(s, Side::Chain(i) if uses_potential(i))),
        _ => false,
    }
}

fn random_gamma(inst: &Instance, rng: &mut ChaCha8Rng) -> f64 {
    let mut cap = 2.0 / component_smoothness(inst);
    if let Some(limit) = inst.prox_limit {
        cap = cap.min(0.9 * limit);
    }
    cap * rng.random_range(0.05..1.0)
}

fn zero_chain_jump(seed: u64) -> Result<Vec<Check>> {
    const SUITE: &str = "zero_chain.jump";
    let mut checks = Vec::new();
    let m = 20;
    for n in [2usize, 3, 5] {
        let family = [
            ("TILDE_R", make_tilde_r(m, 1.0, (0.5, 0.5), n)?),
            ("HAT_R", make_hat_r(m, 1.0, (1.0, 0.5, 0.7), n)?),
            ("R_BASE", make_r(m, 0.0, 1.0, (0.5, 0.0, 1.0), n)?),
            ("R_BASE_NONCONVEX", make_r(m, 1.0, 0.0, (0.0, 0.5, 1.0), n)?),
        ];
        for (label, inst) in family {
            let mut rng = trial_rng(seed, n as u64);
            let case = ChainCase::of(&inst)?;
            let limit = if case == ChainCase::Hat { m - 1 } else { m };
            let mut worst = 0.0f64;
            let mut failures = 0;
            for _ in 0..1000 {
                let k = rng.random_range(0..limit);
                let (x, y) = random_point_at_depth(&inst, k, &mut rng)?;
                let i = rng.random_range(0..n);
                let gamma = random_gamma(&inst, &mut rng);
                let r = check_jump(&inst, &x, &y, i, Some(gamma))?;
                worst = worst.max(r.off_subspace);
                if !r.pass {
                    failures += 1;
                }
            }
            checks.push(Check::new(
                SUITE,
                format!("{label} n={n} outputs stay in predicted subspaces"),
                failures == 0,
                format!("1000 points, {failures} failures, worst off-subspace {worst:e}"),
            ));
            let (ok, detail) = activation_walk(&inst, 400, &mut rng)?;
            checks.push(Check::new(SUITE, format!("{label} n={n} depth equals activating draws"), ok, detail));
        }
    }
    Ok(checks)
}

/// Prox-only walk from the origin: the depth must track the number of
/// activating draws exactly.
fn activation_walk(inst: &Instance, steps: usize, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let case = ChainCase::of(inst)?;
    let m = inst.chain_len().unwrap();
    let limit = if case == ChainCase::Hat { m - 1 } else { m };
    let (mut x, mut y) = (vec![0.0; inst.dim_x], vec![0.0; inst.dim_y]);
    let mut activations = 0;
    for t in 0..steps {
        if activations >= limit {
            break;
        }
        let i = rng.random_range(0..inst.n);
        if inst.sampling.order[i] == activations % inst.n {
            activations += 1;
        }
        let gamma = random_gamma(inst, rng);
        let (u, v) = prox(inst, i, &x, &y, gamma)?;
        x = u;
        y = v;
        let depth = case.depth_of(&x, &y);
        if depth != activations {
            return Ok((false, format!("step {t}: depth {depth} after {activations} activations")));
        }
    }
    Ok((true, format!("reached depth {activations}")))
}

fn zero_chain_geo(seed: u64) -> Result<Vec<Check>> {
    const SUITE: &str = "zero_chain.geo";
    let mut checks = Vec::new();
    let grid: Vec<f64> = (1..=20).map(|k| k as f64 * 0.05).collect();
    let mut worst = 0.0f64;
    for &p1 in &grid {
        for &p2 in &grid {
            for j in 1..=40 {
                worst = worst.max((f2j_closed_form(p1, p2, j) - geo_tail_exact(&[p1, p2], j)).abs());
            }
        }
    }
    checks.push(Check::new(SUITE, "two-variable closed form equals the DP", worst <= 1e-12, format!("max difference {worst:e}")));

    let mut lowest = f64::INFINITY;
    for m in [2usize, 4, 8] {
        for p in [1.0 / m as f64, 0.05, 0.1, 0.3, 0.5, 0.9, 1.0] {
            let threshold = ((m * m) as f64 / (4.0 * p * m as f64)).floor() as u64;
            lowest = lowest.min(geo_tail_exact(&vec![p; m], threshold));
        }
    }
    checks.push(Check::new(SUITE, "equal-p tails at m²/(4Σp) are at least 1/9", lowest >= 1.0 / 9.0, format!("smallest tail {lowest}")));

    let mut rng = trial_rng(seed, 1);
    let mut min_gap = f64::INFINITY;
    for _ in 0..1000 {
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(0.01..1.0)).collect();
        let j = rng.random_range(1..=8);
        min_gap = min_gap.min(averaging_gap(&p, j));
    }
    checks.push(Check::new(SUITE, "averaging the probabilities lowers the tail", min_gap >= -1e-12, format!("smallest difference {min_gap:e}")));

    let mut within = true;
    let mut detail = String::new();
    for (p, j) in [(vec![0.2, 0.5, 0.35], 9u64), (vec![0.125; 8], 16), (vec![0.3, 0.6, 0.1, 0.8], 12)] {
        let exact = geo_tail_exact(&p, j);
        let trials = 100_000u64;
        let hits = (0..trials).filter(|&t| sample_sum(&p, &mut trial_rng(seed ^ 0x9e37, t)) > j).count();
        let est = hits as f64 / trials as f64;
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        within &= (est - exact).abs() <= 3.0 * se;
        detail.push_str(&format!("m={} exact {exact:.5} mc {est:.5}; ", p.len()));
    }
    checks.push(Check::new(SUITE, "Monte Carlo agrees with the exact tail", within, detail));

    let tail = stopping_tail(&crate::instance::Sampling::uniform(8), 7, 100_000, seed);
    checks.push(Check::new(
        SUITE,
        "P(T_8 > 16) >= 1/9 with 99% confidence, n = 8",
        tail.pass,
        format!("estimate {:.5}, lower bound {:.5}", tail.estimate, tail.lower_99),
    ));
    Ok(checks)
}

fn reference_saddle() -> Result<Vec<Check>> {
    const SUITE: &str = "reference.saddle";
    let mut checks = Vec::new();
    for (l, mx, my, rx, ry, n, m) in [
        (16.0, 1.0, 1.0, 1.0, 1.0, 4, 8),
        (40.0, 2.0, 1.0, 2.0, 0.5, 3, 10),
        (100.0, 1.0, 0.5, 1.0, 1.0, 5, 12),
    ] {
        let inst = make_scsc(l, mx, my, rx, ry, n, m)?;
        let sp = saddle_point_scsc(&inst)?;
        let y = sp.y_star.clone().unwrap_or_default();
        let res = saddle_residual(&inst, &sp.x_star, &y);
        let scale = l * (rx + ry);
        let ok = res <= 1e-8 * scale && norm(&sp.x_star) <= rx && norm(&y) <= ry;
        checks.push(Check::new(
            SUITE,
            format!("SCSC L={l} n={n} m={m} saddle point"),
            ok,
            format!("residual {res:e}, |x| {:.4}, |y| {:.4}", norm(&sp.x_star), norm(&y)),
        ));
    }
    let minimizers = [
        ("SC", make_sc(32.0, 1.0, 1.0, 8, 6)?),
        ("SC", make_sc(10.0, 2.0, 3.0, 3, 9)?),
        ("C", make_c(2.0, 1.0, 4, 7)?),
        ("C", make_c(5.0, 2.0, 3, 12)?),
    ];
    for (label, inst) in minimizers {
        let mp = minimizer_closed_form(&inst)?;
        let res = saddle_residual(&inst, &mp.x_star, &[]);
        let printed = printed_optimal_value(&inst)?;
        let value = inst.value(&mp.x_star, &[]);
        let rel = ((value - printed) / printed).abs();
        let r = inst.feasible.rx();
        let scale = inst.regularity.l * r;
        let ok = res <= 1e-8 * scale && norm(&mp.x_star) <= r * (1.0 + 1e-12) && rel <= 1e-10;
        checks.push(Check::new(
            SUITE,
            format!("{label} n={} m={} minimizer and optimal value", inst.n, inst.dim_x),
            ok,
            format!("residual {res:e}, value {value:.12e} vs printed {printed:.12e} (rel {rel:e})"),
        ));
    }
    Ok(checks)
}

fn reference_gap() -> Result<Vec<Check>> {
    const SUITE: &str = "reference.gap";
    let mut checks = Vec::new();
    let iters = 20_000;
    for m in 3..=6 {
        let inst = make_c(2.0, 1.0, 3, m)?;
        let mut worst = 0.0f64;
        for k in 1..m {
            let b = restricted_gap_brute(&inst, k, iters)?;
            let exact = restricted_gap(&inst, k)?;
            let err = ((b.lower - exact).abs()).max((b.upper - exact).abs()) / exact;
            worst = worst.max(err);
        }
        checks.push(Check::new(SUITE, format!("C m={m} brute force matches the exact gap"), worst <= 1e-6, format!("worst relative deviation {worst:e}")));
    }
    type Family = Box<dyn Fn(usize) -> Result<Instance>>;
    let families: Vec<(&str, Family)> = vec![
        ("SC", Box::new(|m| make_sc(16.0, 1.0, 1.0, 3, m))),
        ("SCSC", Box::new(|m| make_scsc(16.0, 1.0, 1.0, 1.0, 1.0, 4, m))),
        ("CSC", Box::new(|m| make_csc(4.0, 1.0, 1.0, 1.0, 3, m))),
        ("CC", Box::new(|m| make_cc(2.0, 1.0, 1.0, 3, m))),
    ];
    for (label, make) in families {
        for m in 3..=6 {
            let inst = make(m)?;
            let scale = restricted_gap_brute(&inst, 1, iters)?.upper.abs();
            let mut worst = f64::INFINITY;
            for k in 1..m {
                let b = restricted_gap_brute(&inst, k, iters)?;
                let printed = restricted_gap(&inst, k)?;
                worst = worst.min((b.lower - printed) / scale);
            }
            checks.push(Check::new(
                SUITE,
                format!("{label} m={m} restricted gap dominates the printed bound"),
                worst >= -1e-6,
                format!("min (certified gap - bound) / scale = {worst:e}"),
            ));
        }
    }
    Ok(checks)
}

/// Sampled Lipschitz ratios of the component gradients, as multiples of the
/// declared `L` and `L'`.
pub fn sampled_smoothness(inst: &Instance, pairs: usize, rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let n = inst.n;
    let (mut worst, mut worst_avg) = (0.0f64, 0.0f64);
    for t in 0..pairs {
        let (x, y) = random_point(inst, rng, 2.0);
        let spread = if t % 2 == 0 { 1.0 } else { 1e-3 };
        let (dx, dy) = random_point(inst, rng, spread);
        let x2: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let y2: Vec<f64> = y.iter().zip(&dy).map(|(a, b)| a + b).collect();
        let dz = (norm(&dx).powi(2) + norm(&dy).powi(2)).sqrt();
        let mut mean_sq = 0.0;
        for i in 0..n {
            let a = inst.component(i, &x, &y)?;
            let b = inst.component(i, &x2, &y2)?;
            let d2 = dist(&a.grad_x, &b.grad_x).powi(2) + dist(&a.grad_y, &b.grad_y).powi(2);
            worst = worst.max(d2.sqrt() / dz / inst.regularity.l);
            mean_sq += d2 / n as f64;
        }
        worst_avg = worst_avg.max(mean_sq.sqrt() / dz / inst.regularity.l_avg);
    }
    Ok((worst, worst_avg))
}

fn regularity(seed: u64) -> Result<Vec<Check>> {
    const SUITE: &str = "instances.regularity";
    let mut checks = Vec::new();
    for n in [4usize, 5] {
        for (label, inst) in small_catalog(n, 6)? {
            let mut rng = trial_rng(seed, n as u64);
            let (r, ra) = sampled_smoothness(&inst, 200, &mut rng)?;
            let tol = 1.0 + 1e-9;
            checks.push(Check::new(SUITE, format!("{label} n={n} component Lipschitz <= L"), r <= tol, format!("max ratio {r:.6}")));
            checks.push(Check::new(SUITE, format!("{label} n={n} mean-square Lipschitz <= L'"), ra <= tol, format!("max ratio {ra:.6}")));
        }
    }
    for n in [4usize, 8, 16, 64] {
        let lifts = [
            Lift::Scsc { l_prime: 8.0, mu_x: 1.0, mu_y: 1.0, rx: 1.0, ry: 1.0, n, m: 4 },
            Lift::Csc { l_prime: 8.0, mu_y: 1.0, rx: 1.0, ry: 1.0, n, m: 4 },
            Lift::Cc { l_prime: 8.0, rx: 1.0, ry: 1.0, n, m: 4 },
            Lift::Sc { l_prime: 8.0, mu: 1.0, r: 1.0, n, m: 4 },
            Lift::C { l_prime: 8.0, r: 1.0, n, m: 4 },
        ];
        let sn = (n as f64).sqrt();
        let ok = lifts.iter().all(|lift| {
            let l = lifted_smoothness(lift).unwrap();
            sn / 2.0 * 8.0 <= l && l <= (n as f64 / 2.0).sqrt() * 8.0
        });
        checks.push(Check::new(SUITE, format!("lift n={n} keeps sqrt(n)/2 L' <= L <= sqrt(n/2) L'"), ok, ""));
    }
    Ok(checks)
}

/// Largest deviation of the closed-form prox from the brute-force solve,
/// relative to `1 + |output|`.
pub fn prox_deviation(inst: &Instance, queries: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..queries {
        let (x, y) = random_point(inst, rng, 1.0);
        let i = rng.random_range(0..inst.n);
        let gamma = random_gamma(inst, rng);
        let (u, v) = prox(inst, i, &x, &y, gamma)?;
        let (ub, vb) = prox_by_extragradient(inst, i, &x, &y, gamma, 200_000)?;
        let size = 1.0 + (norm(&ub).powi(2) + norm(&vb).powi(2)).sqrt();
        worst = worst.max((dist(&u, &ub) + dist(&v, &vb)) / size);
    }
    Ok(worst)
}

fn prox_equivalence(seed: u64) -> Result<Vec<Check>> {
    const SUITE: &str = "oracle.prox";
    let mut checks = Vec::new();
    for (label, inst) in small_catalog(4, 8)? {
        let mut rng = trial_rng(seed, 11);
        let worst = prox_deviation(&inst, 100, &mut rng)?;
        let tol = if uses_potential(&inst) { 1e-6 } else { 1e-8 };
        checks.push(Check::new(SUITE, format!("{label} prox matches brute force"), worst <= tol, format!("100 queries, worst {worst:e}, tolerance {tol:e}")));
    }
    Ok(checks)
}

/// Largest relative error of component gradients against central
/// differences.
pub fn gradient_deviation(inst: &Instance, points: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    let h = 1e-5 * point_scale(inst);
    for _ in 0..points {
        let (x, y) = random_point(inst, rng, 1.5);
        let i = rng.random_range(0..inst.n);
        let e = inst.component(i, &x, &y)?;
        let mut fd = Vec::with_capacity(x.len() + y.len());
        for j in 0..x.len() {
            let (mut a, mut b) = (x.clone(), x.clone());
            a[j] += h;
            b[j] -= h;
            fd.push((inst.component(i, &a, &y)?.value - inst.component(i, &b, &y)?.value) / (2.0 * h));
        }
        for j in 0..y.len() {
            let (mut a, mut b) = (y.clone(), y.clone());
            a[j] += h;
            b[j] -= h;
            fd.push((inst.component(i, &x, &a)?.value - inst.component(i, &x, &b)?.value) / (2.0 * h));
        }
        let g: Vec<f64> = e.grad_x.iter().chain(&e.grad_y).copied().collect();
        let gmax = g.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
        let err = g.iter().zip(&fd).fold(0.0f64, |a, (g, f)| a.max((g - f).abs()));
        worst = worst.max(err / gmax);
    }
    Ok(worst)
}

fn gradient(seed: u64) -> Result<Vec<Check>> {
    const SUITE: &str = "instances.gradient";
    let mut checks = Vec::new();
    for (label, inst) in small_catalog(4, 8)? {
        let mut rng = trial_rng(seed, 13);
        let worst = gradient_deviation(&inst, 100, &mut rng)?;
        checks.push(Check::new(SUITE, format!("{label} gradient matches finite differences"), worst <= 1e-5, format!("100 points, worst relative error {worst:e}")));
    }
    Ok(checks)
}

/// Instance-level invariants, for checking a single (possibly modified)
/// instance: gradients, sampled smoothness, prox, and chain jumps.
pub fn verify_instance(inst: &Instance, seed: u64) -> Vec<Check> {
    const SUITE: &str = "instance";
    let mut rng = trial_rng(seed, 17);
    let mut checks = Vec::new();
    let mut push = |name: &str, r: Result<(bool, String)>| {
        let (pass, detail) = r.unwrap_or_else(|e| (false, e.to_string()));
        checks.push(Check::new(SUITE, name, pass, detail));
    };
    push("gradient", gradient_deviation(inst, 50, &mut rng).map(|w| (w <= 1e-5, format!("worst {w:e}"))));
    push(
        "lipschitz",
        sampled_smoothness(inst, 100, &mut rng).map(|(r, ra)| (r <= 1.0 + 1e-9 && ra <= 1.0 + 1e-9, format!("ratios {r:.6}, {ra:.6}"))),
    );
    let tol = if uses_potential(inst) { 1e-6 } else { 1e-8 };
    push("prox", prox_deviation(inst, 30, &mut rng).map(|w| (w <= tol, format!("worst {w:e}"))));
    if let Ok(case) = ChainCase::of(inst) {
        let m = inst.chain_len().unwrap();
        let limit = if case == ChainCase::Hat { m - 1 } else { m };
        let jumps = (0..200).try_fold(true, |ok, _| -> Result<bool> {
            let k = rng.random_range(0..limit);
            let (x, y) = random_point_at_depth(inst, k, &mut rng)?;
            let i = rng.random_range(0..inst.n);
            let gamma = random_gamma(inst, &mut rng);
            Ok(ok && check_jump(inst, &x, &y, i, Some(gamma))?.pass)
        });
        push("zero_chain", jumps.map(|ok| (ok, String::new())));
    }
    checks
}

fn reflection(seed: u64) -> Result<Vec<Check>> {
    const SUITE: &str = "algorithms.reflection";
    let mut checks = Vec::new();
    let sc = LowerBoundQuery {
        case: Case::Sc,
        params: Params { n: 8, l: 32.0, mu_x: 1.0, mu_y: 0.0, r_x: 1.0, r_y: 1.0, delta: 1.0 },
        eps: 1e-3,
    };
    let scsc_params = Params { n: 4, l: 16.0, mu_x: 1.0, mu_y: 1.0, r_x: 1.0, r_y: 1.0, delta: 1.0 };
    // Largest tolerance on a geometric grid that meets the preconditions.
    let scsc = (0..400)
        .map(|j| LowerBoundQuery { case: Case::Scsc, params: scsc_params, eps: 1e-4 * 0.95f64.powi(j) })
        .find(|q| select_m_n(q).is_ok())
        .ok_or_else(|| crate::error::Error::Precondition("no admissible SCSC tolerance".into()))?;
    for q in [sc, scsc] {
        let (inst, plan) = build_instance(&q)?;
        let budget = plan.budget_queries();
        for algorithm in Algorithm::ALL {
            let spec = AlgorithmSpec::new(algorithm);
            let stop = StopRule { max_queries: budget, eps: None, halt_at_eps: false, budget: Some(budget), record: false };
            let gaps = (0..500u64)
                .map(|s| run(&inst, &spec, &stop, &mut trial_rng(seed, s)).map(|t| t.score_at_budget.unwrap()))
                .collect::<Result<Vec<f64>>>()?;
            let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
            let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (gaps.len() - 1) as f64;
            let se = (var / gaps.len() as f64).sqrt();
            checks.push(Check::new(
                SUITE,
                format!("{} {algorithm} mean gap at N >= eps", q.case),
                mean >= q.eps - 3.0 * se,
                format!("m={} M={} N={} eps={:e}: mean {mean:e} (se {se:e})", plan.m, plan.depth, budget, q.eps),
            ));
        }
    }
    Ok(checks)
}

fn shape(seed: u64) -> Result<Vec<Check>> {
    const SUITE: &str = "algorithms.shape";
    let eps = 1e-4;
    let n = 8;
    let mut logs = Vec::new();
    let mut detail = String::new();
    for kappa in [8.0, 32.0, 128.0] {
        let q = LowerBoundQuery {
            case: Case::Sc,
            params: Params { n, l: kappa, mu_x: 1.0, mu_y: 0.0, r_x: 1.0, r_y: 1.0, delta: 1.0 },
            eps,
        };
        let (inst, _) = build_instance(&q)?;
        let stop = StopRule { max_queries: 10_000_000, eps: Some(eps), halt_at_eps: true, budget: None, record: false };
        let spec = AlgorithmSpec::new(Algorithm::Svrg);
        let mut total = 0.0;
        let seeds = 20;
        for s in 0..seeds {
            let t = run(&inst, &spec, &stop, &mut trial_rng(seed, s))?;
            let hit = t.queries_to_eps.ok_or_else(|| crate::error::Error::NoConvergence(format!("kappa {kappa}: eps not reached")))?;
            total += hit as f64;
        }
        let mean = total / seeds as f64;
        let normalized = mean / (1.0 / eps).ln();
        detail.push_str(&format!("kappa {kappa}: {mean:.1} queries; "));
        logs.push((kappa.ln(), normalized.ln(), (n as f64 * kappa).sqrt().ln()));
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let c = (logs.iter().map(|p| p.1 - p.2).sum::<f64>() / k).exp();
    detail.push_str(&format!("fitted c = {c:.3}, slope {slope:.3}"));
    Ok(vec![Check::new(SUITE, "SVRG queries grow like sqrt(n kappa) or faster", slope >= 0.45, detail)])
}

fn audit(seed: u64) -> Result<Vec<Check>> {
    const SUITE: &str = "algorithms.audit";
    let mut checks = Vec::new();
    for n in [3usize, 4] {
        for (label, inst) in small_catalog(n, 8)? {
            for algorithm in Algorithm::ALL {
                let stop = StopRule { max_queries: 51 * 2 * inst.n as u64, eps: None, halt_at_eps: false, budget: None, record: true };
                let (pass, detail) = match run(&inst, &AlgorithmSpec::new(algorithm), &stop, &mut trial_rng(seed, n as u64)) {
                    Ok(t) => {
                        let r = protocol_audit(&t)?;
                        let detail = match &r.violation {
                            Some(v) => format!("violation at iterate {} ({} block, residual {:e})", v.step, v.block, v.residual),
                            None => format!("{} iterates, worst relative residual {:e}", r.iterates, r.worst_relative),
                        };
                        (r.pass() && r.iterates > 50, detail)
                    }
                    Err(e) => (false, e.to_string()),
                };
                checks.push(Check::new(SUITE, format!("{label} n={n} {algorithm}"), pass, detail));
            }
        }
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scope_filter_selects_by_substring() {
        let picked: Vec<&str> = SUITES.iter().copied().filter(|s| s.contains("zero_chain")).collect();
        assert_eq!(picked, vec!["zero_chain.jump", "zero_chain.geo"]);
    }

    #[test]
    fn perturbed_instance_fails_a_named_invariant() {
        let good = make_sc(16.0, 1.0, 1.0, 4, 5).unwrap();
        assert!(verify_instance(&good, 1).iter().all(|c| c.pass));
        let mut bad = good.clone();
        bad.regularity.l *= 0.5;
        let failed: Vec<String> = verify_instance(&bad, 1).into_iter().filter(|c| !c.pass).map(|c| c.name).collect();
        assert_eq!(failed, vec!["lipschitz".to_string()]);
    }

    #[test]
    fn unknown_suite_is_reported() {
        let r = run_suite("nope", 0);
        assert!(!r.pass());
    }
}
