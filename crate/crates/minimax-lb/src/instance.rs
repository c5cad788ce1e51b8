//! The finite-sum instance type shared by every minimax and minimization
//! family, plus component and aggregate evaluation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{gamma_deriv, gamma_value, norm_sq, project_ball, BSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Kind {
    TildeR,
    HatR,
    Scsc,
    Csc,
    Cc,
    Ncsc,
    NcscAvg,
    AuxGScsc,
    AuxGCsc,
    AuxHCsc,
    AuxHScsc1d,
    AuxHCc1d,
    RBase,
    Sc,
    C,
    Nc,
    NcAvg,
    AuxGSc1d,
}

impl Kind {
    pub const ALL: [Kind; 18] = [
        Kind::TildeR,
        Kind::HatR,
        Kind::Scsc,
        Kind::Csc,
        Kind::Cc,
        Kind::Ncsc,
        Kind::NcscAvg,
        Kind::AuxGScsc,
        Kind::AuxGCsc,
        Kind::AuxHCsc,
        Kind::AuxHScsc1d,
        Kind::AuxHCc1d,
        Kind::RBase,
        Kind::Sc,
        Kind::C,
        Kind::Nc,
        Kind::NcAvg,
        Kind::AuxGSc1d,
    ];

    pub fn is_minimization(self) -> bool {
        matches!(self, Kind::RBase | Kind::Sc | Kind::C | Kind::Nc | Kind::NcAvg | Kind::AuxGSc1d)
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::TildeR => "TILDE_R",
            Kind::HatR => "HAT_R",
            Kind::Scsc => "SCSC",
            Kind::Csc => "CSC",
            Kind::Cc => "CC",
            Kind::Ncsc => "NCSC",
            Kind::NcscAvg => "NCSC_AVG",
            Kind::AuxGScsc => "AUX_G_SCSC",
            Kind::AuxGCsc => "AUX_G_CSC",
            Kind::AuxHCsc => "AUX_H_CSC",
            Kind::AuxHScsc1d => "AUX_H_SCSC_1D",
            Kind::AuxHCc1d => "AUX_H_CC_1D",
            Kind::RBase => "R_BASE",
            Kind::Sc => "SC",
            Kind::C => "C",
            Kind::Nc => "NC",
            Kind::NcAvg => "NC_AVG",
            Kind::AuxGSc1d => "AUX_G_SC_1D",
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `f_i(x, y) = lambda * base_i(x / beta, y / beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub lambda: f64,
    pub beta: f64,
}

impl Scale {
    pub const UNIT: Scale = Scale { lambda: 1.0, beta: 1.0 };

    /// Scaled curvature factor `lambda / beta²`.
    pub fn curvature(&self) -> f64 {
        self.lambda / (self.beta * self.beta)
    }
}

/// Ball radii of the feasible sets. `None` means the whole space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Feasible {
    pub rx: Option<f64>,
    pub ry: Option<f64>,
}

impl Feasible {
    pub const FREE: Feasible = Feasible { rx: None, ry: None };

    pub fn rx(&self) -> f64 {
        self.rx.unwrap_or(f64::INFINITY)
    }

    pub fn ry(&self) -> f64 {
        self.ry.unwrap_or(f64::INFINITY)
    }
}

/// Smoothness and curvature constants. `mu_x < 0` encodes weak convexity.
/// For minimization kinds `mu_x` is the curvature of the single block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    pub l: f64,
    pub l_avg: f64,
    pub mu_x: f64,
    pub mu_y: f64,
}

/// Tolerance and initial gap an instance was built for, when its dimension
/// is derived from them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub delta: f64,
    pub eps: f64,
}

/// Sampling distribution over exposed components, ascending. Exposed
/// component `i` evaluates base component `order[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub probs: Vec<f64>,
    pub order: Vec<usize>,
}

impl Sampling {
    pub fn uniform(n: usize) -> Self {
        Sampling { probs: vec![1.0 / n as f64; n], order: (0..n).collect() }
    }

    pub fn is_uniform(&self) -> bool {
        let p0 = self.probs[0];
        self.probs.iter().all(|&p| (p - p0).abs() <= 1e-15)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape1d {
    /// `L/2 (x² - y²) - n L Rx x` on the first component.
    Quadratic,
    /// `L x y - n L Rx y` on the first component.
    Bilinear,
}

/// One block of a separable composite `X_i(x) - Y_i(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Side {
    Ridge { mu: f64 },
    Chain(Box<Instance>),
}

impl Side {
    pub fn dim(&self, ridge_dim: usize) -> usize {
        match self {
            Side::Ridge { .. } => ridge_dim,
            Side::Chain(inner) => inner.dim_x,
        }
    }
}

/// Unscaled building block of an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Base {
    /// Bilinear chain with quadratic regularizers on both blocks.
    Tilde { m: usize, zeta: f64, c1: f64, c2: f64 },
    /// Bilinear chain with the nonconvex potential on the primal block.
    Hat { m: usize, omega: f64, c1: f64, c2: f64, c3: f64 },
    /// Minimization chain `n/2 Σ (b_l·x)² + c1/2 |x|² + c2 Σ Γ(x_j) - c3 n x_1`.
    Chain { m: usize, omega: f64, zeta: f64, c1: f64, c2: f64, c3: f64 },
    /// Separable `X_i(x) - Y_i(y)`.
    Split { x: Side, y: Side },
    Saddle1d { shape: Shape1d, l: f64, rx: f64 },
    Line1d { l: f64, r: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub kind: Kind,
    pub n: usize,
    pub dim_x: usize,
    pub dim_y: usize,
    pub scale: Scale,
    pub base: Base,
    pub alpha: Option<f64>,
    pub feasible: Feasible,
    pub regularity: Regularity,
    pub sampling: Sampling,
    /// Strict upper bound on the prox weight, present for nonconvex kinds.
    pub prox_limit: Option<f64>,
    pub target: Option<Target>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentEval {
    pub index: usize,
    pub value: f64,
    pub grad_x: Vec<f64>,
    pub grad_y: Vec<f64>,
}

impl Instance {
    pub(crate) fn assemble(
        kind: Kind,
        n: usize,
        dims: (usize, usize),
        scale: Scale,
        base: Base,
        feasible: Feasible,
        regularity: Regularity,
    ) -> Self {
        Instance {
            kind,
            n,
            dim_x: dims.0,
            dim_y: dims.1,
            scale,
            base,
            alpha: None,
            feasible,
            regularity,
            sampling: Sampling::uniform(n),
            prox_limit: None,
            target: None,
        }
    }

    pub fn is_minimization(&self) -> bool {
        self.kind.is_minimization()
    }

    /// Chain length `m` of the underlying construction, when there is one.
    pub fn chain_len(&self) -> Option<usize> {
        match &self.base {
            Base::Tilde { m, .. } | Base::Hat { m, .. } | Base::Chain { m, .. } => Some(*m),
            Base::Split { x, y } => match (x, y) {
                (Side::Chain(inner), _) | (_, Side::Chain(inner)) => inner.chain_len(),
                _ => None,
            },
            _ => None,
        }
    }

    /// Reorders components so that exposed component `i` has probability
    /// `probs[i]` after an ascending sort.
    pub fn with_distribution(mut self, probs: &[f64]) -> Result<Self> {
        if probs.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: probs.len() });
        }
        if probs.iter().any(|&p| !(p > 0.0)) {
            return Err(invalid("sampling probabilities must be positive"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("sampling probabilities sum to {total}, not 1")));
        }
        let mut idx: Vec<usize> = (0..self.n).collect();
        idx.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]));
        let order = idx.iter().map(|&i| self.sampling.order[i]).collect();
        let sorted = idx.iter().map(|&i| probs[i] / total).collect();
        self.sampling = Sampling { probs: sorted, order };
        Ok(self)
    }

    pub fn check_point(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.dim_x {
            return Err(Error::Dimension { expected: self.dim_x, got: x.len() });
        }
        if y.len() != self.dim_y {
            return Err(Error::Dimension { expected: self.dim_y, got: y.len() });
        }
        Ok(())
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::OutOfRange { index: i, range: format!("0..{}", self.n) });
        }
        Ok(())
    }

    /// Value and gradients of exposed component `i` (0-based).
    pub fn component(&self, i: usize, x: &[f64], y: &[f64]) -> Result<ComponentEval> {
        self.check_index(i)?;
        self.check_point(x, y)?;
        let (value, grad_x, grad_y) = self.eval_base(self.sampling.order[i], x, y);
        Ok(ComponentEval { index: i, value, grad_x, grad_y })
    }

    /// Aggregate `(1/n) Σ f_i`.
    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n).map(|c| self.eval_base(c, x, y).0).sum::<f64>() / self.n as f64
    }

    /// Aggregate gradient blocks.
    pub fn grad(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut gx = vec![0.0; self.dim_x];
        let mut gy = vec![0.0; self.dim_y];
        let w = 1.0 / self.n as f64;
        for c in 0..self.n {
            let (_, a, b) = self.eval_base(c, x, y);
            crate::linalg::axpy(w, &a, &mut gx);
            crate::linalg::axpy(w, &b, &mut gy);
        }
        (gx, gy)
    }

    pub fn project_x(&self, x: &[f64]) -> Vec<f64> {
        project_ball(x, self.feasible.rx())
    }

    pub fn project_y(&self, y: &[f64]) -> Vec<f64> {
        project_ball(y, self.feasible.ry())
    }

    /// Evaluates base component `c`, ignoring the sampling order.
    pub(crate) fn eval_base(&self, c: usize, x: &[f64], y: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let n = self.n;
        match &self.base {
            Base::Tilde { .. } | Base::Hat { .. } | Base::Chain { .. } => {
                let Scale { lambda, beta } = self.scale;
                let xs: Vec<f64> = x.iter().map(|v| v / beta).collect();
                let ys: Vec<f64> = y.iter().map(|v| v / beta).collect();
                let mut gx = vec![0.0; x.len()];
                let mut gy = vec![0.0; y.len()];
                let v = match &self.base {
                    Base::Tilde { m, zeta, c1, c2 } => {
                        tilde_component(c, n, *m, *zeta, (*c1, *c2), &xs, &ys, &mut gx, &mut gy)
                    }
                    Base::Hat { m, omega, c1, c2, c3 } => {
                        hat_component(c, n, *m, *omega, (*c1, *c2, *c3), &xs, &ys, &mut gx, &mut gy)
                    }
                    Base::Chain { m, omega, zeta, c1, c2, c3 } => {
                        let spec = BSpec { m: *m, omega: *omega, zeta: *zeta };
                        chain_component(c, n, &spec, (*c1, *c2, *c3), &xs, &mut gx)
                    }
                    _ => unreachable!(),
                };
                let g = lambda / beta;
                gx.iter_mut().for_each(|v| *v *= g);
                gy.iter_mut().for_each(|v| *v *= g);
                (lambda * v, gx, gy)
            }
            Base::Split { x: xs, y: ys } => {
                let (vx, gx) = side_component(xs, c, x);
                let (vy, gy) = side_component(ys, c, y);
                (vx - vy, gx, gy.into_iter().map(|v| -v).collect())
            }
            Base::Saddle1d { shape, l, rx } => {
                let (u, v) = (x[0], y[0]);
                let lin = if c == 0 { n as f64 * l * rx } else { 0.0 };
                match shape {
                    Shape1d::Quadratic => (
                        0.5 * l * (u * u - v * v) - lin * u,
                        vec![l * u - lin],
                        vec![-l * v],
                    ),
                    Shape1d::Bilinear => (l * u * v - lin * v, vec![l * v], vec![l * u - lin]),
                }
            }
            Base::Line1d { l, r } => {
                let u = x[0];
                let lin = if c == 0 { n as f64 * l * r } else { 0.0 };
                (0.5 * l * u * u - lin * u, vec![l * u - lin], vec![])
            }
        }
    }
}

fn side_component(side: &Side, c: usize, v: &[f64]) -> (f64, Vec<f64>) {
    match side {
        Side::Ridge { mu } => (0.5 * mu * norm_sq(v), v.iter().map(|t| mu * t).collect()),
        Side::Chain(inner) => {
            let (val, g, _) = inner.eval_base(c, v, &[]);
            (val, g)
        }
    }
}

/// Rows owned by component `c`, restricted to `lo..=hi`.
pub(crate) fn owned_rows(c: usize, n: usize, lo: usize, hi: usize) -> impl Iterator<Item = usize> {
    (c..=hi).step_by(n).filter(move |&l| l >= lo)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn tilde_component(
    c: usize,
    n: usize,
    m: usize,
    zeta: f64,
    (c1, c2): (f64, f64),
    x: &[f64],
    y: &[f64],
    gx: &mut [f64],
    gy: &mut [f64],
) -> f64 {
    let nf = n as f64;
    let spec = BSpec { m, omega: 0.0, zeta };
    let mut value = 0.5 * c1 * norm_sq(x) - 0.5 * c2 * norm_sq(y);
    for j in 0..m {
        gx[j] = c1 * x[j];
        gy[j] = -c2 * y[j];
    }
    if c == 0 {
        value -= nf * x[0];
        gx[0] -= nf;
    }
    for l in owned_rows(c, n, 1, m) {
        let bx = spec.row_dot(l, x);
        let yl = y[l - 1];
        value += nf * yl * bx;
        spec.row_axpy(l, nf * yl, gx);
        gy[l - 1] += nf * bx;
    }
    value
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn hat_component(
    c: usize,
    n: usize,
    m: usize,
    omega: f64,
    (c1, c2, c3): (f64, f64, f64),
    x: &[f64],
    y: &[f64],
    gx: &mut [f64],
    gy: &mut [f64],
) -> f64 {
    let nf = n as f64;
    let spec = BSpec { m, omega, zeta: 0.0 };
    let mut value = -0.5 * c1 * norm_sq(y);
    for j in 0..m {
        gy[j] = -c1 * y[j];
        gx[j] = 0.0;
    }
    for j in 0..m - 1 {
        value += c2 * gamma_value(c3 * x[j]);
        gx[j] = c2 * c3 * gamma_deriv(c3 * x[j]);
    }
    if c == 0 {
        value -= nf * y[0];
        gy[0] -= nf;
    }
    for l in owned_rows(c, n, 0, m - 1) {
        let bx = spec.row_dot(l, x);
        value += nf * y[l] * bx;
        spec.row_axpy(l, nf * y[l], gx);
        gy[l] += nf * bx;
    }
    value
}

pub(crate) fn chain_component(
    c: usize,
    n: usize,
    spec: &BSpec,
    (c1, c2, c3): (f64, f64, f64),
    x: &[f64],
    gx: &mut [f64],
) -> f64 {
    let nf = n as f64;
    let m = spec.m;
    let mut value = 0.5 * c1 * norm_sq(x);
    for j in 0..m {
        gx[j] = c1 * x[j];
    }
    if c2 != 0.0 {
        for j in 0..m - 1 {
            value += c2 * gamma_value(x[j]);
            gx[j] += c2 * gamma_deriv(x[j]);
        }
    }
    if c == 0 {
        value -= c3 * nf * x[0];
        gx[0] -= c3 * nf;
    }
    for l in owned_rows(c, n, 0, m) {
        let bx = spec.row_dot(l, x);
        value += 0.5 * nf * bx * bx;
        spec.row_axpy(l, nf * bx, gx);
    }
    value
}
