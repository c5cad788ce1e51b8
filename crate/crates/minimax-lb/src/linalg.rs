//! Row-structured matrices, residue partitions, coordinate subspaces and the
//! scalar nonconvex potential shared by the hard instances.
//!
//! Matrices are never materialized inside oracles. Everything works through
//! row actions so that coordinates outside the reachable subspace stay exactly
//! zero.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Curvature floor of the potential: `Γ'' ≥ -GAMMA_WEAK_CONVEXITY`.
pub const GAMMA_WEAK_CONVEXITY: f64 = 32.942_286_340_599_48; // 45(√3-1)
/// Upper bound on `|Γ''|`.
pub const GAMMA_SMOOTHNESS: f64 = 180.0;

/// Shape of the `(m+1) x m` chain matrix: a scaled first row, `m-1`
/// difference rows and a scaled last row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BSpec {
    pub m: usize,
    pub omega: f64,
    pub zeta: f64,
}

impl BSpec {
    pub fn new(m: usize, omega: f64, zeta: f64) -> Result<Self> {
        let s = BSpec { m, omega, zeta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        let cap = std::f64::consts::SQRT_2 + 1e-12;
        if !(0.0..=cap).contains(&self.omega) || !(0.0..=cap).contains(&self.zeta) {
            return Err(invalid(format!(
                "omega and zeta must lie in [0, sqrt 2], got {} and {}",
                self.omega, self.zeta
            )));
        }
        Ok(())
    }

    /// `b_l^T x` without forming the row.
    #[inline]
    pub fn row_dot(&self, l: usize, x: &[f64]) -> f64 {
        let m = self.m;
        if l == 0 {
            self.omega * x[0]
        } else if l < m {
            x[l - 1] - x[l]
        } else {
            self.zeta * x[m - 1]
        }
    }

    /// `out += s * b_l`.
    #[inline]
    pub fn row_axpy(&self, l: usize, s: f64, out: &mut [f64]) {
        let m = self.m;
        if l == 0 {
            out[0] += s * self.omega;
        } else if l < m {
            out[l - 1] += s;
            out[l] -= s;
        } else {
            out[m - 1] += s * self.zeta;
        }
    }
}

/// Dense `(m+1) x m` matrix, row major. Meant for tests and brute-force checks.
pub fn make_b(spec: &BSpec) -> Vec<Vec<f64>> {
    (0..=spec.m)
        .map(|l| row_b(l, spec).expect("row index in range"))
        .collect()
}

/// Row `l` of [`make_b`], for `0 <= l <= m`.
pub fn row_b(l: usize, spec: &BSpec) -> Result<Vec<f64>> {
    if l > spec.m {
        return Err(Error::OutOfRange { index: l, range: format!("0..={}", spec.m) });
    }
    let mut row = vec![0.0; spec.m];
    spec.row_axpy(l, 1.0, &mut row);
    Ok(row)
}

/// Residue classes of `{0, ..., m}` modulo `n`. `sets[c]` holds the rows owned
/// by component `c` (0-based), i.e. every `l` with `l ≡ c (mod n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub n: usize,
    pub m: usize,
    pub sets: Vec<Vec<usize>>,
}

impl Partition {
    /// Component owning row `l`.
    #[inline]
    pub fn owner(&self, l: usize) -> usize {
        l % self.n
    }
}

pub fn partition_indices(m: usize, n: usize) -> Result<Partition> {
    if n < 2 {
        return Err(invalid(format!("need at least two components, got n = {n}")));
    }
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    let sets = (0..n).map(|c| (c..=m).step_by(n).collect()).collect();
    Ok(Partition { n, m, sets })
}

/// Smallest `k` such that every coordinate past position `k` (1-based) has
/// magnitude at most `tol`. The zero vector has index 0.
pub fn subspace_index(v: &[f64], tol: f64) -> usize {
    v.iter().rposition(|x| x.abs() > tol).map_or(0, |p| p + 1)
}

/// Euclidean projection onto the centered ball of radius `r`. An infinite
/// radius is the identity.
pub fn project_ball(v: &[f64], r: f64) -> Vec<f64> {
    let nv = norm(v);
    if nv <= r {
        v.to_vec()
    } else {
        let s = r / nv;
        v.iter().map(|x| x * s).collect()
    }
}

const GAMMA_OFFSET: f64 = 120.0
    * (0.5 - 1.0 - 0.5 * std::f64::consts::LN_2 + std::f64::consts::FRAC_PI_4);

/// `Γ(x) = 120 ∫_1^x t²(t-1)/(1+t²) dt`, via its antiderivative.
pub fn gamma_value(x: f64) -> f64 {
    120.0 * (0.5 * x * x - x - 0.5 * x.mul_add(x, 1.0).ln() + x.atan()) - GAMMA_OFFSET
}

pub fn gamma_deriv(x: f64) -> f64 {
    120.0 * x * x * (x - 1.0) / (1.0 + x * x)
}

pub fn gamma_second(x: f64) -> f64 {
    let x2 = x * x;
    let d = 1.0 + x2;
    // d/dx [x^3 - x^2] / (1 + x^2)
    120.0 * ((3.0 * x2 - 2.0 * x) * d - (x2 * x - x2) * 2.0 * x) / (d * d)
}

/// Thomas elimination for a tridiagonal system. `sub[i]` sits at `(i+1, i)`
/// and `sup[i]` at `(i, i+1)`.
pub fn solve_tridiagonal(diag: &[f64], sub: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n {
        return Err(Error::Dimension { expected: n, got: rhs.len() });
    }
    if n == 0 {
        return Ok(vec![]);
    }
    if sub.len() + 1 != n || sup.len() + 1 != n {
        return Err(Error::Dimension { expected: n - 1, got: sub.len().min(sup.len()) });
    }
    let scale = diag
        .iter()
        .chain(sub)
        .chain(sup)
        .fold(0.0f64, |a, b| a.max(b.abs()))
        .max(f64::MIN_POSITIVE);
    let tiny = 1e-13 * scale;
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv.abs() <= tiny {
        return Err(Error::Singular("zero pivot at row 0".into()));
    }
    if n > 1 {
        c[0] = sup[0] / piv;
    }
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - sub[i - 1] * c[i - 1];
        if piv.abs() <= tiny {
            return Err(Error::Singular(format!("zero pivot at row {i}")));
        }
        if i + 1 < n {
            c[i] = sup[i] / piv;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `y += a * x`.
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub fn scaled(a: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| a * v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn b_rows_by_hand() {
        let b = make_b(&BSpec::new(3, 0.0, 1.0).unwrap());
        let want = [[0.0, 0.0, 0.0], [1.0, -1.0, 0.0], [0.0, 1.0, -1.0], [0.0, 0.0, 1.0]];
        for (r, w) in b.iter().zip(want) {
            assert_eq!(r.as_slice(), &w);
        }
        let b = make_b(&BSpec::new(2, 0.0, 0.0).unwrap());
        assert_eq!(b, vec![vec![0.0, 0.0], vec![1.0, -1.0], vec![0.0, 0.0]]);
        let b = make_b(&BSpec::new(2, S2, S2).unwrap());
        assert_eq!(b, vec![vec![S2, 0.0], vec![1.0, -1.0], vec![0.0, S2]]);
    }

    #[test]
    fn single_rows() {
        let s = BSpec::new(3, 0.0, 0.0).unwrap();
        assert_eq!(row_b(0, &s).unwrap(), vec![0.0; 3]);
        assert_eq!(row_b(3, &s).unwrap(), vec![0.0; 3]);
        assert_eq!(row_b(1, &s).unwrap(), vec![1.0, -1.0, 0.0]);
        assert!(row_b(4, &s).is_err());
        assert!(BSpec::new(2, 1.5, 0.0).is_err());
        assert!(BSpec::new(0, 0.0, 0.0).is_err());
    }

    #[test]
    fn partitions() {
        let p = partition_indices(5, 3).unwrap();
        assert_eq!(p.sets, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
        let p = partition_indices(5, 2).unwrap();
        assert_eq!(p.sets, vec![vec![0, 2, 4], vec![1, 3, 5]]);
        let p = partition_indices(1, 2).unwrap();
        assert_eq!(p.sets, vec![vec![0], vec![1]]);
        assert!(partition_indices(4, 1).is_err());
    }

    #[test]
    fn subspaces() {
        assert_eq!(subspace_index(&[0.0, 0.0, 0.0], 0.0), 0);
        assert_eq!(subspace_index(&[1.0, 2.0, 0.0, 0.0], 0.0), 2);
        assert_eq!(subspace_index(&[0.0, 1e-12, 0.0], 1e-10), 0);
    }

    #[test]
    fn ball_projection() {
        assert_eq!(project_ball(&[3.0, 4.0], 5.0), vec![3.0, 4.0]);
        let p = project_ball(&[6.0, 8.0], 5.0);
        assert!((p[0] - 3.0).abs() < 1e-15 && (p[1] - 4.0).abs() < 1e-15);
        assert_eq!(project_ball(&[0.0, 0.0], 1.0), vec![0.0, 0.0]);
        assert_eq!(project_ball(&[1e300, 0.0], f64::INFINITY), vec![1e300, 0.0]);
    }

    #[test]
    fn gamma_anchor_values() {
        assert_eq!(gamma_value(1.0), 0.0);
        assert_eq!(gamma_deriv(0.0), 0.0);
        assert!((gamma_deriv(2.0) - 96.0).abs() < 1e-12);
        assert!(gamma_value(0.0) > 7.3 && gamma_value(0.0) < 7.4);
        assert!((GAMMA_WEAK_CONVEXITY - 45.0 * (3f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn gamma_matches_quadrature() {
        let integrand = |t: f64| 120.0 * t * t * (t - 1.0) / (1.0 + t * t);
        for i in 0..=40 {
            let x = -5.0 + 0.25 * i as f64;
            let q = simpson(integrand, 1.0, x, 4000);
            assert!((gamma_value(x) - q).abs() < 1e-9 * (1.0 + q.abs()), "x={x}");
        }
    }

    #[test]
    fn gamma_curvature_floor_on_grid() {
        let mut lo = f64::INFINITY;
        for i in 0..=200_000 {
            let x = -10.0 + 1e-4 * i as f64;
            lo = lo.min(gamma_second(x));
        }
        assert!(lo >= -GAMMA_WEAK_CONVEXITY - 1e-9);
        assert!(lo <= -GAMMA_WEAK_CONVEXITY + 1e-3);
    }

    #[test]
    fn tridiagonal_small() {
        assert_eq!(solve_tridiagonal(&[1.0, 1.0], &[0.0], &[0.0], &[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        let v = solve_tridiagonal(&[2.0, 2.0], &[-1.0], &[-1.0], &[1.0, 0.0]).unwrap();
        assert!((v[0] - 2.0 / 3.0).abs() < 1e-15 && (v[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            solve_tridiagonal(&[1.0, 1.0], &[1.0], &[1.0], &[1.0, 1.0]),
            Err(Error::Singular(_))
        ));
    }

    proptest! {
        #[test]
        fn same_class_rows_are_orthogonal(m in 2usize..30, n in 2usize..7, om in 0.0..S2, ze in 0.0..S2) {
            let spec = BSpec::new(m, om, ze).unwrap();
            let p = partition_indices(m, n).unwrap();
            for set in &p.sets {
                for (a, &l1) in set.iter().enumerate() {
                    let r1 = row_b(l1, &spec).unwrap();
                    prop_assert!(norm_sq(&r1) <= 2.0 + 1e-12);
                    for &l2 in &set[a + 1..] {
                        prop_assert!(l2 - l1 >= n);
                        prop_assert_eq!(dot(&r1, &row_b(l2, &spec).unwrap()), 0.0);
                    }
                }
            }
            let total: usize = p.sets.iter().map(Vec::len).sum();
            prop_assert_eq!(total, m + 1);
        }

        #[test]
        fn gamma_is_180_smooth(x in -10.0f64..10.0, y in -10.0f64..10.0) {
            prop_assume!((x - y).abs() > 1e-9);
            let lip = (gamma_deriv(x) - gamma_deriv(y)).abs() / (x - y).abs();
            prop_assert!(lip <= GAMMA_SMOOTHNESS + 1e-9);
        }

        #[test]
        fn projection_lands_in_ball(v in proptest::collection::vec(-100.0f64..100.0, 1..8), r in 0.1f64..50.0) {
            let p = project_ball(&v, r);
            prop_assert!(norm(&p) <= r + 1e-12);
            let pp = project_ball(&p, r);
            for (a, b) in p.iter().zip(&pp) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }

        #[test]
        fn tridiagonal_residual(n in 1usize..20, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let sub: Vec<f64> = (1..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let sup: Vec<f64> = (1..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let diag: Vec<f64> = (0..n).map(|_| 2.5 + rng.random::<f64>()).collect();
            let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let v = solve_tridiagonal(&diag, &sub, &sup, &rhs).unwrap();
            let mut res = 0.0f64;
            for i in 0..n {
                let mut r = diag[i] * v[i] - rhs[i];
                if i > 0 { r += sub[i - 1] * v[i - 1]; }
                if i + 1 < n { r += sup[i] * v[i + 1]; }
                res += r * r;
            }
            prop_assert!(res.sqrt() <= 1e-10 * norm(&rhs).max(1e-300));
        }
    }
}
