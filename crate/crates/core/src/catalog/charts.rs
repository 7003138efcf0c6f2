//! Closed-form coordinate charts.
//!
//! Conventions shared by every chart:
//! * `left_fields[a]` are `ξ_a = d/dt (x · exp(t e_a))`, so
//!   `[ξ_a, ξ_b] = C_ab^c ξ_c`;
//! * `right_fields[a]` are `η_a = d/dt (exp(t e_a) · x)`, so
//!   `[η_a, η_b] = −C_ab^c η_c`;
//! * `right_forms` are dual to `η`;
//! * `coadjoint(x)` is the matrix `M` with `η_a = M_ab ξ_b`, i.e.
//!   `μ_l = Ad*_x μ_r = M μ_r`;
//! * `haar_density` is the right-invariant density `1 / |det η|`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::algebra::LieAlgebra;
use crate::dual::Real;
use crate::linalg::{zeros, Mat};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChartDomain {
    Full,
    /// Open box `lower < x < upper`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl ChartDomain {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ChartDomain::Full => x.iter().all(|v| v.is_finite()),
            ChartDomain::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).all(|(v, (lo, hi))| *v > *lo && *v < *hi)
            }
        }
    }
}

/// Coordinatized simply transitive group.
pub trait GroupChart {
    fn name(&self) -> &str;
    fn algebra(&self) -> &LieAlgebra;
    fn domain(&self) -> ChartDomain;
    fn product<T: Real>(&self, x: &[T], y: &[T]) -> Vec<T>;
    fn inverse<T: Real>(&self, x: &[T]) -> Vec<T>;
    fn left_fields<T: Real>(&self, x: &[T]) -> Mat<T>;
    fn right_fields<T: Real>(&self, x: &[T]) -> Mat<T>;
    fn right_forms<T: Real>(&self, x: &[T]) -> Mat<T>;
    fn coadjoint<T: Real>(&self, x: &[T]) -> Mat<T>;
    fn haar_density<T: Real>(&self, x: &[T]) -> T;

    fn dim(&self) -> usize {
        self.algebra().dim()
    }

    fn identity(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    /// Coordinates of `exp(t e_a)`.
    fn exp_coords<T: Real>(&self, a: usize, t: T) -> Vec<T> {
        let mut v = vec![T::zero(); self.dim()];
        v[a] = t;
        v
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.domain().contains(x)
    }
}

fn unit_rows<T: Real>(n: usize) -> Mat<T> {
    crate::linalg::identity(n)
}

// --- abelian ---------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Abelian {
    alg: LieAlgebra,
}

impl Abelian {
    pub fn new(n: usize) -> Self {
        Abelian { alg: LieAlgebra::abelian(n) }
    }
}

impl GroupChart for Abelian {
    fn name(&self) -> &str {
        &self.alg.name
    }
    fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }
    fn domain(&self) -> ChartDomain {
        ChartDomain::Full
    }
    fn product<T: Real>(&self, x: &[T], y: &[T]) -> Vec<T> {
        x.iter().zip(y).map(|(&a, &b)| a + b).collect()
    }
    fn inverse<T: Real>(&self, x: &[T]) -> Vec<T> {
        x.iter().map(|&a| -a).collect()
    }
    fn left_fields<T: Real>(&self, _x: &[T]) -> Mat<T> {
        unit_rows(self.dim())
    }
    fn right_fields<T: Real>(&self, _x: &[T]) -> Mat<T> {
        unit_rows(self.dim())
    }
    fn right_forms<T: Real>(&self, _x: &[T]) -> Mat<T> {
        unit_rows(self.dim())
    }
    fn coadjoint<T: Real>(&self, _x: &[T]) -> Mat<T> {
        unit_rows(self.dim())
    }
    fn haar_density<T: Real>(&self, _x: &[T]) -> T {
        T::one()
    }
}

// --- Heisenberg ------------------------------------------------------------

/// Upper unitriangular matrices `[[1, x1, x3], [0, 1, x2], [0, 0, 1]]`,
/// i.e. `exp(x2 e2) exp(x1 e1) exp(x3 e3)`.
#[derive(Debug, Clone)]
pub struct Heisenberg3 {
    alg: LieAlgebra,
}

impl Default for Heisenberg3 {
    fn default() -> Self {
        Heisenberg3 { alg: LieAlgebra::heisenberg3() }
    }
}

impl GroupChart for Heisenberg3 {
    fn name(&self) -> &str {
        "heisenberg3"
    }
    fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }
    fn domain(&self) -> ChartDomain {
        ChartDomain::Full
    }
    fn product<T: Real>(&self, x: &[T], y: &[T]) -> Vec<T> {
        vec![x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1]]
    }
    fn inverse<T: Real>(&self, x: &[T]) -> Vec<T> {
        vec![-x[0], -x[1], x[0] * x[1] - x[2]]
    }
    fn left_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        vec![vec![l, o, o], vec![o, l, x[0]], vec![o, o, l]]
    }
    fn right_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        vec![vec![l, o, x[1]], vec![o, l, o], vec![o, o, l]]
    }
    fn right_forms<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        vec![vec![l, o, o], vec![o, l, o], vec![-x[1], o, l]]
    }
    fn coadjoint<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        vec![vec![l, o, x[1]], vec![o, l, -x[0]], vec![o, o, l]]
    }
    fn haar_density<T: Real>(&self, _x: &[T]) -> T {
        T::one()
    }
}

// --- E(2) ------------------------------------------------------------------

/// Universal cover of the Euclidean group of the plane:
/// `x ↦ translate(x2, x3) ∘ rotate(x1)`.
#[derive(Debug, Clone)]
pub struct Euclid2 {
    alg: LieAlgebra,
}

impl Default for Euclid2 {
    fn default() -> Self {
        Euclid2 { alg: LieAlgebra::euclid2() }
    }
}

impl GroupChart for Euclid2 {
    fn name(&self) -> &str {
        "euclid2"
    }
    fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }
    fn domain(&self) -> ChartDomain {
        ChartDomain::Full
    }
    fn product<T: Real>(&self, x: &[T], y: &[T]) -> Vec<T> {
        let (c, s) = (x[0].cos(), x[0].sin());
        vec![x[0] + y[0], x[1] + c * y[1] - s * y[2], x[2] + s * y[1] + c * y[2]]
    }
    fn inverse<T: Real>(&self, x: &[T]) -> Vec<T> {
        let (c, s) = (x[0].cos(), x[0].sin());
        vec![-x[0], -(c * x[1] + s * x[2]), s * x[1] - c * x[2]]
    }
    fn left_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        let (c, s) = (x[0].cos(), x[0].sin());
        vec![vec![l, o, o], vec![o, c, s], vec![o, -s, c]]
    }
    fn right_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        vec![vec![l, -x[2], x[1]], vec![o, l, o], vec![o, o, l]]
    }
    fn right_forms<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        vec![vec![l, o, o], vec![x[2], l, o], vec![-x[1], o, l]]
    }
    fn coadjoint<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        let (c, s) = (x[0].cos(), x[0].sin());
        vec![
            vec![l, x[1] * s - x[2] * c, x[1] * c + x[2] * s],
            vec![o, c, -s],
            vec![o, s, c],
        ]
    }
    fn haar_density<T: Real>(&self, _x: &[T]) -> T {
        T::one()
    }
}

// --- Aff(1) ----------------------------------------------------------------

/// `[[e^{x1}, x2], [0, 1]]`, i.e. `exp(x2 e2) exp(x1 e1)`.
#[derive(Debug, Clone)]
pub struct Aff1 {
    alg: LieAlgebra,
}

impl Default for Aff1 {
    fn default() -> Self {
        Aff1 { alg: LieAlgebra::aff1() }
    }
}

impl GroupChart for Aff1 {
    fn name(&self) -> &str {
        "aff1"
    }
    fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }
    fn domain(&self) -> ChartDomain {
        ChartDomain::Full
    }
    fn product<T: Real>(&self, x: &[T], y: &[T]) -> Vec<T> {
        vec![x[0] + y[0], x[1] + x[0].exp() * y[1]]
    }
    fn inverse<T: Real>(&self, x: &[T]) -> Vec<T> {
        vec![-x[0], -(-x[0]).exp() * x[1]]
    }
    fn left_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        vec![vec![l, o], vec![o, x[0].exp()]]
    }
    fn right_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        vec![vec![l, x[1]], vec![o, l]]
    }
    fn right_forms<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        vec![vec![l, o], vec![-x[1], l]]
    }
    fn coadjoint<T: Real>(&self, x: &[T]) -> Mat<T> {
        let e = (-x[0]).exp();
        vec![vec![T::one(), x[1] * e], vec![T::zero(), e]]
    }
    fn haar_density<T: Real>(&self, _x: &[T]) -> T {
        T::one()
    }
}

// --- SO(3) -----------------------------------------------------------------

fn rot_x<T: Real>(a: T) -> Mat<T> {
    let (c, s, o, l) = (a.cos(), a.sin(), T::zero(), T::one());
    vec![vec![l, o, o], vec![o, c, -s], vec![o, s, c]]
}

fn rot_y<T: Real>(a: T) -> Mat<T> {
    let (c, s, o, l) = (a.cos(), a.sin(), T::zero(), T::one());
    vec![vec![c, o, s], vec![o, l, o], vec![-s, o, c]]
}

fn rot_z<T: Real>(a: T) -> Mat<T> {
    let (c, s, o, l) = (a.cos(), a.sin(), T::zero(), T::one());
    vec![vec![c, -s, o], vec![s, c, o], vec![o, o, l]]
}

/// `R(x) = R_x(x1) R_y(x2) R_z(x3)`.
pub fn so3_rotation<T: Real>(x: &[T]) -> Mat<T> {
    use crate::linalg::matmul;
    matmul(&matmul(&rot_x(x[0]), &rot_y(x[1])), &rot_z(x[2]))
}

/// Inverse of [`so3_rotation`] on the chart domain.
pub fn so3_angles<T: Real>(r: &[Vec<T>]) -> Vec<T> {
    let b = r[0][2].asin();
    let a = (-r[1][2]).atan2(r[2][2]);
    let c = (-r[0][1]).atan2(r[0][0]);
    vec![a, b, c]
}

/// Tait–Bryan (x-y-z) angles; singular at `x2 = ±π/2`.
#[derive(Debug, Clone)]
pub struct So3 {
    alg: LieAlgebra,
}

impl Default for So3 {
    fn default() -> Self {
        So3 { alg: LieAlgebra::so3() }
    }
}

impl GroupChart for So3 {
    fn name(&self) -> &str {
        "so3"
    }
    fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }
    fn domain(&self) -> ChartDomain {
        ChartDomain::Box { lower: vec![-PI, -FRAC_PI_2, -PI], upper: vec![PI, FRAC_PI_2, PI] }
    }
    fn product<T: Real>(&self, x: &[T], y: &[T]) -> Vec<T> {
        so3_angles(&crate::linalg::matmul(&so3_rotation(x), &so3_rotation(y)))
    }
    fn inverse<T: Real>(&self, x: &[T]) -> Vec<T> {
        so3_angles(&crate::linalg::transpose(&so3_rotation(x)))
    }
    fn left_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        let (s2, c2) = (x[1].sin(), x[1].cos());
        let (s3, c3) = (x[2].sin(), x[2].cos());
        vec![
            vec![c3 / c2, s3, -(s2 * c3) / c2],
            vec![-s3 / c2, c3, s2 * s3 / c2],
            vec![o, o, l],
        ]
    }
    fn right_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        let (s1, c1) = (x[0].sin(), x[0].cos());
        let (s2, c2) = (x[1].sin(), x[1].cos());
        vec![
            vec![l, o, o],
            vec![s1 * s2 / c2, c1, -s1 / c2],
            vec![-(c1 * s2) / c2, s1, c1 / c2],
        ]
    }
    fn right_forms<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (o, l) = (T::zero(), T::one());
        let (s1, c1) = (x[0].sin(), x[0].cos());
        let (s2, c2) = (x[1].sin(), x[1].cos());
        vec![vec![l, o, s2], vec![o, c1, -(c2 * s1)], vec![o, s1, c2 * c1]]
    }
    fn coadjoint<T: Real>(&self, x: &[T]) -> Mat<T> {
        so3_rotation(x)
    }
    fn haar_density<T: Real>(&self, x: &[T]) -> T {
        x[1].cos()
    }
}

// --- SO(3) × SO(3) ---------------------------------------------------------

#[derive(Debug, Clone)]
pub struct So3xSo3 {
    alg: LieAlgebra,
    factor: So3,
}

impl Default for So3xSo3 {
    fn default() -> Self {
        So3xSo3 { alg: LieAlgebra::so3_x_so3(), factor: So3::default() }
    }
}

fn block_diag<T: Real>(a: Mat<T>, b: Mat<T>) -> Mat<T> {
    let (n, m) = (a.len(), b.len());
    let mut out = zeros(n + m, n + m);
    for i in 0..n {
        out[i][..n].copy_from_slice(&a[i]);
    }
    for i in 0..m {
        out[n + i][n..].copy_from_slice(&b[i]);
    }
    out
}

impl So3xSo3 {
    fn split<'a, T>(x: &'a [T]) -> (&'a [T], &'a [T]) {
        x.split_at(3)
    }
}

impl GroupChart for So3xSo3 {
    fn name(&self) -> &str {
        "so3_x_so3"
    }
    fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }
    fn domain(&self) -> ChartDomain {
        let ChartDomain::Box { lower, upper } = self.factor.domain() else { unreachable!() };
        ChartDomain::Box { lower: [lower.clone(), lower].concat(), upper: [upper.clone(), upper].concat() }
    }
    fn product<T: Real>(&self, x: &[T], y: &[T]) -> Vec<T> {
        let ((x1, x2), (y1, y2)) = (Self::split(x), Self::split(y));
        [self.factor.product(x1, y1), self.factor.product(x2, y2)].concat()
    }
    fn inverse<T: Real>(&self, x: &[T]) -> Vec<T> {
        let (x1, x2) = Self::split(x);
        [self.factor.inverse(x1), self.factor.inverse(x2)].concat()
    }
    fn left_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (x1, x2) = Self::split(x);
        block_diag(self.factor.left_fields(x1), self.factor.left_fields(x2))
    }
    fn right_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (x1, x2) = Self::split(x);
        block_diag(self.factor.right_fields(x1), self.factor.right_fields(x2))
    }
    fn right_forms<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (x1, x2) = Self::split(x);
        block_diag(self.factor.right_forms(x1), self.factor.right_forms(x2))
    }
    fn coadjoint<T: Real>(&self, x: &[T]) -> Mat<T> {
        let (x1, x2) = Self::split(x);
        block_diag(self.factor.coadjoint(x1), self.factor.coadjoint(x2))
    }
    fn haar_density<T: Real>(&self, x: &[T]) -> T {
        let (x1, x2) = Self::split(x);
        self.factor.haar_density(x1) * self.factor.haar_density(x2)
    }
}
