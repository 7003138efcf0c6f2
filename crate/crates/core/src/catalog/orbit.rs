//! Orbit models: canonical coordinates `(q, π)` on a family of coadjoint
//! orbits labelled by Casimir values `J`, together with the transition
//! functions `f_a(q, π; J)` that embed each orbit in the coalgebra.

use std::f64::consts::PI;

use super::{Chart, GroupChart};
use crate::dual::Real;
use crate::error::{Error, Result};
use crate::linalg::{re_vec, Mat};
use num_complex::Complex;

/// `(q, π, J)`.
pub type Inverted<T> = (Vec<T>, Vec<T>, Vec<T>);

/// Coefficients of `ℓ_a = a_a^α(q) ∂_α + b_a(q; J)` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LrepCoeffs<T> {
    /// `a[a][α]`.
    pub a: Vec<Vec<Complex<T>>>,
    pub b: Vec<Complex<T>>,
}

fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Canonical data for one orbit family.
///
/// `f` must satisfy `{f_a, f_b} = C_ab^c f_c` under
/// `{F, G} = ∂_q F ∂_π G − ∂_π F ∂_q G`.
pub trait OrbitModel {
    fn name(&self) -> &str;
    /// Number of canonical pairs `(q, π)`, half the orbit dimension.
    fn m(&self) -> usize;
    /// Number of Casimir labels.
    fn r(&self) -> usize;
    /// Representative coalgebra point `λ(J)` of the orbit labelled `J`.
    fn section<T: Real>(&self, j: &[T]) -> Vec<T>;
    /// Casimir values of a coalgebra point.
    fn casimirs<T: Real>(&self, f: &[T]) -> Vec<T>;
    fn transition<T: Real>(&self, q: &[T], pi: &[T], j: &[T]) -> Vec<T>;
    /// `q ↦ x·q`, the induced action on the polarization leaves, when a real
    /// invariant polarization exists.
    fn point_map<T: Real>(&self, x: &[T], q: &[T]) -> Option<Vec<T>>;
    /// Recover `(q, π, J)` from `f`. Branch decisions use real parts only.
    fn invert<T: Real>(&self, f: &[T]) -> Result<Inverted<T>>;
    fn is_regular(&self, j: &[f64]) -> bool;
    /// Whether `(q, π)` lies in the patch where the model is defined.
    fn in_patch(&self, _q: &[f64], _pi: &[f64], _j: &[f64]) -> bool {
        true
    }
    /// Period of each `q` coordinate, if periodic.
    fn q_period(&self) -> Option<f64> {
        None
    }
    /// Basis of a real polarization subalgebra at `λ(J)`, as rows.
    fn polarization(&self) -> Option<Mat<f64>>;
    /// Shipped λ-representation coefficients, where a real polarization
    /// exists.
    fn lrep<T: Real>(&self, q: &[T], j: &[T]) -> Option<LrepCoeffs<T>>;
    /// Density of the measure on `Q` with respect to `dq`.
    fn q_density(&self, _q: &[f64]) -> f64 {
        1.0
    }
    /// Whether every `f_a` is affine in `π`.
    fn pi_linear(&self) -> bool {
        self.point_map::<f64>(&[], &[]).is_some() || self.m() == 0
    }

    fn require_regular(&self, j: &[f64]) -> Result<()> {
        if j.len() != self.r() {
            return Err(Error::Input(format!("{} expects {} Casimir values, got {}", self.name(), self.r(), j.len())));
        }
        if self.is_regular(j) {
            Ok(())
        } else {
            Err(Error::Regularity(format!("{} orbit with J = {:?} is not of maximal dimension", self.name(), j)))
        }
    }
}

#[derive(Debug, Clone)]
pub struct AbelianOrbit {
    pub n: usize,
}

impl OrbitModel for AbelianOrbit {
    fn lrep<T: Real>(&self, _q: &[T], j: &[T]) -> Option<LrepCoeffs<T>> {
        Some(LrepCoeffs { a: vec![Vec::new(); self.n], b: j.iter().map(|&v| c(T::zero(), v)).collect() })
    }
    fn polarization(&self) -> Option<Mat<f64>> {
        Some(crate::linalg::identity(self.n))
    }
    fn name(&self) -> &str {
        "abelian"
    }
    fn m(&self) -> usize {
        0
    }
    fn r(&self) -> usize {
        self.n
    }
    fn section<T: Real>(&self, j: &[T]) -> Vec<T> {
        j.to_vec()
    }
    fn casimirs<T: Real>(&self, f: &[T]) -> Vec<T> {
        f.to_vec()
    }
    fn transition<T: Real>(&self, _q: &[T], _pi: &[T], j: &[T]) -> Vec<T> {
        j.to_vec()
    }
    fn point_map<T: Real>(&self, _x: &[T], _q: &[T]) -> Option<Vec<T>> {
        Some(Vec::new())
    }
    fn invert<T: Real>(&self, f: &[T]) -> Result<Inverted<T>> {
        Ok((Vec::new(), Vec::new(), f.to_vec()))
    }
    fn is_regular(&self, _j: &[f64]) -> bool {
        true
    }
}

/// `f = (π, −J q, J)`, `J ≠ 0`.
#[derive(Debug, Clone, Default)]
pub struct HeisenbergOrbit;

impl OrbitModel for HeisenbergOrbit {
    fn lrep<T: Real>(&self, q: &[T], j: &[T]) -> Option<LrepCoeffs<T>> {
        let (o, z) = (T::one(), T::zero());
        Some(LrepCoeffs {
            a: vec![vec![c(-o, z)], vec![c(z, z)], vec![c(z, z)]],
            b: vec![c(z, z), c(z, -(j[0] * q[0])), c(z, j[0])],
        })
    }
    fn polarization(&self) -> Option<Mat<f64>> {
        Some(vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]])
    }
    fn name(&self) -> &str {
        "heisenberg3"
    }
    fn m(&self) -> usize {
        1
    }
    fn r(&self) -> usize {
        1
    }
    fn section<T: Real>(&self, j: &[T]) -> Vec<T> {
        vec![T::zero(), T::zero(), j[0]]
    }
    fn casimirs<T: Real>(&self, f: &[T]) -> Vec<T> {
        vec![f[2]]
    }
    fn transition<T: Real>(&self, q: &[T], pi: &[T], j: &[T]) -> Vec<T> {
        vec![pi[0], -(j[0] * q[0]), j[0]]
    }
    fn point_map<T: Real>(&self, x: &[T], q: &[T]) -> Option<Vec<T>> {
        if x.is_empty() {
            return Some(Vec::new());
        }
        Some(vec![q[0] + x[0]])
    }
    fn invert<T: Real>(&self, f: &[T]) -> Result<Inverted<T>> {
        let j = f[2];
        if j.re() == 0.0 {
            return Err(Error::Regularity("heisenberg3 point with J = 0".into()));
        }
        Ok((vec![-f[1] / j], vec![f[0]], vec![j]))
    }
    fn is_regular(&self, j: &[f64]) -> bool {
        j[0] != 0.0 && j[0].is_finite()
    }
}

/// `f = (π, J cos q, J sin q)`, `J > 0`, `q` mod 2π.
#[derive(Debug, Clone, Default)]
pub struct EuclidOrbit;

impl OrbitModel for EuclidOrbit {
    fn lrep<T: Real>(&self, q: &[T], j: &[T]) -> Option<LrepCoeffs<T>> {
        let (o, z) = (T::one(), T::zero());
        Some(LrepCoeffs {
            a: vec![vec![c(-o, z)], vec![c(z, z)], vec![c(z, z)]],
            b: vec![c(z, z), c(z, j[0] * q[0].cos()), c(z, j[0] * q[0].sin())],
        })
    }
    fn polarization(&self) -> Option<Mat<f64>> {
        Some(vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]])
    }
    fn name(&self) -> &str {
        "euclid2"
    }
    fn m(&self) -> usize {
        1
    }
    fn r(&self) -> usize {
        1
    }
    fn section<T: Real>(&self, j: &[T]) -> Vec<T> {
        vec![T::zero(), j[0], T::zero()]
    }
    fn casimirs<T: Real>(&self, f: &[T]) -> Vec<T> {
        vec![(f[1] * f[1] + f[2] * f[2]).sqrt()]
    }
    fn transition<T: Real>(&self, q: &[T], pi: &[T], j: &[T]) -> Vec<T> {
        vec![pi[0], j[0] * q[0].cos(), j[0] * q[0].sin()]
    }
    fn point_map<T: Real>(&self, x: &[T], q: &[T]) -> Option<Vec<T>> {
        if x.is_empty() {
            return Some(Vec::new());
        }
        Some(vec![q[0] + x[0]])
    }
    fn invert<T: Real>(&self, f: &[T]) -> Result<Inverted<T>> {
        let j = (f[1] * f[1] + f[2] * f[2]).sqrt();
        if j.re() == 0.0 {
            return Err(Error::Regularity("euclid2 point with J = 0".into()));
        }
        Ok((vec![f[2].atan2(f[1])], vec![f[0]], vec![j]))
    }
    fn is_regular(&self, j: &[f64]) -> bool {
        j[0] > 0.0 && j[0].is_finite()
    }
    fn q_period(&self) -> Option<f64> {
        Some(2.0 * PI)
    }
}

/// `f = (ρ cos q, ρ sin q, π)` with `ρ = √(J² − π²)`: cylindrical
/// coordinates on the sphere of radius `J`. Not affine in `π`, and the
/// sphere carries no invariant real polarization.
#[derive(Debug, Clone, Default)]
pub struct So3Orbit;

impl OrbitModel for So3Orbit {
    fn lrep<T: Real>(&self, _q: &[T], _j: &[T]) -> Option<LrepCoeffs<T>> {
        None
    }
    fn polarization(&self) -> Option<Mat<f64>> {
        None
    }
    fn name(&self) -> &str {
        "so3"
    }
    fn m(&self) -> usize {
        1
    }
    fn r(&self) -> usize {
        1
    }
    fn section<T: Real>(&self, j: &[T]) -> Vec<T> {
        vec![T::zero(), T::zero(), j[0]]
    }
    fn casimirs<T: Real>(&self, f: &[T]) -> Vec<T> {
        vec![(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt()]
    }
    fn transition<T: Real>(&self, q: &[T], pi: &[T], j: &[T]) -> Vec<T> {
        let rho = (j[0] * j[0] - pi[0] * pi[0]).sqrt();
        vec![rho * q[0].cos(), rho * q[0].sin(), pi[0]]
    }
    fn point_map<T: Real>(&self, _x: &[T], _q: &[T]) -> Option<Vec<T>> {
        None
    }
    fn invert<T: Real>(&self, f: &[T]) -> Result<Inverted<T>> {
        let j = (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt();
        if j.re() == 0.0 {
            return Err(Error::Regularity("so3 point with J = 0".into()));
        }
        if f[0].re().hypot(f[1].re()) <= 1e-12 * j.re() {
            return Err(Error::Inversion("so3 point on the polar axis".into()));
        }
        Ok((vec![f[1].atan2(f[0])], vec![f[2]], vec![j]))
    }
    fn is_regular(&self, j: &[f64]) -> bool {
        j[0] > 0.0 && j[0].is_finite()
    }
    fn in_patch(&self, _q: &[f64], pi: &[f64], j: &[f64]) -> bool {
        pi[0].abs() < j[0].abs()
    }
    fn q_period(&self) -> Option<f64> {
        Some(2.0 * PI)
    }
    fn pi_linear(&self) -> bool {
        false
    }
}

/// `f = (π, s e^{−q})` on the open half-plane `s f_2 > 0`. No Casimirs; the
/// sign `s = ±1` picks the orbit.
#[derive(Debug, Clone)]
pub struct Aff1Orbit {
    pub sign: f64,
}

impl Default for Aff1Orbit {
    fn default() -> Self {
        Aff1Orbit { sign: 1.0 }
    }
}

impl OrbitModel for Aff1Orbit {
    fn lrep<T: Real>(&self, q: &[T], _j: &[T]) -> Option<LrepCoeffs<T>> {
        let (o, z) = (T::one(), T::zero());
        Some(LrepCoeffs { a: vec![vec![c(-o, z)], vec![c(z, z)]], b: vec![c(z, z), c(z, (-q[0]).exp() * self.sign)] })
    }
    fn polarization(&self) -> Option<Mat<f64>> {
        Some(vec![vec![0.0, 1.0]])
    }
    fn name(&self) -> &str {
        "aff1"
    }
    fn m(&self) -> usize {
        1
    }
    fn r(&self) -> usize {
        0
    }
    fn section<T: Real>(&self, _j: &[T]) -> Vec<T> {
        vec![T::zero(), T::cst(self.sign)]
    }
    fn casimirs<T: Real>(&self, _f: &[T]) -> Vec<T> {
        Vec::new()
    }
    fn transition<T: Real>(&self, q: &[T], pi: &[T], _j: &[T]) -> Vec<T> {
        vec![pi[0], (-q[0]).exp() * self.sign]
    }
    fn point_map<T: Real>(&self, x: &[T], q: &[T]) -> Option<Vec<T>> {
        if x.is_empty() {
            return Some(Vec::new());
        }
        Some(vec![q[0] + x[0]])
    }
    fn invert<T: Real>(&self, f: &[T]) -> Result<Inverted<T>> {
        let s = f[1] * self.sign;
        if s.re() <= 0.0 {
            return Err(Error::Inversion(format!("aff1 point {:?} is not on the s = {} orbit", re_vec(f), self.sign)));
        }
        Ok((vec![-s.ln()], vec![f[0]], Vec::new()))
    }
    fn is_regular(&self, _j: &[f64]) -> bool {
        true
    }
}

/// Every catalog orbit model behind one type.
#[derive(Debug, Clone)]
pub enum Orbit {
    Abelian(AbelianOrbit),
    Heisenberg3(HeisenbergOrbit),
    Euclid2(EuclidOrbit),
    So3(So3Orbit),
    Aff1(Aff1Orbit),
}

macro_rules! dispatch {
    ($self:ident, $o:ident => $e:expr) => {
        match $self {
            Orbit::Abelian($o) => $e,
            Orbit::Heisenberg3($o) => $e,
            Orbit::Euclid2($o) => $e,
            Orbit::So3($o) => $e,
            Orbit::Aff1($o) => $e,
        }
    };
}

impl OrbitModel for Orbit {
    fn lrep<T: Real>(&self, q: &[T], j: &[T]) -> Option<LrepCoeffs<T>> {
        dispatch!(self, o => o.lrep(q, j))
    }
    fn q_density(&self, q: &[f64]) -> f64 {
        dispatch!(self, o => o.q_density(q))
    }
    fn polarization(&self) -> Option<Mat<f64>> {
        dispatch!(self, o => o.polarization())
    }
    fn name(&self) -> &str {
        dispatch!(self, o => o.name())
    }
    fn m(&self) -> usize {
        dispatch!(self, o => o.m())
    }
    fn r(&self) -> usize {
        dispatch!(self, o => o.r())
    }
    fn section<T: Real>(&self, j: &[T]) -> Vec<T> {
        dispatch!(self, o => o.section(j))
    }
    fn casimirs<T: Real>(&self, f: &[T]) -> Vec<T> {
        dispatch!(self, o => o.casimirs(f))
    }
    fn transition<T: Real>(&self, q: &[T], pi: &[T], j: &[T]) -> Vec<T> {
        dispatch!(self, o => o.transition(q, pi, j))
    }
    fn point_map<T: Real>(&self, x: &[T], q: &[T]) -> Option<Vec<T>> {
        dispatch!(self, o => o.point_map(x, q))
    }
    fn invert<T: Real>(&self, f: &[T]) -> Result<Inverted<T>> {
        dispatch!(self, o => o.invert(f))
    }
    fn is_regular(&self, j: &[f64]) -> bool {
        dispatch!(self, o => o.is_regular(j))
    }
    fn in_patch(&self, q: &[f64], pi: &[f64], j: &[f64]) -> bool {
        dispatch!(self, o => o.in_patch(q, pi, j))
    }
    fn q_period(&self) -> Option<f64> {
        dispatch!(self, o => o.q_period())
    }
    fn pi_linear(&self) -> bool {
        dispatch!(self, o => o.pi_linear())
    }
}

/// The orbit model attached to a catalog chart.
pub fn load_orbit_model(chart: &Chart) -> Result<Orbit> {
    match chart {
        Chart::Abelian(_) => Ok(Orbit::Abelian(AbelianOrbit { n: chart.dim() })),
        Chart::Heisenberg3(_) => Ok(Orbit::Heisenberg3(HeisenbergOrbit)),
        Chart::Euclid2(_) => Ok(Orbit::Euclid2(EuclidOrbit)),
        Chart::So3(_) => Ok(Orbit::So3(So3Orbit)),
        Chart::Aff1(_) => Ok(Orbit::Aff1(Aff1Orbit::default())),
        Chart::So3xSo3(_) => Err(Error::Unsupported(format!("no orbit model for {}", chart.name()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_group;

    #[test]
    fn inversion_roundtrips() {
        let cases: Vec<(Orbit, Vec<f64>, Vec<f64>, Vec<f64>)> = vec![
            (Orbit::Heisenberg3(HeisenbergOrbit), vec![0.4], vec![-1.1], vec![-2.0]),
            (Orbit::Euclid2(EuclidOrbit), vec![2.5], vec![0.7], vec![1.3]),
            (Orbit::So3(So3Orbit), vec![-0.9], vec![0.2], vec![0.8]),
            (Orbit::Aff1(Aff1Orbit { sign: -1.0 }), vec![0.6], vec![1.5], vec![]),
        ];
        for (o, q, p, j) in cases {
            let f = o.transition(&q, &p, &j);
            let (q2, p2, j2) = o.invert(&f).unwrap();
            assert!((q2[0] - q[0]).abs() < 1e-14 && (p2[0] - p[0]).abs() < 1e-14, "{}", o.name());
            assert_eq!(j2.len(), j.len());
            for (a, b) in j2.iter().zip(&j) {
                assert!((a - b).abs() < 1e-14);
            }
            assert_eq!(o.casimirs(&f).len(), o.r());
        }
    }

    #[test]
    fn non_regular_labels_are_rejected() {
        let h = Orbit::Heisenberg3(HeisenbergOrbit);
        assert!(matches!(h.require_regular(&[0.0]), Err(Error::Regularity(_))));
        assert!(h.require_regular(&[0.5]).is_ok());
        assert!(matches!(h.invert(&[1.0, 1.0, 0.0]), Err(Error::Regularity(_))));
        assert!(matches!(Orbit::Euclid2(EuclidOrbit).require_regular(&[-1.0]), Err(Error::Regularity(_))));
        assert!(matches!(h.require_regular(&[1.0, 2.0]), Err(Error::Input(_))));
    }

    #[test]
    fn orbit_model_availability() {
        assert!(load_orbit_model(&load_group("so3_x_so3").unwrap()).is_err());
        let so3 = load_orbit_model(&load_group("so3").unwrap()).unwrap();
        assert!(!so3.pi_linear());
        assert!(so3.point_map::<f64>(&[0.1, 0.2, 0.3], &[0.0]).is_none());
        assert!(load_orbit_model(&load_group("heisenberg3").unwrap()).unwrap().pi_linear());
    }
}
