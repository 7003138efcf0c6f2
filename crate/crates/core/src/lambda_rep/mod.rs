//! The λ-representation: first-order operators `ℓ_a(q; λ)` on functions of
//! the polarization leaf coordinates, delta-supported matrix elements built
//! from the generating function, and the group Fourier pair.

mod fourier;
mod kernel;

pub use fourier::*;
pub use kernel::*;

use num_complex::Complex;

use crate::algebra::LieAlgebra;
use crate::calculus::integrate_vec;
use crate::catalog::{LrepCoeffs, OrbitModel};
use crate::dual::{lift, Dual, Real};
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// A complex-valued smooth function that can be evaluated on jets.
pub trait TestFunction {
    fn eval<T: Real>(&self, q: &[T]) -> Complex<T>;
}

impl<F: TestFunction + ?Sized> TestFunction for &F {
    fn eval<T: Real>(&self, q: &[T]) -> Complex<T> {
        (**self).eval(q)
    }
}

pub fn cexp<T: Real>(re: T, im: T) -> Complex<T> {
    let r = re.exp();
    Complex::new(r * im.cos(), r * im.sin())
}

fn split<T: Real>(z: Complex<Dual<T>>) -> (Complex<T>, Complex<T>) {
    (Complex::new(z.re.v, z.im.v), Complex::new(z.re.d, z.im.d))
}

/// Value and gradient of `f` at `q`.
pub fn value_and_gradient<F: TestFunction + ?Sized, T: Real>(f: &F, q: &[T]) -> (Complex<T>, Vec<Complex<T>>) {
    if q.is_empty() {
        return (f.eval(q), Vec::new());
    }
    let mut grad = Vec::with_capacity(q.len());
    let mut val = Complex::new(T::zero(), T::zero());
    for k in 0..q.len() {
        let qd: Vec<Dual<T>> =
            q.iter().enumerate().map(|(i, &v)| if i == k { Dual::variable(v) } else { Dual::constant(v) }).collect();
        let (v, d) = split(f.eval(&qd));
        val = v;
        grad.push(d);
    }
    (val, grad)
}

/// Gaussian wave packet `exp(−|q − c|²/(2w²) + i k·q)`; on a periodic
/// coordinate the envelope is `exp((cos(q − c) − 1)/w²)` and `k` should be
/// an integer.
#[derive(Debug, Clone)]
pub struct Packet {
    pub center: Vec<f64>,
    pub width: f64,
    pub wave: Vec<f64>,
    pub periodic: bool,
}

impl Packet {
    pub fn new(center: Vec<f64>, width: f64, wave: Vec<f64>) -> Self {
        Packet { center, width, wave, periodic: false }
    }

    pub fn periodic(center: f64, width: f64, wave: f64) -> Self {
        Packet { center: vec![center], width, wave: vec![wave], periodic: true }
    }
}

impl TestFunction for Packet {
    fn eval<T: Real>(&self, q: &[T]) -> Complex<T> {
        let w2 = self.width * self.width;
        let mut env = T::zero();
        let mut ph = T::zero();
        for i in 0..q.len() {
            let d = q[i] - self.center[i];
            env += if self.periodic { (d.cos() - 1.0) / w2 } else { -(d * d) / (2.0 * w2) };
            ph += q[i] * self.wave[i];
        }
        cexp(env, ph)
    }
}

/// The test battery: `count` packets with varied centres, widths and
/// wave numbers, deterministic in `seed`.
pub fn packet_battery(m: usize, count: usize, periodic: bool, seed: u64) -> Vec<Packet> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            if periodic {
                Packet::periodic(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..1.2), rng.gen_range(-2i32..=2) as f64)
            } else {
                Packet::new(
                    (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                    rng.gen_range(0.4..1.2),
                    (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                )
            }
        })
        .collect()
}

/// `ℓ_a` for a fixed orbit label `J`.
#[derive(Debug, Clone)]
pub struct Lrep<'a, O: ?Sized> {
    pub orbit: &'a O,
    pub j: Vec<f64>,
}

pub fn build_lrep<'o, O: OrbitModel + ?Sized>(orbit: &'o O, j: &[f64]) -> Result<Lrep<'o, O>> {
    orbit.require_regular(j)?;
    if orbit.lrep::<f64>(&vec![0.0; orbit.m()], j).is_none() {
        return Err(Error::Unsupported(format!("{}: no λ-representation coefficients", orbit.name())));
    }
    Ok(Lrep { orbit, j: j.to_vec() })
}

impl<'a, O: OrbitModel + ?Sized> Lrep<'a, O> {
    pub fn dim(&self) -> usize {
        self.orbit.transition::<f64>(&vec![0.0; self.m()], &vec![0.0; self.m()], &self.j).len()
    }

    pub fn m(&self) -> usize {
        self.orbit.m()
    }

    pub fn coeffs<T: Real>(&self, q: &[T]) -> LrepCoeffs<T> {
        self.orbit.lrep(q, &lift::<T>(&self.j)).expect("checked in build_lrep")
    }

    /// `(ℓ_a f)(q)`, or `(conj ℓ_a f)(q)` when `conj` is set.
    pub fn apply<F: TestFunction + ?Sized, T: Real>(&self, a: usize, f: &F, q: &[T], conj: bool) -> Complex<T> {
        let k = self.coeffs(q);
        let (v, g) = value_and_gradient(f, q);
        let cj = |z: Complex<T>| if conj { z.conj() } else { z };
        let mut out = cj(k.b[a]) * v;
        for (al, gk) in g.into_iter().enumerate() {
            out = out + cj(k.a[a][al]) * gk;
        }
        out
    }

    pub fn applied<'b, F: TestFunction + ?Sized>(&'b self, a: usize, f: &'b F) -> Applied<'b, 'a, O, F> {
        Applied { rep: self, a, inner: f, conj: false }
    }
}

/// `ℓ_a f` as a test function in its own right.
pub struct Applied<'b, 'a, O: ?Sized, F: ?Sized> {
    pub rep: &'b Lrep<'a, O>,
    pub a: usize,
    pub inner: &'b F,
    pub conj: bool,
}

impl<O: OrbitModel + ?Sized, F: TestFunction + ?Sized> TestFunction for Applied<'_, '_, O, F> {
    fn eval<T: Real>(&self, q: &[T]) -> Complex<T> {
        self.rep.apply(self.a, self.inner, q, self.conj)
    }
}

/// `max |([ℓ_a, ℓ_b] − C_ab^c ℓ_c) f|` over the battery and points.
pub fn commutator_residual<O, F>(rep: &Lrep<O>, alg: &LieAlgebra, battery: &[F], points: &[Vec<f64>]) -> f64
where
    O: OrbitModel + ?Sized,
    F: TestFunction,
{
    let n = alg.dim();
    let mut worst = 0.0f64;
    for f in battery {
        for q in points {
            let single: Vec<C64> = (0..n).map(|c| rep.apply(c, f, q, false)).collect();
            for a in 0..n {
                for b in 0..n {
                    let ab = rep.apply(a, &rep.applied(b, f), q, false);
                    let ba = rep.apply(b, &rep.applied(a, f), q, false);
                    let mut r = ab - ba;
                    for (c, s) in single.iter().enumerate() {
                        r -= s * alg.c(a, b, c);
                    }
                    worst = worst.max(r.norm());
                }
            }
        }
    }
    worst
}

/// Candidate coefficients from `ℓ_a = i f_a(q, π → i∂_q)` with the
/// coefficient to the left of the derivative.
pub fn derive_candidate<O: OrbitModel + ?Sized>(orbit: &O, q: &[f64], j: &[f64]) -> LrepCoeffs<f64> {
    let m = orbit.m();
    let zero = vec![0.0; m];
    let beta = orbit.transition(q, &zero, j);
    let n = beta.len();
    let mut a = vec![Vec::with_capacity(m); n];
    for k in 0..m {
        let mut e = zero.clone();
        e[k] = 1.0;
        let fk = orbit.transition(q, &e, j);
        for (row, (x, y)) in a.iter_mut().zip(fk.iter().zip(&beta)) {
            row.push(C64::new(-(x - y), 0.0));
        }
    }
    LrepCoeffs { a, b: beta.iter().map(|&v| C64::new(0.0, v)).collect() }
}

/// Largest coefficient difference between shipped and derived operators.
pub fn candidate_mismatch<O: OrbitModel + ?Sized>(rep: &Lrep<O>, points: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for q in points {
        let s = rep.coeffs::<f64>(q);
        let d = derive_candidate(rep.orbit, q, &rep.j);
        for (x, y) in s.b.iter().zip(&d.b) {
            worst = worst.max((x - y).norm());
        }
        for (r1, r2) in s.a.iter().zip(&d.a) {
            for (x, y) in r1.iter().zip(r2) {
                worst = worst.max((x - y).norm());
            }
        }
    }
    worst
}

/// Quadrature box on `Q` for a packet battery: one period on periodic
/// coordinates, otherwise wide enough for the envelopes to vanish.
pub fn q_box<O: OrbitModel + ?Sized>(orbit: &O) -> (f64, f64) {
    match orbit.q_period() {
        Some(p) => (-0.5 * p, 0.5 * p),
        None => (-12.0, 12.0),
    }
}

/// `max_a |⟨ℓ_a φ, ψ⟩ + ⟨φ, ℓ_a ψ⟩|` with `⟨u, v⟩ = ∫ conj(u) v ρ dq`.
pub fn hermiticity_residual<O, F, D>(rep: &Lrep<O>, phi: &F, psi: &F, density: D, tol: f64) -> Result<f64>
where
    O: OrbitModel + ?Sized,
    F: TestFunction,
    D: Fn(f64) -> f64,
{
    let n = rep.dim();
    match rep.m() {
        0 => {
            let (u, v) = (phi.eval::<f64>(&[]), psi.eval::<f64>(&[]));
            Ok((0..n)
                .map(|a| {
                    let (la, lb): (C64, C64) = (rep.apply(a, phi, &[], false), rep.apply(a, psi, &[], false));
                    (la.conj() * v + u.conj() * lb).norm()
                })
                .fold(0.0, f64::max))
        }
        1 => {
            let (lo, hi) = q_box(rep.orbit);
            let q = integrate_vec(
                |t: f64| {
                    let z = [t];
                    let (u, v) = (phi.eval::<f64>(&z), psi.eval::<f64>(&z));
                    let w = density(t);
                    let mut out = Vec::with_capacity(2 * n);
                    for a in 0..n {
                        let s = (rep.apply(a, phi, &z, false).conj() * v + u.conj() * rep.apply(a, psi, &z, false)) * w;
                        out.push(s.re);
                        out.push(s.im);
                    }
                    out
                },
                lo,
                hi,
                tol,
            )?;
            Ok((0..n).map(|a| q.value[2 * a].hypot(q.value[2 * a + 1])).fold(0.0, f64::max))
        }
        m => Err(Error::Scope(format!("hermiticity check implemented for m ≤ 1, got {m}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, load_group, load_orbit_model, GroupChart, Orbit};

    #[test]
    fn heisenberg_operators() {
        let o = Orbit::Heisenberg3(Default::default());
        let rep = build_lrep(&o, &[1.5]).unwrap();
        let f = Packet::new(vec![0.2], 0.7, vec![0.9]);
        let q = [0.4];
        let (v, g) = value_and_gradient(&f, &q);
        assert!((rep.apply(0, &f, &q, false) + g[0]).norm() < 1e-15);
        assert!((rep.apply(1, &f, &q, false) - C64::new(0.0, -1.5 * 0.4) * v).norm() < 1e-15);
        assert!((rep.apply(2, &f, &q, false) - C64::new(0.0, 1.5) * v).norm() < 1e-15);
        assert!(build_lrep(&o, &[0.0]).is_err());
        assert!(build_lrep(&Orbit::So3(Default::default()), &[1.0]).is_err());
    }

    #[test]
    fn commutators_close_on_the_algebra() {
        for c in catalog() {
            let Ok(o) = load_orbit_model(&c) else { continue };
            if o.lrep::<f64>(&vec![0.0; o.m()], &vec![1.0; o.r()]).is_none() {
                continue;
            }
            let j = vec![1.3; o.r()];
            let rep = build_lrep(&o, &j).unwrap();
            let battery = packet_battery(o.m(), 20, false, 5);
            let pts = crate::catalog::sample_points(o.m(), 2.0, 50, 6);
            let r = commutator_residual(&rep, c.algebra(), &battery, &pts);
            assert!(r < 1e-8, "{}: {r}", c.name());
            assert!(candidate_mismatch(&rep, &pts) < 1e-14, "{}", c.name());
        }
    }

    #[test]
    fn anti_hermitian_with_lebesgue_measure() {
        let h = load_orbit_model(&load_group("heisenberg3").unwrap()).unwrap();
        let rep = build_lrep(&h, &[0.8]).unwrap();
        let b = packet_battery(1, 6, false, 2);
        for p in b.windows(2) {
            let r = hermiticity_residual(&rep, &p[0], &p[1], |_| 1.0, 1e-12).unwrap();
            assert!(r < 1e-6, "{r}");
            let bad = hermiticity_residual(&rep, &p[0], &p[1], |q| (0.5 * q).exp(), 1e-12).unwrap();
            assert!(bad > 1e-2, "{bad}");
        }
        let e = load_orbit_model(&load_group("euclid2").unwrap()).unwrap();
        let rep = build_lrep(&e, &[1.1]).unwrap();
        let b = packet_battery(1, 6, true, 3);
        for p in b.windows(2) {
            assert!(hermiticity_residual(&rep, &p[0], &p[1], |_| 1.0, 1e-12).unwrap() < 1e-6);
        }
        let a = load_orbit_model(&load_group("abelian_2").unwrap()).unwrap();
        let rep = build_lrep(&a, &[0.5, -2.0]).unwrap();
        let k = Packet::new(vec![], 1.0, vec![]);
        assert_eq!(hermiticity_residual(&rep, &k, &k, |_| 1.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn casimir_element_is_scalar() {
        let h = Orbit::Heisenberg3(Default::default());
        let rep = build_lrep(&h, &[-0.6]).unwrap();
        for f in packet_battery(1, 5, false, 8) {
            for q in [-1.0, 0.0, 0.7] {
                let v = f.eval::<f64>(&[q]);
                assert_eq!(rep.apply(2, &f, &[q], false), C64::new(0.0, -0.6) * v);
            }
        }
    }
}
