//! Momentum mappings on `T*G`, the Lie–Poisson bracket, and pointwise
//! validators for orbit models.
//!
//! Canonical bracket on `T*G`: `{F, G} = ∂_p F · ∂_x G − ∂_x F · ∂_p G`.
//! With this sign `μ_r` is a homomorphism (`+C`) and `μ_l` an
//! anti-homomorphism (`−C`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{poisson_tensor, LieAlgebra, RANK_REL_TOL};
use crate::calculus::jacobian_of;
use crate::catalog::{GroupChart, OrbitModel};
use crate::dual::{Dual, Real};
use crate::error::{Error, Result};
use crate::linalg::{matvec, numeric_rank, Mat};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Self {
        PhasePoint { x, p }
    }
}

fn check_point<C: GroupChart + ?Sized>(chart: &C, x: &[f64], p: &[f64]) -> Result<()> {
    if x.len() != chart.dim() || p.len() != chart.dim() {
        return Err(Error::Input(format!("phase point must have {} + {} components", chart.dim(), chart.dim())));
    }
    if !chart.in_domain(x) {
        return Err(Error::Domain { chart: chart.name().to_string(), point: x.to_vec() });
    }
    Ok(())
}

/// `(μ_r)_a = ξ_a^i(x) p_i`.
pub fn mu_r_generic<C: GroupChart + ?Sized, T: Real>(chart: &C, x: &[T], p: &[T]) -> Vec<T> {
    matvec(&chart.left_fields(x), p)
}

/// `(μ_l)_a = η_a^i(x) p_i`.
pub fn mu_l_generic<C: GroupChart + ?Sized, T: Real>(chart: &C, x: &[T], p: &[T]) -> Vec<T> {
    matvec(&chart.right_fields(x), p)
}

pub fn mu_r<C: GroupChart + ?Sized>(chart: &C, pt: &PhasePoint) -> Result<Vec<f64>> {
    check_point(chart, &pt.x, &pt.p)?;
    Ok(mu_r_generic(chart, &pt.x, &pt.p))
}

pub fn mu_l<C: GroupChart + ?Sized>(chart: &C, pt: &PhasePoint) -> Result<Vec<f64>> {
    check_point(chart, &pt.x, &pt.p)?;
    Ok(mu_l_generic(chart, &pt.x, &pt.p))
}

/// `|μ_l(x,p) − Ad*_x μ_r(x,p)|_∞`.
pub fn check_equivariance<C: GroupChart + ?Sized>(chart: &C, pt: &PhasePoint) -> Result<f64> {
    let r = mu_r(chart, pt)?;
    let l = mu_l(chart, pt)?;
    let ad = matvec(&chart.coadjoint(&pt.x), &r);
    Ok(l.iter().zip(&ad).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Matrix `{F_a, G_b}` of canonical brackets on `T*G` at `(x, p)`, where
/// `F` and `G` take `(x, p)` and return component vectors.
pub fn canonical_bracket_matrix<F, G>(f: F, g: G, x: &[f64], p: &[f64]) -> Mat<f64>
where
    F: Fn(&[Dual<f64>], &[Dual<f64>]) -> Vec<Dual<f64>>,
    G: Fn(&[Dual<f64>], &[Dual<f64>]) -> Vec<Dual<f64>>,
{
    let n = x.len();
    let z: Vec<f64> = x.iter().chain(p).copied().collect();
    let jf = jacobian_of(|z: &[Dual<f64>]| f(&z[..n], &z[n..]), &z);
    let jg = jacobian_of(|z: &[Dual<f64>]| g(&z[..n], &z[n..]), &z);
    darboux_bracket(&jf, &jg, n, false)
}

/// Brackets from Jacobians over `(u, v)` blocks of width `n`.
/// `u_first = false`: `∂_v F ∂_u G − ∂_u F ∂_v G`; otherwise the negative.
fn darboux_bracket(jf: &Mat<f64>, jg: &Mat<f64>, n: usize, u_first: bool) -> Mat<f64> {
    let s = if u_first { -1.0 } else { 1.0 };
    jf.iter()
        .map(|fa| {
            jg.iter()
                .map(|gb| s * (0..n).map(|i| fa[n + i] * gb[i] - fa[i] * gb[n + i]).sum::<f64>())
                .collect()
        })
        .collect()
}

/// Residuals of the three momentum bracket relations at one phase point:
/// `{μ_r,a, μ_r,b} − C μ_r,c`, `{μ_l,a, μ_l,b} + C μ_l,c`, `{μ_r,a, μ_l,b}`.
pub fn momentum_bracket_residuals<C: GroupChart + ?Sized>(chart: &C, pt: &PhasePoint) -> Result<[f64; 3]> {
    check_point(chart, &pt.x, &pt.p)?;
    let alg = chart.algebra();
    let n = chart.dim();
    let r = mu_r_generic(chart, &pt.x, &pt.p);
    let l = mu_l_generic(chart, &pt.x, &pt.p);
    let fr = |x: &[Dual<f64>], p: &[Dual<f64>]| mu_r_generic(chart, x, p);
    let fl = |x: &[Dual<f64>], p: &[Dual<f64>]| mu_l_generic(chart, x, p);
    let rr = canonical_bracket_matrix(fr, fr, &pt.x, &pt.p);
    let ll = canonical_bracket_matrix(fl, fl, &pt.x, &pt.p);
    let rl = canonical_bracket_matrix(fr, fl, &pt.x, &pt.p);
    let mut out = [0.0f64; 3];
    for a in 0..n {
        for b in 0..n {
            let cr: f64 = (0..n).map(|c| alg.c(a, b, c) * r[c]).sum();
            let cl: f64 = (0..n).map(|c| alg.c(a, b, c) * l[c]).sum();
            out[0] = out[0].max((rr[a][b] - cr).abs());
            out[1] = out[1].max((ll[a][b] + cl).abs());
            out[2] = out[2].max(rl[a][b].abs());
        }
    }
    Ok(out)
}

/// `C_ab^c f_c ∂φ/∂f_a ∂ψ/∂f_b`.
pub fn lie_poisson_bracket<P, S>(alg: &LieAlgebra, phi: P, psi: S, f: &[f64]) -> f64
where
    P: Fn(&[Dual<f64>]) -> Dual<f64>,
    S: Fn(&[Dual<f64>]) -> Dual<f64>,
{
    let dphi = &jacobian_of(|z: &[Dual<f64>]| vec![phi(z)], f)[0];
    let dpsi = &jacobian_of(|z: &[Dual<f64>]| vec![psi(z)], f)[0];
    let n = alg.dim();
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                s += alg.c(a, b, c) * f[c] * dphi[a] * dpsi[b];
            }
        }
    }
    s
}

/// `|∇K · B(f)|_∞`: a Casimir is annihilated by the Lie–Poisson tensor.
pub fn casimir_residual<K>(alg: &LieAlgebra, k: K, f: &[f64]) -> Result<f64>
where
    K: Fn(&[Dual<f64>]) -> Dual<f64>,
{
    let grad = &jacobian_of(|z: &[Dual<f64>]| vec![k(z)], f)[0];
    let b = poisson_tensor(alg, f)?;
    let n = alg.dim();
    Ok((0..n).map(|j| (0..n).map(|i| grad[i] * b[i][j]).sum::<f64>().abs()).fold(0.0, f64::max))
}

/// Random `(q, π, J)` triples inside the model's patch with regular labels.
pub fn sample_orbit_points<O: OrbitModel + ?Sized>(orbit: &O, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, r) = (orbit.m(), orbit.r());
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let j: Vec<f64> = (0..r).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        if !orbit.is_regular(&j) || j.iter().any(|v: &f64| v.abs() < 0.3) {
            continue;
        }
        let q: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.5..=1.5)).collect();
        let pi: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        if !orbit.in_patch(&q, &pi, &j) {
            continue;
        }
        out.push((q, pi, j));
    }
    out
}

/// `{f_a, f_b}_(q,π)` at one point, with `{F,G} = ∂_q F ∂_π G − ∂_π F ∂_q G`.
pub fn transition_brackets<O: OrbitModel + ?Sized>(orbit: &O, q: &[f64], pi: &[f64], j: &[f64]) -> Mat<f64> {
    let m = q.len();
    if m == 0 {
        let n = orbit.transition::<f64>(q, pi, j).len();
        return vec![vec![0.0; n]; n];
    }
    let z: Vec<f64> = q.iter().chain(pi).copied().collect();
    let jd: Vec<Dual<f64>> = crate::dual::lift(j);
    let jac = jacobian_of(|z: &[Dual<f64>]| orbit.transition(&z[..m], &z[m..], &jd), &z);
    darboux_bracket(&jac, &jac, m, true)
}

/// Largest `|{f_a, f_b} − C_ab^c f_c|` over sampled orbit points.
pub fn validate_transition<O: OrbitModel + ?Sized>(alg: &LieAlgebra, orbit: &O, samples: usize, seed: u64) -> f64 {
    let n = alg.dim();
    let mut worst = 0.0f64;
    for (q, pi, j) in sample_orbit_points(orbit, samples, seed) {
        let f = orbit.transition(&q, &pi, &j);
        let br = transition_brackets(orbit, &q, &pi, &j);
        for a in 0..n {
            for b in 0..n {
                let cf: f64 = (0..n).map(|c| alg.c(a, b, c) * f[c]).sum();
                let d = (br[a][b] - cf).abs();
                if d > worst || d.is_nan() {
                    worst = d;
                }
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct PolarizationReport {
    pub pass: bool,
    pub dim: usize,
    pub expected_dim: usize,
    /// `max |⟨λ(J), [X, Y]⟩|` over basis pairs and labels.
    pub isotropy_residual: f64,
}

/// Checks `dim 𝔭 = n − ½ rank B(λ(J))` and `⟨λ(J), [X, Y]⟩ = 0` for a
/// subalgebra basis `basis` (rows) at every label in `labels`.
pub fn validate_polarization(alg: &LieAlgebra, basis: &[Vec<f64>], lambdas: &[Vec<f64>]) -> Result<PolarizationReport> {
    let n = alg.dim();
    let dim = numeric_rank(basis, RANK_REL_TOL);
    let mut expected = None;
    let mut iso = 0.0f64;
    for lam in lambdas {
        let rank = numeric_rank(&poisson_tensor(alg, lam)?, RANK_REL_TOL);
        let e = n - rank / 2;
        if expected.is_some_and(|x| x != e) {
            return Err(Error::Regularity("labels lie on orbits of different dimension".into()));
        }
        expected = Some(e);
        for x in basis {
            for y in basis {
                let br = alg.bracket(x, y);
                iso = iso.max(br.iter().zip(lam).map(|(b, l)| b * l).sum::<f64>().abs());
            }
        }
    }
    let expected_dim = expected.unwrap_or(n);
    Ok(PolarizationReport { pass: dim == expected_dim && iso < 1e-10, dim, expected_dim, isotropy_residual: iso })
}
