//! The generating function `S(x; q, π′; J)` and the canonical transformation
//! `(x, p) ↦ (q, π, q′, π′, τ, J)` it induces.
//!
//! `S = q·π′ + ∫_e^x f_a(x̃q, π′; J) σ^a(x̃)` along the straight coordinate
//! path from the identity, so that `dS = p dx + π dq + q′ dπ′ + τ dJ` and
//! `dp∧dx = dq∧dπ + dπ′∧dq′ + dJ∧dτ`.

use serde::Serialize;

use crate::calculus::{antisymmetric_part_max, jacobian_of, line_integral_generic};
use crate::catalog::{GroupChart, OrbitModel};
use crate::dual::{lift, Dual, Real};
use crate::error::{Error, Result};
use crate::linalg::{inverse, matvec, re_vec, transpose, Mat};
use crate::poisson::{mu_l_generic, mu_r_generic, PhasePoint};

pub const DEFAULT_QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct GeneratingFunction<'a, C: ?Sized, O: ?Sized> {
    pub chart: &'a C,
    pub orbit: &'a O,
    pub tol: f64,
    /// Add `q·π′` so that `x = e` gives the identity transformation.
    /// Switched off only by negative controls.
    pub anchor: bool,
}

impl<'a, C: GroupChart + ?Sized, O: OrbitModel + ?Sized> GeneratingFunction<'a, C, O> {
    pub fn new(chart: &'a C, orbit: &'a O) -> Result<Self> {
        if orbit.point_map::<f64>(&chart.identity(), &vec![0.0; orbit.m()]).is_none() {
            return Err(Error::Unsupported(format!(
                "{}: orbit model has no real invariant polarization, so no generating function",
                orbit.name()
            )));
        }
        if 2 * orbit.m() + orbit.r() != chart.dim() {
            return Err(Error::Internal(format!("{}: 2m + r != n", orbit.name())));
        }
        Ok(GeneratingFunction { chart, orbit, tol: DEFAULT_QUAD_TOL, anchor: true })
    }

    pub fn point_map<T: Real>(&self, x: &[T], q: &[T]) -> Vec<T> {
        self.orbit.point_map(x, q).expect("checked in constructor")
    }

    /// The closed 1-form `f_a(x̃q, π′; J) σ^a_i(x̃)` on the group.
    pub fn form<T: Real>(&self, xt: &[T], q: &[T], pip: &[T], j: &[T]) -> Vec<T> {
        let f = self.orbit.transition(&self.point_map(xt, q), pip, j);
        matvec(&transpose(&self.chart.right_forms(xt)), &f)
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.chart.dim() {
            return Err(Error::Input(format!("expected {} group coordinates", self.chart.dim())));
        }
        if !self.chart.in_domain(x) {
            return Err(Error::Domain { chart: self.chart.name().to_string(), point: x.to_vec() });
        }
        Ok(())
    }

    fn constant<T: Real>(&self, q: &[T], pip: &[T]) -> T {
        if self.anchor {
            q.iter().zip(pip).map(|(&a, &b)| a * b).sum()
        } else {
            T::zero()
        }
    }

    /// `S` along a polygonal path through `waypoints` (the first must be
    /// the identity). Returns the value and the quadrature error estimate.
    pub fn eval_along<T: Real>(&self, waypoints: &[Vec<T>], q: &[T], pip: &[T], j: &[T]) -> Result<(T, f64)> {
        for w in waypoints {
            self.check_domain(&re_vec(w))?;
        }
        let mut s = self.constant(q, pip);
        let mut err = 0.0;
        for seg in waypoints.windows(2) {
            let (v, e) = line_integral_generic(|xt: &[T]| self.form(xt, q, pip, j), &seg[0], &seg[1], self.tol)?;
            s += v;
            err += e;
        }
        Ok((s, err))
    }

    pub fn eval_generic<T: Real>(&self, x: &[T], q: &[T], pip: &[T], j: &[T]) -> Result<(T, f64)> {
        let e: Vec<T> = lift(&self.chart.identity());
        self.eval_along(&[e, x.to_vec()], q, pip, j)
    }

    pub fn eval(&self, x: &[f64], q: &[f64], pip: &[f64], j: &[f64]) -> Result<f64> {
        Ok(self.eval_generic(x, q, pip, j)?.0)
    }

    /// Gradient of `S` with respect to `(x, q, π′, J)`, concatenated.
    pub fn gradient(&self, x: &[f64], q: &[f64], pip: &[f64], j: &[f64]) -> Result<Vec<f64>> {
        let z: Vec<f64> = [x, q, pip, j].concat();
        let (n, m) = (x.len(), q.len());
        let mut g = Vec::with_capacity(z.len());
        for k in 0..z.len() {
            let zd: Vec<Dual<f64>> = z
                .iter()
                .enumerate()
                .map(|(i, &v)| if i == k { Dual::variable(v) } else { Dual::constant(v) })
                .collect();
            let (s, _) = self.eval_generic(&zd[..n], &zd[n..n + m], &zd[n + m..n + 2 * m], &zd[n + 2 * m..])?;
            g.push(s.d);
        }
        Ok(g)
    }

    /// Max antisymmetric part of the Jacobian of the 1-form at `xt`.
    pub fn closedness_residual(&self, xt: &[f64], q: &[f64], pip: &[f64], j: &[f64]) -> f64 {
        let (qd, pd, jd): (Vec<Dual<f64>>, Vec<Dual<f64>>, Vec<Dual<f64>>) = (lift(q), lift(pip), lift(j));
        let jac = jacobian_of(|z: &[Dual<f64>]| self.form(z, &qd, &pd, &jd), xt);
        antisymmetric_part_max(&jac)
    }

    /// `|S_straight − S_staircase|`, the staircase moving one coordinate
    /// at a time.
    pub fn path_discrepancy(&self, x: &[f64], q: &[f64], pip: &[f64], j: &[f64]) -> Result<(f64, f64)> {
        let e = self.chart.identity();
        let mut way = vec![e.clone()];
        let mut cur = e;
        for i in 0..x.len() {
            cur[i] = x[i];
            way.push(cur.clone());
        }
        let (a, ea) = self.eval_generic(x, q, pip, j)?;
        let (b, eb) = self.eval_along(&way, q, pip, j)?;
        Ok(((a - b).abs(), ea + eb))
    }
}

/// Least-squares `π` with `f(q, π; J) ≈ target`; exact for π-affine models.
pub fn solve_pi<O: OrbitModel + ?Sized, T: Real>(orbit: &O, q: &[T], target: &[T], j: &[T]) -> Result<Vec<T>> {
    let m = orbit.m();
    if m == 0 {
        return Ok(Vec::new());
    }
    let zero = vec![T::zero(); m];
    let b = orbit.transition(q, &zero, j);
    let cols: Vec<Vec<T>> = (0..m)
        .map(|k| {
            let mut e = zero.clone();
            e[k] = T::one();
            orbit.transition(q, &e, j).iter().zip(&b).map(|(&u, &v)| u - v).collect()
        })
        .collect();
    let n = b.len();
    let normal: Mat<T> = (0..m).map(|k| (0..m).map(|l| (0..n).map(|a| cols[k][a] * cols[l][a]).sum()).collect()).collect();
    let rhs: Vec<T> = (0..m).map(|k| (0..n).map(|a| cols[k][a] * (target[a] - b[a])).sum()).collect();
    let inv = inverse(&normal).ok_or_else(|| Error::Inversion("π-coefficients are degenerate".into()))?;
    Ok(matvec(&inv, &rhs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalPoint {
    pub q: Vec<f64>,
    pub pi: Vec<f64>,
    pub q_prime: Vec<f64>,
    pub pi_prime: Vec<f64>,
    pub j: Vec<f64>,
    pub tau: Vec<f64>,
}

impl CanonicalPoint {
    /// `(q, π, q′, π′, τ, J)`.
    pub fn flatten(&self) -> Vec<f64> {
        [&self.q[..], &self.pi, &self.q_prime, &self.pi_prime, &self.tau, &self.j].concat()
    }
}

/// The transform as a flat vector `(q, π, q′, π′, τ, J)`, generic so that
/// its Jacobian can be taken with jets.
pub fn forward_generic<C, O, T>(gen: &GeneratingFunction<C, O>, x: &[T], p: &[T]) -> Result<Vec<T>>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
    T: Real,
{
    let orbit = gen.orbit;
    let mr = mu_r_generic(gen.chart, x, p);
    let ml = mu_l_generic(gen.chart, x, p);
    let (q, pi, j) = orbit.invert(&mr)?;
    orbit.require_regular(&re_vec(&j))?;
    let qp = gen.point_map(x, &q);
    let pip = solve_pi(orbit, &qp, &ml, &j)?;
    let lx: Vec<Dual<T>> = x.iter().map(|&v| Dual::constant(v)).collect();
    let lq: Vec<Dual<T>> = q.iter().map(|&v| Dual::constant(v)).collect();
    let lp: Vec<Dual<T>> = pip.iter().map(|&v| Dual::constant(v)).collect();
    let mut tau = Vec::with_capacity(j.len());
    for k in 0..j.len() {
        let jd: Vec<Dual<T>> =
            j.iter().enumerate().map(|(i, &v)| if i == k { Dual::variable(v) } else { Dual::constant(v) }).collect();
        tau.push(gen.eval_generic(&lx, &lq, &lp, &jd)?.0.d);
    }
    Ok([q, pi, qp, pip, tau, j].concat())
}

pub fn forward_transform<C, O>(gen: &GeneratingFunction<C, O>, pt: &PhasePoint) -> Result<CanonicalPoint>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    gen.check_domain(&pt.x)?;
    let v = forward_generic(gen, &pt.x, &pt.p)?;
    let (m, r) = (gen.orbit.m(), gen.orbit.r());
    let take = |k: usize, len: usize| v[k..k + len].to_vec();
    Ok(CanonicalPoint {
        q: take(0, m),
        pi: take(m, m),
        q_prime: take(2 * m, m),
        pi_prime: take(3 * m, m),
        tau: take(4 * m, r),
        j: take(4 * m + r, r),
    })
}

/// `p_i = f_a(xq, π′; J) σ^a_i(x)`, the first relation of the transform.
pub fn reconstruct_p<C, O>(gen: &GeneratingFunction<C, O>, x: &[f64], cp: &CanonicalPoint) -> Vec<f64>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    gen.form(x, &cp.q, &cp.pi_prime, &cp.j)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Residuals {
    /// `|∂S/∂q − π|`.
    pub pi: f64,
    /// `|∂S/∂π′ − q′|`.
    pub q_prime_plus: f64,
    /// `|∂S/∂π′ + q′|`.
    pub q_prime_minus: f64,
}

/// Lemma residuals at `(x, q, π′, J)`, with `q′ = xq` and `π` fixed by
/// `Ad*_x f(q, π) = f(q′, π′)`.
pub fn lemma1_residuals<C, O>(gen: &GeneratingFunction<C, O>, x: &[f64], q: &[f64], pip: &[f64], j: &[f64]) -> Result<Lemma1Residuals>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    let orbit = gen.orbit;
    orbit.require_regular(j)?;
    let qp = gen.point_map(x, q);
    let back = matvec(&gen.chart.coadjoint(&gen.chart.inverse(x)), &orbit.transition(&qp, pip, j));
    let pi = solve_pi(orbit, q, &back, j)?;
    let g = gen.gradient(x, q, pip, j)?;
    let (n, m) = (x.len(), q.len());
    let mut out = Lemma1Residuals { pi: 0.0, q_prime_plus: 0.0, q_prime_minus: 0.0 };
    for k in 0..m {
        out.pi = out.pi.max((g[n + k] - pi[k]).abs());
        out.q_prime_plus = out.q_prime_plus.max((g[n + m + k] - qp[k]).abs());
        out.q_prime_minus = out.q_prime_minus.max((g[n + m + k] + qp[k]).abs());
    }
    Ok(out)
}

/// Sign of the `q′` relation that fits every sample, with its worst residual.
pub fn resolve_q_prime_sign(res: &[Lemma1Residuals]) -> (f64, f64) {
    let plus = res.iter().map(|r| r.q_prime_plus).fold(0.0, f64::max);
    let minus = res.iter().map(|r| r.q_prime_minus).fold(0.0, f64::max);
    if plus <= minus {
        (1.0, plus)
    } else {
        (-1.0, minus)
    }
}

/// Orientation of each 2-form block in the new coordinates, as the sign
/// `s` in `s · d(first) ∧ d(second)`.
#[derive(Debug, Clone, Serialize)]
pub struct SymplecticReport {
    pub residual: f64,
    pub blocks: Vec<(String, f64)>,
}

/// Canonical matrix of `Σ s_k du_k ∧ dv_k` for `(u, v)` blocks of width `w`
/// placed at `offset`.
fn place_block(om: &mut Mat<f64>, offset: usize, w: usize, s: f64) {
    for i in 0..w {
        om[offset + i][offset + w + i] = s;
        om[offset + w + i][offset + i] = -s;
    }
}

/// `|Mᵀ Ω_new M − Ω_old|_max`, `M` the jet Jacobian of the transform.
pub fn symplectic_check<C, O>(gen: &GeneratingFunction<C, O>, pt: &PhasePoint) -> Result<SymplecticReport>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    gen.check_domain(&pt.x)?;
    let n = pt.x.len();
    let (m, r) = (gen.orbit.m(), gen.orbit.r());
    let z: Vec<f64> = [&pt.x[..], &pt.p].concat();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
    for k in 0..2 * n {
        let zd: Vec<Dual<f64>> =
            z.iter().enumerate().map(|(i, &v)| if i == k { Dual::variable(v) } else { Dual::constant(v) }).collect();
        let out = forward_generic(gen, &zd[..n], &zd[n..])?;
        cols.push(out.iter().map(|d| d.d).collect());
    }
    let jac = transpose(&cols);

    // dp∧dx = dq∧dπ + dπ′∧dq′ + dJ∧dτ
    let mut old = vec![vec![0.0; 2 * n]; 2 * n];
    place_block(&mut old, 0, n, -1.0);
    let mut new = vec![vec![0.0; 2 * n]; 2 * n];
    place_block(&mut new, 0, m, 1.0);
    place_block(&mut new, 2 * m, m, -1.0);
    place_block(&mut new, 4 * m, r, -1.0);

    let mut residual = 0.0f64;
    for a in 0..2 * n {
        for b in 0..2 * n {
            let mut s = 0.0;
            for i in 0..2 * n {
                for k in 0..2 * n {
                    s += jac[i][a] * new[i][k] * jac[k][b];
                }
            }
            residual = residual.max((s - old[a][b]).abs());
        }
    }
    Ok(SymplecticReport {
        residual,
        blocks: vec![("dq^dpi".into(), 1.0), ("dq'^dpi'".into(), -1.0), ("dtau^dJ".into(), -1.0)],
    })
}
