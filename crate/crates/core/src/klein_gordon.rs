//! The Klein–Gordon operator on a group chart in invariant-field form
//! `H = G^{ab} η_a η_b + c G^{ab} C_a η_b + m² + ζR`, the scalar curvature
//! of the right-invariant metric, the reduced equation in `q′` and exact
//! solutions assembled through the conjugated kernel.

use num_complex::Complex;
use serde::Serialize;

use crate::algebra::unimodularity;
use crate::calculus::ode::{solve, OdeOptions, Trajectory};
use crate::canonical::GeneratingFunction;
use crate::catalog::{sample_points, GroupChart, OrbitModel};
use crate::dual::{lift, seed_axis, Dual, Real};
use crate::error::{Error, Result};
use crate::geodesic::{coordinate_inverse_metric, InvariantMetric};
use crate::lambda_rep::{
    build_lrep, cexp, kernel_density, kernel_phase, transform_at, value_and_gradient, FieldApplied, FourierBox,
    FourierFamily, Lrep, Slice, TestFunction, C64,
};
use crate::linalg::{inverse, Mat};

/// Sign of the `C_a` term: `Δ = G^{ab} η_a η_b + G^{ab} C_a η_b` is the
/// Laplace–Beltrami operator of the right-invariant metric. Fixed against
/// the coordinate oracle on aff1.
pub const C_TERM_SIGN: f64 = 1.0;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KgParams {
    pub mass: f64,
    pub zeta: f64,
}

impl KgParams {
    pub fn new(mass: f64, zeta: f64) -> Result<Self> {
        if !(mass > 0.0) || !zeta.is_finite() {
            return Err(Error::Input(format!("need mass > 0 and finite ζ, got m = {mass}, ζ = {zeta}")));
        }
        Ok(KgParams { mass, zeta })
    }
}

/// Coordinate metric `g_ij` from `g^{ij} = G^{ab} η_a^i η_b^j`.
fn coordinate_metric<C: GroupChart + ?Sized, T: Real>(chart: &C, metric: &InvariantMetric, x: &[T]) -> Result<Mat<T>> {
    inverse(&coordinate_inverse_metric(chart, metric, x))
        .ok_or_else(|| Error::Input(format!("coordinate metric of {} is degenerate", chart.name())))
}

/// `Γ^k_ij` as `gamma[k][i][j]`, with `∂g` from jets.
pub fn christoffel<C: GroupChart + ?Sized, T: Real>(chart: &C, metric: &InvariantMetric, x: &[T]) -> Result<Vec<Mat<T>>> {
    let n = x.len();
    let gi = coordinate_inverse_metric(chart, metric, x);
    let mut dg = vec![vec![vec![T::zero(); n]; n]; n];
    for l in 0..n {
        let g = coordinate_metric(chart, metric, &seed_axis(x, l))?;
        for i in 0..n {
            for j in 0..n {
                dg[l][i][j] = g[i][j].d;
            }
        }
    }
    let mut gamma = vec![vec![vec![T::zero(); n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = T::zero();
                for l in 0..n {
                    s += gi[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                }
                gamma[k][i][j] = s * 0.5;
            }
        }
    }
    Ok(gamma)
}

/// `R = g^{ij} R_ij` from Christoffel symbols and their first derivatives
/// `dgamma[m][k][i][j] = ∂_m Γ^k_ij`.
fn ricci_scalar(gi: &Mat<f64>, gamma: &[Mat<f64>], dgamma: &[Vec<Mat<f64>>]) -> f64 {
    let n = gi.len();
    let mut r = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut ric = 0.0;
            for k in 0..n {
                ric += dgamma[k][k][i][j] - dgamma[j][k][i][k];
                for l in 0..n {
                    ric += gamma[k][k][l] * gamma[l][i][j] - gamma[k][j][l] * gamma[l][i][k];
                }
            }
            r += gi[i][j] * ric;
        }
    }
    r
}

/// Scalar curvature at `x` with second derivatives of `g` from nested jets.
pub fn scalar_curvature_at<C: GroupChart + ?Sized>(chart: &C, metric: &InvariantMetric, x: &[f64]) -> Result<f64> {
    let n = x.len();
    let gamma = christoffel(chart, metric, x)?;
    let mut dgamma = Vec::with_capacity(n);
    for m in 0..n {
        let g = christoffel(chart, metric, &seed_axis(x, m))?;
        dgamma.push(g.iter().map(|mat| mat.iter().map(|row| row.iter().map(|v| v.d).collect()).collect()).collect());
    }
    Ok(ricci_scalar(&coordinate_inverse_metric(chart, metric, x), &gamma, &dgamma))
}

/// Fourth-order central difference of a matrix-valued `f` along axis `m`.
fn central_diff(f: &dyn Fn(&[f64]) -> Result<Mat<f64>>, x: &[f64], m: usize, h: f64) -> Result<Mat<f64>> {
    let at = |s: f64| {
        let mut y = x.to_vec();
        y[m] += s * h;
        f(&y)
    };
    let (p1, m1, p2, m2) = (at(1.0)?, at(-1.0)?, at(2.0)?, at(-2.0)?);
    Ok((0..p1.len())
        .map(|i| (0..p1[i].len()).map(|j| (8.0 * (p1[i][j] - m1[i][j]) - (p2[i][j] - m2[i][j])) / (12.0 * h)).collect())
        .collect())
}

/// Independent check: `R` from finite differences of the coordinate
/// metric, inverted with nalgebra, no jets.
pub fn curvature_oracle<C: GroupChart + ?Sized>(chart: &C, metric: &InvariantMetric, x: &[f64]) -> Result<f64> {
    let n = x.len();
    let g_at = |y: &[f64]| -> Result<Mat<f64>> {
        let gi = coordinate_inverse_metric(chart, metric, y);
        let g = nalgebra::DMatrix::from_fn(n, n, |i, j| gi[i][j])
            .try_inverse()
            .ok_or_else(|| Error::Input("degenerate coordinate metric".into()))?;
        Ok((0..n).map(|i| (0..n).map(|j| g[(i, j)]).collect()).collect())
    };
    // Γ flattened to an (n·n) × n matrix so it can be differenced again
    let gamma_at = |y: &[f64]| -> Result<Mat<f64>> {
        let dg: Vec<Mat<f64>> = (0..n).map(|l| central_diff(&g_at, y, l, 1e-3)).collect::<Result<_>>()?;
        let gi = coordinate_inverse_metric(chart, metric, y);
        let mut out = vec![vec![0.0; n]; n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let s: f64 = (0..n).map(|l| gi[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j])).sum();
                    out[k * n + i][j] = 0.5 * s;
                }
            }
        }
        Ok(out)
    };
    let unflatten = |flat: Mat<f64>| -> Vec<Mat<f64>> { (0..n).map(|k| flat[k * n..(k + 1) * n].to_vec()).collect() };
    let gamma = unflatten(gamma_at(x)?);
    let dgamma: Vec<Vec<Mat<f64>>> =
        (0..n).map(|m| central_diff(&gamma_at, x, m, 1e-2).map(unflatten)).collect::<Result<_>>()?;
    Ok(ricci_scalar(&coordinate_inverse_metric(chart, metric, x), &gamma, &dgamma))
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub chart: String,
    /// `R` at the identity.
    pub r: f64,
    /// `max |R(x) − R(e)|` over the sample points.
    pub spread: f64,
    pub samples: usize,
}

/// `R` at the identity, with constancy checked at `samples` chart points;
/// a relative spread above `1e−6` is a chart defect.
pub fn scalar_curvature<C: GroupChart + ?Sized>(
    chart: &C,
    metric: &InvariantMetric,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<CurvatureReport> {
    let r = scalar_curvature_at(chart, metric, &chart.identity())?;
    let mut spread: f64 = 0.0;
    for x in sample_points(chart.dim(), radius, samples, seed) {
        spread = spread.max((scalar_curvature_at(chart, metric, &x)? - r).abs());
    }
    if spread > 1e-6 * r.abs().max(1.0) {
        return Err(Error::ChartDefect(format!("{}: scalar curvature varies by {spread} around {r}", chart.name())));
    }
    Ok(CurvatureReport { chart: chart.name().to_string(), r, spread, samples })
}

/// `H` on a chart with fixed metric and parameters. `r` is computed, never
/// supplied.
#[derive(Debug, Clone)]
pub struct KgOperator<'a, C: ?Sized> {
    pub chart: &'a C,
    pub metric: &'a InvariantMetric,
    pub params: KgParams,
    pub r: f64,
    /// `C_a = C_ab^b`.
    pub trace: Vec<f64>,
    pub c_sign: f64,
}

pub fn kg_operator<'a, C: GroupChart + ?Sized>(
    chart: &'a C,
    metric: &'a InvariantMetric,
    params: KgParams,
) -> Result<KgOperator<'a, C>> {
    if metric.dim() != chart.dim() {
        return Err(Error::Input(format!("metric is {}×{}, chart has dimension {}", metric.dim(), metric.dim(), chart.dim())));
    }
    let r = scalar_curvature(chart, metric, 0.5, 20, 0x5eed)?.r;
    let (_, trace) = unimodularity(chart.algebra());
    Ok(KgOperator { chart, metric, params, r, trace, c_sign: C_TERM_SIGN })
}

/// The three pieces of `Hψ(x)`.
#[derive(Debug, Clone, Copy)]
pub struct KgParts<T> {
    pub second: Complex<T>,
    pub first: Complex<T>,
    pub zeroth: Complex<T>,
}

impl<T: Real> KgParts<T> {
    pub fn total(&self) -> Complex<T> {
        self.second + self.first + self.zeroth
    }
}

impl<C: GroupChart + ?Sized> KgOperator<'_, C> {
    pub fn potential(&self) -> f64 {
        self.params.mass * self.params.mass + self.params.zeta * self.r
    }

    pub fn parts<F: TestFunction + ?Sized, T: Real>(&self, psi: &F, x: &[T]) -> KgParts<T> {
        let n = self.chart.dim();
        let g = &self.metric.g_inv;
        let eta = self.chart.right_fields(x);
        let zero = Complex::new(T::zero(), T::zero());
        let (mut second, mut first) = (zero, zero);
        let (val, _) = value_and_gradient(psi, x);
        for b in 0..n {
            let eb = FieldApplied { chart: self.chart, a: b, inner: psi, right: true };
            let (eb_val, eb_grad) = value_and_gradient(&eb, x);
            for a in 0..n {
                if g[a][b] == 0.0 {
                    continue;
                }
                let mut eab = zero;
                for (gr, e) in eb_grad.iter().zip(&eta[a]) {
                    eab = eab + gr * *e;
                }
                second = second + eab * T::cst(g[a][b]);
                if self.trace[a] != 0.0 {
                    first = first + eb_val * T::cst(self.c_sign * g[a][b] * self.trace[a]);
                }
            }
        }
        KgParts { second, first, zeroth: val * T::cst(self.potential()) }
    }

    pub fn apply<F: TestFunction + ?Sized, T: Real>(&self, psi: &F, x: &[T]) -> Complex<T> {
        self.parts(psi, x).total()
    }

    /// `|Hψ|` and the local scale `|second| + |first| + |zeroth|` it is
    /// measured against.
    pub fn residual<F: TestFunction + ?Sized>(&self, psi: &F, x: &[f64]) -> (f64, f64) {
        let p = self.parts(psi, x);
        (p.total().norm(), p.second.norm() + p.first.norm() + p.zeroth.norm())
    }

    /// `g^{ij}(∂_i∂_jψ − Γ^k_ij ∂_kψ) + (m² + ζR)ψ` in chart coordinates.
    pub fn laplace_beltrami_oracle<F: TestFunction + ?Sized>(&self, psi: &F, x: &[f64]) -> Result<C64> {
        let n = x.len();
        let gi = coordinate_inverse_metric(self.chart, self.metric, x);
        let gamma = christoffel(self.chart, self.metric, x)?;
        let (val, grad) = value_and_gradient(psi, x);
        let mut out = val * self.potential();
        for i in 0..n {
            let (_, gd) = value_and_gradient(psi, &seed_axis(x, i));
            for j in 0..n {
                let hess = C64::new(gd[j].re.d, gd[j].im.d);
                let mut conn = C64::new(0.0, 0.0);
                for k in 0..n {
                    conn += grad[k] * gamma[k][i][j];
                }
                out += (hess - conn) * gi[i][j];
            }
        }
        Ok(out)
    }
}

/// `Hψ` as a test function, for composing with further fields.
pub struct KgApplied<'b, 'a, C: ?Sized, F: ?Sized> {
    pub op: &'b KgOperator<'a, C>,
    pub inner: &'b F,
}

impl<C: GroupChart + ?Sized, F: TestFunction + ?Sized> TestFunction for KgApplied<'_, '_, C, F> {
    fn eval<T: Real>(&self, x: &[T]) -> Complex<T> {
        self.op.apply(self.inner, x)
    }
}

/// `max_a |H ξ_a ψ − ξ_a H ψ| / scale` at `x`.
pub fn symmetry_residual<C: GroupChart + ?Sized, F: TestFunction + ?Sized>(op: &KgOperator<C>, psi: &F, x: &[f64]) -> f64 {
    let hpsi = KgApplied { op, inner: psi };
    let (_, scale) = op.residual(psi, x);
    let mut worst: f64 = 0.0;
    for a in 0..op.chart.dim() {
        let xi_psi = FieldApplied { chart: op.chart, a, inner: psi, right: false };
        let lhs: C64 = op.apply(&xi_psi, x);
        let rhs: C64 = FieldApplied { chart: op.chart, a, inner: &hpsi, right: false }.eval(x);
        worst = worst.max((lhs - rhs).norm() / scale.max(1e-300));
    }
    worst
}

/// `G^{ab} conj ℓ_a conj ℓ_b + m² + ζR` for one orbit label, as a
/// differential operator in `q′`.
#[derive(Debug)]
pub struct ReducedKg<'a, O: ?Sized> {
    pub rep: Lrep<'a, O>,
    pub metric: InvariantMetric,
    pub potential: f64,
}

impl<O: ?Sized> Clone for ReducedKg<'_, O> {
    fn clone(&self) -> Self {
        let rep = Lrep { orbit: self.rep.orbit, j: self.rep.j.clone() };
        ReducedKg { rep, metric: self.metric.clone(), potential: self.potential }
    }
}

pub fn reduced_kg<'a, C, O>(
    op: &KgOperator<C>,
    orbit: &'a O,
    j: &[f64],
) -> Result<ReducedKg<'a, O>>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    if op.trace.iter().any(|&c| c != 0.0) {
        return Err(Error::Scope(format!(
            "{} is not unimodular (C_a = {:?}); the reduction needs a unimodular group",
            op.chart.name(),
            op.trace
        )));
    }
    if orbit.m() > 1 {
        return Err(Error::Scope(format!("reduced equation in {} variables is not an ODE", orbit.m())));
    }
    Ok(ReducedKg { rep: build_lrep(orbit, j)?, metric: op.metric.clone(), potential: op.potential() })
}

impl<O: OrbitModel + ?Sized> ReducedKg<'_, O> {
    /// `(p₂, p₁, p₀)` with the operator `p₂ ∂² + p₁ ∂ + p₀`; for `m = 0` only
    /// `p₀` is nonzero.
    pub fn coefficients(&self, q: &[f64]) -> [C64; 3] {
        let g = &self.metric.g_inv;
        let n = g.len();
        let k = self.rep.coeffs::<f64>(q);
        let zero = C64::new(0.0, 0.0);
        let (mut p2, mut p1, mut p0) = (zero, zero, self.potential.into());
        if q.is_empty() {
            for a in 0..n {
                for b in 0..n {
                    p0 += k.b[a].conj() * k.b[b].conj() * g[a][b];
                }
            }
            return [p2, p1, p0];
        }
        let kd = self.rep.coeffs::<Dual<f64>>(&seed_axis(q, 0));
        let d = |z: Complex<Dual<f64>>| C64::new(z.re.d, z.im.d);
        for a in 0..n {
            for b in 0..n {
                if g[a][b] == 0.0 {
                    continue;
                }
                let (aa, ab, ba, bb) = (k.a[a][0].conj(), k.a[b][0].conj(), k.b[a].conj(), k.b[b].conj());
                let (dab, dbb) = (d(kd.a[b][0]).conj(), d(kd.b[b]).conj());
                p2 += aa * ab * g[a][b];
                p1 += (aa * dab + aa * bb + ba * ab) * g[a][b];
                p0 += (aa * dbb + ba * bb) * g[a][b];
            }
        }
        [p2, p1, p0]
    }

    pub fn apply<F: TestFunction + ?Sized>(&self, f: &F, q: &[f64]) -> C64 {
        let [p2, p1, p0] = self.coefficients(q);
        let (v, g) = value_and_gradient(f, q);
        if q.is_empty() {
            return p0 * v;
        }
        let (_, gd) = value_and_gradient(f, &seed_axis(q, 0));
        p2 * C64::new(gd[0].re.d, gd[0].im.d) + p1 * g[0] + p0 * v
    }
}

/// General solution of the reduced equation through `(φ(q₀), φ′(q₀))`,
/// integrated both ways over `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct ReducedSolution<'a, O: ?Sized> {
    pub kg: ReducedKg<'a, O>,
    pub q0: f64,
    pub lo: f64,
    pub hi: f64,
    value: C64,
    forward: Option<Trajectory>,
    backward: Option<Trajectory>,
}

pub fn solve_reduced<'a, O: OrbitModel + ?Sized>(
    kg: &ReducedKg<'a, O>,
    q0: f64,
    phi0: C64,
    dphi0: C64,
    span: (f64, f64),
    tol: f64,
) -> Result<ReducedSolution<'a, O>> {
    if kg.rep.m() == 0 {
        let p0 = kg.coefficients(&[])[2];
        if p0.norm() > 1e-9 * kg.potential.abs().max(1.0) {
            return Err(Error::Input(format!("λ is off the mass shell: reduced relation leaves {p0}")));
        }
        return Ok(ReducedSolution { kg: kg.clone(), q0, lo: f64::NEG_INFINITY, hi: f64::INFINITY, value: phi0, forward: None, backward: None });
    }
    let (lo, hi) = span;
    if !(lo <= q0 && q0 <= hi) {
        return Err(Error::Input(format!("q′₀ = {q0} outside [{lo}, {hi}]")));
    }
    if kg.coefficients(&[q0])[0].norm() < 1e-12 {
        return Err(Error::Input("leading coefficient of the reduced equation vanishes".into()));
    }
    let field = |t: f64, y: &[f64]| {
        let [p2, p1, p0] = kg.coefficients(&[t]);
        let (phi, dphi) = (C64::new(y[0], y[1]), C64::new(y[2], y[3]));
        let dd = -(p1 * dphi + p0 * phi) / p2;
        vec![y[2], y[3], dd.re, dd.im]
    };
    let y0 = [phi0.re, phi0.im, dphi0.re, dphi0.im];
    let opts = OdeOptions::with_tol(tol);
    let forward = solve(field, |_| true, &y0, q0, hi, opts)?;
    let backward = solve(field, |_| true, &y0, q0, lo, opts)?;
    Ok(ReducedSolution { kg: kg.clone(), q0, lo, hi, value: phi0, forward: Some(forward), backward: Some(backward) })
}

impl<O: OrbitModel + ?Sized> ReducedSolution<'_, O> {
    pub fn covers(&self, q: f64) -> bool {
        (self.lo..=self.hi).contains(&q)
    }

    /// `(φ, φ′, φ″)` at `q`, the last from the equation itself.
    pub fn jet(&self, q: f64) -> [C64; 3] {
        let (Some(f), Some(b)) = (&self.forward, &self.backward) else {
            return [self.value, 0.0.into(), 0.0.into()];
        };
        let y = if q >= self.q0 { f.at(q) } else { b.at(q) };
        let (phi, dphi) = (C64::new(y[0], y[1]), C64::new(y[2], y[3]));
        let [p2, p1, p0] = self.kg.coefficients(&[q]);
        [phi, dphi, -(p1 * dphi + p0 * phi) / p2]
    }
}

impl<O: OrbitModel + ?Sized> TestFunction for ReducedSolution<'_, O> {
    /// Exact through second order in the jet directions.
    fn eval<T: Real>(&self, q: &[T]) -> Complex<T> {
        let c = |z: C64| Complex::new(T::cst(z.re), T::cst(z.im));
        if q.is_empty() {
            return c(self.value);
        }
        let t = q[0].re();
        let [v, d1, d2] = self.jet(t);
        let h = q[0] - T::cst(t);
        c(v) + c(d1) * h + c(d2) * (h * h * 0.5)
    }
}

/// One `λ` component of a synthesized solution.
#[derive(Debug, Clone)]
pub struct Component<'a, O: ?Sized> {
    pub weight: C64,
    pub solution: ReducedSolution<'a, O>,
}

/// `ψ(x) = Σ w ρ(x, q₀) e^{−iΦ(x, q₀; λ)} φ_λ(x q₀)`.
#[derive(Debug, Clone)]
pub struct Synthesized<'a, C: ?Sized, O: ?Sized> {
    pub gen: GeneratingFunction<'a, C, O>,
    pub q0: Vec<f64>,
    pub components: Vec<Component<'a, O>>,
}

pub fn synthesize<'a, C, O>(
    gen: GeneratingFunction<'a, C, O>,
    q0: &[f64],
    components: Vec<Component<'a, O>>,
) -> Result<Synthesized<'a, C, O>>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    if components.is_empty() {
        return Err(Error::Input("no components to synthesize".into()));
    }
    if q0.len() != gen.orbit.m() {
        return Err(Error::Input(format!("q₀ has {} entries, orbit needs {}", q0.len(), gen.orbit.m())));
    }
    Ok(Synthesized { gen, q0: q0.to_vec(), components })
}

impl<C: GroupChart + ?Sized, O: OrbitModel + ?Sized> Synthesized<'_, C, O> {
    /// Fails with a coverage error if some `x q₀` leaves a reduced solution's
    /// integration span.
    pub fn check_coverage(&self, xs: &[Vec<f64>]) -> Result<()> {
        for x in xs {
            let xq = self.gen.point_map(x, &self.q0);
            if let Some(&v) = xq.first() {
                if let Some(c) = self.components.iter().find(|c| !c.solution.covers(v)) {
                    return Err(Error::Coverage(format!(
                        "x q₀ = {v} at x = {x:?} lies outside [{}, {}]",
                        c.solution.lo, c.solution.hi
                    )));
                }
            }
        }
        Ok(())
    }
}

impl<C: GroupChart + ?Sized, O: OrbitModel + ?Sized> TestFunction for Synthesized<'_, C, O> {
    fn eval<T: Real>(&self, x: &[T]) -> Complex<T> {
        let q0 = lift::<T>(&self.q0);
        let rho = kernel_density(&self.gen, x, &q0);
        let xq = self.gen.point_map(x, &q0);
        let mut out = Complex::new(T::zero(), T::zero());
        for c in &self.components {
            let phase = kernel_phase(&self.gen, x, &q0, &c.solution.kg.rep.j).unwrap_or_else(|_| T::cst(f64::NAN));
            let w = Complex::new(T::cst(c.weight.re), T::cst(c.weight.im));
            out = out + cexp(T::zero(), -phase) * c.solution.eval(&xq) * rho * w;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KgResiduals {
    pub samples: usize,
    pub max_abs: f64,
    /// `max |Hψ| / scale`.
    pub max_relative: f64,
}

pub fn kg_residuals<C, F>(op: &KgOperator<C>, psi: &F, xs: &[Vec<f64>]) -> KgResiduals
where
    C: GroupChart + ?Sized,
    F: TestFunction + ?Sized,
{
    let mut out = KgResiduals { samples: xs.len(), max_abs: 0.0, max_relative: 0.0 };
    for x in xs {
        let (r, s) = op.residual(psi, x);
        out.max_abs = out.max_abs.max(r);
        out.max_relative = out.max_relative.max(r / s.max(1e-300));
    }
    out
}

/// `max |(Hψ)^(q, q′) − K_{q′} ψ̂(q, q′)|` on h₃, where `K` is the reduced
/// operator acting on `q′`.
pub fn kg_intertwining_residual<C, O, F>(
    op: &KgOperator<C>,
    kg: &ReducedKg<O>,
    psi: &F,
    samples: &[(f64, f64)],
    bx: &FourierBox,
) -> f64
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
    F: TestFunction + ?Sized,
{
    let fam = FourierFamily::Heisenberg;
    let lam = kg.rep.j.clone();
    let hpsi = KgApplied { op, inner: psi };
    let mut worst: f64 = 0.0;
    for &(q, qp) in samples {
        let lhs: C64 = transform_at(fam, &hpsi, &[q], &[qp], &lam, bx);
        let slice = Slice { family: fam, psi, fixed: vec![q], vary_prime: true, lambda: lam.clone(), bx: *bx };
        worst = worst.max((lhs - kg.apply(&slice, &[qp])).norm());
    }
    worst
}
