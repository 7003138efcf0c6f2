//! Delta-supported matrix elements
//! `D_{qq′}(x) = ρ(x, q) e^{iΦ(x, q)} δ(q′ − xq)` with `Φ = −S(x; q, π′ = 0)`.

use num_complex::Complex;
use serde::Serialize;

use super::{cexp, Lrep, TestFunction, C64};
use crate::canonical::GeneratingFunction;
use crate::catalog::{GroupChart, OrbitModel};
use crate::dual::{lift, Dual, Real};
use crate::error::{Error, Result};
use crate::linalg::det_generic;

#[derive(Debug, Clone, Serialize)]
pub struct KernelElement {
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    /// Support of the delta, `q′ = xq`.
    pub q_prime: Vec<f64>,
    pub phase: f64,
    /// `|det ∂(xq)/∂q|^{−1/2}`.
    pub density: f64,
    /// `|∂S/∂π′ − xq|`: the point map read off `S` against the coadjoint
    /// action.
    pub point_map_defect: f64,
}

/// `Φ(x, q) = −S(x; q, 0; J)`.
pub fn kernel_phase<C, O, T>(gen: &GeneratingFunction<C, O>, x: &[T], q: &[T], j: &[f64]) -> Result<T>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
    T: Real,
{
    let zero = vec![T::zero(); q.len()];
    Ok(-gen.eval_generic(x, q, &zero, &lift::<T>(j))?.0)
}

/// `|det ∂(xq)/∂q|^{−1/2}`.
pub fn kernel_density<C, O, T>(gen: &GeneratingFunction<C, O>, x: &[T], q: &[T]) -> T
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
    T: Real,
{
    let m = q.len();
    if m == 0 {
        return T::one();
    }
    let xd: Vec<Dual<T>> = x.iter().map(|&v| Dual::constant(v)).collect();
    let mut jac = vec![vec![T::zero(); m]; m];
    for k in 0..m {
        let qd: Vec<Dual<T>> =
            q.iter().enumerate().map(|(i, &v)| if i == k { Dual::variable(v) } else { Dual::constant(v) }).collect();
        for (row, p) in gen.point_map(&xd, &qd).iter().enumerate() {
            jac[row][k] = p.d;
        }
    }
    T::one() / det_generic(&jac).abs().sqrt()
}

pub fn matrix_element_via_s<C, O>(gen: &GeneratingFunction<C, O>, x: &[f64], q: &[f64], j: &[f64]) -> Result<KernelElement>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    let m = q.len();
    let jd: Vec<Dual<Dual<f64>>> = lift(j);
    let xd: Vec<Dual<Dual<f64>>> = lift(x);
    let qd: Vec<Dual<Dual<f64>>> = lift(q);
    let mut from_s = Vec::with_capacity(m);
    for k in 0..m {
        let pd: Vec<Dual<Dual<f64>>> = (0..m)
            .map(|i| if i == k { Dual::new(Dual::variable(0.0), Dual::constant(1.0)) } else { Dual::constant(Dual::constant(0.0)) })
            .collect();
        let s = gen.eval_generic(&xd, &qd, &pd, &jd)?.0;
        if s.d.d.abs() > 1e-8 {
            return Err(Error::Unsupported(format!("S is not linear in π′ (second derivative {})", s.d.d)));
        }
        from_s.push(s.d.v);
    }
    let q_prime = gen.point_map(x, q);
    let defect = from_s.iter().zip(&q_prime).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if defect > 1e-8 {
        return Err(Error::ChartDefect(format!("point map from S differs from the coadjoint action by {defect}")));
    }
    Ok(KernelElement {
        x: x.to_vec(),
        q: q.to_vec(),
        q_prime,
        phase: kernel_phase(gen, x, q, j)?,
        density: kernel_density(gen, x, q),
        point_map_defect: defect,
    })
}

/// `∫ D_{qq′}(x) g(q′) dq′ = ρ e^{iΦ} g(xq)`, evaluable on jets of `(x, q)`.
pub fn paired_kernel<C, O, G, T>(gen: &GeneratingFunction<C, O>, g: &G, x: &[T], q: &[T], j: &[f64]) -> Result<Complex<T>>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
    G: TestFunction + ?Sized,
    T: Real,
{
    let phase = kernel_phase(gen, x, q, j)?;
    let rho = kernel_density(gen, x, q);
    let gv = g.eval(&gen.point_map(x, q));
    Ok(cexp(T::zero(), phase) * gv * rho)
}

/// Transpose of `conj ℓ_a` acting on `g`: `−∂_α(conj(a^α) g) + conj(b) g`.
struct Transposed<'b, 'a, O: ?Sized, G: ?Sized> {
    rep: &'b Lrep<'a, O>,
    a: usize,
    inner: &'b G,
}

impl<O: OrbitModel + ?Sized, G: TestFunction + ?Sized> TestFunction for Transposed<'_, '_, O, G> {
    fn eval<T: Real>(&self, q: &[T]) -> Complex<T> {
        let k = self.rep.coeffs(q);
        let mut out = k.b[self.a].conj() * self.inner.eval(q);
        for al in 0..q.len() {
            let qd: Vec<Dual<T>> =
                q.iter().enumerate().map(|(i, &v)| if i == al { Dual::variable(v) } else { Dual::constant(v) }).collect();
            let kd = self.rep.coeffs(&qd);
            let prod = kd.a[self.a][al].conj() * self.inner.eval(&qd);
            out = out - Complex::new(prod.re.d, prod.im.d);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PdeResiduals {
    /// `max |(ξ_a + ℓ_a(q)) D|`.
    pub left: f64,
    /// `max |(η_a − conj ℓ_a(q′)) D|`.
    pub right_minus: f64,
    /// `max |(η_a + conj ℓ_a(q′)) D|`.
    pub right_plus: f64,
}

/// Both first-order systems applied to the kernel, paired with each `g`
/// in `battery` over `q′`.
pub fn pde_residuals<C, O, G>(
    gen: &GeneratingFunction<C, O>,
    rep: &Lrep<O>,
    battery: &[G],
    x: &[f64],
    q: &[f64],
) -> Result<PdeResiduals>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
    G: TestFunction,
{
    let (n, m) = (x.len(), q.len());
    let xi = gen.chart.left_fields::<f64>(x);
    let eta = gen.chart.right_fields::<f64>(x);
    let k = rep.coeffs::<f64>(q);
    let z: Vec<f64> = [x, q].concat();
    let mut out = PdeResiduals { left: 0.0, right_minus: 0.0, right_plus: 0.0 };
    for g in battery {
        let mut grad = Vec::with_capacity(n + m);
        let mut val = C64::new(0.0, 0.0);
        for s in 0..n + m {
            let zd: Vec<Dual<f64>> =
                z.iter().enumerate().map(|(i, &v)| if i == s { Dual::variable(v) } else { Dual::constant(v) }).collect();
            let f = paired_kernel(gen, g, &zd[..n], &zd[n..], &rep.j)?;
            val = C64::new(f.re.v, f.im.v);
            grad.push(C64::new(f.re.d, f.im.d));
        }
        if n + m == 0 {
            continue;
        }
        for a in 0..n {
            let mut xi_f = C64::new(0.0, 0.0);
            let mut eta_f = C64::new(0.0, 0.0);
            for i in 0..n {
                xi_f += grad[i] * xi[a][i];
                eta_f += grad[i] * eta[a][i];
            }
            let mut l = k.b[a] * val;
            for al in 0..m {
                l += k.a[a][al] * grad[n + al];
            }
            out.left = out.left.max((xi_f + l).norm());
            let t = Transposed { rep, a, inner: g };
            let r = paired_kernel(gen, &t, x, q, &rep.j)?;
            out.right_minus = out.right_minus.max((eta_f - r).norm());
            out.right_plus = out.right_plus.max((eta_f + r).norm());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompositionResidual {
    pub point_map: f64,
    /// `|e^{i(Φ(y,q) + Φ(x,yq))} − e^{iΦ(xy,q)}|`.
    pub phase: f64,
    pub density: f64,
}

impl CompositionResidual {
    pub fn max(&self) -> f64 {
        self.point_map.max(self.phase).max(self.density)
    }
}

/// `∫ D_{qq″}(y) D_{q″q′}(x) dq″` against `D_{qq′}(xy)`.
pub fn composition_residual<C, O>(
    gen: &GeneratingFunction<C, O>,
    x: &[f64],
    y: &[f64],
    q: &[f64],
    j: &[f64],
) -> Result<CompositionResidual>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    let xy = gen.chart.product(x, y);
    let yq = gen.point_map(y, q);
    let lhs_q = gen.point_map(x, &yq);
    let rhs_q = gen.point_map(&xy, q);
    let pm = lhs_q.iter().zip(&rhs_q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ph1 = kernel_phase(gen, y, q, j)? + kernel_phase(gen, x, &yq, j)?;
    let ph2 = kernel_phase(gen, &xy, q, j)?;
    let phase = (C64::from_polar(1.0, ph1) - C64::from_polar(1.0, ph2)).norm();
    let d1 = kernel_density(gen, y, q) * kernel_density(gen, x, &yq);
    let d2 = kernel_density(gen, &xy, q);
    Ok(CompositionResidual { point_map: pm, phase, density: (d1 - d2).abs() })
}

/// `|ρ² · det ∂(xq)/∂q − 1|`.
pub fn unitarity_residual<C, O>(gen: &GeneratingFunction<C, O>, x: &[f64], q: &[f64]) -> f64
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    if q.is_empty() {
        return 0.0;
    }
    let rho = kernel_density(gen, x, q);
    let xd: Vec<Dual<f64>> = lift(x);
    let m = q.len();
    let mut jac = vec![vec![0.0; m]; m];
    for k in 0..m {
        let qd: Vec<Dual<f64>> =
            q.iter().enumerate().map(|(i, &v)| if i == k { Dual::variable(v) } else { Dual::constant(v) }).collect();
        for (row, p) in gen.point_map(&xd, &qd).iter().enumerate() {
            jac[row][k] = p.d;
        }
    }
    (rho * rho * det_generic(&jac).abs() - 1.0).abs()
}
