//! The group Fourier pair at desk scale, on the abelian charts and on h₃.
//!
//! Forward: `ψ̂_λ(q, q′) = ∫ ψ(x) D_{qq′}(x) dx`. With the delta kernel this
//! collapses onto the fibre `x₁ = q′ − q`. Inverse:
//! `ψ(x) = ∫ dμ(λ) ∫ dq ψ̂_λ(q, xq) e^{−iΦ(x, q)}`.
//!
//! Both directions run on Gauss–Legendre tensor grids, one axis at a time.

use std::f64::consts::PI;

use num_complex::Complex;
use serde::Serialize;

use super::{cexp, value_and_gradient, Lrep, TestFunction, C64};
use crate::calculus::gauss_legendre;
use crate::catalog::{GroupChart, OrbitModel};
use crate::dual::{lift, Real};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FourierFamily {
    Abelian { n: usize },
    Heisenberg,
}

pub fn fourier_family<C, O>(chart: &C, orbit: &O) -> Result<FourierFamily>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    match orbit.name() {
        "abelian" => Ok(FourierFamily::Abelian { n: chart.dim() }),
        "heisenberg3" => Ok(FourierFamily::Heisenberg),
        other => Err(Error::Scope(format!("Fourier pair is implemented for abelian groups and heisenberg3, not {other}"))),
    }
}

/// Spectral measure density `dμ(λ)/dλ`.
pub fn spectral_density(family: FourierFamily, lambda: &[f64]) -> f64 {
    match family {
        FourierFamily::Abelian { n } => (2.0 * PI).powi(-(n as i32)),
        FourierFamily::Heisenberg => lambda[0].abs() / (4.0 * PI * PI),
    }
}

/// `Φ(x, q) = λ((q + x₁)x₂ − x₃)` on h₃.
pub fn heisenberg_phase<T: Real>(x: &[T], q: T, lambda: f64) -> T {
    ((q + x[0]) * x[1] - x[2]) * lambda
}

/// Truncation boxes: `[−space, space]` per group axis, `[−spectrum, spectrum]`
/// per spectral axis, `nodes` Gauss–Legendre points on each.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FourierBox {
    pub space: f64,
    pub spectrum: f64,
    pub nodes: usize,
}

impl Default for FourierBox {
    fn default() -> Self {
        FourierBox { space: 7.0, spectrum: 7.0, nodes: 96 }
    }
}

impl FourierBox {
    fn space_rule(&self) -> Vec<(f64, f64)> {
        gauss_legendre(self.nodes, -self.space, self.space)
    }

    fn spectral_rule(&self) -> Vec<(f64, f64)> {
        gauss_legendre(self.nodes, -self.spectrum, self.spectrum)
    }
}

/// Contracts `data` (row-major, `shape`) along `axis` with `mat[out][in]`.
fn apply_axis(data: &[C64], shape: &mut [usize], axis: usize, mat: &[Vec<C64>]) -> Vec<C64> {
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let (n_in, n_out) = (shape[axis], mat.len());
    let mut out = vec![C64::new(0.0, 0.0); outer * n_out * inner];
    for o in 0..outer {
        for (r, row) in mat.iter().enumerate() {
            let dst = &mut out[(o * n_out + r) * inner..(o * n_out + r + 1) * inner];
            for (c, &m) in row.iter().enumerate().take(n_in) {
                let src = &data[(o * n_in + c) * inner..(o * n_in + c + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += m * s;
                }
            }
        }
    }
    shape[axis] = n_out;
    out
}

/// `mat[i][j] = w_j e^{i sign a_i b_j}` for the rule `b` and output nodes `a`.
fn phase_matrix(out_nodes: &[f64], rule: &[(f64, f64)], sign: f64) -> Vec<Vec<C64>> {
    out_nodes
        .iter()
        .map(|&a| rule.iter().map(|&(b, w)| C64::from_polar(w, sign * a * b)).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTrip {
    pub family: FourierFamily,
    /// `‖ψ − ψ_rec‖ / ‖ψ‖` in L² over the space box.
    pub relative_l2: f64,
    pub grid_points: usize,
}

/// Samples `psi` on the space box, transforms, reconstructs on the same
/// nodes and compares. `measure` overrides the spectral density.
pub fn fourier_round_trip<F: TestFunction + ?Sized>(
    family: FourierFamily,
    psi: &F,
    bx: &FourierBox,
    measure: Option<&dyn Fn(&[f64]) -> f64>,
) -> Result<RoundTrip> {
    let density = |l: &[f64]| measure.map_or_else(|| spectral_density(family, l), |m| m(l));
    let ys = bx.space_rule();
    let ls = bx.spectral_rule();
    let y_nodes: Vec<f64> = ys.iter().map(|p| p.0).collect();
    let l_nodes: Vec<f64> = ls.iter().map(|p| p.0).collect();
    let n = match family {
        FourierFamily::Abelian { n } => n,
        FourierFamily::Heisenberg => 3,
    };
    if n == 0 {
        return Err(Error::Input("Fourier pair needs a group of positive dimension".into()));
    }
    let total = bx.nodes.pow(n as u32);
    let mut samples = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let x: Vec<f64> = idx.iter().map(|&i| y_nodes[i]).collect();
        samples.push(psi.eval(&x));
        weights.push(idx.iter().map(|&i| ys[i].1).product::<f64>());
        for k in (0..n).rev() {
            idx[k] += 1;
            if idx[k] < bx.nodes {
                break;
            }
            idx[k] = 0;
        }
    }
    let mut shape = vec![bx.nodes; n];
    let rec = match family {
        FourierFamily::Abelian { .. } => {
            let fwd = phase_matrix(&l_nodes, &ys, -1.0);
            let inv = phase_matrix(&y_nodes, &ls, 1.0);
            let mut d = samples.clone();
            for a in 0..n {
                d = apply_axis(&d, &mut shape, a, &fwd);
            }
            for a in 0..n {
                d = apply_axis(&d, &mut shape, a, &inv);
            }
            let c = density(&vec![0.0; n]);
            d.into_iter().map(|v| v * c).collect::<Vec<_>>()
        }
        FourierFamily::Heisenberg => {
            // axes (x₁, k, λ) with k = λq′; the table entry is ψ̂_λ(k/λ − x₁, k/λ)
            let d = apply_axis(&samples, &mut shape, 1, &phase_matrix(&l_nodes, &ys, 1.0));
            let d = apply_axis(&d, &mut shape, 2, &phase_matrix(&l_nodes, &ys, -1.0));
            // dq = dk/|λ| on each λ slice
            let jac: Vec<f64> = l_nodes.iter().map(|&l| density(&[l]) / l.abs()).collect();
            let d: Vec<C64> = d.iter().enumerate().map(|(i, v)| v * jac[i % bx.nodes]).collect();
            let d = apply_axis(&d, &mut shape, 1, &phase_matrix(&y_nodes, &ls, -1.0));
            apply_axis(&d, &mut shape, 2, &phase_matrix(&y_nodes, &ls, 1.0))
        }
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for ((a, b), w) in samples.iter().zip(&rec).zip(&weights) {
        num += w * (a - b).norm_sqr();
        den += w * a.norm_sqr();
    }
    Ok(RoundTrip { family, relative_l2: (num / den).sqrt(), grid_points: total })
}

/// Pointwise forward transform `ψ̂_λ(q, q′)`, differentiable in `(q, q′)`.
/// The abelian transform ignores `q` and `q′`.
pub fn transform_at<F, T>(family: FourierFamily, psi: &F, q: &[T], q_prime: &[T], lambda: &[f64], bx: &FourierBox) -> Complex<T>
where
    F: TestFunction + ?Sized,
    T: Real,
{
    let ys = bx.space_rule();
    let mut acc = Complex::new(T::zero(), T::zero());
    match family {
        FourierFamily::Abelian { n } => {
            let mut idx = vec![0usize; n];
            for _ in 0..bx.nodes.pow(n as u32) {
                let x: Vec<f64> = idx.iter().map(|&i| ys[i].0).collect();
                let w: f64 = idx.iter().map(|&i| ys[i].1).product();
                let ph: f64 = x.iter().zip(lambda).map(|(a, b)| a * b).sum();
                let e = C64::from_polar(w, -ph);
                acc = acc + psi.eval(&lift::<T>(&x)) * Complex::new(T::cst(e.re), T::cst(e.im));
                for k in (0..n).rev() {
                    idx[k] += 1;
                    if idx[k] < bx.nodes {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        FourierFamily::Heisenberg => {
            let x1 = q_prime[0] - q[0];
            for &(y2, w2) in &ys {
                for &(y3, w3) in &ys {
                    let x = [x1, T::cst(y2), T::cst(y3)];
                    let ph = heisenberg_phase(&x, q[0], lambda[0]);
                    acc = acc + psi.eval(&x) * cexp(T::zero(), ph) * T::cst(w2 * w3);
                }
            }
        }
    }
    acc
}

/// `ψ ↦ ξ_a ψ`, or `η_a ψ` when `right` is set, differentiated by jets.
pub struct FieldApplied<'a, C: ?Sized, F: ?Sized> {
    pub chart: &'a C,
    pub a: usize,
    pub inner: &'a F,
    pub right: bool,
}

impl<C: GroupChart + ?Sized, F: TestFunction + ?Sized> TestFunction for FieldApplied<'_, C, F> {
    fn eval<T: Real>(&self, x: &[T]) -> Complex<T> {
        let fields = if self.right { self.chart.right_fields(x) } else { self.chart.left_fields(x) };
        let (_, grad) = value_and_gradient(self.inner, x);
        let mut out = Complex::new(T::zero(), T::zero());
        for (g, c) in grad.iter().zip(&fields[self.a]) {
            out = out + g * *c;
        }
        out
    }
}

/// `q ↦ ψ̂_λ(q, q′)` at fixed `q′`, or `q′ ↦ ψ̂_λ(q, q′)` at fixed `q`
/// when `vary_prime` is set; `fixed` holds the other argument.
pub struct Slice<'a, F: ?Sized> {
    pub family: FourierFamily,
    pub psi: &'a F,
    pub fixed: Vec<f64>,
    pub vary_prime: bool,
    pub lambda: Vec<f64>,
    pub bx: FourierBox,
}

impl<F: TestFunction + ?Sized> TestFunction for Slice<'_, F> {
    fn eval<T: Real>(&self, z: &[T]) -> Complex<T> {
        let fixed = lift::<T>(&self.fixed);
        if self.vary_prime {
            transform_at(self.family, self.psi, &fixed, z, &self.lambda, &self.bx)
        } else {
            transform_at(self.family, self.psi, z, &fixed, &self.lambda, &self.bx)
        }
    }
}

/// `max |(ξ_a ψ)^ − ℓ_a(q) ψ̂|` over `samples` of `(q, q′)` and every `a`.
/// The representation `rep` must carry the label `λ`.
pub fn intertwining_residual<C, O, F>(
    family: FourierFamily,
    chart: &C,
    rep: &Lrep<O>,
    psi: &F,
    samples: &[(Vec<f64>, Vec<f64>)],
    bx: &FourierBox,
) -> f64
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
    F: TestFunction + ?Sized,
{
    let mut worst: f64 = 0.0;
    for (q, qp) in samples {
        let slice = Slice { family, psi, fixed: qp.clone(), vary_prime: false, lambda: rep.j.clone(), bx: *bx };
        for a in 0..chart.dim() {
            let lhs = transform_at(family, &FieldApplied { chart, a, inner: psi, right: false }, q, qp, &rep.j, bx);
            let rhs = rep.apply(a, &slice, q, false);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowCheck {
    pub half_width: f64,
    /// `(2π)^{−1} ∫_{−L}^{L} dx` at `Δ = 0`.
    pub peak: f64,
    pub first_zero: f64,
    /// Largest deviation from `sin(ΔL)/(πΔ)` on the probe grid.
    pub max_error: f64,
}

/// Windowed orthogonality kernel `(2π)^{−1} ∫_{−L}^{L} e^{iΔx} dx` by
/// quadrature, for each half-width in `widths`.
pub fn window_orthogonality(widths: &[f64]) -> Vec<WindowCheck> {
    widths
        .iter()
        .map(|&l| {
            let rule = gauss_legendre(200, -l, l);
            let k = |d: f64| rule.iter().map(|&(x, w)| w * (d * x).cos()).sum::<f64>() / (2.0 * PI);
            let closed = |d: f64| if d == 0.0 { l / PI } else { (d * l).sin() / (PI * d) };
            let max_error = (0..=40).map(|i| 4.0 * PI / l * i as f64 / 40.0).map(|d| (k(d) - closed(d)).abs()).fold(0.0, f64::max);
            let (mut lo, mut hi) = (0.5 * PI / l, 1.5 * PI / l);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if k(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            WindowCheck { half_width: l, peak: k(0.0), first_zero: 0.5 * (lo + hi), max_error }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_axis_contracts_the_middle_index() {
        let data: Vec<C64> = (0..8).map(|v| C64::new(v as f64, 0.0)).collect();
        let mut shape = vec![2, 2, 2];
        let sum = vec![vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]];
        let out = apply_axis(&data, &mut shape, 1, &sum);
        assert_eq!(shape, vec![2, 1, 2]);
        let re: Vec<f64> = out.iter().map(|c| c.re).collect();
        assert_eq!(re, vec![2.0, 4.0, 10.0, 12.0]);
    }

    #[test]
    fn window_kernel_scales_with_box() {
        let w = window_orthogonality(&[4.0, 8.0]);
        for c in &w {
            assert!((c.peak - c.half_width / PI).abs() < 1e-12);
            assert!((c.first_zero - PI / c.half_width).abs() < 1e-10);
            assert!(c.max_error < 1e-12);
        }
    }
}
