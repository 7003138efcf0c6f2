//! Adaptive Gauss–Kronrod and fixed Gauss–Legendre rules.

use crate::dual::Real;
use crate::error::{Error, Result};

// 7-point Gauss / 15-point Kronrod nodes on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Quadrature<T> {
    pub value: Vec<T>,
    /// Estimated absolute error (on real parts, summed over components).
    pub error: f64,
    pub evaluations: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: Vec<T>,
    error: f64,
}

fn kronrod_panel<T: Real, F: FnMut(f64) -> Vec<T>>(f: &mut F, a: f64, b: f64) -> (Vec<T>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let dim = fc.len();
    let mut k: Vec<T> = fc.iter().map(|&v| v * WGK[7]).collect();
    let mut g: Vec<T> = fc.iter().map(|&v| v * WG[3]).collect();
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for d in 0..dim {
            let s = f1[d] + f2[d];
            k[d] += s * WGK[j];
            if j % 2 == 1 {
                g[d] += s * WG[j / 2];
            }
        }
    }
    let mut err = 0.0;
    for d in 0..dim {
        k[d] = k[d] * h;
        g[d] = g[d] * h;
        err += (k[d].re() - g[d].re()).abs();
    }
    (k, err)
}

/// Adaptive vector-valued integration of `f` over `[a, b]`.
///
/// Error control acts on the real part of every component; derivative
/// parts of dual-valued integrands ride along on the same panels.
pub fn integrate_vec<T, F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature<T>>
where
    T: Real,
    F: FnMut(f64) -> Vec<T>,
{
    if a == b {
        let dim = f(a).len();
        return Ok(Quadrature { value: vec![T::zero(); dim], error: 0.0, evaluations: 1 });
    }
    let (v, e) = kronrod_panel(&mut f, a, b);
    let mut panels = vec![Panel { a, b, value: v, error: e }];
    let mut evaluations = 15;
    loop {
        let total: f64 = panels.iter().map(|p| p.error).sum();
        if total <= tol {
            break;
        }
        if panels.len() >= MAX_INTERVALS {
            let value = sum_panels(&panels);
            return Err(Error::Quadrature { estimate: value[0].re(), error: total });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        let (v1, e1) = kronrod_panel(&mut f, p.a, mid);
        let (v2, e2) = kronrod_panel(&mut f, mid, p.b);
        evaluations += 30;
        panels.push(Panel { a: p.a, b: mid, value: v1, error: e1 });
        panels.push(Panel { a: mid, b: p.b, value: v2, error: e2 });
    }
    let error = panels.iter().map(|p| p.error).sum();
    Ok(Quadrature { value: sum_panels(&panels), error, evaluations })
}

fn sum_panels<T: Real>(panels: &[Panel<T>]) -> Vec<T> {
    let dim = panels[0].value.len();
    let mut out = vec![T::zero(); dim];
    // sum in interval order for reproducibility
    let mut order: Vec<&Panel<T>> = panels.iter().collect();
    order.sort_by(|x, y| x.a.total_cmp(&y.a));
    for p in order {
        for d in 0..dim {
            out[d] += p.value[d];
        }
    }
    out
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(T, f64)>
where
    T: Real,
    F: FnMut(f64) -> T,
{
    let q = integrate_vec(|t| vec![f(t)], a, b, tol)?;
    Ok((q.value[0], q.error))
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for i in 0..n {
        // Chebyshev initial guess, Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((mid + half * x, half * w));
    }
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}
