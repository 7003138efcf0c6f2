//! Differentiation, quadrature, line integrals and ODE integration.

pub mod ode;
pub mod quadrature;

use crate::dual::{seed_axis, Dual, Real};
use crate::error::{Error, Result};

pub use ode::{solve as ode_solve, OdeOptions, Trajectory};
pub use quadrature::{gauss_legendre, integrate, integrate_vec, Quadrature};

/// A map `R^arity -> R^codim` written once over every [`Real`].
pub trait SmoothMap {
    fn arity(&self) -> usize;
    fn codim(&self) -> usize;
    fn eval<T: Real>(&self, x: &[T]) -> Vec<T>;

    fn in_domain(&self, _x: &[f64]) -> bool {
        true
    }
}

/// Value, Jacobian `jac[c][i] = ∂F^c/∂x^i` and optional Hessians
/// `hess[c][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: Vec<f64>,
    pub jacobian: Vec<Vec<f64>>,
    pub hessian: Option<Vec<Vec<Vec<f64>>>>,
}

/// Jacobian of a generic closure at a point of any [`Real`] type.
pub fn jacobian_of<T, F>(f: F, x: &[T]) -> Vec<Vec<T>>
where
    T: Real,
    F: Fn(&[Dual<T>]) -> Vec<Dual<T>>,
{
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let out = f(&seed_axis(x, k));
        cols.push(out.iter().map(|d| d.d).collect::<Vec<T>>());
    }
    let m = cols.first().map_or(0, |c| c.len());
    (0..m).map(|c| (0..n).map(|i| cols[i][c]).collect()).collect()
}

/// Forward-mode jet of `map` at `point` to order 1 or 2.
pub fn jet<M: SmoothMap>(map: &M, point: &[f64], order: u8) -> Result<Jet> {
    if point.len() != map.arity() {
        return Err(Error::Input(format!(
            "point has length {}, map expects {}",
            point.len(),
            map.arity()
        )));
    }
    if !map.in_domain(point) {
        return Err(Error::Domain { chart: "smooth map".into(), point: point.to_vec() });
    }
    let value = map.eval(point);
    let jacobian = jacobian_of(|x| map.eval(x), point);
    let hessian = match order {
        1 => None,
        2 => {
            let n = point.len();
            let m = map.codim();
            let mut h = vec![vec![vec![0.0; n]; n]; m];
            for i in 0..n {
                for j in i..n {
                    let x: Vec<Dual<Dual<f64>>> = point
                        .iter()
                        .enumerate()
                        .map(|(k, &v)| {
                            let outer = if k == i { 1.0 } else { 0.0 };
                            let inner = if k == j { 1.0 } else { 0.0 };
                            Dual::new(Dual::new(v, inner), Dual::new(outer, 0.0))
                        })
                        .collect();
                    let out = map.eval(&x);
                    for c in 0..m {
                        h[c][i][j] = out[c].d.d;
                        h[c][j][i] = out[c].d.d;
                    }
                }
            }
            Some(h)
        }
        _ => return Err(Error::Input(format!("jet order must be 1 or 2, got {order}"))),
    };
    Ok(Jet { value, jacobian, hessian })
}

/// Straight segment in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSegment {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
}

impl PathSegment {
    pub fn new(start: Vec<f64>, end: Vec<f64>) -> Self {
        PathSegment { start, end }
    }
}

/// `∫_path ω` for a covector field given generically.
///
/// Endpoints may carry jets, so derivatives of the integral with respect to
/// the endpoint or any parameter captured by `form` come out of the same
/// quadrature.
pub fn line_integral_generic<T, F>(form: F, start: &[T], end: &[T], tol: f64) -> Result<(T, f64)>
where
    T: Real,
    F: Fn(&[T]) -> Vec<T>,
{
    let n = start.len();
    let dir: Vec<T> = (0..n).map(|i| end[i] - start[i]).collect();
    if dir.iter().all(|d| d.re() == 0.0) && dir.iter().all(|d| d.is_zero()) {
        return Ok((T::zero(), 0.0));
    }
    integrate(
        |t| {
            let x: Vec<T> = (0..n).map(|i| start[i] + dir[i] * t).collect();
            let w = form(&x);
            (0..n).map(|i| w[i] * dir[i]).sum()
        },
        0.0,
        1.0,
        tol,
    )
}

/// Line integral of a one-form (`n` inputs, `n` covector components).
pub fn line_integral<M: SmoothMap>(one_form: &M, path: &PathSegment, tol: f64) -> Result<f64> {
    if path.start.len() != one_form.arity() || path.end.len() != one_form.arity() {
        return Err(Error::Input("path dimension does not match the one-form".into()));
    }
    for p in [&path.start, &path.end] {
        if !one_form.in_domain(p) {
            return Err(Error::Domain { chart: "one-form".into(), point: p.clone() });
        }
    }
    line_integral_generic(|x: &[f64]| one_form.eval(x), &path.start, &path.end, tol).map(|r| r.0)
}

/// `max |∂_i ω_j − ∂_j ω_i|` at `point`.
pub fn closedness_residual<M: SmoothMap>(one_form: &M, point: &[f64]) -> Result<f64> {
    let j = jet(one_form, point, 1)?;
    Ok(antisymmetric_part_max(&j.jacobian))
}

pub(crate) fn antisymmetric_part_max(jac: &[Vec<f64>]) -> f64 {
    let n = jac.len();
    let mut r = 0.0f64;
    for i in 0..n {
        for k in (i + 1)..n {
            r = r.max((jac[i][k] - jac[k][i]).abs());
        }
    }
    r
}
