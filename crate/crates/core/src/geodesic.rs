//! Right-invariant geodesic flows: the direct Hamiltonian system on `T*G`
//! and the reduced system in canonical coordinates.

use serde::Serialize;

use crate::calculus::{integrate, jacobian_of, ode_solve, OdeOptions, Trajectory};
use crate::canonical::CanonicalPoint;
use crate::catalog::{GroupChart, OrbitModel};
use crate::dual::{Dual, Real};
use crate::error::{Error, Result};
use crate::linalg::{identity, inverse, matmul, max_abs_diff, numeric_rank, Mat};
use crate::poisson::{mu_l_generic, mu_r_generic, PhasePoint};

/// Constant symmetric non-degenerate `G_ab`, with inverse `G^{ab}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantMetric {
    pub g: Mat<f64>,
    pub g_inv: Mat<f64>,
    /// Counts of positive and negative eigenvalues.
    pub signature: (usize, usize),
}

impl InvariantMetric {
    pub fn new(g: Mat<f64>) -> Result<Self> {
        let n = g.len();
        if g.iter().any(|r| r.len() != n) {
            return Err(Error::Input("metric must be square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if g[i][j] != g[j][i] {
                    return Err(Error::Input(format!("metric is not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        if numeric_rank(&g, 1e-12) < n {
            return Err(Error::Input("metric is degenerate".into()));
        }
        let g_inv = inverse(&g).ok_or_else(|| Error::Input("metric is degenerate".into()))?;
        if max_abs_diff(&matmul(&g, &g_inv), &identity(n)) > 1e-12 {
            return Err(Error::Input("metric is too ill-conditioned to invert to 1e-12".into()));
        }
        let eig = nalgebra::DMatrix::from_fn(n, n, |i, j| g[i][j]).symmetric_eigenvalues();
        let pos = eig.iter().filter(|&&v| v > 0.0).count();
        Ok(InvariantMetric { g, g_inv, signature: (pos, n - pos) })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(identity(n)).expect("identity is a metric")
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        Self::new((0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    /// `½ G^{ab} v_a v_b`.
    pub fn quadratic<T: Real>(&self, v: &[T]) -> T {
        let n = self.dim();
        let mut s = T::zero();
        for a in 0..n {
            for b in 0..n {
                if self.g_inv[a][b] != 0.0 {
                    s += v[a] * v[b] * self.g_inv[a][b];
                }
            }
        }
        s * 0.5
    }
}

fn check_dims<C: GroupChart + ?Sized>(chart: &C, metric: &InvariantMetric) -> Result<()> {
    if metric.dim() != chart.dim() {
        return Err(Error::Input(format!("metric is {}×{}, group has dimension {}", metric.dim(), metric.dim(), chart.dim())));
    }
    Ok(())
}

/// `H = ½ G^{ab} η_a^cl η_b^cl`.
pub fn hamiltonian_generic<C: GroupChart + ?Sized, T: Real>(chart: &C, metric: &InvariantMetric, x: &[T], p: &[T]) -> T {
    metric.quadratic(&mu_l_generic(chart, x, p))
}

pub fn hamiltonian<C: GroupChart + ?Sized>(chart: &C, metric: &InvariantMetric, pt: &PhasePoint) -> Result<f64> {
    check_dims(chart, metric)?;
    if !chart.in_domain(&pt.x) {
        return Err(Error::Domain { chart: chart.name().to_string(), point: pt.x.clone() });
    }
    Ok(hamiltonian_generic(chart, metric, &pt.x, &pt.p))
}

/// Hamilton's equations `ẋ = ∂H/∂p`, `ṗ = −∂H/∂x`, state `(x, p)`.
pub fn integrate_direct<C: GroupChart + ?Sized>(
    chart: &C,
    metric: &InvariantMetric,
    pt0: &PhasePoint,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    hamiltonian(chart, metric, pt0)?;
    let n = chart.dim();
    let y0: Vec<f64> = [&pt0.x[..], &pt0.p].concat();
    ode_solve(
        |_, z| {
            let grad = &jacobian_of(|w: &[Dual<f64>]| vec![hamiltonian_generic(chart, metric, &w[..n], &w[n..])], z)[0];
            (0..2 * n).map(|i| if i < n { grad[n + i] } else { -grad[i - n] }).collect()
        },
        |z| chart.in_domain(&z[..n]),
        &y0,
        0.0,
        t_end,
        OdeOptions::with_tol(tol),
    )
}

/// `ξ_a^cl` at each stored state of a direct trajectory.
pub fn killing_constants<C: GroupChart + ?Sized>(chart: &C, traj: &Trajectory) -> Vec<Vec<f64>> {
    let n = chart.dim();
    traj.states.iter().map(|z| mu_r_generic(chart, &z[..n], &z[n..])).collect()
}

/// Largest relative drift of `H` along a direct trajectory.
pub fn energy_drift<C: GroupChart + ?Sized>(chart: &C, metric: &InvariantMetric, traj: &Trajectory) -> f64 {
    let n = chart.dim();
    let h: Vec<f64> = traj.states.iter().map(|z| hamiltonian_generic(chart, metric, &z[..n], &z[n..])).collect();
    let h0 = h[0];
    h.iter().map(|v| (v - h0).abs()).fold(0.0, f64::max) / h0.abs().max(f64::MIN_POSITIVE)
}

/// Largest drift of the Killing constants, relative to their initial norm.
pub fn noether_drift<C: GroupChart + ?Sized>(chart: &C, traj: &Trajectory) -> f64 {
    let k = killing_constants(chart, traj);
    let scale = k[0].iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    k.iter()
        .map(|row| row.iter().zip(&k[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
        / scale
}

/// `H̃ = ½ G^{ab} f_a(q′, π′; J) f_b(q′, π′; J)`.
pub fn reduced_hamiltonian<O: OrbitModel + ?Sized, T: Real>(
    orbit: &O,
    metric: &InvariantMetric,
    q_prime: &[T],
    pi_prime: &[T],
    j: &[T],
) -> T {
    metric.quadratic(&orbit.transition(q_prime, pi_prime, j))
}

/// Sign in `π̇′ = s · ∂H̃/∂q′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReducedSign {
    /// `s = −1`, Hamilton's equations for `dπ′∧dq′`.
    Canonical,
    /// `s = +1`.
    AsPrinted,
}

impl ReducedSign {
    fn factor(self) -> f64 {
        match self {
            ReducedSign::Canonical => -1.0,
            ReducedSign::AsPrinted => 1.0,
        }
    }
}

/// Integrates `q̇′ = ∂H̃/∂π′`, `π̇′ = s ∂H̃/∂q′`, `τ̇ = ∂H̃/∂J`; state
/// `(q′, π′, τ)` with `q, π, J` frozen.
pub fn integrate_reduced<O: OrbitModel + ?Sized>(
    orbit: &O,
    metric: &InvariantMetric,
    cp0: &CanonicalPoint,
    t_end: f64,
    tol: f64,
    sign: ReducedSign,
) -> Result<Trajectory> {
    orbit.require_regular(&cp0.j)?;
    let (m, r) = (orbit.m(), orbit.r());
    let s = sign.factor();
    let jv = cp0.j.clone();
    let y0: Vec<f64> = [&cp0.q_prime[..], &cp0.pi_prime, &cp0.tau].concat();
    ode_solve(
        |_, y| {
            let z: Vec<f64> = [&y[..2 * m], &jv[..]].concat();
            let g = &jacobian_of(
                |w: &[Dual<f64>]| vec![reduced_hamiltonian(orbit, metric, &w[..m], &w[m..2 * m], &w[2 * m..])],
                &z,
            )[0];
            let mut out = Vec::with_capacity(2 * m + r);
            out.extend((0..m).map(|k| g[m + k]));
            out.extend((0..m).map(|k| s * g[k]));
            out.extend((0..r).map(|k| g[2 * m + k]));
            out
        },
        |_| true,
        &y0,
        0.0,
        t_end,
        OdeOptions::with_tol(tol),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionCheck {
    pub sign: ReducedSign,
    /// Sup over sample times of `|f(q′(t), π′(t)) − μ_l(t)|`, per sign tried.
    pub deviation_canonical: f64,
    pub deviation_as_printed: f64,
    pub pass: bool,
}

/// Compare both reduced sign choices against the direct flow, in
/// momentum-map components, at `samples` evenly spaced times. Needs only
/// the orbit model's inversion, so it also runs where no generating
/// function exists.
pub fn cross_check_reduction<C, O>(
    chart: &C,
    orbit: &O,
    metric: &InvariantMetric,
    pt0: &PhasePoint,
    t_end: f64,
    tol: f64,
    samples: usize,
    threshold: f64,
) -> Result<ReductionCheck>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    let n = chart.dim();
    let m = orbit.m();
    let direct = integrate_direct(chart, metric, pt0, t_end, tol)?;
    // (q′, π′, J) from μ_l = f(q′, π′; J); τ never enters the comparison
    let (q_prime, pi_prime, j) = orbit.invert(&mu_l_generic(chart, &pt0.x, &pt0.p))?;
    let r = j.len();
    let cp0 = CanonicalPoint { q: q_prime.clone(), pi: pi_prime.clone(), q_prime, pi_prime, j, tau: vec![0.0; r] };
    let deviation = |sign| -> f64 {
        let red = match integrate_reduced(orbit, metric, &cp0, t_end, tol, sign) {
            Ok(t) => t,
            Err(_) => return f64::INFINITY,
        };
        let mut worst = 0.0f64;
        for k in 0..=samples {
            let t = t_end * k as f64 / samples as f64;
            let z = direct.at(t);
            let y = red.at(t);
            let ml = mu_l_generic(chart, &z[..n], &z[n..]);
            let f = orbit.transition(&y[..m], &y[m..2 * m], &cp0.j);
            let d = ml.iter().zip(&f).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if d > worst || d.is_nan() {
                worst = d;
            }
        }
        worst
    };
    let dc = deviation(ReducedSign::Canonical);
    let dp = deviation(ReducedSign::AsPrinted);
    let sign = if dc <= dp { ReducedSign::Canonical } else { ReducedSign::AsPrinted };
    Ok(ReductionCheck { sign, deviation_canonical: dc, deviation_as_printed: dp, pass: dc.min(dp) < threshold })
}

/// `H̃(q′, π′) = a π′² + b π′ + c` at fixed `q′` (π-affine models).
fn quadratic_in_pi<O: OrbitModel + ?Sized>(orbit: &O, metric: &InvariantMetric, q: f64, j: &[f64]) -> (f64, f64, f64) {
    let h = |p: f64| reduced_hamiltonian(orbit, metric, &[q], &[p], j);
    let (h0, h1, hm) = (h(0.0), h(1.0), h(-1.0));
    (0.5 * (h1 + hm) - h0, 0.5 * (h1 - hm), h0)
}

/// Times `t(q′)` at which the one-degree-of-freedom reduced flow from `cp0`
/// reaches each target, from `t = ∫ dq′ / (∂H̃/∂π′)` on the energy level.
/// Empty for `m = 0`. Targets must lie on the initial monotone branch.
pub fn quadrature_solution<O: OrbitModel + ?Sized>(
    orbit: &O,
    metric: &InvariantMetric,
    cp0: &CanonicalPoint,
    targets: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    match orbit.m() {
        0 => return Ok(Vec::new()),
        1 => {}
        m => return Err(Error::Scope(format!("quadrature solution needs m = 1, got {m}"))),
    }
    if !orbit.pi_linear() {
        return Err(Error::Scope(format!("{}: transition is not affine in π", orbit.name())));
    }
    let j = &cp0.j;
    let q0 = cp0.q_prime[0];
    let e = reduced_hamiltonian(orbit, metric, &cp0.q_prime, &cp0.pi_prime, j);
    let (a0, b0, _) = quadratic_in_pi(orbit, metric, q0, j);
    let v0 = 2.0 * a0 * cp0.pi_prime[0] + b0;
    if v0 == 0.0 {
        return Err(Error::Branch { location: q0 });
    }
    let dir = v0.signum();
    // ∂H̃/∂π′ on the branch through the initial point
    let speed = |q: f64| -> f64 {
        let (a, b, c) = quadratic_in_pi(orbit, metric, q, j);
        if a.abs() < 1e-14 {
            b
        } else {
            dir * (b * b - 4.0 * a * (c - e)).max(0.0).sqrt()
        }
    };
    let disc = |q: f64| -> f64 {
        let (a, b, c) = quadratic_in_pi(orbit, metric, q, j);
        if a.abs() < 1e-14 {
            b * dir
        } else {
            b * b - 4.0 * a * (c - e)
        }
    };
    let mut out = Vec::with_capacity(targets.len());
    for &qt in targets {
        if (qt - q0) * dir < 0.0 {
            return Err(Error::Branch { location: q0 });
        }
        // scan for a turning point between q0 and the target
        let steps = 400;
        let mut prev = disc(q0);
        for k in 1..=steps {
            let q = q0 + (qt - q0) * k as f64 / steps as f64;
            let d = disc(q);
            if d <= 0.0 && prev > 0.0 {
                let (mut lo, mut hi) = (q0 + (qt - q0) * (k - 1) as f64 / steps as f64, q);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if disc(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Err(Error::Branch { location: 0.5 * (lo + hi) });
            }
            prev = d;
        }
        let (t, _) = integrate(|q: f64| 1.0 / speed(q), q0, qt, tol)?;
        out.push(t);
    }
    Ok(out)
}

/// Times of the reduced ODE solution at which `q′` first reaches each
/// target (root-finding on the dense output). Used to cross-check
/// [`quadrature_solution`].
pub fn crossing_times(traj: &Trajectory, targets: &[f64]) -> Vec<Option<f64>> {
    targets
        .iter()
        .map(|&qt| {
            for w in traj.times.windows(2) {
                let (a, b) = (w[0], w[1]);
                let fa = traj.at(a)[0] - qt;
                let fb = traj.at(b)[0] - qt;
                if fa == 0.0 {
                    return Some(a);
                }
                if fa * fb < 0.0 {
                    let (mut lo, mut hi, mut flo) = (a, b, fa);
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        let fm = traj.at(mid)[0] - qt;
                        if fm * flo <= 0.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                            flo = fm;
                        }
                    }
                    return Some(0.5 * (lo + hi));
                }
            }
            None
        })
        .collect()
}

/// `g^{ij} = G^{ab} η_a^i η_b^j` at `x`.
pub fn coordinate_inverse_metric<C: GroupChart + ?Sized, T: Real>(chart: &C, metric: &InvariantMetric, x: &[T]) -> Mat<T> {
    let eta = chart.right_fields(x);
    let n = chart.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = T::zero();
                    for a in 0..n {
                        for b in 0..n {
                            if metric.g_inv[a][b] != 0.0 {
                                s += eta[a][i] * eta[b][j] * metric.g_inv[a][b];
                            }
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}
