//! Dormand–Prince 5(4) integrator with continuous output.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// dense output coefficients
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub tol: f64,
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions { tol, h_init: None, h_min: 1e-14, max_steps: 1_000_000 }
    }
}

#[derive(Debug, Clone)]
struct Step {
    t0: f64,
    h: f64,
    cont: [Vec<f64>; 5],
}

/// Accepted steps plus their interpolants.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    steps: Vec<Step>,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory has an initial point")
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has an initial point")
    }

    /// Dense output at `t`, clamped to the integrated span.
    pub fn at(&self, t: f64) -> Vec<f64> {
        let (t_lo, t_hi) = (self.times[0].min(self.t_end()), self.times[0].max(self.t_end()));
        let t = t.clamp(t_lo, t_hi);
        if self.steps.is_empty() {
            return self.states[0].clone();
        }
        let forward = self.steps[0].h > 0.0;
        let idx = self
            .steps
            .partition_point(|s| if forward { s.t0 + s.h < t } else { s.t0 + s.h > t })
            .min(self.steps.len() - 1);
        let s = &self.steps[idx];
        let th = (t - s.t0) / s.h;
        let th1 = 1.0 - th;
        (0..s.cont[0].len())
            .map(|i| {
                s.cont[0][i]
                    + th * (s.cont[1][i] + th1 * (s.cont[2][i] + th * (s.cont[3][i] + th1 * s.cont[4][i])))
            })
            .collect()
    }
}

/// Integrate `y' = field(t, y)` from `t0` to `t1`.
///
/// `in_domain` is checked on every accepted state; leaving the domain
/// aborts with [`Error::DomainExit`].
pub fn solve<F, G>(
    mut field: F,
    in_domain: G,
    y0: &[f64],
    t0: f64,
    t1: f64,
    opts: OdeOptions,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> bool,
{
    let n = y0.len();
    let mut traj = Trajectory { times: vec![t0], states: vec![y0.to_vec()], steps: Vec::new() };
    if t1 == t0 {
        return Ok(traj);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    k[0] = field(t, &y);
    let mut h = opts.h_init.unwrap_or_else(|| initial_step(&k[0], &y, span)) * dir;
    let mut steps = 0;
    let mut ytmp = vec![0.0; n];
    while (t1 - t) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(Error::Stiffness { time: t });
        }
        steps += 1;
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..s {
                    acc += h * A[s][j] * k[j][i];
                }
                ytmp[i] = acc;
            }
            k[s] = field(t + C[s] * h, &ytmp);
        }
        // stage 7 evaluated at the 5th-order solution (FSAL)
        let ynew = ytmp.clone();
        let mut err = 0.0f64;
        for i in 0..n {
            let mut e = 0.0;
            for s in 0..7 {
                e += E[s] * k[s][i];
            }
            let sc = opts.tol + opts.tol * y[i].abs().max(ynew[i].abs());
            err = err.max((h * e).abs() / sc);
        }
        if !err.is_finite() {
            h *= 0.25;
            if h.abs() < opts.h_min {
                return Err(Error::Stiffness { time: t });
            }
            continue;
        }
        if err <= 1.0 {
            let ydiff: Vec<f64> = (0..n).map(|i| ynew[i] - y[i]).collect();
            let bspl: Vec<f64> = (0..n).map(|i| h * k[0][i] - ydiff[i]).collect();
            let c4: Vec<f64> = (0..n).map(|i| ydiff[i] - h * k[6][i] - bspl[i]).collect();
            let c5: Vec<f64> = (0..n)
                .map(|i| h * (0..7).map(|s| D[s] * k[s][i]).sum::<f64>())
                .collect();
            traj.steps.push(Step { t0: t, h, cont: [y.clone(), ydiff, bspl, c4, c5] });
            t = if (t1 - (t + h)) * dir <= 0.0 { t1 } else { t + h };
            y = ynew;
            if !in_domain(&y) {
                return Err(Error::DomainExit { time: t });
            }
            traj.times.push(t);
            traj.states.push(y.clone());
            k[0] = k[6].clone();
        }
        let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        h *= fac;
        if h.abs() < opts.h_min {
            return Err(Error::Stiffness { time: t });
        }
    }
    Ok(traj)
}

fn initial_step(f0: &[f64], y0: &[f64], span: f64) -> f64 {
    let d0 = y0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let d1 = f0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(0.1 * span).max(1e-12)
}
