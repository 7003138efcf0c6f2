//! Scenario files: JSON run configurations with defaults and field-path
//! diagnostics.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use geoflow_core::catalog::{load_group, load_orbit_model, Chart, GroupChart, OrbitModel};
use geoflow_core::geodesic::InvariantMetric;
use geoflow_core::linalg::det;

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "GEOFLOW_SEED";

/// A configuration problem, located by a dotted field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub x0: Option<Vec<f64>>,
    pub p0: Option<Vec<f64>>,
    /// Orbit labels; with `q_prime0` and `pi_prime0` this starts at the identity.
    pub j: Option<Vec<f64>>,
    pub q_prime0: Option<Vec<f64>>,
    pub pi_prime0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct KgSettings {
    pub mass: f64,
    pub zeta: f64,
    /// Orbit labels, `r` numbers per component. Unset means one label of ones.
    pub lambdas: Option<Vec<f64>>,
    pub q0: f64,
    /// Reduced initial data `(Re, Im)`.
    pub phi0: [f64; 2],
    pub dphi0: [f64; 2],
    /// Half-width of the reduced integration interval around `q0`.
    pub span: f64,
}

impl Default for KgSettings {
    fn default() -> Self {
        KgSettings { mass: 1.0, zeta: 0.0, lambdas: None, q0: 0.3, phi0: [1.0, 0.0], dphi0: [0.2, 0.5], span: 3.0 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub chart: f64,
    pub transition: f64,
    pub lemma: f64,
    pub symplectic: f64,
    pub reduction: f64,
    pub drift: f64,
    pub quadrature: f64,
    pub commutator: f64,
    pub hermiticity: f64,
    pub pde: f64,
    pub composition: f64,
    pub round_trip: f64,
    pub intertwining: f64,
    pub kg: f64,
    /// Local error target of the ODE integrators.
    pub ode: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            chart: 1e-8,
            transition: 1e-8,
            lemma: 1e-6,
            symplectic: 1e-5,
            reduction: 1e-6,
            drift: 1e-7,
            quadrature: 1e-6,
            commutator: 1e-8,
            hermiticity: 1e-6,
            pde: 1e-6,
            composition: 1e-7,
            round_trip: 1e-3,
            intertwining: 1e-4,
            kg: 1e-6,
            ode: 1e-11,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Samples {
    pub points: usize,
    pub orbit: usize,
    pub tuples: usize,
    pub symplectic: usize,
    pub verify: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Samples { points: 100, orbit: 200, tuples: 100, symplectic: 25, verify: 100 }
    }
}

/// On-disk form; every field except `group` may be omitted.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    group: String,
    metric: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    initial: Option<Initial>,
    t_end: Option<f64>,
    #[serde(default)]
    kg: Option<KgSettings>,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    samples: Samples,
    seed: Option<u64>,
    #[serde(default)]
    checks: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub group: String,
    pub metric: Vec<Vec<f64>>,
    pub initial: Option<Initial>,
    pub t_end: f64,
    pub kg: KgSettings,
    pub tolerances: Tolerances,
    pub samples: Samples,
    pub seed: u64,
    pub checks: Vec<String>,
}

pub const CHECK_NAMES: [&str; 12] = [
    "chart",
    "transition",
    "polarization",
    "lemma",
    "symplectic",
    "reduction",
    "conservation",
    "quadrature",
    "lrep",
    "kernel",
    "fourier",
    "kg",
];

impl Scenario {
    /// Defaults for `group` with the identity metric.
    pub fn for_group(group: &str) -> Result<Self, ConfigError> {
        let chart = chart(group)?;
        let n = chart.dim();
        let metric = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Ok(Scenario {
            group: group.to_string(),
            metric,
            initial: None,
            t_end: 5.0,
            kg: KgSettings::default(),
            tolerances: Tolerances::default(),
            samples: Samples::default(),
            seed: DEFAULT_SEED,
            checks: Vec::new(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { String::new() } else { path };
            ConfigError::new(path, e.inner().to_string())
        })?;
        let mut s = Scenario::for_group(&raw.group)?;
        if let Some(m) = raw.metric {
            s.set_metric(m, "metric")?;
        }
        s.initial = raw.initial;
        if let Some(t) = raw.t_end {
            if !(t.is_finite() && t > 0.0) {
                return Err(ConfigError::new("t_end", "must be positive and finite"));
            }
            s.t_end = t;
        }
        if let Some(kg) = raw.kg {
            s.kg = kg;
        }
        s.tolerances = raw.tolerances;
        s.samples = raw.samples;
        if let Some(seed) = raw.seed {
            s.seed = seed;
        }
        s.checks = raw.checks;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        Scenario::from_json(&text)
    }

    pub fn set_metric(&mut self, m: Vec<Vec<f64>>, path: &str) -> Result<(), ConfigError> {
        let n = chart(&self.group)?.dim();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(ConfigError::new(path, format!("must be {n}×{n} for {}", self.group)));
        }
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(ConfigError::new(path, "entries must be finite"));
        }
        for i in 0..n {
            for j in 0..i {
                if m[i][j] != m[j][i] {
                    return Err(ConfigError::new(path, format!("not symmetric: [{i}][{j}] = {} but [{j}][{i}] = {}", m[i][j], m[j][i])));
                }
            }
        }
        let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
        if det(&m).abs() <= 1e-12 * scale.powi(n as i32) {
            return Err(ConfigError::new(
                path,
                "degenerate (det = 0); an invariant metric must be non-degenerate so that G^{ab} exists",
            ));
        }
        self.metric = m;
        Ok(())
    }

    /// Environment seed overrides the file; an explicit flag overrides both.
    pub fn apply_seed(&mut self, flag: Option<u64>) -> Result<(), ConfigError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v.trim().parse().map_err(|_| ConfigError::new(SEED_ENV, format!("not an unsigned integer: {v:?}")))?;
        }
        if let Some(s) = flag {
            self.seed = s;
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let c = chart(&self.group)?;
        let n = c.dim();
        let t = &self.tolerances;
        for (name, v) in [
            ("chart", t.chart),
            ("transition", t.transition),
            ("lemma", t.lemma),
            ("symplectic", t.symplectic),
            ("reduction", t.reduction),
            ("drift", t.drift),
            ("quadrature", t.quadrature),
            ("commutator", t.commutator),
            ("hermiticity", t.hermiticity),
            ("pde", t.pde),
            ("composition", t.composition),
            ("round_trip", t.round_trip),
            ("intertwining", t.intertwining),
            ("kg", t.kg),
            ("ode", t.ode),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::new(format!("tolerances.{name}"), "must be positive and finite"));
            }
        }
        let s = &self.samples;
        for (name, v) in [("points", s.points), ("orbit", s.orbit), ("tuples", s.tuples), ("symplectic", s.symplectic), ("verify", s.verify)] {
            if v == 0 {
                return Err(ConfigError::new(format!("samples.{name}"), "must be at least 1"));
            }
        }
        for (i, name) in self.checks.iter().enumerate() {
            if !CHECK_NAMES.contains(&name.as_str()) {
                return Err(ConfigError::new(format!("checks[{i}]"), format!("unknown check {name:?}; expected one of {CHECK_NAMES:?}")));
            }
        }
        if !(self.kg.mass.is_finite() && self.kg.mass > 0.0) {
            return Err(ConfigError::new("kg.mass", "must be positive"));
        }
        if !self.kg.zeta.is_finite() {
            return Err(ConfigError::new("kg.zeta", "must be finite"));
        }
        if !(self.kg.span.is_finite() && self.kg.span > 0.0) {
            return Err(ConfigError::new("kg.span", "must be positive"));
        }
        if let Some(init) = &self.initial {
            let dims = |v: &Option<Vec<f64>>, want: usize, field: &str| -> Result<(), ConfigError> {
                match v {
                    Some(v) if v.len() != want => {
                        Err(ConfigError::new(format!("initial.{field}"), format!("expected {want} entries, got {}", v.len())))
                    }
                    Some(v) if v.iter().any(|x| !x.is_finite()) => {
                        Err(ConfigError::new(format!("initial.{field}"), "entries must be finite"))
                    }
                    _ => Ok(()),
                }
            };
            dims(&init.x0, n, "x0")?;
            dims(&init.p0, n, "p0")?;
            let cartesian = init.x0.is_some() || init.p0.is_some();
            let reduced = init.j.is_some() || init.q_prime0.is_some() || init.pi_prime0.is_some();
            match (cartesian, reduced) {
                (true, true) => return Err(ConfigError::new("initial", "give either (x0, p0) or (j, q_prime0, pi_prime0), not both")),
                (true, false) => {
                    if init.x0.is_none() {
                        return Err(ConfigError::new("initial.x0", "missing"));
                    }
                    if init.p0.is_none() {
                        return Err(ConfigError::new("initial.p0", "missing"));
                    }
                    let x0 = init.x0.as_ref().expect("checked");
                    if !c.domain().contains(x0) {
                        return Err(ConfigError::new("initial.x0", "outside the chart domain"));
                    }
                }
                (false, true) => {
                    let o = load_orbit_model(&c).map_err(|e| ConfigError::new("initial", e.to_string()))?;
                    dims(&init.j, o.r(), "j")?;
                    dims(&init.q_prime0, o.m(), "q_prime0")?;
                    dims(&init.pi_prime0, o.m(), "pi_prime0")?;
                    for (v, f) in [(&init.j, "j"), (&init.q_prime0, "q_prime0"), (&init.pi_prime0, "pi_prime0")] {
                        if v.is_none() {
                            return Err(ConfigError::new(format!("initial.{f}"), "missing"));
                        }
                    }
                    let j = init.j.as_ref().expect("checked");
                    if !o.is_regular(j) {
                        return Err(ConfigError::new("initial.j", "singular orbit label"));
                    }
                }
                (false, false) => return Err(ConfigError::new("initial", "empty")),
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> Chart {
        chart(&self.group).expect("validated")
    }

    pub fn invariant_metric(&self) -> InvariantMetric {
        InvariantMetric::new(self.metric.clone()).expect("validated")
    }

    /// `(x₀, p₀)`; labels `(J, q′₀, π′₀)` start at the identity with
    /// `p₀ = f(q′₀, π′₀; J)`, since both momentum maps reduce to `p` there.
    pub fn phase_point(&self) -> Result<Option<(Vec<f64>, Vec<f64>)>, ConfigError> {
        let Some(init) = &self.initial else { return Ok(None) };
        if let (Some(x), Some(p)) = (&init.x0, &init.p0) {
            return Ok(Some((x.clone(), p.clone())));
        }
        let c = self.chart();
        let o = load_orbit_model(&c).map_err(|e| ConfigError::new("initial", e.to_string()))?;
        let (j, q, pi) = (init.j.as_ref(), init.q_prime0.as_ref(), init.pi_prime0.as_ref());
        let (j, q, pi) = (j.expect("validated"), q.expect("validated"), pi.expect("validated"));
        if !o.in_patch(q, pi, j) {
            return Err(ConfigError::new("initial", "(q_prime0, pi_prime0) outside the orbit model's patch"));
        }
        Ok(Some((c.identity(), o.transition(q, pi, j))))
    }

    /// Whether `name` was requested (an empty list requests everything).
    pub fn wants(&self, name: &str) -> bool {
        self.checks.is_empty() || self.checks.iter().any(|c| c == name)
    }
}

fn chart(group: &str) -> Result<Chart, ConfigError> {
    load_group(group).map_err(|e| ConfigError::new("group", e.to_string()))
}

/// Reads a bare `n × n` JSON matrix.
pub fn read_metric(path: &Path) -> Result<Vec<Vec<f64>>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("--metric", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError::new("--metric", format!("expected a JSON matrix: {e}")))
}
