use std::path::Path;

use serde_json::json;

use geoflow_core::acceptance::{mismatch, single, Relation, Stat};
use geoflow_core::algebra::{jacobi_check, unimodularity};
use geoflow_core::canonical::{
    forward_transform, lemma1_residuals, reconstruct_p, resolve_q_prime_sign, symplectic_check, CanonicalPoint,
    GeneratingFunction,
};
use geoflow_core::catalog::{
    catalog, group_metadata, load_orbit_model, sample_points, validate_chart, GroupChart, OrbitModel, INDEX_SAMPLES,
};
use geoflow_core::geodesic::{
    cross_check_reduction, crossing_times, energy_drift, hamiltonian, hamiltonian_generic, integrate_direct,
    integrate_reduced, noether_drift, quadrature_solution, ReducedSign,
};
use geoflow_core::klein_gordon::{
    kg_operator, kg_residuals, reduced_kg, solve_reduced, synthesize, Component, KgParams,
};
use geoflow_core::lambda_rep::{
    build_lrep, commutator_residual, composition_residual, fourier_family, fourier_round_trip, hermiticity_residual,
    intertwining_residual, packet_battery, pde_residuals, FourierBox, FourierFamily, Packet, TestFunction, C64,
};
use geoflow_core::poisson::{mu_l_generic, sample_orbit_points, validate_polarization, validate_transition, PhasePoint};

use crate::report::{CliError, Report};
use crate::scenario::{ConfigError, Scenario};

pub fn list_groups(seed: u64) -> Result<Report, CliError> {
    let mut rep = Report::new("list-groups", seed, None);
    let groups = catalog().iter().map(|c| group_metadata(c, seed)).collect::<Result<Vec<_>, _>>()?;
    rep.set("groups", groups);
    Ok(rep.finish())
}

pub fn analyze(s: &Scenario) -> Result<Report, CliError> {
    let c = s.chart();
    let alg = c.algebra();
    let meta = group_metadata(&c, s.seed)?;
    let mut rep = Report::new("analyze", s.seed, Some(&s.group));
    rep.set("dim", meta.dim);
    rep.set("index", meta.index);
    rep.set("unimodular", meta.unimodular);
    rep.set("integrable", meta.integrable);
    rep.set("m", meta.m);
    rep.set("trace", unimodularity(alg).1);
    let jr = jacobi_check(alg);
    rep.set("jacobi", json!({ "pass": jr.pass, "exact": jr.exact, "max_residual": jr.max_residual }));
    rep.set("index_samples", INDEX_SAMPLES);
    rep.check(mismatch("Jacobi identity", jr.pass));
    Ok(rep.finish())
}

pub fn validate(s: &Scenario) -> Result<Report, CliError> {
    let c = s.chart();
    let t = &s.tolerances;
    let mut rep = Report::new("validate", s.seed, Some(&s.group));
    if s.wants("chart") {
        let pts = sample_points(c.dim(), c.sample_radius(), s.samples.points, s.seed);
        let cr = validate_chart(&c, &pts, t.chart);
        for (k, v) in &cr.residuals {
            rep.check(single(format!("chart: {k}"), Ok(*v), t.chart, Relation::Below));
        }
    }
    if let Ok(o) = load_orbit_model(&c) {
        if s.wants("transition") {
            let mut st = Stat::new();
            st.push(validate_transition(c.algebra(), &o, s.samples.orbit, s.seed));
            rep.check(st.finish("transition brackets", t.transition, Relation::Below));
        }
        if let (true, Some(basis)) = (s.wants("polarization"), o.polarization()) {
            let lams: Vec<_> = sample_orbit_points(&o, 20, s.seed).into_iter().map(|(_, _, j)| o.section(&j)).collect();
            let pr = validate_polarization(c.algebra(), &basis, &lams)?;
            rep.set("polarization", &pr);
            rep.check(mismatch("polarization conditions", pr.pass));
        }
    }
    Ok(rep.finish())
}

pub fn geodesic(s: &Scenario, csv: Option<&Path>) -> Result<Report, CliError> {
    let c = s.chart();
    let g = s.invariant_metric();
    let t = &s.tolerances;
    let (x0, p0) = s
        .phase_point()?
        .ok_or_else(|| ConfigError::new("initial", "geodesic needs initial conditions (--x0/--p0 or a scenario)"))?;
    let pt = PhasePoint::new(x0, p0);
    let h0 = hamiltonian(&c, &g, &pt)?;
    let mut rep = Report::new("geodesic", s.seed, Some(&s.group));
    rep.set("t_end", s.t_end);
    rep.set("energy", h0);
    rep.set("signature", g.signature);

    let traj = integrate_direct(&c, &g, &pt, s.t_end, t.ode);
    match &traj {
        Ok(tr) => {
            let n = c.dim();
            rep.set("steps", tr.times.len() - 1);
            let z = tr.final_state();
            rep.set("final", json!({ "x": &z[..n], "p": &z[n..] }));
            if s.wants("conservation") {
                rep.check(single("energy drift (relative)", Ok(energy_drift(&c, &g, tr)), t.drift, Relation::Below));
                rep.check(single("Killing constant drift (relative)", Ok(noether_drift(&c, tr)), t.drift, Relation::Below));
            }
            if let Some(path) = csv {
                let mut w = csv::Writer::from_path(path)?;
                let mut head = vec!["t".to_string()];
                head.extend((1..=n).map(|i| format!("x{i}")));
                head.extend((1..=n).map(|i| format!("p{i}")));
                head.push("H".into());
                w.write_record(&head)?;
                for (time, z) in tr.times.iter().zip(&tr.states) {
                    let h = hamiltonian_generic(&c, &g, &z[..n], &z[n..]);
                    let row: Vec<String> = std::iter::once(*time).chain(z.iter().copied()).chain([h]).map(|v| v.to_string()).collect();
                    w.write_record(&row)?;
                }
                w.flush().map_err(|e| CliError::Io(e.to_string()))?;
            }
        }
        Err(e) => rep.check(single("direct integration", Err(e.clone()), t.drift, Relation::Below)),
    }

    if let Ok(o) = load_orbit_model(&c) {
        if s.wants("reduction") {
            match cross_check_reduction(&c, &o, &g, &pt, s.t_end, t.ode, 100, t.reduction) {
                Ok(r) => {
                    rep.conventions.insert("reduced_flow.sign".into(), format!("{:?}", r.sign).to_lowercase());
                    rep.set("reduction", &r);
                    rep.check(single(
                        "direct vs reduced momenta",
                        Ok(r.deviation_canonical.min(r.deviation_as_printed)),
                        t.reduction,
                        Relation::Below,
                    ));
                }
                Err(e) => rep.check(single("direct vs reduced momenta", Err(e), t.reduction, Relation::Below)),
            }
        }
        if s.wants("quadrature") && o.m() == 1 && o.pi_linear() {
            match quadrature_check(&c, &o, &g, &pt, s.t_end, t.ode) {
                Ok(Some(v)) => {
                    let mut st = Stat::new();
                    v.into_iter().for_each(|d| st.push(d));
                    rep.check(st.finish("quadrature vs ODE crossing times", t.quadrature, Relation::Below));
                }
                Ok(None) => {
                    rep.set("quadrature", "skipped: no monotone branch of useful length");
                }
                Err(e) => rep.check(single("quadrature vs ODE crossing times", Err(e), t.quadrature, Relation::Below)),
            }
        }
    }
    Ok(rep.finish())
}

/// Crossing-time differences at four targets inside the first monotone
/// stretch of `q′(t)`.
fn quadrature_check<C, O>(
    c: &C,
    o: &O,
    g: &geoflow_core::InvariantMetric,
    pt: &PhasePoint,
    t_end: f64,
    tol: f64,
) -> geoflow_core::Result<Option<Vec<f64>>>
where
    C: GroupChart + ?Sized,
    O: OrbitModel + ?Sized,
{
    let (q_prime, pi_prime, j) = o.invert(&mu_l_generic(c, &pt.x, &pt.p))?;
    let r = j.len();
    let cp = CanonicalPoint { q: q_prime.clone(), pi: pi_prime.clone(), q_prime, pi_prime, j, tau: vec![0.0; r] };
    let tr = integrate_reduced(o, g, &cp, t_end, tol, ReducedSign::Canonical)?;
    let q0 = cp.q_prime[0];
    let mut dir = 0.0;
    let mut reach = 0.0f64;
    for y in &tr.states[1..] {
        let d = y[0] - q0;
        if dir == 0.0 {
            dir = d.signum();
        }
        if d * dir < reach {
            break;
        }
        reach = d * dir;
    }
    if reach < 1e-3 {
        return Ok(None);
    }
    let targets: Vec<f64> = (1..=4).map(|k| q0 + dir * 0.2 * reach * k as f64).collect();
    let tq = quadrature_solution(o, g, &cp, &targets, 1e-12)?;
    let to = crossing_times(&tr, &targets);
    Ok(Some(tq.iter().zip(&to).map(|(a, b)| b.map_or(f64::INFINITY, |b| (a - b).abs())).collect()))
}

pub fn canonical_check(s: &Scenario) -> Result<Report, CliError> {
    let c = s.chart();
    let o = load_orbit_model(&c)?;
    let gen = GeneratingFunction::new(&c, &o)?;
    let t = &s.tolerances;
    let mut rep = Report::new("canonical-check", s.seed, Some(&s.group));
    let xs = sample_points(c.dim(), c.sample_radius(), s.samples.tuples, s.seed);
    let tuples = sample_orbit_points(&o, s.samples.tuples, s.seed.wrapping_add(1));
    if s.wants("lemma") {
        let mut res = Vec::new();
        let mut pi = Stat::new();
        for (x, (q, pp, j)) in xs.iter().zip(&tuples) {
            match lemma1_residuals(&gen, x, q, pp, j) {
                Ok(r) => {
                    pi.push(r.pi);
                    res.push(r);
                }
                Err(e) => pi.fail(e.to_string()),
            }
        }
        let (sign, worst) = resolve_q_prime_sign(&res);
        rep.conventions.insert("q_prime".into(), if sign > 0.0 { "+dS/dpi'" } else { "-dS/dpi'" }.into());
        rep.check(pi.finish("|dS/dq - pi|", t.lemma, Relation::Below));
        let mut qs = Stat::new();
        res.iter().for_each(|r| qs.push(if sign > 0.0 { r.q_prime_plus } else { r.q_prime_minus }));
        rep.check(qs.finish("|dS/dpi' -+ q'|", t.lemma, Relation::Below));
        rep.set("q_prime_worst", worst);
        let mut id = Stat::new();
        for (q, pp, j) in tuples.iter().take(10) {
            id.take(lemma1_residuals(&gen, &c.identity(), q, pp, j).map(|r| r.pi.max(if sign > 0.0 { r.q_prime_plus } else { r.q_prime_minus })));
        }
        rep.check(id.finish("identity case", 0.0, Relation::Exact));
    }
    if s.wants("symplectic") {
        let xs = sample_points(c.dim(), c.sample_radius(), s.samples.symplectic, s.seed.wrapping_add(2));
        let ps = sample_points(c.dim(), 2.0, s.samples.symplectic, s.seed.wrapping_add(3));
        let (mut sym, mut round) = (Stat::new(), Stat::new());
        for (x, p) in xs.into_iter().zip(ps) {
            let pt = PhasePoint::new(x, p);
            let cp = match forward_transform(&gen, &pt) {
                Ok(cp) => cp,
                // off the orbit patch; not part of the check
                Err(geoflow_core::Error::Regularity(_))
                | Err(geoflow_core::Error::Domain { .. })
                | Err(geoflow_core::Error::Inversion(_)) => continue,
                Err(e) => {
                    sym.fail(e.to_string());
                    continue;
                }
            };
            let back = reconstruct_p(&gen, &pt.x, &cp);
            round.push(back.iter().zip(&pt.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            sym.take(symplectic_check(&gen, &pt).map(|r| r.residual));
        }
        rep.check(sym.finish("M^T Omega M - Omega", t.symplectic, Relation::Below));
        rep.check(round.finish("p reconstructed from (q, pi')", t.lemma, Relation::Below));
    }
    Ok(rep.finish())
}

pub fn lambda_check(s: &Scenario) -> Result<Report, CliError> {
    let c = s.chart();
    let o = load_orbit_model(&c)?;
    let t = &s.tolerances;
    let labels: Vec<Vec<f64>> = sample_orbit_points(&o, 3, s.seed).into_iter().map(|(_, _, j)| j).collect();
    build_lrep(&o, &labels[0])?;
    let mut rep = Report::new("lambda-check", s.seed, Some(&s.group));
    let battery = packet_battery(o.m(), 20, o.q_period().is_some(), s.seed.wrapping_add(1));
    if s.wants("lrep") {
        let (mut comm, mut herm) = (Stat::new(), Stat::new());
        let pts = sample_points(o.m(), 2.0, 50, s.seed.wrapping_add(2));
        for j in &labels {
            let lr = build_lrep(&o, j)?;
            comm.push(commutator_residual(&lr, c.algebra(), &battery, &pts));
            if o.m() <= 1 {
                for p in battery.windows(2).take(5) {
                    herm.take(hermiticity_residual(&lr, &p[0], &p[1], |q| o.q_density(&[q]), 1e-12));
                }
            }
        }
        rep.check(comm.finish("commutator closure", t.commutator, Relation::Below));
        if o.m() <= 1 {
            rep.check(herm.finish("anti-Hermiticity", t.hermiticity, Relation::Below));
        }
    }
    if s.wants("kernel") {
        let gen = GeneratingFunction::new(&c, &o)?;
        let xs = sample_points(c.dim(), c.sample_radius(), 50, s.seed.wrapping_add(3));
        let ys = sample_points(c.dim(), c.sample_radius(), 50, s.seed.wrapping_add(4));
        let pts = sample_orbit_points(&o, 50, s.seed.wrapping_add(5));
        let (mut left, mut right, mut comp) = (Stat::new(), Stat::new(), Stat::new());
        for ((x, y), (q, _, j)) in xs.iter().zip(&ys).zip(&pts) {
            match build_lrep(&o, j).and_then(|lr| pde_residuals(&gen, &lr, &battery[..5], x, q)) {
                Ok(r) => {
                    left.push(r.left);
                    right.push(r.right_minus);
                }
                Err(e) => left.fail(e.to_string()),
            }
            comp.take(composition_residual(&gen, x, y, q, j).map(|r| r.max()));
        }
        rep.conventions.insert("kernel.right_system".into(), "(eta - conj l(q'))D = 0".into());
        rep.check(left.finish("kernel solves the left system", t.pde, Relation::Below));
        rep.check(right.finish("kernel solves the right system", t.pde, Relation::Below));
        rep.check(comp.finish("kernel(x) o kernel(y) = kernel(xy)", t.composition, Relation::Below));
    }
    if s.wants("fourier") {
        if let Ok(family) = fourier_family(&c, &o) {
            let bx = FourierBox::default();
            let n = c.dim();
            let v = sample_points(2 * n, 0.6, 1, s.seed.wrapping_add(6)).remove(0);
            let psi = Packet::new(v[..n].to_vec(), 0.9, v[n..].to_vec());
            let rt = fourier_round_trip(family, &psi, &bx, None);
            rep.check(single("L2 round trip", rt.map(|r| r.relative_l2), t.round_trip, Relation::Below));
            let lr = build_lrep(&o, &labels[0])?;
            let samples: Vec<(Vec<f64>, Vec<f64>)> = match family {
                FourierFamily::Heisenberg => {
                    sample_points(2, 1.0, 5, s.seed.wrapping_add(7)).into_iter().map(|v| (vec![v[0]], vec![v[1]])).collect()
                }
                FourierFamily::Abelian { .. } => vec![(vec![], vec![])],
            };
            let r = intertwining_residual(family, &c, &lr, &psi, &samples, &bx);
            rep.check(single("transform intertwines left fields", Ok(r), t.intertwining, Relation::Below));
            rep.conventions.insert("fourier.measure".into(), match family {
                FourierFamily::Heisenberg => "|lambda| dlambda / (4 pi^2)".into(),
                FourierFamily::Abelian { n } => format!("dk / (2 pi)^{n}"),
            });
        } else {
            rep.set("fourier", "skipped: only abelian and heisenberg3 have a shipped transform");
        }
    }
    Ok(rep.finish())
}

/// Without a time-like reduced variable the label must sit on the mass shell
/// `G^{ab} k_a k_b = m²`; otherwise any label works.
fn default_label(m: usize, r: usize, mass: f64, g: &geoflow_core::InvariantMetric) -> Vec<f64> {
    let mut l = vec![if m == 0 { 0.0 } else { 1.0 }; r];
    if m == 0 && r > 0 {
        let (i, gii) = (0..r).map(|i| (i, g.g_inv[i][i])).fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        l[i] = if gii > 0.0 { mass / gii.sqrt() } else { 1.0 };
    }
    l
}

pub fn kg(s: &Scenario, csv: Option<&Path>) -> Result<Report, CliError> {
    let c = s.chart();
    let g = s.invariant_metric();
    let o = load_orbit_model(&c)?;
    let k = &s.kg;
    let op = kg_operator(&c, &g, KgParams::new(k.mass, k.zeta)?)?;
    let mut rep = Report::new("kg", s.seed, Some(&s.group));
    rep.set("mass", k.mass);
    rep.set("zeta", k.zeta);
    rep.set("scalar_curvature", op.r);
    rep.set("potential", op.potential());
    let r = o.r();
    let lambdas = k.lambdas.clone().unwrap_or_else(|| default_label(o.m(), r, k.mass, &g));
    if r > 0 && (lambdas.is_empty() || lambdas.len() % r != 0) {
        return Err(ConfigError::new("kg.lambdas", format!("{} values do not split into labels of length {r}", lambdas.len())).into());
    }
    let labels: Vec<&[f64]> = if r == 0 { vec![&[]] } else { lambdas.chunks(r).collect() };
    let m = o.m();
    let q0: Vec<f64> = vec![k.q0; m];
    let mut components = Vec::new();
    for (i, lam) in labels.iter().enumerate() {
        let red = reduced_kg(&op, &o, lam)?;
        let span = if m == 0 { (0.0, 0.0) } else { (k.q0 - k.span, k.q0 + k.span) };
        let sol = solve_reduced(&red, k.q0, C64::new(k.phi0[0], k.phi0[1]), C64::new(k.dphi0[0], k.dphi0[1]), span, 1e-12)?;
        // distinct weights keep a superposition from degenerating
        components.push(Component { weight: C64::new(1.0, i as f64), solution: sol });
    }
    let psi = synthesize(GeneratingFunction::new(&c, &o)?, &q0, components)?;
    let radius = c.sample_radius().min(1.0);
    let xs = sample_points(c.dim(), radius, s.samples.verify, s.seed);
    psi.check_coverage(&xs)?;
    let res = kg_residuals(&op, &psi, &xs);
    rep.set("verified_points", res.samples);
    rep.set("max_abs_residual", res.max_abs);
    rep.conventions.insert("kg.trace_term".into(), format!("{:+} C_b G^ab eta_a", op.c_sign));
    if s.wants("kg") {
        rep.check(single("|H psi| / local scale", Ok(res.max_relative), s.tolerances.kg, Relation::Below));
    }
    if let Some(path) = csv {
        let mut w = csv::Writer::from_path(path)?;
        let mut head: Vec<String> = (1..=c.dim()).map(|i| format!("x{i}")).collect();
        head.extend(["re_psi".into(), "im_psi".into(), "abs_h_psi".into()]);
        w.write_record(&head)?;
        for x in &xs {
            let v: C64 = psi.eval(x);
            let (abs, _) = op.residual(&psi, x);
            let row: Vec<String> = x.iter().copied().chain([v.re, v.im, abs]).map(|v| v.to_string()).collect();
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(rep.finish())
}
