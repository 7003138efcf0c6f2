use geoflow_core::canonical::{
    forward_transform, lemma1_residuals, reconstruct_p, resolve_q_prime_sign, symplectic_check, GeneratingFunction,
};
use geoflow_core::catalog::{load_group, load_orbit_model, sample_points, GroupChart, OrbitModel};
use geoflow_core::poisson::{mu_l, mu_r, sample_orbit_points, PhasePoint};

// Hand-integrated closed forms of S along any path from the identity.
fn s_heisenberg(x: &[f64], q: f64, pp: f64, j: f64) -> f64 {
    q * pp + pp * x[0] - j * (q * x[1] + x[0] * x[1] - x[2])
}

fn s_euclid(x: &[f64], q: f64, pp: f64, j: f64) -> f64 {
    let a = q + x[0];
    q * pp + pp * x[0] + j * (x[1] * a.cos() + x[2] * a.sin())
}

fn s_aff1(x: &[f64], q: f64, pp: f64) -> f64 {
    q * pp + pp * x[0] + x[1] * (-q - x[0]).exp()
}

fn tuples(name: &str, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let chart = load_group(name).unwrap();
    let orbit = load_orbit_model(&chart).unwrap();
    let xs = sample_points(chart.dim(), chart.sample_radius(), count, seed);
    sample_orbit_points(&orbit, count, seed + 7)
        .into_iter()
        .zip(xs)
        .map(|((q, pp, j), x)| (x, q, pp, j))
        .collect()
}

#[test]
fn s_matches_closed_forms() {
    for name in ["heisenberg3", "euclid2", "aff1"] {
        let chart = load_group(name).unwrap();
        let orbit = load_orbit_model(&chart).unwrap();
        let gen = GeneratingFunction::new(&chart, &orbit).unwrap();
        for (x, q, pp, j) in tuples(name, 30, 4) {
            let got = gen.eval(&x, &q, &pp, &j).unwrap();
            let want = match name {
                "heisenberg3" => s_heisenberg(&x, q[0], pp[0], j[0]),
                "euclid2" => s_euclid(&x, q[0], pp[0], j[0]),
                _ => s_aff1(&x, q[0], pp[0]),
            };
            assert!((got - want).abs() < 1e-10, "{name}: {got} vs {want}");
        }
    }
}

#[test]
fn s_at_identity_is_the_anchor() {
    let chart = load_group("heisenberg3").unwrap();
    let orbit = load_orbit_model(&chart).unwrap();
    let gen = GeneratingFunction::new(&chart, &orbit).unwrap();
    assert_eq!(gen.eval(&[0.0; 3], &[0.7], &[-1.2], &[2.0]).unwrap(), 0.7 * -1.2);
}

#[test]
fn abelian_s_is_linear() {
    let chart = load_group("abelian_3").unwrap();
    let orbit = load_orbit_model(&chart).unwrap();
    let gen = GeneratingFunction::new(&chart, &orbit).unwrap();
    let x = [0.4, -1.0, 2.5];
    let j = [1.5, 0.5, -2.0];
    let s = gen.eval(&x, &[], &[], &j).unwrap();
    assert!((s - (0.6 - 0.5 - 5.0)).abs() < 1e-14);

    let pt = PhasePoint::new(x.to_vec(), j.to_vec());
    let cp = forward_transform(&gen, &pt).unwrap();
    assert_eq!(cp.j, j.to_vec());
    assert!(cp.tau.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-14));
    assert!(symplectic_check(&gen, &pt).unwrap().residual < 1e-14);
}

#[test]
fn lemma_relations_hold_with_plus_sign() {
    for name in ["heisenberg3", "euclid2", "aff1"] {
        let chart = load_group(name).unwrap();
        let orbit = load_orbit_model(&chart).unwrap();
        let gen = GeneratingFunction::new(&chart, &orbit).unwrap();
        let res: Vec<_> =
            tuples(name, 100, 21).iter().map(|(x, q, pp, j)| lemma1_residuals(&gen, x, q, pp, j).unwrap()).collect();
        let (sign, worst) = resolve_q_prime_sign(&res);
        assert_eq!(sign, 1.0, "{name}");
        assert!(worst < 1e-6, "{name}: {worst}");
        assert!(res.iter().all(|r| r.pi < 1e-6), "{name}");
    }
}

#[test]
fn dropping_the_anchor_breaks_the_lemma_at_identity() {
    let chart = load_group("heisenberg3").unwrap();
    let orbit = load_orbit_model(&chart).unwrap();
    let mut gen = GeneratingFunction::new(&chart, &orbit).unwrap();
    let ok = lemma1_residuals(&gen, &[0.0; 3], &[0.8], &[1.1], &[1.0]).unwrap();
    assert_eq!(ok.pi, 0.0);
    gen.anchor = false;
    let bad = lemma1_residuals(&gen, &[0.0; 3], &[0.8], &[1.1], &[1.0]).unwrap();
    assert!(bad.pi > 1.0 && bad.q_prime_plus > 0.5);
}

#[test]
fn forward_transform_roundtrips() {
    for name in ["heisenberg3", "euclid2", "aff1"] {
        let chart = load_group(name).unwrap();
        let orbit = load_orbit_model(&chart).unwrap();
        let gen = GeneratingFunction::new(&chart, &orbit).unwrap();
        let xs = sample_points(chart.dim(), chart.sample_radius(), 100, 2);
        let mut checked = 0;
        for ((q, pi, j), x) in sample_orbit_points(&orbit, 100, 9).into_iter().zip(xs) {
            // build p with μ_r(x, p) = f(q, π)
            let f = orbit.transition(&q, &pi, &j);
            let xi = chart.left_fields::<f64>(&x);
            let p = solve_lin(&transpose(&xi), &f);
            let pt = PhasePoint::new(x.clone(), p.clone());
            let cp = forward_transform(&gen, &pt).unwrap();
            let pr = reconstruct_p(&gen, &x, &cp);
            for (a, b) in pr.iter().zip(&p) {
                assert!((a - b).abs() < 1e-8, "{name}: {pr:?} vs {p:?}");
            }
            let fl = orbit.transition(&cp.q_prime, &cp.pi_prime, &cp.j);
            let fr = orbit.transition(&cp.q, &cp.pi, &cp.j);
            let (ml, mr) = (mu_l(&chart, &pt).unwrap(), mu_r(&chart, &pt).unwrap());
            for k in 0..chart.dim() {
                assert!((fl[k] - ml[k]).abs() < 1e-7 && (fr[k] - mr[k]).abs() < 1e-7, "{name}");
            }
            assert_eq!(2 * cp.q.len() + cp.j.len(), chart.dim());
            checked += 1;
        }
        assert_eq!(checked, 100);
    }
}

#[test]
fn heisenberg_tau_matches_closed_form() {
    let chart = load_group("heisenberg3").unwrap();
    let orbit = load_orbit_model(&chart).unwrap();
    let gen = GeneratingFunction::new(&chart, &orbit).unwrap();
    let x = [0.3, -0.8, 1.1];
    let p = [0.5, 1.5, -0.7];
    let cp = forward_transform(&gen, &PhasePoint::new(x.to_vec(), p.to_vec())).unwrap();
    let tau = x[2] - x[0] * x[1] - cp.q[0] * x[1];
    assert!((cp.tau[0] - tau).abs() < 1e-9);
}

#[test]
fn transform_is_symplectic() {
    for name in ["heisenberg3", "euclid2", "aff1"] {
        let chart = load_group(name).unwrap();
        let orbit = load_orbit_model(&chart).unwrap();
        let gen = GeneratingFunction::new(&chart, &orbit).unwrap();
        let xs = sample_points(chart.dim(), chart.sample_radius(), 25, 13);
        let ps = sample_points(chart.dim(), 2.0, 25, 14);
        for (x, mut p) in xs.into_iter().zip(ps) {
            if name == "aff1" {
                // stay on the s = +1 orbit
                p[1] = p[1].abs() + 0.1;
            }
            let r = symplectic_check(&gen, &PhasePoint::new(x, p)).unwrap();
            assert!(r.residual < 1e-5, "{name}: {}", r.residual);
        }
    }
}

#[test]
fn s_is_path_independent_and_closed() {
    for name in ["heisenberg3", "euclid2", "aff1", "abelian_2"] {
        let chart = load_group(name).unwrap();
        let orbit = load_orbit_model(&chart).unwrap();
        let gen = GeneratingFunction::new(&chart, &orbit).unwrap();
        for (x, q, pp, j) in tuples(name, 50, 31) {
            let (d, err) = gen.path_discrepancy(&x, &q, &pp, &j).unwrap();
            assert!(d <= 2.0 * gen.tol.max(err), "{name}: {d}");
            assert!(gen.closedness_residual(&x, &q, &pp, &j) < 1e-8);
        }
    }
}

#[test]
fn so3_has_no_generating_function() {
    let chart = load_group("so3").unwrap();
    let orbit = load_orbit_model(&chart).unwrap();
    assert!(GeneratingFunction::new(&chart, &orbit).is_err());
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

// Plain Gaussian elimination, kept apart from the crate's linalg.
fn solve_lin(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &v)| [&r[..], &[v]].concat()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        for i in 0..n {
            if i != c {
                let f = m[i][c] / m[c][c];
                for k in c..=n {
                    m[i][k] -= f * m[c][k];
                }
            }
        }
    }
    (0..n).map(|i| m[i][n] / m[i][i]).collect()
}
