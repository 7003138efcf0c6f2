use num_complex::Complex;

use geoflow_core::canonical::GeneratingFunction;
use geoflow_core::catalog::{catalog, load_group, load_orbit_model, sample_points, GroupChart};
use geoflow_core::dual::Real;
use geoflow_core::error::Error;
use geoflow_core::geodesic::InvariantMetric;
use geoflow_core::klein_gordon::{
    curvature_oracle, kg_intertwining_residual, kg_operator, kg_residuals, reduced_kg, scalar_curvature, solve_reduced,
    symmetry_residual, synthesize, Component, KgParams,
};
use geoflow_core::lambda_rep::{cexp, packet_battery, Applied, FourierBox, Packet, TestFunction, C64};

struct PlaneWave(Vec<f64>);

impl TestFunction for PlaneWave {
    fn eval<T: Real>(&self, x: &[T]) -> Complex<T> {
        let mut ph = T::zero();
        for (xi, k) in x.iter().zip(&self.0) {
            ph += *xi * *k;
        }
        cexp(T::zero(), ph)
    }
}

fn skewed() -> InvariantMetric {
    InvariantMetric::new(vec![vec![1.5, 0.2, 0.0], vec![0.2, 1.0, 0.1], vec![0.0, 0.1, 0.8]]).unwrap()
}

#[test]
fn params_reject_nonpositive_mass() {
    assert!(KgParams::new(0.0, 0.0).is_err());
    assert!(KgParams::new(-1.0, 0.0).is_err());
    assert!(KgParams::new(1.0, f64::NAN).is_err());
}

#[test]
fn curvature_of_the_identity_metric() {
    // flat planes, Heisenberg −1/2, S³ of radius 2, hyperbolic plane of curvature −1
    for (name, want) in [("abelian_2", 0.0), ("heisenberg3", -0.5), ("euclid2", 0.0), ("so3", 1.5), ("aff1", -2.0), ("so3_x_so3", 3.0)]
    {
        let c = load_group(name).unwrap();
        let rep = scalar_curvature(&c, &InvariantMetric::identity(c.dim()), 0.5, 20, 1).unwrap();
        assert!((rep.r - want).abs() < 1e-10, "{name}: {}", rep.r);
        assert!(rep.spread < 1e-6 * want.abs().max(1.0));
    }
}

#[test]
fn curvature_matches_finite_difference_oracle() {
    for c in catalog() {
        let mut metrics = vec![InvariantMetric::identity(c.dim())];
        if c.dim() == 3 {
            metrics.push(skewed());
        }
        if c.name() == "so3" {
            metrics.push(InvariantMetric::diagonal(&[1.0, 1.0, -1.0]).unwrap());
        }
        for g in &metrics {
            let r = scalar_curvature(&c, g, 0.5, 20, 2).unwrap().r;
            for x in sample_points(c.dim(), 0.4, 3, 5) {
                let o = curvature_oracle(&c, g, &x).unwrap();
                assert!((o - r).abs() < 1e-6, "{}: {r} vs {o}", c.name());
            }
        }
    }
}

#[test]
fn abelian_plane_waves() {
    let c = load_group("abelian_2").unwrap();
    let g = InvariantMetric::diagonal(&[1.0, 2.0]).unwrap();
    let op = kg_operator(&c, &g, KgParams::new(1.0, 0.0).unwrap()).unwrap();
    // G^{ab} = diag(1, 1/2), on shell: k₁² + k₂²/2 = 1
    let on = PlaneWave(vec![0.6, 0.8 * 2f64.sqrt()]);
    let off = PlaneWave(vec![0.3, 1.1]);
    for x in sample_points(2, 2.0, 10, 3) {
        assert!(op.apply::<_, f64>(&on, &x).norm() < 1e-14);
        let want = (1.0 - (0.09 + 0.5 * 1.21)) * off.eval::<f64>(&x);
        assert!((op.apply::<_, f64>(&off, &x) - want).norm() < 1e-14);
    }
}

#[test]
fn invariant_form_agrees_with_coordinate_laplacian() {
    let battery = packet_battery(3, 5, false, 4);
    for (name, tol) in [("abelian_3", 1e-8), ("heisenberg3", 1e-6), ("euclid2", 1e-6), ("so3", 1e-6)] {
        let c = load_group(name).unwrap();
        let g = skewed();
        let op = kg_operator(&c, &g, KgParams::new(1.3, 0.4).unwrap()).unwrap();
        for (f, x) in battery.iter().zip(sample_points(3, 0.5, 5, 6)) {
            let a: C64 = op.apply(f, &x);
            let b = op.laplace_beltrami_oracle(f, &x).unwrap();
            assert!((a - b).norm() < tol, "{name}: {a} vs {b}");
        }
    }
}

#[test]
fn trace_term_sign_is_fixed_by_the_oracle() {
    let c = load_group("aff1").unwrap();
    let g = InvariantMetric::new(vec![vec![1.0, 0.3], vec![0.3, 2.0]]).unwrap();
    let mut op = kg_operator(&c, &g, KgParams::new(1.0, 0.2).unwrap()).unwrap();
    let f = Packet::new(vec![0.2, -0.1], 0.7, vec![0.5, 0.4]);
    let x = [0.3, 0.2];
    let b = op.laplace_beltrami_oracle(&f, &x).unwrap();
    assert!((op.apply::<_, f64>(&f, &x) - b).norm() < 1e-8);
    op.c_sign = -op.c_sign;
    assert!((op.apply::<_, f64>(&f, &x) - b).norm() > 1e-2);
}

#[test]
fn reduction_needs_unimodular_group() {
    let c = load_group("aff1").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let g = InvariantMetric::identity(2);
    let op = kg_operator(&c, &g, KgParams::new(1.0, 0.0).unwrap()).unwrap();
    assert!(matches!(reduced_kg(&op, &o, &[]), Err(Error::Scope(_))));
}

#[test]
fn reduced_coefficients() {
    let c = load_group("abelian_2").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let g = InvariantMetric::diagonal(&[1.0, 3.0]).unwrap();
    let op = kg_operator(&c, &g, KgParams::new(2.0, 0.0).unwrap()).unwrap();
    let k = reduced_kg(&op, &o, &[0.5, -1.0]).unwrap();
    assert!((k.coefficients(&[])[2] - C64::new(4.0 - 0.25 - 1.0 / 3.0, 0.0)).norm() < 1e-14);

    let c = load_group("heisenberg3").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let g = InvariantMetric::identity(3);
    let (m, zeta, lam) = (1.4, 0.3, 0.9);
    let op = kg_operator(&c, &g, KgParams::new(m, zeta).unwrap()).unwrap();
    let k = reduced_kg(&op, &o, &[lam]).unwrap();
    for q in [-1.0, 0.0, 0.6] {
        let [p2, p1, p0] = k.coefficients(&[q]);
        let want = -lam * lam * q * q + m * m + zeta * op.r - lam * lam;
        assert!((p2 - 1.0).norm() < 1e-14 && p1.norm() < 1e-14 && (p0 - want).norm() < 1e-13);
    }
}

#[test]
fn reduced_operator_is_the_composition_of_conjugated_generators() {
    for name in ["heisenberg3", "euclid2"] {
        let c = load_group(name).unwrap();
        let o = load_orbit_model(&c).unwrap();
        let g = skewed();
        let op = kg_operator(&c, &g, KgParams::new(1.0, 0.5).unwrap()).unwrap();
        let k = reduced_kg(&op, &o, &[1.1]).unwrap();
        for f in packet_battery(1, 5, name == "euclid2", 9) {
            for q in [-0.7, 0.2, 1.0] {
                let mut want = f.eval::<f64>(&[q]) * op.potential();
                for a in 0..3 {
                    for b in 0..3 {
                        let inner = Applied { rep: &k.rep, a: b, inner: &f, conj: true };
                        want += k.rep.apply(a, &inner, &[q], true) * g.g_inv[a][b];
                    }
                }
                assert!((k.apply(&f, &[q]) - want).norm() < 1e-12, "{name}");
            }
        }
    }
}

fn end_to_end(name: &str, metric: &InvariantMetric, lams: &[f64], seed: u64) -> f64 {
    let c = load_group(name).unwrap();
    let o = load_orbit_model(&c).unwrap();
    let op = kg_operator(&c, metric, KgParams::new(1.2, 0.25).unwrap()).unwrap();
    let q0 = 0.3;
    let components = lams
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let k = reduced_kg(&op, &o, &[l]).unwrap();
            let sol = solve_reduced(&k, q0, C64::new(1.0, 0.0), C64::new(0.2, 0.5), (q0 - 3.0, q0 + 3.0), 1e-12).unwrap();
            Component { weight: C64::new(1.0, i as f64), solution: sol }
        })
        .collect();
    let psi = synthesize(GeneratingFunction::new(&c, &o).unwrap(), &[q0], components).unwrap();
    let xs = sample_points(3, 1.0, 100, seed);
    psi.check_coverage(&xs).unwrap();
    kg_residuals(&op, &psi, &xs).max_relative
}

#[test]
fn synthesized_heisenberg_solutions() {
    assert!(end_to_end("heisenberg3", &InvariantMetric::identity(3), &[1.1], 1) < 1e-6);
    assert!(end_to_end("heisenberg3", &skewed(), &[0.8], 2) < 1e-6);
    // superposition of two orbit labels
    assert!(end_to_end("heisenberg3", &InvariantMetric::identity(3), &[0.7, -1.3], 3) < 1e-6);
    assert!(end_to_end("euclid2", &skewed(), &[1.0], 4) < 1e-6);
}

#[test]
fn coverage_is_checked() {
    let c = load_group("heisenberg3").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let g = InvariantMetric::identity(3);
    let op = kg_operator(&c, &g, KgParams::new(1.0, 0.0).unwrap()).unwrap();
    let k = reduced_kg(&op, &o, &[1.0]).unwrap();
    let sol = solve_reduced(&k, 0.0, C64::new(1.0, 0.0), C64::new(0.0, 0.0), (-1.0, 1.0), 1e-10).unwrap();
    let psi =
        synthesize(GeneratingFunction::new(&c, &o).unwrap(), &[0.0], vec![Component { weight: 1.0.into(), solution: sol }])
            .unwrap();
    assert!(psi.check_coverage(&[vec![0.5, 0.0, 0.0]]).is_ok());
    assert!(matches!(psi.check_coverage(&[vec![2.0, 0.0, 0.0]]), Err(Error::Coverage(_))));
}

#[test]
fn abelian_synthesis_is_a_plane_wave() {
    let c = load_group("abelian_2").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let g = InvariantMetric::identity(2);
    let op = kg_operator(&c, &g, KgParams::new(1.0, 0.0).unwrap()).unwrap();
    let k = reduced_kg(&op, &o, &[0.6, 0.8]).unwrap();
    let sol = solve_reduced(&k, 0.0, 1.0.into(), 0.0.into(), (0.0, 0.0), 1e-10).unwrap();
    let psi =
        synthesize(GeneratingFunction::new(&c, &o).unwrap(), &[], vec![Component { weight: 1.0.into(), solution: sol }])
            .unwrap();
    for x in sample_points(2, 3.0, 20, 7) {
        let want = C64::from_polar(1.0, 0.6 * x[0] + 0.8 * x[1]);
        assert!((psi.eval::<f64>(&x) - want).norm() < 1e-12);
        assert!(op.apply::<_, f64>(&psi, &x).norm() < 1e-12);
    }
    let off = reduced_kg(&op, &o, &[0.6, 0.7]).unwrap();
    assert!(matches!(solve_reduced(&off, 0.0, 1.0.into(), 0.0.into(), (0.0, 0.0), 1e-10), Err(Error::Input(_))));
}

#[test]
fn hamiltonian_commutes_with_left_fields() {
    for c in catalog() {
        let g = InvariantMetric::identity(c.dim());
        let op = kg_operator(&c, &g, KgParams::new(1.0, 0.3).unwrap()).unwrap();
        let xs = sample_points(c.dim(), 0.4, 20, 11);
        for (f, x) in packet_battery(c.dim(), 20, false, 10).iter().zip(&xs) {
            let r = symmetry_residual(&op, f, x);
            assert!(r < 1e-6, "{}: {r}", c.name());
        }
    }
}

#[test]
fn reduced_operator_intertwines_with_the_transform() {
    let c = load_group("heisenberg3").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let g = skewed();
    let op = kg_operator(&c, &g, KgParams::new(1.0, 0.2).unwrap()).unwrap();
    let k = reduced_kg(&op, &o, &[1.2]).unwrap();
    let bx = FourierBox::default();
    let samples: Vec<(f64, f64)> = sample_points(2, 1.0, 4, 13).into_iter().map(|v| (v[0], v[1])).collect();
    for f in packet_battery(3, 3, false, 12) {
        let f = Packet { width: 0.9, ..f };
        let r = kg_intertwining_residual(&op, &k, &f, &samples, &bx);
        assert!(r < 1e-4, "{r}");
    }
}

#[test]
fn wrong_mass_in_the_reduction_is_detected() {
    let c = load_group("heisenberg3").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let g = InvariantMetric::identity(3);
    let op = kg_operator(&c, &g, KgParams::new(1.2, 0.0).unwrap()).unwrap();
    let other = kg_operator(&c, &g, KgParams::new(1.5, 0.0).unwrap()).unwrap();
    let k = reduced_kg(&other, &o, &[1.0]).unwrap();
    let sol = solve_reduced(&k, 0.0, 1.0.into(), C64::new(0.0, 0.3), (-3.0, 3.0), 1e-12).unwrap();
    let psi =
        synthesize(GeneratingFunction::new(&c, &o).unwrap(), &[0.0], vec![Component { weight: 1.0.into(), solution: sol }])
            .unwrap();
    assert!(kg_residuals(&op, &psi, &sample_points(3, 1.0, 20, 5)).max_relative > 1e-2);
}
