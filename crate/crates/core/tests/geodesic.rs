use geoflow_core::canonical::{forward_transform, GeneratingFunction};
use geoflow_core::catalog::{catalog, load_group, load_orbit_model, sample_points, GroupChart};
use geoflow_core::error::Error;
use geoflow_core::geodesic::{
    coordinate_inverse_metric, cross_check_reduction, crossing_times, energy_drift, hamiltonian, integrate_direct,
    integrate_reduced, noether_drift, quadrature_solution, reduced_hamiltonian, InvariantMetric, ReducedSign,
};
use geoflow_core::poisson::PhasePoint;

fn phase(chart: &impl GroupChart, count: usize, seed: u64) -> Vec<PhasePoint> {
    // start near the identity, slowly enough on the compact charts that
    // T = 10 orbits stay inside the angle box
    let speed = if chart.name().starts_with("so3") { 0.06 } else { 0.5 };
    let xs = sample_points(chart.dim(), 0.2, count, seed);
    let ps = sample_points(chart.dim(), speed, count, seed + 1);
    xs.into_iter().zip(ps).map(|(x, p)| PhasePoint::new(x, p)).collect()
}

#[test]
fn metric_validation() {
    assert!(matches!(InvariantMetric::new(vec![vec![1.0, 0.5], vec![0.4, 1.0]]), Err(Error::Input(_))));
    assert!(matches!(InvariantMetric::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]), Err(Error::Input(_))));
    let g = InvariantMetric::diagonal(&[1.0, 1.0, -1.0]).unwrap();
    assert_eq!(g.signature, (2, 1));
}

#[test]
fn hamiltonian_examples() {
    let a = load_group("abelian_2").unwrap();
    let pt = PhasePoint::new(vec![0.3, 0.1], vec![3.0, 4.0]);
    assert_eq!(hamiltonian(&a, &InvariantMetric::identity(2), &pt).unwrap(), 12.5);

    let g = InvariantMetric::new(vec![vec![2.0, 0.5, 0.0], vec![0.5, 1.0, 0.0], vec![0.0, 0.0, 3.0]]).unwrap();
    for c in catalog().into_iter().filter(|c| c.dim() == 3) {
        let p = vec![0.2, -1.0, 0.7];
        let h = hamiltonian(&c, &g, &PhasePoint::new(c.identity(), p.clone())).unwrap();
        let mut want = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                want += 0.5 * g.g_inv[a][b] * p[a] * p[b];
            }
        }
        assert!((h - want).abs() < 1e-14, "{}", c.name());

        // ½ g^{ij} p_i p_j at a random point
        for pt in phase(&c, 10, 3) {
            let gi = coordinate_inverse_metric(&c, &g, &pt.x);
            let mut want = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    want += 0.5 * gi[i][j] * pt.p[i] * pt.p[j];
                }
            }
            assert!((hamiltonian(&c, &g, &pt).unwrap() - want).abs() < 1e-12);
        }
    }
}

#[test]
fn abelian_geodesics_are_lines() {
    let a = load_group("abelian_2").unwrap();
    let g = InvariantMetric::new(vec![vec![2.0, 0.0], vec![0.0, 0.5]]).unwrap();
    let tr = integrate_direct(&a, &g, &PhasePoint::new(vec![1.0, -1.0], vec![1.0, 1.0]), 3.0, 1e-10).unwrap();
    let z = tr.final_state();
    assert!((z[0] - 2.5).abs() < 1e-9 && (z[1] - 5.0).abs() < 1e-9);
    assert_eq!(&z[2..], &[1.0, 1.0]);
}

#[test]
fn conservation_laws_on_every_chart() {
    for c in catalog() {
        let g = InvariantMetric::identity(c.dim());
        for pt in phase(&c, 20, 17) {
            let tr = integrate_direct(&c, &g, &pt, 10.0, 1e-10).unwrap();
            assert!(energy_drift(&c, &g, &tr) < 1e-7, "{}", c.name());
            assert!(noether_drift(&c, &tr) < 1e-7, "{}", c.name());
        }
    }
}

#[test]
fn indefinite_metric_on_so3() {
    let c = load_group("so3").unwrap();
    let g = InvariantMetric::diagonal(&[1.0, 1.0, -1.0]).unwrap();
    for pt in phase(&c, 20, 23) {
        let tr = integrate_direct(&c, &g, &pt, 10.0, 1e-10).unwrap();
        assert!(energy_drift(&c, &g, &tr) < 1e-7);
        assert!(noether_drift(&c, &tr) < 1e-7);
    }
}

#[test]
fn reduced_hamiltonian_closed_form() {
    let c = load_group("heisenberg3").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let g = InvariantMetric::identity(3);
    let (q, p, j) = (0.7, -0.4, 1.3);
    let h = reduced_hamiltonian(&o, &g, &[q], &[p], &[j]);
    assert!((h - 0.5 * (p * p + j * j * q * q + j * j)).abs() < 1e-15);

    let a = load_group("abelian_2").unwrap();
    let oa = load_orbit_model(&a).unwrap();
    assert_eq!(reduced_hamiltonian::<_, f64>(&oa, &InvariantMetric::identity(2), &[], &[], &[3.0, 4.0]), 12.5);
}

#[test]
fn canonical_sign_reproduces_direct_flow() {
    for name in ["heisenberg3", "euclid2", "aff1", "so3", "abelian_3"] {
        let c = load_group(name).unwrap();
        let o = load_orbit_model(&c).unwrap();
        let g = InvariantMetric::new(vec![vec![1.5, 0.2, 0.0], vec![0.2, 1.0, 0.1], vec![0.0, 0.1, 0.8]]);
        let g = if c.dim() == 3 { g.unwrap() } else { InvariantMetric::identity(c.dim()) };
        for mut pt in phase(&c, 5, 41) {
            if name == "aff1" {
                pt.p[1] = pt.p[1].abs() + 0.1;
            }
            let chk = cross_check_reduction(&c, &o, &g, &pt, 5.0, 1e-11, 100, 1e-6).unwrap();
            assert!(chk.pass, "{name}: {chk:?}");
            assert_eq!(chk.sign, ReducedSign::Canonical, "{name}");
            if name != "abelian_3" {
                // so3 starts slow, so its wrong-sign drift is small in absolute terms
                assert!(chk.deviation_as_printed > 1e3 * chk.deviation_canonical.max(1e-9), "{name}: {chk:?}");
            }
        }
    }
}

#[test]
fn abelian_reduced_flow_moves_tau_only() {
    let c = load_group("abelian_2").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let gen = GeneratingFunction::new(&c, &o).unwrap();
    let g = InvariantMetric::diagonal(&[2.0, 4.0]).unwrap();
    let cp = forward_transform(&gen, &PhasePoint::new(vec![0.5, 0.0], vec![1.0, -2.0])).unwrap();
    let tr = integrate_reduced(&o, &g, &cp, 2.0, 1e-12, ReducedSign::Canonical).unwrap();
    let z = tr.final_state();
    assert!((z[0] - (0.5 + 2.0 * 0.5)).abs() < 1e-10);
    assert!((z[1] - (0.0 - 2.0 * 0.5)).abs() < 1e-10);
}

#[test]
fn reduced_level_sets_are_conserved() {
    let c = load_group("heisenberg3").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let gen = GeneratingFunction::new(&c, &o).unwrap();
    let g = InvariantMetric::identity(3);
    let cp = forward_transform(&gen, &PhasePoint::new(vec![0.1, 0.2, -0.1], vec![0.3, 0.5, 1.2])).unwrap();
    let tr = integrate_reduced(&o, &g, &cp, 10.0, 1e-12, ReducedSign::Canonical).unwrap();
    let h0 = reduced_hamiltonian(&o, &g, &cp.q_prime, &cp.pi_prime, &cp.j);
    for y in &tr.states {
        assert!((reduced_hamiltonian(&o, &g, &y[..1], &y[1..2], &cp.j) - h0).abs() < 1e-8);
    }
}

#[test]
fn quadrature_matches_ode_times() {
    for name in ["heisenberg3", "euclid2"] {
        let c = load_group(name).unwrap();
        let o = load_orbit_model(&c).unwrap();
        let gen = GeneratingFunction::new(&c, &o).unwrap();
        let g = InvariantMetric::identity(3);
        let cp = forward_transform(&gen, &PhasePoint::new(vec![0.0, 0.1, 0.0], vec![0.0, 1.0, 1.0])).unwrap();
        let tr = integrate_reduced(&o, &g, &cp, 3.0, 1e-12, ReducedSign::Canonical).unwrap();
        let q0 = cp.q_prime[0];
        let dir = (tr.at(0.01)[0] - q0).signum();
        let targets: Vec<f64> = (1..=4).map(|k| q0 + dir * 0.05 * k as f64).collect();
        let tq = quadrature_solution(&o, &g, &cp, &targets, 1e-12).unwrap();
        let to = crossing_times(&tr, &targets);
        for (a, b) in tq.iter().zip(&to) {
            assert!((a - b.unwrap()).abs() < 1e-6, "{name}: {a} vs {b:?}");
        }
    }
}

#[test]
fn turning_point_is_reported() {
    let c = load_group("heisenberg3").unwrap();
    let o = load_orbit_model(&c).unwrap();
    let gen = GeneratingFunction::new(&c, &o).unwrap();
    let g = InvariantMetric::identity(3);
    let cp = forward_transform(&gen, &PhasePoint::new(vec![0.0; 3], vec![1.0, 0.0, 1.0])).unwrap();
    // harmonic oscillator in q′ with amplitude 1 around q′ = 0
    let err = quadrature_solution(&o, &g, &cp, &[cp.q_prime[0] + 5.0], 1e-10).unwrap_err();
    match err {
        Error::Branch { location } => assert!((location - 1.0).abs() < 1e-6, "{location}"),
        e => panic!("{e}"),
    }
    let a = load_group("abelian_2").unwrap();
    let oa = load_orbit_model(&a).unwrap();
    let ga = GeneratingFunction::new(&a, &oa).unwrap();
    let cpa = forward_transform(&ga, &PhasePoint::new(vec![0.0; 2], vec![1.0, 0.0])).unwrap();
    assert!(quadrature_solution(&oa, &InvariantMetric::identity(2), &cpa, &[], 1e-10).unwrap().is_empty());
}
