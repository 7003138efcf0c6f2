mod common;

use proptest::prelude::*;

use geoflow_core::catalog::{
    catalog, group_metadata, load_group, load_orbit_model, sample_points, validate_chart, GroupChart,
};
use geoflow_core::error::Error;

use common::{fd, realize, unit, REALIZED};

#[test]
fn product_and_inverse_match_the_matrix_group() {
    for name in REALIZED {
        let c = load_group(name).unwrap();
        let r = c.sample_radius() / 2.0;
        let xs = sample_points(c.dim(), r, 50, 1);
        let ys = sample_points(c.dim(), r, 50, 2);
        for (x, y) in xs.iter().zip(&ys) {
            let want = realize(name, x) * realize(name, y);
            assert!((realize(name, &c.product(x, y)) - want).amax() < 1e-12, "{name}");
            let inv = realize(name, &c.inverse(x)) * realize(name, x);
            let eye = nalgebra::DMatrix::identity(inv.nrows(), inv.ncols());
            assert!((inv - eye).amax() < 1e-12, "{name}");
        }
    }
}

#[test]
fn invariant_fields_are_derivatives_of_translations() {
    for c in catalog() {
        let n = c.dim();
        for x in sample_points(n, c.sample_radius() / 2.0, 20, 3) {
            let xi = c.left_fields::<f64>(&x);
            let eta = c.right_fields::<f64>(&x);
            for a in 0..n {
                // ξ_a = d/dt x·γ(t), η_a = d/dt γ(t)·x for any γ with γ′(0) = e_a
                let l = fd(|t| c.product(&x, &unit(n, a, t)));
                let r = fd(|t| c.product(&unit(n, a, t), &x));
                for i in 0..n {
                    assert!((xi[a][i] - l[i]).abs() < 1e-8, "{}: ξ_{a}", c.name());
                    assert!((eta[a][i] - r[i]).abs() < 1e-8, "{}: η_{a}", c.name());
                }
            }
        }
    }
}

#[test]
fn right_forms_are_dual_to_right_fields() {
    for c in catalog() {
        let n = c.dim();
        for x in sample_points(n, c.sample_radius(), 20, 4) {
            let eta = c.right_fields::<f64>(&x);
            let sigma = c.right_forms::<f64>(&x);
            for a in 0..n {
                for b in 0..n {
                    let s: f64 = (0..n).map(|i| sigma[a][i] * eta[b][i]).sum();
                    assert!((s - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn so3_haar_density_is_cos_of_the_middle_angle() {
    let c = load_group("so3").unwrap();
    for x in sample_points(3, 0.6, 20, 5) {
        assert!((c.haar_density::<f64>(&x) - x[1].cos()).abs() < 1e-12);
    }
    for name in ["abelian_2", "heisenberg3", "euclid2", "aff1"] {
        let c = load_group(name).unwrap();
        assert_eq!(c.haar_density::<f64>(&sample_points(c.dim(), 1.0, 1, 6)[0]), 1.0, "{name}");
    }
}

#[test]
fn lookup() {
    assert!(matches!(load_group("nosuchgroup"), Err(Error::UnknownGroup(_))));
    assert!(matches!(load_group("abelian_0"), Err(Error::UnknownGroup(_))));
    assert!(matches!(load_group("abelian_7"), Err(Error::UnknownGroup(_))));
    assert_eq!(load_group("abelian_5").unwrap().dim(), 5);
    assert!(load_orbit_model(&load_group("so3_x_so3").unwrap()).is_err());
}

#[test]
fn metadata_examples() {
    let m = group_metadata(&load_group("heisenberg3").unwrap(), 42).unwrap();
    assert_eq!((m.dim, m.index, m.unimodular, m.integrable, m.m), (3, 1, true, true, 1));
    let m = group_metadata(&load_group("so3_x_so3").unwrap(), 42).unwrap();
    assert_eq!((m.dim, m.index, m.integrable, m.m), (6, 2, false, 2));
    let m = group_metadata(&load_group("aff1").unwrap(), 42).unwrap();
    assert_eq!((m.index, m.unimodular, m.integrable), (0, false, true));
}

#[test]
fn every_chart_certifies() {
    for c in catalog() {
        let pts = sample_points(c.dim(), c.sample_radius(), 100, 7);
        let rep = validate_chart(&c, &pts, 1e-8);
        assert!(rep.pass, "{}: {:?}", c.name(), rep.residuals);
        assert_eq!(rep.samples, 100);
    }
}

fn chart_and_points() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (0usize..6).prop_flat_map(|k| {
        let c = &catalog()[k];
        let r = c.sample_radius() / 2.0;
        let v = proptest::collection::vec(-r..r, c.dim());
        (Just(k), v.clone(), v.clone(), v)
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
}

proptest! {
    #[test]
    fn group_axioms((k, x, y, z) in chart_and_points()) {
        let c = &catalog()[k];
        let e = c.identity();
        prop_assert!(close(&c.product(&c.product(&x, &y), &z), &c.product(&x, &c.product(&y, &z)), 1e-12));
        prop_assert!(close(&c.product(&x, &c.inverse(&x)), &e, 1e-12));
        prop_assert!(close(&c.product(&e, &x), &x, 1e-14));
        prop_assert!(close(&c.inverse(&c.inverse(&x)), &x, 1e-12));
    }

    #[test]
    fn coadjoint_is_a_representation((k, x, y, _z) in chart_and_points()) {
        let c = &catalog()[k];
        let lhs = c.coadjoint::<f64>(&c.product(&x, &y));
        let ax = c.coadjoint::<f64>(&x);
        let ay = c.coadjoint::<f64>(&y);
        let n = c.dim();
        // Ad*_{xy} = Ad*_x Ad*_y
        let prod = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
        };
        let d = |m: &Vec<Vec<f64>>| -> f64 {
            m.iter().zip(&lhs).flat_map(|(r, s)| r.iter().zip(s).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max)
        };
        prop_assert!(d(&prod(&ax, &ay)) < 1e-10);
    }
}
