mod common;

use proptest::prelude::*;

use geoflow_core::algebra::{
    index, integrability_criterion, jacobi_check, poisson_tensor, unimodularity, LieAlgebra,
};
use geoflow_core::catalog::{load_group, GroupChart};
use geoflow_core::error::Error;
use geoflow_core::linalg::numeric_rank;

use common::{generator, REALIZED};

fn catalog_algebras() -> Vec<LieAlgebra> {
    vec![
        LieAlgebra::abelian(4),
        LieAlgebra::heisenberg3(),
        LieAlgebra::euclid2(),
        LieAlgebra::so3(),
        LieAlgebra::aff1(),
        LieAlgebra::so3_x_so3(),
    ]
}

#[test]
fn structure_constants_match_matrix_commutators() {
    for name in REALIZED {
        let c = load_group(name).unwrap();
        let n = c.dim();
        let alg = c.algebra();
        let x: Vec<_> = (0..n).map(|a| generator(name, n, a)).collect();
        for a in 0..n {
            for b in 0..n {
                let comm = &x[a] * &x[b] - &x[b] * &x[a];
                let mut rhs = comm.clone() * 0.0;
                for (k, xk) in x.iter().enumerate() {
                    rhs += xk * alg.c(a, b, k);
                }
                assert!((comm - rhs).amax() < 1e-6, "{name}: [{a},{b}]");
            }
        }
    }
}

#[test]
fn index_and_integrability_table() {
    let want = [(4, true), (1, true), (1, true), (1, true), (0, true), (2, false)];
    for (alg, (ind, integ)) in catalog_algebras().iter().zip(want) {
        assert_eq!(index(alg, 100, 3).unwrap(), ind, "{}", alg.name);
        assert_eq!(integrability_criterion(alg, 100, 3).unwrap().integrable, integ, "{}", alg.name);
    }
}

#[test]
fn lie_poisson_tensor_at_a_known_point() {
    // h3 at f = (0, 0, 1): only B_12 = −B_21 = 1
    let b = poisson_tensor(&LieAlgebra::heisenberg3(), &[0.0, 0.0, 1.0]).unwrap();
    assert_eq!(b, vec![vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]]);
    // so3 at the origin is singular, elsewhere rank 2
    assert_eq!(numeric_rank(&poisson_tensor(&LieAlgebra::so3(), &[0.0; 3]).unwrap(), 1e-10), 0);
    assert_eq!(numeric_rank(&poisson_tensor(&LieAlgebra::so3(), &[0.3, 0.0, 0.0]).unwrap(), 1e-10), 2);
}

#[test]
fn trace_form() {
    // aff1: C_1 = C_12^2 = 1
    assert_eq!(unimodularity(&LieAlgebra::aff1()), (false, vec![1.0, 0.0]));
    for alg in catalog_algebras().iter().filter(|a| a.name != "aff1") {
        assert!(unimodularity(alg).0, "{}", alg.name);
    }
}

#[test]
fn jacobi_violation_is_reported() {
    // [e1,e2] = e3, [e2,e3] = e2 gives J(e1,e2,e3) = e3
    let bad = LieAlgebra::zero("bad", 3).with_bracket(0, 1, 2, 1.0).with_bracket(1, 2, 1, 1.0);
    let r = jacobi_check(&bad);
    assert!(!r.pass && r.exact);
    assert!(!r.violations.is_empty());
    for alg in catalog_algebras() {
        let r = jacobi_check(&alg);
        assert!(r.pass && r.exact && r.max_residual == 0.0, "{}", alg.name);
    }
}

#[test]
fn json_round_trip_and_rejections() {
    for alg in catalog_algebras() {
        let text = serde_json::to_string(&alg.to_document()).unwrap();
        let back = LieAlgebra::from_json(&text).unwrap();
        assert_eq!(back.to_document().brackets, alg.to_document().brackets);
    }
    let one_sided = r#"{"name":"x","dim":2,"brackets":[[1,2,2,1.0]]}"#;
    assert!(matches!(LieAlgebra::from_json(one_sided), Err(Error::Input(_))));
    let out_of_range = r#"{"name":"x","dim":2,"brackets":[[1,3,2,1.0],[3,1,2,-1.0]]}"#;
    assert!(matches!(LieAlgebra::from_json(out_of_range), Err(Error::Input(_))));
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-5.0f64..5.0, 3)
}

proptest! {
    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(x in vec3(), y in vec3(), z in vec3()) {
        for alg in [LieAlgebra::heisenberg3(), LieAlgebra::euclid2(), LieAlgebra::so3()] {
            let xy = alg.bracket(&x, &y);
            let yx = alg.bracket(&y, &x);
            for (a, b) in xy.iter().zip(&yx) {
                prop_assert!((a + b).abs() < 1e-12);
            }
            let j1 = alg.bracket(&x, &alg.bracket(&y, &z));
            let j2 = alg.bracket(&y, &alg.bracket(&z, &x));
            let j3 = alg.bracket(&z, &alg.bracket(&x, &y));
            for k in 0..3 {
                prop_assert!((j1[k] + j2[k] + j3[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bracket_is_bilinear(x in vec3(), y in vec3(), z in vec3(), s in -3.0f64..3.0) {
        let alg = LieAlgebra::euclid2();
        let sum: Vec<f64> = x.iter().zip(&z).map(|(a, b)| s * a + b).collect();
        let lhs = alg.bracket(&sum, &y);
        let rhs: Vec<f64> = alg.bracket(&x, &y).iter().zip(alg.bracket(&z, &y)).map(|(a, b)| s * a + b).collect();
        for (a, b) in lhs.iter().zip(&rhs) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn index_does_not_depend_on_the_seed(seed in any::<u64>()) {
        for (alg, ind) in catalog_algebras().iter().zip([4, 1, 1, 1, 0, 2]) {
            prop_assert_eq!(index(alg, 20, seed).unwrap(), ind);
        }
    }

    #[test]
    fn tensor_rank_is_even(f in proptest::collection::vec(-2.0f64..2.0, 6)) {
        let b = poisson_tensor(&LieAlgebra::so3_x_so3(), &f).unwrap();
        prop_assert_eq!(numeric_rank(&b, 1e-10) % 2, 0);
    }
}
