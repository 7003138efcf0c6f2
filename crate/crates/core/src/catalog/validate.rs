use std::collections::BTreeMap;

use serde::Serialize;

use super::charts::GroupChart;
use crate::calculus::jacobian_of;
use crate::dual::{lift, Dual};
use crate::linalg::{det, matvec};

/// Max residual per chart identity over the sampled points.
#[derive(Debug, Clone, Serialize)]
pub struct ChartReport {
    pub chart: String,
    pub samples: usize,
    pub tolerance: f64,
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
}

/// `[X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i` at `x` via jets.
pub fn vector_field_bracket<FX, FY>(fx: FX, fy: FY, x: &[f64]) -> Vec<f64>
where
    FX: Fn(&[Dual<f64>]) -> Vec<Dual<f64>> + Copy,
    FY: Fn(&[Dual<f64>]) -> Vec<Dual<f64>> + Copy,
{
    let xd: Vec<Dual<f64>> = lift(x);
    let xv: Vec<f64> = fx(&xd).iter().map(|d| d.v).collect();
    let yv: Vec<f64> = fy(&xd).iter().map(|d| d.v).collect();
    let jx = jacobian_of(fx, x);
    let jy = jacobian_of(fy, x);
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| xv[j] * jy[i][j] - yv[j] * jx[i][j]).sum())
        .collect()
}

fn bump(map: &mut BTreeMap<String, f64>, key: &str, v: f64) {
    let e = map.entry(key.to_string()).or_insert(0.0);
    if v > *e || v.is_nan() {
        *e = v;
    }
}

/// Evaluates every chart identity at `points`.
pub fn validate_chart<C: GroupChart + ?Sized>(chart: &C, points: &[Vec<f64>], tol: f64) -> ChartReport {
    let n = chart.dim();
    let alg = chart.algebra();
    let mut res: BTreeMap<String, f64> = BTreeMap::new();
    for key in [
        "duality",
        "left_brackets",
        "right_brackets",
        "left_right_commute",
        "identity_fields",
        "product_inverse",
        "right_invariance",
        "left_generators",
        "right_generators",
        "coadjoint_contraction",
        "haar_density",
    ] {
        res.insert(key.to_string(), 0.0);
    }

    let e = chart.identity();
    let xi_e = chart.left_fields::<f64>(&e);
    let eta_e = chart.right_fields::<f64>(&e);
    for a in 0..n {
        for i in 0..n {
            let d = if a == i { 1.0 } else { 0.0 };
            bump(&mut res, "identity_fields", (xi_e[a][i] - d).abs().max((eta_e[a][i] - d).abs()));
        }
    }

    for (k, x) in points.iter().enumerate() {
        let xi = chart.left_fields::<f64>(x);
        let eta = chart.right_fields::<f64>(x);
        let sigma = chart.right_forms::<f64>(x);
        for a in 0..n {
            for b in 0..n {
                let s: f64 = (0..n).map(|i| sigma[a][i] * eta[b][i]).sum();
                let d = if a == b { 1.0 } else { 0.0 };
                bump(&mut res, "duality", (s - d).abs());
            }
        }

        for a in 0..n {
            for b in 0..n {
                let lb = vector_field_bracket(
                    |p: &[Dual<f64>]| chart.left_fields(p)[a].clone(),
                    |p: &[Dual<f64>]| chart.left_fields(p)[b].clone(),
                    x,
                );
                let rb = vector_field_bracket(
                    |p: &[Dual<f64>]| chart.right_fields(p)[a].clone(),
                    |p: &[Dual<f64>]| chart.right_fields(p)[b].clone(),
                    x,
                );
                let mb = vector_field_bracket(
                    |p: &[Dual<f64>]| chart.left_fields(p)[a].clone(),
                    |p: &[Dual<f64>]| chart.right_fields(p)[b].clone(),
                    x,
                );
                for i in 0..n {
                    let cx: f64 = (0..n).map(|c| alg.c(a, b, c) * xi[c][i]).sum();
                    let ce: f64 = (0..n).map(|c| alg.c(a, b, c) * eta[c][i]).sum();
                    bump(&mut res, "left_brackets", (lb[i] - cx).abs());
                    bump(&mut res, "right_brackets", (rb[i] + ce).abs());
                    bump(&mut res, "left_right_commute", mb[i].abs());
                }
            }
        }

        let xinv = chart.inverse::<f64>(x);
        let p = chart.product::<f64>(x, &xinv);
        let q = chart.product::<f64>(&xinv, x);
        for i in 0..n {
            bump(&mut res, "product_inverse", (p[i] - e[i]).abs().max((q[i] - e[i]).abs()));
        }

        // η_a(y x) = ∂(y x)/∂y · η_a(y), with y another sample point
        let y = &points[(k + 1) % points.len()];
        let yx = chart.product::<f64>(y, x);
        let eta_yx = chart.right_fields::<f64>(&yx);
        let eta_y = chart.right_fields::<f64>(y);
        let xd: Vec<Dual<f64>> = lift(x);
        let dprod = jacobian_of(|yy: &[Dual<f64>]| chart.product(yy, &xd), y);
        for a in 0..n {
            let pushed = matvec(&dprod, &eta_y[a]);
            for i in 0..n {
                bump(&mut res, "right_invariance", (eta_yx[a][i] - pushed[i]).abs());
            }
        }

        // ξ_a = d/dt x·exp(t e_a), η_a = d/dt exp(t e_a)·x
        for a in 0..n {
            let t = Dual::variable(0.0);
            let g = chart.exp_coords::<Dual<f64>>(a, t);
            let right = chart.product(&xd, &g);
            let left = chart.product(&g, &xd);
            for i in 0..n {
                bump(&mut res, "left_generators", (right[i].d - xi[a][i]).abs());
                bump(&mut res, "right_generators", (left[i].d - eta[a][i]).abs());
            }
        }

        let m = chart.coadjoint::<f64>(x);
        for a in 0..n {
            for i in 0..n {
                let s: f64 = (0..n).map(|b| m[a][b] * xi[b][i]).sum();
                bump(&mut res, "coadjoint_contraction", (s - eta[a][i]).abs());
            }
        }

        let det_eta = det(&eta);
        bump(&mut res, "haar_density", (chart.haar_density::<f64>(x) * det_eta.abs() - 1.0).abs());
    }

    let pass = res.values().all(|&v| v < tol);
    ChartReport { chart: chart.name().to_string(), samples: points.len(), tolerance: tol, residuals: res, pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LieAlgebra;
    use crate::catalog::{catalog, load_group, sample_points, ChartDomain, Heisenberg3};
    use crate::dual::Real;
    use crate::linalg::Mat;

    #[test]
    fn abelian_residuals_are_exactly_zero() {
        let c = load_group("abelian_2").unwrap();
        let r = validate_chart(&c, &sample_points(2, 1.5, 20, 1), 1e-8);
        assert!(r.pass);
        assert!(r.residuals.values().all(|&v| v == 0.0), "{:?}", r.residuals);
    }

    #[test]
    fn every_catalog_chart_validates() {
        for c in catalog() {
            let pts = sample_points(c.dim(), c.sample_radius(), 100, 11);
            let r = validate_chart(&c, &pts, 1e-8);
            assert!(r.pass, "{}: {:?}", c.name(), r.residuals);
        }
    }

    /// ξ_2 perturbed by +0.01·x¹∂_3.
    struct Perturbed(Heisenberg3);

    impl GroupChart for Perturbed {
        fn name(&self) -> &str {
            "heisenberg3_perturbed"
        }
        fn algebra(&self) -> &LieAlgebra {
            self.0.algebra()
        }
        fn domain(&self) -> ChartDomain {
            self.0.domain()
        }
        fn product<T: Real>(&self, x: &[T], y: &[T]) -> Vec<T> {
            self.0.product(x, y)
        }
        fn inverse<T: Real>(&self, x: &[T]) -> Vec<T> {
            self.0.inverse(x)
        }
        fn left_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
            let mut f = self.0.left_fields(x);
            f[1][2] += x[0] * 0.01;
            f
        }
        fn right_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
            self.0.right_fields(x)
        }
        fn right_forms<T: Real>(&self, x: &[T]) -> Mat<T> {
            self.0.right_forms(x)
        }
        fn coadjoint<T: Real>(&self, x: &[T]) -> Mat<T> {
            self.0.coadjoint(x)
        }
        fn haar_density<T: Real>(&self, x: &[T]) -> T {
            self.0.haar_density(x)
        }
    }

    #[test]
    fn injected_defect_is_reported() {
        let r = validate_chart(&Perturbed(Heisenberg3::default()), &sample_points(3, 1.5, 100, 3), 1e-8);
        assert!(!r.pass);
        assert!((r.residuals["left_brackets"] - 0.01).abs() < 1e-12, "{:?}", r.residuals);
        assert!(r.residuals["right_brackets"] < 1e-12);
    }
}
