//! Closed-form group charts and orbit models, plus their validators.

mod charts;
pub mod orbit;
mod validate;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{integrability_criterion, poisson_tensor, unimodularity, LieAlgebra, RANK_REL_TOL};
use crate::dual::Real;
use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, Mat};

pub use charts::{so3_angles, so3_rotation, Abelian, Aff1, ChartDomain, Euclid2, GroupChart, Heisenberg3, So3, So3xSo3};
pub use orbit::{load_orbit_model, Inverted, LrepCoeffs, Orbit, OrbitModel};
pub use validate::{validate_chart, ChartReport};

/// Names accepted by [`load_group`] (`abelian_n` for any `n ≥ 1`).
pub const GROUP_NAMES: [&str; 6] = ["abelian_n", "heisenberg3", "euclid2", "so3", "aff1", "so3_x_so3"];

/// Every catalog chart behind one type.
#[derive(Debug, Clone)]
pub enum Chart {
    Abelian(Abelian),
    Heisenberg3(Heisenberg3),
    Euclid2(Euclid2),
    So3(So3),
    Aff1(Aff1),
    So3xSo3(So3xSo3),
}

macro_rules! dispatch {
    ($self:ident, $c:ident => $e:expr) => {
        match $self {
            Chart::Abelian($c) => $e,
            Chart::Heisenberg3($c) => $e,
            Chart::Euclid2($c) => $e,
            Chart::So3($c) => $e,
            Chart::Aff1($c) => $e,
            Chart::So3xSo3($c) => $e,
        }
    };
}

impl GroupChart for Chart {
    fn name(&self) -> &str {
        dispatch!(self, c => c.name())
    }
    fn algebra(&self) -> &LieAlgebra {
        dispatch!(self, c => c.algebra())
    }
    fn domain(&self) -> ChartDomain {
        dispatch!(self, c => c.domain())
    }
    fn product<T: Real>(&self, x: &[T], y: &[T]) -> Vec<T> {
        dispatch!(self, c => c.product(x, y))
    }
    fn inverse<T: Real>(&self, x: &[T]) -> Vec<T> {
        dispatch!(self, c => c.inverse(x))
    }
    fn left_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        dispatch!(self, c => c.left_fields(x))
    }
    fn right_fields<T: Real>(&self, x: &[T]) -> Mat<T> {
        dispatch!(self, c => c.right_fields(x))
    }
    fn right_forms<T: Real>(&self, x: &[T]) -> Mat<T> {
        dispatch!(self, c => c.right_forms(x))
    }
    fn coadjoint<T: Real>(&self, x: &[T]) -> Mat<T> {
        dispatch!(self, c => c.coadjoint(x))
    }
    fn haar_density<T: Real>(&self, x: &[T]) -> T {
        dispatch!(self, c => c.haar_density(x))
    }
}

impl Chart {
    /// Half-width of the cube, centred at the identity, used for random
    /// sample points. Keeps products of two samples inside the chart.
    pub fn sample_radius(&self) -> f64 {
        match self {
            Chart::So3(_) | Chart::So3xSo3(_) => 0.6,
            _ => 1.5,
        }
    }

    pub fn is_unimodular(&self) -> bool {
        unimodularity(self.algebra()).0
    }
}

/// Look up a catalog chart by name.
pub fn load_group(name: &str) -> Result<Chart> {
    if let Some(n) = name.strip_prefix("abelian_") {
        return match n.parse::<usize>() {
            Ok(n) if (1..=6).contains(&n) => Ok(Chart::Abelian(Abelian::new(n))),
            _ => Err(Error::UnknownGroup(name.to_string())),
        };
    }
    match name {
        "heisenberg3" => Ok(Chart::Heisenberg3(Heisenberg3::default())),
        "euclid2" => Ok(Chart::Euclid2(Euclid2::default())),
        "so3" => Ok(Chart::So3(So3::default())),
        "aff1" => Ok(Chart::Aff1(Aff1::default())),
        "so3_x_so3" => Ok(Chart::So3xSo3(So3xSo3::default())),
        _ => Err(Error::UnknownGroup(name.to_string())),
    }
}

/// Uniform points in `[-r, r]^n` around the identity.
pub fn sample_points(dim: usize, radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-radius..=radius)).collect()).collect()
}

/// Rank of the Lie–Poisson tensor at `lambda`.
pub fn coadjoint_orbit_dim<C: GroupChart + ?Sized>(chart: &C, lambda: &[f64]) -> Result<usize> {
    let b = poisson_tensor(chart.algebra(), lambda)?;
    Ok(numeric_rank(&b, RANK_REL_TOL))
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupMetadata {
    pub name: String,
    pub dim: usize,
    pub index: usize,
    pub unimodular: bool,
    pub integrable: bool,
    pub m: usize,
    pub chart_domain: ChartDomain,
    pub orbit_model: bool,
}

pub const INDEX_SAMPLES: usize = 100;

pub fn group_metadata(chart: &Chart, seed: u64) -> Result<GroupMetadata> {
    let crit = integrability_criterion(chart.algebra(), INDEX_SAMPLES, seed)?;
    Ok(GroupMetadata {
        name: chart.name().to_string(),
        dim: chart.dim(),
        index: crit.index,
        unimodular: chart.is_unimodular(),
        integrable: crit.integrable,
        m: crit.half_rank,
        chart_domain: chart.domain(),
        orbit_model: load_orbit_model(chart).is_ok(),
    })
}

/// The default catalog listing (`abelian_n` shown as `abelian_2`).
pub fn catalog() -> Vec<Chart> {
    ["abelian_2", "heisenberg3", "euclid2", "so3", "aff1", "so3_x_so3"]
        .iter()
        .map(|n| load_group(n).expect("catalog names resolve"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_examples() {
        let a = load_group("abelian_2").unwrap();
        assert_eq!(a.product(&[1.0, 2.0], &[0.5, -1.0]), vec![1.5, 1.0]);
        assert_eq!(a.left_fields::<f64>(&[3.0, 4.0]), crate::linalg::identity::<f64>(2));
        assert_eq!(a.right_forms::<f64>(&[3.0, 4.0]), crate::linalg::identity::<f64>(2));

        let h = load_group("heisenberg3").unwrap();
        let nonzero = h.algebra().to_document().brackets;
        assert_eq!(nonzero, vec![(1, 2, 3, 1.0), (2, 1, 3, -1.0)]);

        let s = group_metadata(&load_group("so3_x_so3").unwrap(), 42).unwrap();
        assert!(!s.integrable && !s.orbit_model);
        assert!(!group_metadata(&load_group("aff1").unwrap(), 42).unwrap().unimodular);
        assert!(matches!(load_group("sl2"), Err(Error::UnknownGroup(_))));
        assert!(load_group("abelian_0").is_err());
    }

    #[test]
    fn orbit_dimensions() {
        assert_eq!(coadjoint_orbit_dim(&load_group("abelian_3").unwrap(), &[1.0, -2.0, 0.3]).unwrap(), 0);
        let h = load_group("heisenberg3").unwrap();
        assert_eq!(coadjoint_orbit_dim(&h, &[0.0, 0.0, 1.0]).unwrap(), 2);
        assert_eq!(coadjoint_orbit_dim(&h, &[1.0, 1.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_points(3, 1.0, 5, 9), sample_points(3, 1.0, 5, 9));
        assert_ne!(sample_points(3, 1.0, 5, 9), sample_points(3, 1.0, 5, 10));
    }
}
