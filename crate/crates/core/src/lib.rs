//! Integration machinery for right-invariant geodesic flows and the
//! Klein–Gordon equation on low-dimensional Lie groups.

pub mod acceptance;
pub mod algebra;
pub mod calculus;
pub mod canonical;
pub mod catalog;
pub mod dual;
pub mod error;
pub mod geodesic;
pub mod klein_gordon;
pub mod lambda_rep;
pub mod linalg;
pub mod poisson;

pub use acceptance::{run_acceptance, AcceptanceReport, Check};
pub use catalog::{load_group, load_orbit_model, Chart, GroupChart, Orbit, OrbitModel};
pub use dual::{Dual, Real};
pub use error::{Error, Result};
pub use geodesic::InvariantMetric;
pub use klein_gordon::KgParams;
pub use poisson::PhasePoint;
