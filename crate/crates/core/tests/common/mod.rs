#![allow(dead_code)]

use nalgebra::{DMatrix, Rotation3, Vector3};

/// Faithful matrix realization of a catalog chart, built from scratch.
pub fn realize(name: &str, x: &[f64]) -> DMatrix<f64> {
    match name {
        "heisenberg3" => DMatrix::from_row_slice(3, 3, &[1.0, x[0], x[2], 0.0, 1.0, x[1], 0.0, 0.0, 1.0]),
        "euclid2" => {
            let (c, s) = (x[0].cos(), x[0].sin());
            DMatrix::from_row_slice(3, 3, &[c, -s, x[1], s, c, x[2], 0.0, 0.0, 1.0])
        }
        "aff1" => DMatrix::from_row_slice(2, 2, &[x[0].exp(), x[1], 0.0, 1.0]),
        "so3" => {
            let r = Rotation3::from_axis_angle(&Vector3::x_axis(), x[0])
                * Rotation3::from_axis_angle(&Vector3::y_axis(), x[1])
                * Rotation3::from_axis_angle(&Vector3::z_axis(), x[2]);
            DMatrix::from_iterator(3, 3, r.matrix().iter().copied())
        }
        n if n.starts_with("abelian_") => {
            // diagonal exponentials
            DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(x.len(), x.iter().map(|v| v.exp())))
        }
        _ => panic!("no realization for {name}"),
    }
}

pub const REALIZED: [&str; 5] = ["abelian_2", "heisenberg3", "euclid2", "aff1", "so3"];

/// `d/dt realize(t e_a)` at `t = 0` by central differences.
pub fn generator(name: &str, dim: usize, a: usize) -> DMatrix<f64> {
    let h = 1e-5;
    let mut e = vec![0.0; dim];
    e[a] = h;
    let p = realize(name, &e);
    e[a] = -h;
    let m = realize(name, &e);
    (p - m) / (2.0 * h)
}

/// Central difference of a vector-valued map along `t`.
pub fn fd<F: Fn(f64) -> Vec<f64>>(f: F) -> Vec<f64> {
    let h = 1e-5;
    let (p, m) = (f(h), f(-h));
    p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

pub fn unit(dim: usize, a: usize, t: f64) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[a] = t;
    e
}
