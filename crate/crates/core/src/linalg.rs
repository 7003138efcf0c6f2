//! Small dense helpers. Matrices are `Vec<Vec<T>>`, row-major.

use nalgebra::DMatrix;

use crate::dual::Real;

pub type Mat<T> = Vec<Vec<T>>;

pub fn zeros<T: Real>(r: usize, c: usize) -> Mat<T> {
    vec![vec![T::zero(); c]; r]
}

pub fn identity<T: Real>(n: usize) -> Mat<T> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn transpose<T: Real>(m: &[Vec<T>]) -> Mat<T> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn matmul<T: Real>(a: &[Vec<T>], b: &[Vec<T>]) -> Mat<T> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn matvec<T: Real>(a: &[Vec<T>], v: &[T]) -> Vec<T> {
    a.iter().map(|row| row.iter().zip(v).map(|(&x, &y)| x * y).sum()).collect()
}

/// Gauss–Jordan inverse with partial pivoting on real parts.
pub fn inverse<T: Real>(m: &[Vec<T>]) -> Option<Mat<T>> {
    let n = m.len();
    let mut a: Mat<T> = m.to_vec();
    let mut inv = identity::<T>(n);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].re().abs().total_cmp(&a[j][col].re().abs()))?;
        if a[piv][col].re().abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] = a[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f.re() != 0.0 || !f.is_zero() {
                    for j in 0..n {
                        let (acj, icj) = (a[col][j], inv[col][j]);
                        a[i][j] -= f * acj;
                        inv[i][j] -= f * icj;
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Determinant by elimination with partial pivoting on real parts.
pub fn det_generic<T: Real>(m: &[Vec<T>]) -> T {
    let n = m.len();
    let mut a: Mat<T> = m.to_vec();
    let mut d = T::one();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].re().abs().total_cmp(&a[j][col].re().abs())).unwrap();
        if a[piv][col].re() == 0.0 {
            return T::zero();
        }
        if piv != col {
            a.swap(col, piv);
            d = -d;
        }
        let p = a[col][col];
        d *= p;
        for i in col + 1..n {
            let f = a[i][col] / p;
            for j in col..n {
                let v = a[col][j];
                a[i][j] -= f * v;
            }
        }
    }
    d
}

pub fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j]).determinant()
}

pub fn singular_values(m: &[Vec<f64>]) -> Vec<f64> {
    let r = m.len();
    let c = m.first().map_or(0, |x| x.len());
    if r == 0 || c == 0 {
        return Vec::new();
    }
    DMatrix::from_fn(r, c, |i, j| m[i][j]).singular_values().iter().copied().collect()
}

/// Numeric rank: singular values above `rel_tol` times the largest.
pub fn numeric_rank(m: &[Vec<f64>], rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn re_mat<T: Real>(m: &[Vec<T>]) -> Mat<f64> {
    m.iter().map(|r| r.iter().map(|x| x.re()).collect()).collect()
}

pub fn re_vec<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.re()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = vec![vec![2.0, 1.0, 0.0], vec![0.0, 0.0, 3.0], vec![1.0, -1.0, 1.0]];
        let inv = inverse(&m).unwrap();
        assert!(max_abs_diff(&matmul(&m, &inv), &identity(3)) < 1e-14);
        assert!(inverse(&vec![vec![1.0, 2.0], vec![2.0, 4.0]]).is_none());
    }

    #[test]
    fn rank_of_skew_matrix() {
        let b = vec![vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]];
        assert_eq!(numeric_rank(&b, 1e-10), 2);
        assert_eq!(numeric_rank(&zeros::<f64>(3, 3), 1e-10), 0);
        assert!((det(&b)).abs() < 1e-15);
    }
}
