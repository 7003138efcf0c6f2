//! Structure-constant algebra: Jacobi validation, the Lie–Poisson tensor,
//! index, unimodularity and the quadrature-integrability criterion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, Mat};

/// Relative singular-value threshold for numeric rank.
pub const RANK_REL_TOL: f64 = 1e-10;
/// Jacobi tolerance for non-integral structure constants.
pub const JACOBI_FLOAT_TOL: f64 = 1e-12;

/// A real Lie algebra given by structure constants `C_ab^c` in a fixed
/// basis, `[e_a, e_b] = C_ab^c e_c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LieAlgebra {
    pub name: String,
    dim: usize,
    /// Dense, index `(a * n + b) * n + c`.
    c: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct AlgebraDocument {
    pub name: String,
    pub dim: usize,
    /// `[a, b, c, value]` with 1-based indices.
    pub brackets: Vec<(usize, usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiViolation {
    /// 1-based `(a, b, c, e)`.
    pub indices: [usize; 4],
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiReport {
    pub pass: bool,
    pub exact: bool,
    pub tolerance: f64,
    pub max_residual: f64,
    pub violations: Vec<JacobiViolation>,
}

impl LieAlgebra {
    pub fn zero(name: &str, dim: usize) -> Self {
        LieAlgebra { name: name.to_string(), dim, c: vec![0.0; dim * dim * dim] }
    }

    /// Builds from a dense `n×n×n` tensor without any completion.
    pub fn from_tensor(name: &str, tensor: &[Vec<Vec<f64>>]) -> Result<Self> {
        let n = tensor.len();
        if n == 0 {
            return Err(Error::Input("structure constants must have dimension ≥ 1".into()));
        }
        let mut alg = LieAlgebra::zero(name, n);
        for (a, slab) in tensor.iter().enumerate() {
            if slab.len() != n || slab.iter().any(|row| row.len() != n) {
                return Err(Error::Input(format!("structure constants are not {n}×{n}×{n}")));
            }
            for (b, row) in slab.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    alg.set_raw(a, b, c, v);
                }
            }
        }
        Ok(alg)
    }

    /// Sets `C_ab^c` and `C_ba^c = -value` (0-based).
    pub fn with_bracket(mut self, a: usize, b: usize, c: usize, value: f64) -> Self {
        self.set_raw(a, b, c, value);
        self.set_raw(b, a, c, -value);
        self
    }

    /// Sets one entry only; may break antisymmetry (used for negative controls).
    pub fn set_raw(&mut self, a: usize, b: usize, c: usize, value: f64) {
        let n = self.dim;
        self.c[(a * n + b) * n + c] = value;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn c(&self, a: usize, b: usize, c: usize) -> f64 {
        let n = self.dim;
        self.c[(a * n + b) * n + c]
    }

    pub fn is_integral(&self) -> bool {
        self.c.iter().all(|v| v.fract() == 0.0)
    }

    /// Load from the JSON bracket-list format. Every listed entry must have
    /// its antisymmetric partner listed as well.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: AlgebraDocument =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("algebra JSON: {e}")))?;
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &AlgebraDocument) -> Result<Self> {
        let n = doc.dim;
        if n == 0 {
            return Err(Error::Input("dim must be positive".into()));
        }
        let mut alg = LieAlgebra::zero(&doc.name, n);
        let mut seen = vec![false; n * n * n];
        for &(a, b, c, v) in &doc.brackets {
            if a == 0 || b == 0 || c == 0 || a > n || b > n || c > n {
                return Err(Error::Input(format!("bracket index out of range: [{a},{b},{c}]")));
            }
            let (a, b, c) = (a - 1, b - 1, c - 1);
            let k = (a * n + b) * n + c;
            if seen[k] {
                return Err(Error::Input(format!("duplicate bracket [{},{},{}]", a + 1, b + 1, c + 1)));
            }
            seen[k] = true;
            alg.set_raw(a, b, c, v);
        }
        let report = alg.antisymmetry_residual();
        if let Some((a, b, c, r)) = report {
            return Err(Error::Input(format!(
                "brackets not antisymmetric: C_{}{}^{} + C_{}{}^{} = {r}",
                a + 1,
                b + 1,
                c + 1,
                b + 1,
                a + 1,
                c + 1
            )));
        }
        Ok(alg)
    }

    pub fn to_document(&self) -> AlgebraDocument {
        let n = self.dim;
        let mut brackets = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = self.c(a, b, c);
                    if v != 0.0 {
                        brackets.push((a + 1, b + 1, c + 1, v));
                    }
                }
            }
        }
        AlgebraDocument { name: self.name.clone(), dim: n, brackets }
    }

    /// First `(a, b, c, C_ab^c + C_ba^c)` that is nonzero, if any.
    pub fn antisymmetry_residual(&self) -> Option<(usize, usize, usize, f64)> {
        let n = self.dim;
        for a in 0..n {
            for b in a..n {
                for c in 0..n {
                    let s = self.c(a, b, c) + self.c(b, a, c);
                    if s != 0.0 {
                        return Some((a, b, c, s));
                    }
                }
            }
        }
        None
    }

    /// Direct sum with `other`; basis of `other` is shifted by `self.dim()`.
    pub fn direct_sum(&self, other: &LieAlgebra, name: &str) -> LieAlgebra {
        let (n1, n2) = (self.dim, other.dim);
        let mut out = LieAlgebra::zero(name, n1 + n2);
        for a in 0..n1 {
            for b in 0..n1 {
                for c in 0..n1 {
                    out.set_raw(a, b, c, self.c(a, b, c));
                }
            }
        }
        for a in 0..n2 {
            for b in 0..n2 {
                for c in 0..n2 {
                    out.set_raw(n1 + a, n1 + b, n1 + c, other.c(a, b, c));
                }
            }
        }
        out
    }

    /// `[X, Y]` for coefficient vectors.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                if y[b] == 0.0 {
                    continue;
                }
                for (c, o) in out.iter_mut().enumerate() {
                    *o += x[a] * y[b] * self.c(a, b, c);
                }
            }
        }
        out
    }

    // --- catalog algebras -------------------------------------------------

    pub fn abelian(n: usize) -> Self {
        LieAlgebra::zero(&format!("abelian_{n}"), n)
    }

    /// `[e1, e2] = e3`.
    pub fn heisenberg3() -> Self {
        LieAlgebra::zero("heisenberg3", 3).with_bracket(0, 1, 2, 1.0)
    }

    /// `[e1, e2] = e3`, `[e1, e3] = -e2`; `e1` rotates, `e2, e3` translate.
    pub fn euclid2() -> Self {
        LieAlgebra::zero("euclid2", 3).with_bracket(0, 1, 2, 1.0).with_bracket(0, 2, 1, -1.0)
    }

    /// `[e_a, e_b] = ε_abc e_c`.
    pub fn so3() -> Self {
        LieAlgebra::zero("so3", 3)
            .with_bracket(0, 1, 2, 1.0)
            .with_bracket(1, 2, 0, 1.0)
            .with_bracket(2, 0, 1, 1.0)
    }

    /// `[e1, e2] = e2`.
    pub fn aff1() -> Self {
        LieAlgebra::zero("aff1", 2).with_bracket(0, 1, 1, 1.0)
    }

    pub fn so3_x_so3() -> Self {
        LieAlgebra::so3().direct_sum(&LieAlgebra::so3(), "so3_x_so3")
    }
}

/// Evaluates the Jacobi tensor on the raw structure constants.
pub fn jacobi_check(alg: &LieAlgebra) -> JacobiReport {
    let n = alg.dim();
    let exact = alg.is_integral();
    let tolerance = if exact { 0.0 } else { JACOBI_FLOAT_TOL };
    let mut violations = Vec::new();
    let mut max_residual = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    let mut s = 0.0;
                    for d in 0..n {
                        s += alg.c(a, b, d) * alg.c(d, c, e)
                            + alg.c(b, c, d) * alg.c(d, a, e)
                            + alg.c(c, a, d) * alg.c(d, b, e);
                    }
                    max_residual = max_residual.max(s.abs());
                    if s.abs() > tolerance {
                        violations.push(JacobiViolation { indices: [a + 1, b + 1, c + 1, e + 1], residual: s });
                    }
                }
            }
        }
    }
    JacobiReport { pass: violations.is_empty(), exact, tolerance, max_residual, violations }
}

/// `B_ab(f) = C_ab^c f_c`.
pub fn poisson_tensor<T: Real>(alg: &LieAlgebra, f: &[T]) -> Result<Mat<T>> {
    let n = alg.dim();
    if f.len() != n {
        return Err(Error::Input(format!("dual vector has length {}, algebra has dim {n}", f.len())));
    }
    let mut b = vec![vec![T::zero(); n]; n];
    for (a, row) in b.iter_mut().enumerate() {
        for (bb, entry) in row.iter_mut().enumerate() {
            let mut s = T::zero();
            for (c, &fc) in f.iter().enumerate() {
                let k = alg.c(a, bb, c);
                if k != 0.0 {
                    s += fc * k;
                }
            }
            *entry = s;
        }
    }
    Ok(b)
}

/// Sampled index: `n − max rank B(f)` over `samples` uniform draws in `[-1, 1]^n`.
pub fn index(alg: &LieAlgebra, samples: usize, seed: u64) -> Result<usize> {
    let n = alg.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rank = 0;
    for _ in 0..samples.max(1) {
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let b = poisson_tensor(alg, &f)?;
        max_rank = max_rank.max(numeric_rank(&b, RANK_REL_TOL));
    }
    if max_rank % 2 != 0 {
        return Err(Error::Internal(format!("odd rank {max_rank} for a skew-symmetric matrix")));
    }
    Ok(n - max_rank)
}

/// `(all C_a = 0, C_a = Σ_b C_ab^b)`.
pub fn unimodularity(alg: &LieAlgebra) -> (bool, Vec<f64>) {
    let n = alg.dim();
    let trace: Vec<f64> = (0..n).map(|a| (0..n).map(|b| alg.c(a, b, b)).sum()).collect();
    (trace.iter().all(|&v| v == 0.0), trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Integrability {
    pub integrable: bool,
    pub index: usize,
    /// `(n − index) / 2`, half the dimension of a regular orbit.
    pub half_rank: usize,
}

/// Integrable in quadratures iff `(n − ind) / 2 ≤ 1`.
pub fn integrability_criterion(alg: &LieAlgebra, samples: usize, seed: u64) -> Result<Integrability> {
    let ind = index(alg, samples, seed)?;
    let half_rank = (alg.dim() - ind) / 2;
    Ok(Integrability { integrable: half_rank <= 1, index: ind, half_rank })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_algebras_satisfy_jacobi_exactly() {
        for alg in [
            LieAlgebra::abelian(3),
            LieAlgebra::heisenberg3(),
            LieAlgebra::euclid2(),
            LieAlgebra::so3(),
            LieAlgebra::aff1(),
            LieAlgebra::so3_x_so3(),
        ] {
            let r = jacobi_check(&alg);
            assert!(r.pass && r.exact && r.max_residual == 0.0, "{}", alg.name);
            assert!(alg.antisymmetry_residual().is_none());
        }
    }

    #[test]
    fn so3_jacobi_matches_direct_triple_sum() {
        // oracle: [[x,y],z] + [[y,z],x] + [[z,x],y] with the bracket helper
        let alg = LieAlgebra::so3();
        let basis: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| (i == j) as u8 as f64).collect()).collect();
        for x in &basis {
            for y in &basis {
                for z in &basis {
                    let t1 = alg.bracket(&alg.bracket(x, y), z);
                    let t2 = alg.bracket(&alg.bracket(y, z), x);
                    let t3 = alg.bracket(&alg.bracket(z, x), y);
                    for k in 0..3 {
                        assert_eq!(t1[k] + t2[k] + t3[k], 0.0);
                    }
                }
            }
        }
        assert!(jacobi_check(&alg).pass);
    }

    #[test]
    fn one_sided_corruption_is_reported() {
        let mut alg = LieAlgebra::heisenberg3();
        alg.set_raw(0, 2, 1, 1.0);
        let r = jacobi_check(&alg);
        assert!(!r.pass);
        assert_eq!(r.max_residual, 1.0);
        assert!(r.violations.iter().any(|v| v.indices == [1, 1, 3, 3]));
    }

    #[test]
    fn shape_mismatch_is_input_error() {
        let bad = vec![vec![vec![0.0; 3]; 3], vec![vec![0.0; 2]; 3], vec![vec![0.0; 3]; 3]];
        assert!(matches!(LieAlgebra::from_tensor("bad", &bad), Err(Error::Input(_))));
    }

    #[test]
    fn poisson_tensor_examples() {
        let h = LieAlgebra::heisenberg3();
        let b = poisson_tensor(&h, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(b, vec![vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0; 3]]);
        assert_eq!(poisson_tensor(&h, &[0.0; 3]).unwrap(), vec![vec![0.0; 3]; 3]);
        let s = poisson_tensor(&LieAlgebra::so3(), &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!((s[0][1], s[0][2], s[1][2]), (1.0, 0.0, 0.0));
        assert!(poisson_tensor(&h, &[1.0]).is_err());
    }

    #[test]
    fn index_values() {
        assert_eq!(index(&LieAlgebra::abelian(4), 100, 1).unwrap(), 4);
        assert_eq!(index(&LieAlgebra::heisenberg3(), 100, 1).unwrap(), 1);
        assert_eq!(index(&LieAlgebra::euclid2(), 100, 1).unwrap(), 1);
        assert_eq!(index(&LieAlgebra::so3(), 100, 1).unwrap(), 1);
        assert_eq!(index(&LieAlgebra::aff1(), 100, 1).unwrap(), 0);
        assert_eq!(index(&LieAlgebra::so3_x_so3(), 100, 1).unwrap(), 2);
    }

    #[test]
    fn unimodularity_examples() {
        assert_eq!(unimodularity(&LieAlgebra::heisenberg3()), (true, vec![0.0; 3]));
        assert!(unimodularity(&LieAlgebra::so3()).0);
        assert_eq!(unimodularity(&LieAlgebra::aff1()), (false, vec![1.0, 0.0]));
    }

    #[test]
    fn criterion_examples() {
        let h = integrability_criterion(&LieAlgebra::heisenberg3(), 100, 7).unwrap();
        assert!(h.integrable && h.half_rank == 1);
        let a = integrability_criterion(&LieAlgebra::abelian(5), 100, 7).unwrap();
        assert!(a.integrable && a.half_rank == 0);
        let s = integrability_criterion(&LieAlgebra::so3_x_so3(), 100, 7).unwrap();
        assert!(!s.integrable && s.half_rank == 2);
    }

    #[test]
    fn json_round_trip_and_antisymmetry_enforcement() {
        let h = LieAlgebra::heisenberg3();
        let text = serde_json::to_string(&h.to_document()).unwrap();
        assert_eq!(LieAlgebra::from_json(&text).unwrap(), h);
        let one_sided = r#"{"name":"x","dim":3,"brackets":[[1,2,3,1.0]]}"#;
        assert!(matches!(LieAlgebra::from_json(one_sided), Err(Error::Input(_))));
        let out_of_range = r#"{"name":"x","dim":2,"brackets":[[1,3,1,1.0],[3,1,1,-1.0]]}"#;
        assert!(LieAlgebra::from_json(out_of_range).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn poisson_tensor_is_linear_and_skew(
                f in proptest::collection::vec(-10.0f64..10.0, 6),
                g in proptest::collection::vec(-10.0f64..10.0, 6),
                alpha in -5.0f64..5.0,
            ) {
                let alg = LieAlgebra::so3_x_so3();
                let bf = poisson_tensor(&alg, &f).unwrap();
                let bg = poisson_tensor(&alg, &g).unwrap();
                let h: Vec<f64> = f.iter().zip(&g).map(|(x, y)| alpha * x + y).collect();
                let bh = poisson_tensor(&alg, &h).unwrap();
                for a in 0..6 {
                    for b in 0..6 {
                        prop_assert!((bh[a][b] - (alpha * bf[a][b] + bg[a][b])).abs() < 1e-12);
                        prop_assert_eq!(bf[a][b], -bf[b][a]);
                    }
                }
            }

            #[test]
            fn index_parity_holds(seed in 0u64..1000) {
                for alg in [LieAlgebra::heisenberg3(), LieAlgebra::aff1(), LieAlgebra::so3_x_so3()] {
                    let ind = index(&alg, 20, seed).unwrap();
                    prop_assert_eq!((alg.dim() - ind) % 2, 0);
                }
            }
        }
    }
}
