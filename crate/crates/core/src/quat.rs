//! Almost-quaternionic structures `(J1, J2, J3)` on `R^{4m}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::max_abs;
use crate::tolerance;

/// Largest quaternionic dimension `m` with `4m <= 64`.
pub const MAX_QUATERNIONIC_DIM: usize = 16;

/// Three anticommuting orthogonal complex structures on `R^{dim}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionicStructure {
    dim: usize,
    j: [DMatrix<f64>; 3],
}

/// Max-norm residuals of the quaternion relations, one entry per structure
/// (or per cyclic pair `(1,2), (2,3), (3,1)`).
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    /// `J_k^2 + I`.
    pub square: [f64; 3],
    /// `J1 J2 - J3`, `J2 J3 - J1`, `J3 J1 - J2`.
    pub cyclic: [f64; 3],
    /// `J1 J2 + J2 J1`, `J2 J3 + J3 J2`, `J3 J1 + J1 J3`.
    pub anticommutator: [f64; 3],
    /// `J_k^T J_k - I`.
    pub orthogonality: [f64; 3],
    /// `J_k^T + J_k`.
    pub skewness: [f64; 3],
    pub pass: bool,
}

impl StructureReport {
    /// Worst residual over every relation.
    pub fn max_residual(&self) -> f64 {
        [self.square, self.cyclic, self.anticommutator, self.orthogonality, self.skewness]
            .iter()
            .flatten()
            .fold(0.0, |a, &b| libm::fmax(a, b))
    }
}

impl QuaternionicStructure {
    /// Left multiplication by `i, j, k` on each quaternionic coordinate block
    /// `(a, b, c, d) = a + bi + cj + dk`.
    pub fn build_standard(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidDimension { what: "m", value: m, reason: "need m >= 1" });
        }
        if m > MAX_QUATERNIONIC_DIM {
            return Err(Error::InvalidDimension { what: "m", value: m, reason: "need 4m <= 64" });
        }
        let dim = 4 * m;
        // (row, col, sign) for each 4x4 block
        const I: [(usize, usize, f64); 4] = [(0, 1, -1.0), (1, 0, 1.0), (2, 3, -1.0), (3, 2, 1.0)];
        const J: [(usize, usize, f64); 4] = [(0, 2, -1.0), (1, 3, 1.0), (2, 0, 1.0), (3, 1, -1.0)];
        const K: [(usize, usize, f64); 4] = [(0, 3, -1.0), (1, 2, -1.0), (2, 1, 1.0), (3, 0, 1.0)];
        let block = |pattern: &[(usize, usize, f64); 4]| {
            let mut out = DMatrix::zeros(dim, dim);
            for b in 0..m {
                for &(r, c, s) in pattern {
                    out[(4 * b + r, 4 * b + c)] = s;
                }
            }
            out
        };
        Ok(Self { dim, j: [block(&I), block(&J), block(&K)] })
    }

    /// Wraps three explicit matrices. Only shapes are checked; use
    /// [`verify`](Self::verify) for the algebra.
    pub fn from_matrices(j: [DMatrix<f64>; 3]) -> Result<Self> {
        let dim = j[0].nrows();
        if dim == 0 || dim % 4 != 0 {
            return Err(Error::InvalidDimension {
                what: "dim",
                value: dim,
                reason: "must be a positive multiple of 4",
            });
        }
        for mat in &j {
            if mat.nrows() != dim || mat.ncols() != dim {
                return Err(Error::Shape {
                    expected: dim,
                    found: if mat.nrows() != dim { mat.nrows() } else { mat.ncols() },
                    what: "structure matrix",
                });
            }
        }
        Ok(Self { dim, j })
    }

    /// `O J_k O^T` for an orthogonal `O`.
    pub fn conjugate(&self, orthogonal: &DMatrix<f64>) -> Result<Self> {
        if orthogonal.nrows() != self.dim || orthogonal.ncols() != self.dim {
            return Err(Error::Shape { expected: self.dim, found: orthogonal.nrows(), what: "conjugator" });
        }
        let ot = orthogonal.transpose();
        let j = [
            orthogonal * &self.j[0] * &ot,
            orthogonal * &self.j[1] * &ot,
            orthogonal * &self.j[2] * &ot,
        ];
        Ok(Self { dim: self.dim, j })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Quaternionic dimension `m = dim / 4`.
    pub fn m(&self) -> usize {
        self.dim / 4
    }

    /// Matrix of `J_k`, `k` in `1..=3`.
    pub fn matrix(&self, k: usize) -> Result<&DMatrix<f64>> {
        match k {
            1..=3 => Ok(&self.j[k - 1]),
            _ => Err(Error::IndexOutOfRange { index: k, bound: 4 }),
        }
    }

    pub fn matrices(&self) -> &[DMatrix<f64>; 3] {
        &self.j
    }

    /// `J_k v`, `k` in `1..=3`.
    pub fn apply(&self, k: usize, v: &DVector<f64>) -> Result<DVector<f64>> {
        let jk = self.matrix(k)?;
        if v.len() != self.dim {
            return Err(Error::Shape { expected: self.dim, found: v.len(), what: "vector" });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidVector("non-finite entries".into()));
        }
        Ok(jk * v)
    }

    pub fn verify(&self) -> StructureReport {
        let id = DMatrix::<f64>::identity(self.dim, self.dim);
        let j = &self.j;
        let square = [0, 1, 2].map(|k| max_abs(&(&j[k] * &j[k] + &id)));
        let pairs = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];
        let cyclic = pairs.map(|(a, b, c)| max_abs(&(&j[a] * &j[b] - &j[c])));
        let anticommutator = pairs.map(|(a, b, _)| max_abs(&(&j[a] * &j[b] + &j[b] * &j[a])));
        let orthogonality = [0, 1, 2].map(|k| max_abs(&(j[k].transpose() * &j[k] - &id)));
        let skewness = [0, 1, 2].map(|k| max_abs(&(j[k].transpose() + &j[k])));
        let mut report = StructureReport { square, cyclic, anticommutator, orthogonality, skewness, pass: false };
        report.pass = report.max_residual() <= tolerance::STRUCTURE;
        report
    }
}

/// Free-function form of [`QuaternionicStructure::verify`].
pub fn verify_structure(q: &QuaternionicStructure) -> StructureReport {
    q.verify()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(dim: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        v
    }

    fn vec4(xs: [f64; 4]) -> DVector<f64> {
        DVector::from_column_slice(&xs)
    }

    #[test]
    fn j1_rotates_real_axis() {
        let q = QuaternionicStructure::build_standard(1).unwrap();
        assert_eq!(q.apply(1, &e(4, 0)).unwrap(), vec4([0.0, 1.0, 0.0, 0.0]));
        assert_eq!(q.apply(2, &e(4, 0)).unwrap(), vec4([0.0, 0.0, 1.0, 0.0]));
        assert_eq!(q.apply(1, &e(4, 1)).unwrap(), vec4([-1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn ij_equals_k() {
        let q = QuaternionicStructure::build_standard(1).unwrap();
        let ij = q.apply(1, &q.apply(2, &e(4, 0)).unwrap()).unwrap();
        assert_eq!(ij, vec4([0.0, 0.0, 0.0, 1.0]));
        assert_eq!(ij, q.apply(3, &e(4, 0)).unwrap());
    }

    #[test]
    fn standard_structure_is_exact() {
        for m in 1..=4 {
            let report = QuaternionicStructure::build_standard(m).unwrap().verify();
            assert_eq!(report.max_residual(), 0.0, "m={m}");
            assert!(report.pass);
        }
    }

    #[test]
    fn standard_entries_are_integers() {
        let q = QuaternionicStructure::build_standard(3).unwrap();
        for jm in q.matrices() {
            assert!(jm.iter().all(|&x| x == 0.0 || x == 1.0 || x == -1.0));
        }
    }

    #[test]
    fn flipped_j3_breaks_cyclic_relation_by_two() {
        let q = QuaternionicStructure::build_standard(2).unwrap();
        let [a, b, c] = q.matrices().clone();
        let bad = QuaternionicStructure::from_matrices([a, b, -c]).unwrap();
        let report = bad.verify();
        assert!(!report.pass);
        assert_eq!(report.cyclic[0], 2.0);
        // J^2 + I, anticommutators are insensitive to the sign flip
        assert_eq!(report.square, [0.0; 3]);
        assert_eq!(report.anticommutator, [0.0; 3]);
    }

    #[test]
    fn identity_is_not_complex() {
        let id = DMatrix::<f64>::identity(8, 8);
        let q = QuaternionicStructure::from_matrices([id.clone(), id.clone(), id]).unwrap();
        assert_eq!(q.verify().square, [2.0; 3]);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            QuaternionicStructure::build_standard(0),
            Err(Error::InvalidDimension { .. })
        ));
        let q = QuaternionicStructure::build_standard(1).unwrap();
        assert!(matches!(q.apply(4, &e(4, 0)), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(q.apply(0, &e(4, 0)), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(q.apply(1, &e(8, 0)), Err(Error::Shape { .. })));
        let a = DMatrix::<f64>::zeros(8, 8);
        let b = DMatrix::<f64>::zeros(4, 4);
        assert!(matches!(
            QuaternionicStructure::from_matrices([a.clone(), a, b]),
            Err(Error::Shape { .. })
        ));
    }

    fn unit_vector(dim: usize) -> impl Strategy<Value = DVector<f64>> {
        proptest::collection::vec(-1.0f64..1.0, dim)
            .prop_filter("nonzero", |xs| xs.iter().map(|x| x * x).sum::<f64>() > 1e-6)
            .prop_map(|xs| DVector::from_vec(xs).normalize())
    }

    proptest! {
        #[test]
        fn quaternionic_frame_is_orthonormal(v in unit_vector(8)) {
            let q = QuaternionicStructure::build_standard(2).unwrap();
            let frame = [
                v.clone(),
                q.apply(1, &v).unwrap(),
                q.apply(2, &v).unwrap(),
                q.apply(3, &v).unwrap(),
            ];
            for a in 0..4 {
                for b in 0..4 {
                    let want = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((frame[a].dot(&frame[b]) - want).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn conjugated_structure_still_verifies(angle in -3.0f64..3.0) {
            let q = QuaternionicStructure::build_standard(2).unwrap();
            let mut rot = DMatrix::<f64>::identity(8, 8);
            let (s, c) = (angle.sin(), angle.cos());
            rot[(0, 0)] = c; rot[(0, 5)] = -s; rot[(5, 0)] = s; rot[(5, 5)] = c;
            let report = q.conjugate(&rot).unwrap().verify();
            prop_assert!(report.pass, "{report:?}");
        }
    }

    #[test]
    fn norm_is_preserved_on_random_vectors() {
        use rand::{Rng, SeedableRng};
        let q = QuaternionicStructure::build_standard(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let v = DVector::from_fn(12, |_, _| rng.random_range(-1.0..1.0)).normalize();
            for k in 1..=3 {
                let w = q.apply(k, &v).unwrap();
                assert!((w.norm() - 1.0).abs() <= 1e-12);
                assert!(w.dot(&v).abs() <= 1e-12);
            }
        }
    }
}
