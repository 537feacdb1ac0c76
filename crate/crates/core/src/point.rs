//! The complete pointwise submanifold datum.
//!
//! A [`SubmanifoldPoint`] stores an orthonormal tangent frame `e_1..e_n` and
//! normal frame `e_{n+1}..e_{4m}` as matrix columns in ambient coordinates,
//! the second fundamental form as one symmetric `n x n` matrix
//! `h^alpha_{ij} = <h(e_i, e_j), e_alpha>` per normal direction, and the
//! symmetric connection tensor `M` restricted to the tangent space.
//!
//! `M` is taken as a direct input. The operator `Q` of the connection
//! curvature is its metric raise, `g(QX, W) = M(X, W)`, which in an
//! orthonormal frame is the same matrix.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

pub use crate::linalg::orthonormalize;
use crate::error::{Error, Result};
use crate::linalg::{self, max_abs};
use crate::quat::QuaternionicStructure;
use crate::tolerance;

/// Quaternionic space form model: the structure plus the curvature
/// parameter `c` (quaternionic sectional curvature `4c`).
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientModel {
    structure: QuaternionicStructure,
    c: f64,
}

impl AmbientModel {
    pub fn new(structure: QuaternionicStructure, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter { name: "c", value: c });
        }
        let report = structure.verify();
        if !report.pass {
            return Err(Error::Precondition(format!(
                "quaternionic structure residual {:e} exceeds {:e}",
                report.max_residual(),
                tolerance::STRUCTURE
            )));
        }
        Ok(Self { structure, c })
    }

    /// Standard structure on `R^{4m}` with parameter `c`.
    pub fn standard(m: usize, c: f64) -> Result<Self> {
        Self::new(QuaternionicStructure::build_standard(m)?, c)
    }

    pub fn structure(&self) -> &QuaternionicStructure {
        &self.structure
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmanifoldPoint {
    ambient: AmbientModel,
    tangent: DMatrix<f64>,
    normal: DMatrix<f64>,
    h: Vec<DMatrix<f64>>,
    m_tensor: DMatrix<f64>,
}

/// Diagnostics of [`SubmanifoldPoint::validate`]. A location is reported as
/// 0-based `(alpha, i, j)` or `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    /// `max |G - I|` of the Gram matrix of tangent and normal frames together.
    pub gram_residual: f64,
    pub h_symmetry_residual: f64,
    pub h_symmetry_worst: Option<(usize, usize, usize)>,
    pub m_symmetry_residual: f64,
    pub m_symmetry_worst: Option<(usize, usize)>,
    /// `2 <= n < 4m` and all array sizes agree.
    pub dimensions_ok: bool,
    pub finite: bool,
    pub pass: bool,
}

impl PointReport {
    /// One-line description of the first failing check, if any.
    pub fn failure(&self) -> Option<String> {
        if self.pass {
            return None;
        }
        if !self.dimensions_ok {
            return Some("dimension mismatch".into());
        }
        if !self.finite {
            return Some("non-finite entries".into());
        }
        if self.gram_residual > tolerance::FRAME {
            return Some(format!("frame not orthonormal (Gram residual {:e})", self.gram_residual));
        }
        if self.h_symmetry_residual > tolerance::FRAME {
            let (a, i, j) = self.h_symmetry_worst.unwrap_or_default();
            return Some(format!(
                "h not symmetric: h[{a}][{i}][{j}] != h[{a}][{j}][{i}] (residual {:e})",
                self.h_symmetry_residual
            ));
        }
        let (i, j) = self.m_symmetry_worst.unwrap_or_default();
        Some(format!("M not symmetric at ({i}, {j}) (residual {:e})", self.m_symmetry_residual))
    }
}

impl SubmanifoldPoint {
    /// Assembles and validates a point, failing with [`Error::InvalidPoint`]
    /// when any residual exceeds `1e-10`.
    pub fn new(
        ambient: AmbientModel,
        tangent: DMatrix<f64>,
        normal: DMatrix<f64>,
        h: Vec<DMatrix<f64>>,
        m_tensor: DMatrix<f64>,
    ) -> Result<Self> {
        let point = Self::assemble(ambient, tangent, normal, h, m_tensor)?;
        let report = point.validate();
        match report.failure() {
            None => Ok(point),
            Some(msg) => Err(Error::InvalidPoint(msg)),
        }
    }

    /// Builds a point from a tangent frame, completing the normal frame
    /// canonically.
    pub fn with_completed_normal(
        ambient: AmbientModel,
        tangent: DMatrix<f64>,
        h: Vec<DMatrix<f64>>,
        m_tensor: DMatrix<f64>,
    ) -> Result<Self> {
        let normal = complete_normal_frame(&tangent)?;
        Self::new(ambient, tangent, normal, h, m_tensor)
    }

    /// Assembles a point checking only that array shapes agree. The result
    /// may fail [`validate`](Self::validate).
    pub fn assemble(
        ambient: AmbientModel,
        tangent: DMatrix<f64>,
        normal: DMatrix<f64>,
        h: Vec<DMatrix<f64>>,
        m_tensor: DMatrix<f64>,
    ) -> Result<Self> {
        let dim = ambient.dim();
        let n = tangent.ncols();
        if tangent.nrows() != dim {
            return Err(Error::Shape { expected: dim, found: tangent.nrows(), what: "tangent frame rows" });
        }
        if normal.nrows() != dim {
            return Err(Error::Shape { expected: dim, found: normal.nrows(), what: "normal frame rows" });
        }
        if n < 2 {
            return Err(Error::InvalidDimension { what: "n", value: n, reason: "need n >= 2" });
        }
        if n >= dim {
            return Err(Error::InvalidDimension { what: "n", value: n, reason: "need n < 4m" });
        }
        if normal.ncols() != dim - n {
            return Err(Error::Shape { expected: dim - n, found: normal.ncols(), what: "normal frame columns" });
        }
        if h.len() != dim - n {
            return Err(Error::Shape { expected: dim - n, found: h.len(), what: "h normal components" });
        }
        for ha in &h {
            if ha.nrows() != n || ha.ncols() != n {
                return Err(Error::Shape { expected: n, found: ha.nrows().max(ha.ncols()), what: "h component" });
            }
        }
        if m_tensor.nrows() != n || m_tensor.ncols() != n {
            return Err(Error::Shape { expected: n, found: m_tensor.nrows(), what: "M" });
        }
        Ok(Self { ambient, tangent, normal, h, m_tensor })
    }

    pub fn validate(&self) -> PointReport {
        let dim = self.dim();
        let n = self.n();
        let dimensions_ok = n >= 2
            && n < dim
            && self.normal.ncols() == dim - n
            && self.h.len() == dim - n
            && self.m_tensor.nrows() == n;
        let finite = self.tangent.iter().all(|x| x.is_finite())
            && self.normal.iter().all(|x| x.is_finite())
            && self.h.iter().all(|a| a.iter().all(|x| x.is_finite()))
            && self.m_tensor.iter().all(|x| x.is_finite());
        let mut full = DMatrix::zeros(dim, self.tangent.ncols() + self.normal.ncols());
        full.view_mut((0, 0), (dim, n)).copy_from(&self.tangent);
        full.view_mut((0, n), (dim, self.normal.ncols())).copy_from(&self.normal);
        let gram_residual = linalg::gram_residual(&full);

        let mut h_symmetry_residual = 0.0;
        let mut h_symmetry_worst = None;
        for (a, ha) in self.h.iter().enumerate() {
            for i in 0..n {
                for j in (i + 1)..n {
                    let r = libm::fabs(ha[(i, j)] - ha[(j, i)]);
                    if r > h_symmetry_residual {
                        h_symmetry_residual = r;
                        h_symmetry_worst = Some((a, i, j));
                    }
                }
            }
        }
        let mut m_symmetry_residual = 0.0;
        let mut m_symmetry_worst = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let r = libm::fabs(self.m_tensor[(i, j)] - self.m_tensor[(j, i)]);
                if r > m_symmetry_residual {
                    m_symmetry_residual = r;
                    m_symmetry_worst = Some((i, j));
                }
            }
        }
        let pass = dimensions_ok
            && finite
            && gram_residual <= tolerance::FRAME
            && h_symmetry_residual <= tolerance::FRAME
            && m_symmetry_residual <= tolerance::FRAME;
        PointReport {
            gram_residual,
            h_symmetry_residual,
            h_symmetry_worst,
            m_symmetry_residual,
            m_symmetry_worst,
            dimensions_ok,
            finite,
            pass,
        }
    }

    pub fn ambient(&self) -> &AmbientModel {
        &self.ambient
    }

    pub fn c(&self) -> f64 {
        self.ambient.c
    }

    /// Submanifold dimension.
    pub fn n(&self) -> usize {
        self.tangent.ncols()
    }

    /// Ambient dimension `4m`.
    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    /// Codimension `4m - n`.
    pub fn codim(&self) -> usize {
        self.normal.ncols()
    }

    /// Tangent frame, one column per `e_i`.
    pub fn tangent_frame(&self) -> &DMatrix<f64> {
        &self.tangent
    }

    /// Normal frame, one column per `e_alpha`.
    pub fn normal_frame(&self) -> &DMatrix<f64> {
        &self.normal
    }

    /// Second fundamental form, indexed `[alpha](i, j)`.
    pub fn h(&self) -> &[DMatrix<f64>] {
        &self.h
    }

    /// Connection tensor `M` on the tangent space.
    pub fn m_tensor(&self) -> &DMatrix<f64> {
        &self.m_tensor
    }

    /// `m_M = trace M`.
    pub fn trace_m(&self) -> f64 {
        self.m_tensor.trace()
    }

    /// `|h|^2 = sum_alpha |h^alpha|_F^2`.
    pub fn norm_h2(&self) -> f64 {
        self.h.iter().map(|a| a.norm_squared()).sum()
    }

    /// Tangent-frame coordinates of an ambient vector, rejecting vectors
    /// whose normal component exceeds `1e-10`.
    pub fn tangent_coords(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), found: x.len(), what: "ambient vector" });
        }
        let coords = self.tangent.transpose() * x;
        let residual = (x - &self.tangent * &coords).norm();
        if residual > tolerance::FRAME {
            return Err(Error::InvalidVector(format!("not tangent: normal residual {residual:e}")));
        }
        Ok(coords)
    }

    /// Ambient vector `sum_i x_i e_i`.
    pub fn ambient_vector(&self, coords: &DVector<f64>) -> DVector<f64> {
        &self.tangent * coords
    }

    /// Same point expressed in the rotated tangent frame `E R` (orthogonal
    /// `R`), with `h` and `M` transformed covariantly.
    pub fn rotate_tangent_frame(&self, rotation: &DMatrix<f64>) -> Result<Self> {
        let n = self.n();
        if rotation.nrows() != n || rotation.ncols() != n {
            return Err(Error::Shape { expected: n, found: rotation.nrows(), what: "tangent rotation" });
        }
        let rt = rotation.transpose();
        let h = self.h.iter().map(|a| &rt * a * rotation).collect();
        let m_tensor = &rt * &self.m_tensor * rotation;
        Self::new(self.ambient.clone(), &self.tangent * rotation, self.normal.clone(), h, m_tensor)
    }

    /// Copy with a different second fundamental form.
    pub fn with_h(&self, h: Vec<DMatrix<f64>>) -> Result<Self> {
        Self::new(self.ambient.clone(), self.tangent.clone(), self.normal.clone(), h, self.m_tensor.clone())
    }

    /// Copy with a different connection tensor.
    pub fn with_m(&self, m_tensor: DMatrix<f64>) -> Result<Self> {
        Self::new(self.ambient.clone(), self.tangent.clone(), self.normal.clone(), self.h.clone(), m_tensor)
    }

    /// Copy with a different curvature parameter.
    pub fn with_c(&self, c: f64) -> Result<Self> {
        let ambient = AmbientModel::new(self.ambient.structure.clone(), c)?;
        Self::new(ambient, self.tangent.clone(), self.normal.clone(), self.h.clone(), self.m_tensor.clone())
    }
}

/// Canonical orthonormal completion of an orthonormal tangent frame.
pub fn complete_normal_frame(tangent: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let dim = tangent.nrows();
    let residual = linalg::gram_residual(tangent);
    if residual > tolerance::FRAME {
        return Err(Error::InvalidPoint(format!("tangent frame not orthonormal (Gram residual {residual:e})")));
    }
    let frame: Vec<DVector<f64>> = tangent.column_iter().map(|c| c.into_owned()).collect();
    let normal = linalg::complete_basis(&frame, dim);
    if normal.len() != dim - frame.len() {
        return Err(Error::DegenerateFrame { pivot: frame.len() + normal.len(), norm: 0.0 });
    }
    Ok(linalg::columns(&normal, dim))
}

/// Tangential and normal parts of `J_k e_i`:
/// `(P_k)_{ji} = <J_k e_i, e_j>`, `(F_k)_{alpha i} = <J_k e_i, e_alpha>`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangencyData {
    pub p: [DMatrix<f64>; 3],
    pub f: [DMatrix<f64>; 3],
    /// `|P_k|^2 = sum_{i,j} <P_k e_i, e_j>^2`.
    pub norm_p2: [f64; 3],
}

impl TangencyData {
    /// `sum_k |P_k|^2`, between `0` and `3n`.
    pub fn total_norm_p2(&self) -> f64 {
        self.norm_p2.iter().sum()
    }

    /// `max |J_k e_i - (E P_k + N F_k)_i|` over `i, k`.
    pub fn reconstruction_residual(&self, point: &SubmanifoldPoint) -> f64 {
        let e = point.tangent_frame();
        let nf = point.normal_frame();
        (0..3)
            .map(|k| {
                let direct = &point.ambient().structure().matrices()[k] * e;
                max_abs(&(direct - e * &self.p[k] - nf * &self.f[k]))
            })
            .fold(0.0, libm::fmax)
    }
}

pub fn tangency_decomposition(point: &SubmanifoldPoint) -> TangencyData {
    let e = point.tangent_frame();
    let nf = point.normal_frame();
    let et = e.transpose();
    let nt = nf.transpose();
    let mats = point.ambient().structure().matrices();
    let p = [0, 1, 2].map(|k| &et * &mats[k] * e);
    let f = [0, 1, 2].map(|k| &nt * &mats[k] * e);
    let norm_p2 = [0, 1, 2].map(|k| p[k].norm_squared());
    TangencyData { p, f, norm_p2 }
}

/// Free-function form of [`SubmanifoldPoint::validate`].
pub fn validate_point(point: &SubmanifoldPoint) -> PointReport {
    point.validate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn axis_frame(dim: usize, axes: &[usize]) -> DMatrix<f64> {
        let mut e = DMatrix::zeros(dim, axes.len());
        for (col, &ax) in axes.iter().enumerate() {
            e[(ax, col)] = 1.0;
        }
        e
    }

    fn zero_point(m: usize, axes: &[usize]) -> SubmanifoldPoint {
        let n = axes.len();
        let ambient = AmbientModel::standard(m, 1.0).unwrap();
        let h = vec![DMatrix::zeros(n, n); 4 * m - n];
        SubmanifoldPoint::with_completed_normal(ambient, axis_frame(4 * m, axes), h, DMatrix::zeros(n, n))
            .unwrap()
    }

    #[test]
    fn invariant_frame_has_full_tangency() {
        let point = zero_point(2, &[0, 1, 2, 3]);
        let t = tangency_decomposition(&point);
        for k in 0..3 {
            approx::assert_abs_diff_eq!(t.norm_p2[k], 4.0, epsilon = 1e-12);
        }
        assert!(t.reconstruction_residual(&point) <= 1e-12);
    }

    #[test]
    fn real_axes_are_anti_invariant() {
        let point = zero_point(2, &[0, 4]);
        let t = tangency_decomposition(&point);
        assert_eq!(t.norm_p2, [0.0; 3]);
    }

    #[test]
    fn p_is_skew_for_generic_frame() {
        let ambient = AmbientModel::standard(2, 0.5).unwrap();
        let raw = [
            DVector::from_column_slice(&[0.3, 1.0, -0.4, 0.2, 0.0, 0.5, 0.1, -0.7]),
            DVector::from_column_slice(&[1.2, -0.1, 0.3, 0.9, -0.4, 0.0, 0.2, 0.3]),
            DVector::from_column_slice(&[0.0, 0.2, 0.8, -0.5, 0.6, 0.1, -0.3, 0.4]),
        ];
        let frame = linalg::columns(&orthonormalize(&raw).unwrap(), 8);
        let point =
            SubmanifoldPoint::with_completed_normal(ambient, frame, vec![DMatrix::zeros(3, 3); 5], DMatrix::zeros(3, 3))
                .unwrap();
        let t = tangency_decomposition(&point);
        for k in 0..3 {
            assert!(max_abs(&(&t.p[k] + t.p[k].transpose())) <= 1e-12);
            let cols = t.p[k].transpose() * &t.p[k] + t.f[k].transpose() * &t.f[k];
            assert!(max_abs(&(cols - DMatrix::identity(3, 3))) <= 1e-12);
            assert!(t.norm_p2[k] >= 0.0 && t.norm_p2[k] <= 3.0);
        }
        assert!(t.reconstruction_residual(&point) <= 1e-10);
    }

    #[test]
    fn canonical_completion_for_leading_axes() {
        let normal = complete_normal_frame(&axis_frame(8, &[0, 1, 2, 3])).unwrap();
        assert_eq!(normal, axis_frame(8, &[4, 5, 6, 7]));
        assert_eq!(normal, complete_normal_frame(&axis_frame(8, &[0, 1, 2, 3])).unwrap());
    }

    #[test]
    fn broken_h_symmetry_is_reported() {
        let point = zero_point(2, &[0, 1, 2, 3]);
        let mut h = point.h().to_vec();
        h[0] = DMatrix::identity(4, 4);
        h[0][(0, 1)] += 0.25;
        let bad = SubmanifoldPoint::assemble(
            point.ambient().clone(),
            point.tangent_frame().clone(),
            point.normal_frame().clone(),
            h.clone(),
            point.m_tensor().clone(),
        )
        .unwrap();
        let report = bad.validate();
        assert!(!report.pass);
        assert_eq!(report.h_symmetry_residual, 0.25);
        assert_eq!(report.h_symmetry_worst, Some((0, 0, 1)));
        assert!(matches!(point.with_h(h), Err(Error::InvalidPoint(msg)) if msg.contains("h[0][0][1]")));
    }

    #[test]
    fn scaled_frame_fails_gram_check() {
        let point = zero_point(2, &[0, 1, 2, 3]);
        let bad = SubmanifoldPoint::assemble(
            point.ambient().clone(),
            point.tangent_frame() * 2.0,
            point.normal_frame().clone(),
            point.h().to_vec(),
            point.m_tensor().clone(),
        )
        .unwrap();
        let report = bad.validate();
        assert!(!report.pass);
        assert_eq!(report.gram_residual, 3.0);
    }

    #[test]
    fn asymmetric_m_is_reported() {
        let point = zero_point(2, &[0, 1, 2]);
        let mut m = DMatrix::zeros(3, 3);
        m[(1, 2)] = 0.1;
        let report = SubmanifoldPoint::assemble(
            point.ambient().clone(),
            point.tangent_frame().clone(),
            point.normal_frame().clone(),
            point.h().to_vec(),
            m,
        )
        .unwrap()
        .validate();
        assert!(!report.pass);
        assert_eq!(report.m_symmetry_worst, Some((1, 2)));
    }

    #[test]
    fn dimension_errors() {
        let ambient = AmbientModel::standard(1, 1.0).unwrap();
        let e = axis_frame(4, &[0, 1, 2, 3]);
        assert!(matches!(
            SubmanifoldPoint::assemble(ambient.clone(), e, DMatrix::zeros(4, 0), vec![], DMatrix::zeros(4, 4)),
            Err(Error::InvalidDimension { what: "n", .. })
        ));
        let e = axis_frame(4, &[0]);
        assert!(matches!(
            SubmanifoldPoint::assemble(ambient, e, DMatrix::zeros(4, 3), vec![], DMatrix::zeros(1, 1)),
            Err(Error::InvalidDimension { what: "n", .. })
        ));
    }

    #[test]
    fn tangent_coords_rejects_normal_vectors() {
        let point = zero_point(2, &[0, 1, 2, 3]);
        let mut x = DVector::zeros(8);
        x[5] = 1.0;
        assert!(matches!(point.tangent_coords(&x), Err(Error::InvalidVector(_))));
        x[5] = 0.0;
        x[2] = 1.0;
        assert_eq!(point.tangent_coords(&x).unwrap()[2], 1.0);
    }
}
