//! Extrinsic invariants of a point: mean and Casorati curvature, hyperplane
//! extrema of `C(V)`, the δ-Casorati family, the Chen invariant, plane data
//! and the two elementary lemmas behind the inequalities.

pub mod optimize;

use alloc::format;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::curvature::CurvatureTensors;
use crate::error::{Error, Result};
use crate::linalg;
use crate::point::{SubmanifoldPoint, TangencyData};
use crate::tolerance;
use optimize::{minimize_on_pairs, minimize_on_sphere, MultiStart};

fn require_n3(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidDimension { what: "n", value: n, reason: "needs n >= 3" });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurvature {
    /// `H_alpha = (1/n) tr h^alpha` in normal-frame coordinates.
    pub h: DVector<f64>,
    pub norm2: f64,
}

pub fn mean_curvature(point: &SubmanifoldPoint) -> MeanCurvature {
    let n = point.n() as f64;
    let h = DVector::from_iterator(point.codim(), point.h().iter().map(|a| a.trace() / n));
    let norm2 = h.norm_squared();
    MeanCurvature { h, norm2 }
}

/// `C = |h|^2 / n`.
pub fn casorati_c(point: &SubmanifoldPoint) -> f64 {
    point.norm_h2() / point.n() as f64
}

fn check_orthonormal(vectors: &[DVector<f64>], n: usize) -> Result<()> {
    for v in vectors {
        if v.len() != n {
            return Err(Error::Shape { expected: n, found: v.len(), what: "tangent coordinates" });
        }
    }
    let q = linalg::columns(vectors, n);
    let residual = linalg::gram_residual(&q);
    if !(residual <= tolerance::FRAME) {
        return Err(Error::InvalidVector(format!("subspace basis not orthonormal (residual {residual:e})")));
    }
    Ok(())
}

/// Casorati curvature `C(V)` of the subspace spanned by orthonormal tangent
/// coordinate vectors.
pub fn casorati_cv(point: &SubmanifoldPoint, subspace: &[DVector<f64>]) -> Result<f64> {
    let n = point.n();
    let r = subspace.len();
    if r < 2 || r > n {
        return Err(Error::InvalidDimension { what: "subspace", value: r, reason: "needs 2 <= dim V <= n" });
    }
    check_orthonormal(subspace, n)?;
    let b = linalg::columns(subspace, n);
    let bt = b.transpose();
    let total: f64 = point.h().iter().map(|a| (&bt * a * &b).norm_squared()).sum();
    Ok(total / r as f64)
}

/// `C(u^perp)` in closed form for a unit normal `u`.
pub fn hyperplane_casorati(point: &SubmanifoldPoint, u: &DVector<f64>) -> f64 {
    let n = point.n() as f64;
    point
        .h()
        .iter()
        .map(|a| {
            let au = a * u;
            let q = u.dot(&au);
            a.norm_squared() - 2.0 * au.norm_squared() + q * q
        })
        .sum::<f64>()
        / (n - 1.0)
}

fn hyperplane_gradient(point: &SubmanifoldPoint, u: &DVector<f64>) -> DVector<f64> {
    let n = point.n() as f64;
    let mut g = DVector::zeros(u.len());
    for a in point.h() {
        let au = a * u;
        let q = u.dot(&au);
        g += (a * &au) * -4.0 + &au * (4.0 * q);
    }
    g / (n - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremumMode {
    Inf,
    Sup,
}

impl ExtremumMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Inf => "inf",
            Self::Sup => "sup",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CasoratiResult {
    pub c: f64,
    pub extremal_value: f64,
    /// Unit normal of the extremal hyperplane within the tangent space.
    pub extremal_normal: DVector<f64>,
    pub mode: ExtremumMode,
    pub runs: usize,
}

/// Extremizes `C(V)` over hyperplanes `V = u^perp` of the tangent space.
pub fn hyperplane_extrema(point: &SubmanifoldPoint, mode: ExtremumMode, seed: u64) -> Result<CasoratiResult> {
    hyperplane_extrema_with(point, mode, seed, &MultiStart::default())
}

pub fn hyperplane_extrema_with(
    point: &SubmanifoldPoint,
    mode: ExtremumMode,
    seed: u64,
    opts: &MultiStart,
) -> Result<CasoratiResult> {
    let n = point.n();
    require_n3(n)?;
    let sign = match mode {
        ExtremumMode::Inf => 1.0,
        ExtremumMode::Sup => -1.0,
    };
    let opt = minimize_on_sphere(
        n,
        |u| sign * hyperplane_casorati(point, u),
        |u| hyperplane_gradient(point, u) * sign,
        opts,
        seed,
    );
    Ok(CasoratiResult {
        c: casorati_c(point),
        // clamp tiny negative rounding of an exactly vanishing objective
        extremal_value: libm::fmax(sign * opt.value, 0.0),
        extremal_normal: opt.point,
        mode,
        runs: opt.runs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeltaBranch {
    /// `0 < r <= n^2 - n`, built from the infimum.
    Low,
    /// `r > n^2 - n`, built from the supremum.
    High,
}

impl DeltaBranch {
    pub fn for_r(n: usize, r: f64) -> Self {
        let boundary = (n * n - n) as f64;
        if r > boundary {
            Self::High
        } else {
            Self::Low
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Low => "low",
            Self::High => "high",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedDelta {
    pub r: f64,
    pub delta: f64,
    pub variant: DeltaBranch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDelta {
    pub delta_c: f64,
    pub delta_c_hat: f64,
}

/// `C` together with both hyperplane extrema; all δ-Casorati values of a
/// point derive from it without further optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct CasoratiProfile {
    pub n: usize,
    pub c: f64,
    pub inf: CasoratiResult,
    pub sup: CasoratiResult,
}

impl CasoratiProfile {
    pub fn new(point: &SubmanifoldPoint, seed: u64) -> Result<Self> {
        let inf = hyperplane_extrema(point, ExtremumMode::Inf, seed)?;
        let sup = hyperplane_extrema(point, ExtremumMode::Sup, seed)?;
        Ok(Self { n: point.n(), c: inf.c, inf, sup })
    }

    /// Coefficient of `C(V)`: `(n-1)(n+r)(n^2-n-r) / (r n)`; negative for
    /// the high branch.
    pub fn coefficient(n: usize, r: f64) -> f64 {
        let nf = n as f64;
        (nf - 1.0) * (nf + r) * (nf * nf - nf - r) / (r * nf)
    }

    pub fn extremum(&self, branch: DeltaBranch) -> &CasoratiResult {
        match branch {
            DeltaBranch::Low => &self.inf,
            DeltaBranch::High => &self.sup,
        }
    }

    /// `δ_C(r; n-1)` for `r <= n^2 - n`, `δ̂_C(r; n-1)` above.
    pub fn generalized(&self, r: f64) -> Result<GeneralizedDelta> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter { name: "r", value: r });
        }
        let variant = DeltaBranch::for_r(self.n, r);
        let cv = self.extremum(variant).extremal_value;
        let delta = r * self.c + Self::coefficient(self.n, r) * cv;
        Ok(GeneralizedDelta { r, delta, variant })
    }

    pub fn normalized(&self) -> NormalizedDelta {
        let n = self.n as f64;
        NormalizedDelta {
            delta_c: 0.5 * self.c + (n + 1.0) / (2.0 * n) * self.inf.extremal_value,
            delta_c_hat: 2.0 * self.c - (2.0 * n - 1.0) / (2.0 * n) * self.sup.extremal_value,
        }
    }
}

pub fn delta_c_generalized(point: &SubmanifoldPoint, r: f64, seed: u64) -> Result<GeneralizedDelta> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    CasoratiProfile::new(point, seed)?.generalized(r)
}

pub fn delta_c_normalized(point: &SubmanifoldPoint, seed: u64) -> Result<NormalizedDelta> {
    Ok(CasoratiProfile::new(point, seed)?.normalized())
}

/// Sectional curvature as a quadratic form on bivectors `u ^ w`, indexed by
/// pairs `i < j`.
#[derive(Debug, Clone)]
pub struct BivectorForm {
    n: usize,
    q: DMatrix<f64>,
}

impl BivectorForm {
    pub fn new(tensors: &CurvatureTensors<'_>) -> Self {
        let n = tensors.n();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        let r = tensors.induced();
        let q = DMatrix::from_fn(pairs.len(), pairs.len(), |a, b| {
            let (i, j) = pairs[a];
            let (k, l) = pairs[b];
            0.5 * (r.get(i, j, l, k) + r.get(k, l, j, i))
        });
        Self { n, q }
    }

    fn bivector(&self, u: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut b = DVector::zeros(n * (n - 1) / 2);
        let mut idx = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                b[idx] = u[i] * w[j] - u[j] * w[i];
                idx += 1;
            }
        }
        b
    }

    /// Number of index pairs `i < j`, the dimension of the bivector space.
    pub fn pairs(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// `b^T Q b` for a bivector in the `(0,1), (0,2), ..., (n-2,n-1)` basis.
    pub fn bivector_value(&self, b: &DVector<f64>) -> f64 {
        b.dot(&(&self.q * b))
    }

    /// `R(u, w; w, u)`; the sectional curvature when `u, w` are orthonormal.
    pub fn value(&self, u: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let b = self.bivector(u, w);
        b.dot(&(&self.q * &b))
    }

    fn gradient(&self, u: &DVector<f64>, w: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let n = self.n;
        let g = &self.q * self.bivector(u, w);
        let mut big = DMatrix::zeros(n, n);
        let mut idx = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                big[(i, j)] = g[idx];
                big[(j, i)] = -g[idx];
                idx += 1;
            }
        }
        ((&big * w) * 2.0, (&big * u) * -2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChenDelta {
    pub tau: f64,
    pub inf_k: f64,
    pub delta: f64,
    /// Orthonormal basis of the minimizing plane, tangent coordinates.
    pub plane: (DVector<f64>, DVector<f64>),
    /// Smallest coordinate-plane sectional curvature.
    pub coordinate_min: f64,
    pub runs: usize,
}

/// `δ = tau - inf K`, the infimum taken over all tangent 2-planes.
pub fn chen_delta(tensors: &CurvatureTensors<'_>, seed: u64) -> Result<ChenDelta> {
    chen_delta_with(tensors, seed, &MultiStart::default())
}

pub fn chen_delta_with(tensors: &CurvatureTensors<'_>, seed: u64, opts: &MultiStart) -> Result<ChenDelta> {
    let n = tensors.n();
    require_n3(n)?;
    let form = BivectorForm::new(tensors);
    let coords = tensors.coordinate_k();
    let mut coordinate_min = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            coordinate_min = libm::fmin(coordinate_min, coords[(i, j)]);
        }
    }
    let opt = minimize_on_pairs(n, |u, w| form.value(u, w), |u, w| form.gradient(u, w), opts, seed);
    // the coordinate planes are among the starts, so this never binds
    let inf_k = libm::fmin(opt.value, coordinate_min);
    let tau = tensors.scalar_tau();
    Ok(ChenDelta { tau, inf_k, delta: tau - inf_k, plane: (opt.u, opt.w), coordinate_min, runs: opt.runs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneData {
    /// `beta_k = <P_k e_1, e_2>^2` for an orthonormal basis of the plane.
    pub beta: [f64; 3],
    /// `m_M - M(e_1, e_1) - M(e_2, e_2)`.
    pub trace_m_perp: f64,
}

impl PlaneData {
    pub fn beta_sum(&self) -> f64 {
        self.beta.iter().sum()
    }
}

/// Orthonormalizes a spanning pair of tangent-coordinate vectors.
pub fn orthonormal_plane(
    n: usize,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    for x in [u, v] {
        if x.len() != n {
            return Err(Error::Shape { expected: n, found: x.len(), what: "tangent coordinates" });
        }
    }
    let area2 = u.norm_squared() * v.norm_squared() - u.dot(v) * u.dot(v);
    if !(area2 >= tolerance::PLANE_AREA) {
        return Err(Error::DegeneratePlane { area2 });
    }
    let e1 = u.normalize();
    let mut e2 = v - &e1 * e1.dot(v);
    e2 -= &e1 * e1.dot(&e2);
    Ok((e1, e2.normalize()))
}

pub fn plane_data(
    point: &SubmanifoldPoint,
    tangency: &TangencyData,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<PlaneData> {
    let (e1, e2) = orthonormal_plane(point.n(), u, v)?;
    let beta = [0, 1, 2].map(|k| {
        let x = e2.dot(&(&tangency.p[k] * &e1));
        x * x
    });
    let m = point.m_tensor();
    let trace_m_perp = point.trace_m() - e1.dot(&(m * &e1)) - e2.dot(&(m * &e2));
    Ok(PlaneData { beta, trace_m_perp })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1 {
    pub a_star: f64,
    pub lhs: f64,
    pub holds: bool,
    pub equality: bool,
}

/// Given `a_1..a_n` and `2 <= k < n`, solves
/// `(sum a)^2 = (n-k+1)(sum a^2 + a*)` for `a*` and compares it with
/// `2 sum_{i<j<=k} a_i a_j`.
pub fn lemma1_check(a: &[f64], k: usize) -> Result<Lemma1> {
    let n = a.len();
    if k < 2 || k >= n {
        return Err(Error::InvalidDimension { what: "k", value: k, reason: "needs 2 <= k < n" });
    }
    let sum: f64 = a.iter().sum();
    let sum_sq: f64 = a.iter().map(|x| x * x).sum();
    let a_star = sum * sum / (n - k + 1) as f64 - sum_sq;
    let head: f64 = a[..k].iter().sum();
    let head_sq: f64 = a[..k].iter().map(|x| x * x).sum();
    let lhs = head * head - head_sq;
    let scale = tolerance::scale(lhs, a_star);
    let holds = lhs >= a_star - 1e-12 * scale;
    let pattern = a[k..].iter().all(|x| libm::fabs(x - head) <= 1e-10 * scale);
    let equality = libm::fabs(lhs - a_star) <= 1e-10 * scale && pattern;
    Ok(Lemma1 { a_star, lhs, holds, equality })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2 {
    pub mu: f64,
    pub zeta: f64,
    /// `mu^2`, the upper bound of `zeta`.
    pub bound: f64,
    pub holds: bool,
    pub equality: bool,
}

/// `zeta(x) = x_1 (x_2 + ... + x_n) <= mu^2` with `mu = (sum x) / 2`.
pub fn lemma2_bound(x: &[f64]) -> Result<Lemma2> {
    if x.len() < 2 {
        return Err(Error::InvalidDimension { what: "x", value: x.len(), reason: "needs at least 2 entries" });
    }
    let mu = x.iter().sum::<f64>() / 2.0;
    let zeta = x[0] * x[1..].iter().sum::<f64>();
    let bound = mu * mu;
    let scale = tolerance::scale(zeta, bound);
    Ok(Lemma2 {
        mu,
        zeta,
        bound,
        holds: zeta <= bound + 1e-12 * scale,
        equality: libm::fabs(x[0] - mu) <= 1e-10 * tolerance::scale(x[0], mu),
    })
}
