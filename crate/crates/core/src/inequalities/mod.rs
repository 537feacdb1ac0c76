//! The inequality family: scalar, Ricci and sectional bounds, the Chen
//! invariant bounds for positive and negative `c`, the generalized and
//! normalized δ-Casorati bounds, together with slack identities, equality
//! classification and the Hessian of the δ-Casorati quadratic form.
//!
//! Every checker returns an [`InequalityReport`] whose `slack` is oriented so
//! that a non-negative value means the inequality holds.

mod equality;
mod hessian;

pub use self::equality::{detect_equality_case, EqualityCase};
pub use self::hessian::{hessian_spectrum, HessianSpectrum};

use alloc::string::String;
use core::cell::OnceCell;
use nalgebra::DVector;

use crate::curvature::{structure_factor, CurvatureTensors};
use crate::error::{Error, Result};
use crate::invariants::{self, CasoratiProfile, ChenDelta, MeanCurvature, PlaneData};
use crate::point::SubmanifoldPoint;
use crate::tolerance;

/// Direction of an inequality `lhs ? rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// `lhs <= rhs`, slack `rhs - lhs`.
    Le,
    /// `lhs >= rhs`, slack `lhs - rhs`.
    Ge,
    /// `lhs == rhs`, slack `rhs - lhs`.
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: String,
    pub sense: Sense,
    pub lhs: f64,
    pub rhs_canonical: f64,
    /// Alternative right-hand side where two readings of the bound differ.
    pub rhs_variant: Option<f64>,
    pub slack: f64,
    pub holds: bool,
    pub equality: bool,
    pub equality_case: EqualityCase,
    /// Whether `holds` is a claim the bound makes for this point. Reports
    /// outside a bound's hypotheses are informational.
    pub asserted: bool,
    /// Slack predicted by an independent closed-form identity, when one
    /// exists.
    pub identity: Option<f64>,
    pub tol: f64,
}

impl InequalityReport {
    /// Report at the theorem tolerance `1e-8` (relative).
    pub fn new(name: &str, sense: Sense, lhs: f64, rhs_canonical: f64) -> Self {
        Self::with_tolerance(name, sense, lhs, rhs_canonical, tolerance::INEQUALITY)
    }

    pub fn with_tolerance(name: &str, sense: Sense, lhs: f64, rhs_canonical: f64, tol: f64) -> Self {
        let slack = match sense {
            Sense::Ge => lhs - rhs_canonical,
            Sense::Le | Sense::Eq => rhs_canonical - lhs,
        };
        let bound = tol * tolerance::scale(lhs, rhs_canonical);
        let equality = libm::fabs(slack) <= bound;
        let holds = match sense {
            Sense::Eq => equality,
            _ => slack >= -bound,
        };
        Self {
            name: name.into(),
            sense,
            lhs,
            rhs_canonical,
            rhs_variant: None,
            slack,
            holds,
            equality,
            equality_case: EqualityCase::None,
            asserted: true,
            identity: None,
            tol,
        }
    }

    /// Replaces the canonical right-hand side (and recomputes the flags),
    /// keeping everything else.
    pub fn with_rhs(&self, rhs_canonical: f64, rhs_variant: Option<f64>) -> Self {
        let mut out = Self::with_tolerance(&self.name, self.sense, self.lhs, rhs_canonical, self.tol);
        out.rhs_variant = rhs_variant;
        out.asserted = self.asserted;
        out.identity = self.identity;
        if out.equality {
            out.equality_case = self.equality_case;
        }
        out
    }

    fn variant(mut self, rhs: f64) -> Self {
        self.rhs_variant = Some(rhs);
        self
    }

    fn identity(mut self, slack: f64) -> Self {
        self.identity = Some(slack);
        self
    }

    fn classify(mut self, point: &SubmanifoldPoint, r: Option<f64>) -> Self {
        if self.equality {
            self.equality_case = detect_equality_case(point, r);
        }
        self
    }

    /// `|slack - identity| / max(|slack|, |identity|, 1)`.
    pub fn identity_residual(&self) -> Option<f64> {
        self.identity.map(|s| libm::fabs(self.slack - s) / tolerance::scale(self.slack, s))
    }

    /// True when the report is asserted and fails.
    pub fn violated(&self) -> bool {
        self.asserted && !self.holds
    }
}

/// Both δ-Casorati corollary bounds and the residuals of the scaling
/// identities linking them to the generalized bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryReport {
    pub delta_c: InequalityReport,
    pub delta_c_hat: InequalityReport,
    /// `|δ_C(n(n-1)/2) - n(n-1) δ_C|` and `|δ̂_C(2n(n-1)) - n(n-1) δ̂_C|`.
    pub scaling_residual: [f64; 2],
}

/// Cached per-point quantities shared by the checkers. Hyperplane extrema
/// and the Chen invariant are computed on first use only.
#[derive(Debug)]
pub struct Analysis<'p> {
    tensors: CurvatureTensors<'p>,
    mean: MeanCurvature,
    seed: u64,
    profile: OnceCell<CasoratiProfile>,
    chen: OnceCell<ChenDelta>,
}

impl<'p> Analysis<'p> {
    pub fn new(point: &'p SubmanifoldPoint, seed: u64) -> Self {
        Self {
            tensors: CurvatureTensors::new(point),
            mean: invariants::mean_curvature(point),
            seed,
            profile: OnceCell::new(),
            chen: OnceCell::new(),
        }
    }

    pub fn point(&self) -> &'p SubmanifoldPoint {
        self.tensors.point()
    }

    pub fn tensors(&self) -> &CurvatureTensors<'p> {
        &self.tensors
    }

    pub fn mean(&self) -> &MeanCurvature {
        &self.mean
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `c { (n-1) + 3 sum_k |P_k|^2 / n }`.
    pub fn structure_factor(&self) -> f64 {
        structure_factor(self.point(), self.tensors.tangency())
    }

    pub fn tau_dprime(&self) -> f64 {
        self.tensors.tau_dprime()
    }

    pub fn profile(&self) -> Result<&CasoratiProfile> {
        if let Some(p) = self.profile.get() {
            return Ok(p);
        }
        let p = CasoratiProfile::new(self.point(), self.seed)?;
        Ok(self.profile.get_or_init(|| p))
    }

    pub fn chen(&self) -> Result<&ChenDelta> {
        if let Some(c) = self.chen.get() {
            return Ok(c);
        }
        let c = invariants::chen_delta(&self.tensors, self.seed)?;
        Ok(self.chen.get_or_init(|| c))
    }

    pub fn plane_data(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<PlaneData> {
        invariants::plane_data(self.point(), self.tensors.tangency(), u, v)
    }

    fn n(&self) -> f64 {
        self.point().n() as f64
    }

    fn require_n3(&self) -> Result<()> {
        let n = self.point().n();
        if n < 3 {
            return Err(Error::InvalidDimension { what: "n", value: n, reason: "needs n >= 3" });
        }
        Ok(())
    }

    /// `n^2 (n-2) / (2(n-1)) |H|^2`, shared by the sectional and Chen bounds.
    fn chen_mean_term(&self) -> f64 {
        let n = self.n();
        n * n * (n - 2.0) / (2.0 * (n - 1.0)) * self.mean.norm2
    }

    /// Scalar curvature bound; slack identity `(|h|^2 - n |H|^2) / 2`.
    pub fn check_a1(&self) -> InequalityReport {
        let n = self.n();
        let point = self.point();
        let lhs = self.tensors.scalar_tau();
        let bracket = n - 2.0 * point.trace_m() * (n - 1.0);
        let rhs = 0.5 * (n - 1.0) * (n * self.mean.norm2 + self.structure_factor() * bracket / (n - 1.0));
        let identity = 0.5 * (point.norm_h2() - n * self.mean.norm2);
        InequalityReport::new("A1", Sense::Le, lhs, rhs).identity(identity).classify(point, None)
    }

    /// Ricci curvature bound for a unit tangent-coordinate vector `x`.
    pub fn check_a2(&self, x: &DVector<f64>) -> Result<InequalityReport> {
        let point = self.point();
        let n = self.n();
        let lhs = self.tensors.ricci(x)?;
        let x = x.normalize();
        let p = &self.tensors.tangency().p;
        // P_k X has no X component (P_k is skew)
        let tangential: f64 = p.iter().map(|pk| (pk * &x).norm_squared()).sum();
        let m = point.m_tensor();
        let mxx = x.dot(&(m * &x));
        let rhs = point.c() * ((n - 1.0) + 3.0 * tangential)
            - self.structure_factor() * (point.trace_m() + (n - 2.0) * mxx)
            + n * n * self.mean.norm2 / 4.0;
        let identity: f64 = point
            .h()
            .iter()
            .map(|a| {
                let ax = a * &x;
                let h11 = x.dot(&ax);
                let half = a.trace() / 2.0;
                (h11 - half) * (h11 - half) + (ax.norm_squared() - h11 * h11)
            })
            .sum();
        Ok(InequalityReport::new("A2", Sense::Le, lhs, rhs).identity(identity).classify(point, None))
    }

    /// Sectional curvature bound for the plane spanned by `u, v`.
    pub fn check_a3(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<InequalityReport> {
        self.require_n3()?;
        let point = self.point();
        let n = self.n();
        let (e1, e2) = invariants::orthonormal_plane(point.n(), u, v)?;
        let k = self.tensors.sectional_k(&e1, &e2)?;
        let lhs = self.tensors.scalar_tau() - k;
        let pd = self.plane_data(&e1, &e2)?;
        let c = point.c();
        let f = self.structure_factor();
        let mm = point.trace_m();
        let base = self.chen_mean_term() - c * (1.0 + 3.0 * pd.beta_sum());
        let rhs = base + 0.5 * f * (n - 2.0 * mm * (n - 1.0)) - f * (pd.trace_m_perp - mm);
        let variant = base + 0.5 * f * (n + 2.0 * mm * n - 2.0 * pd.trace_m_perp);
        let identity: f64 = point
            .h()
            .iter()
            .map(|a| {
                let h11 = e1.dot(&(a * &e1));
                let h22 = e2.dot(&(a * &e2));
                let h12 = e1.dot(&(a * &e2));
                let tr = a.trace();
                0.5 * a.norm_squared() - tr * tr / (2.0 * (n - 1.0)) + h11 * h22 - h12 * h12
            })
            .sum();
        Ok(InequalityReport::new("A3", Sense::Le, lhs, rhs).variant(variant).identity(identity).classify(point, None))
    }

    fn chen_bound(&self, name: &str, positive: bool, plane: Option<(&DVector<f64>, &DVector<f64>)>) -> Result<InequalityReport> {
        self.require_n3()?;
        let point = self.point();
        let c = point.c();
        if positive && !(c > 0.0) {
            return Err(Error::Precondition(alloc::format!("{name} needs c > 0, got c = {c}")));
        }
        if !positive && !(c < 0.0) {
            return Err(Error::Precondition(alloc::format!("{name} needs c < 0, got c = {c}")));
        }
        let n = self.n();
        let chen = self.chen()?;
        let (u, v) = match plane {
            Some((u, v)) => (u.clone(), v.clone()),
            None => chen.plane.clone(),
        };
        let pd = self.plane_data(&u, &v)?;
        let mm = point.trace_m();
        let weight = if positive { n + 8.0 } else { n - 1.0 };
        let printed = self.chen_mean_term() + 0.5 * c * weight * (n + 2.0 * mm * n - 2.0 * pd.trace_m_perp) - c;
        // sectional bound with the structural terms fixed at their invariant
        // (c > 0) or anti-invariant (c < 0) values
        let proxy_factor = c * weight;
        let proof = self.chen_mean_term() + 0.5 * proxy_factor * (n - 2.0 * mm * (n - 1.0))
            - c
            - proxy_factor * (pd.trace_m_perp - mm);
        let target = if positive { n } else { 0.0 };
        let tangency = self.tensors.tangency();
        let proxy = tangency.norm_p2.iter().all(|p| libm::fabs(p - target) <= tolerance::INEQUALITY * tolerance::scale(n, 0.0))
            && pd.beta.iter().all(|b| *b <= tolerance::INEQUALITY);
        let mut report = InequalityReport::new(name, Sense::Le, chen.delta, printed).variant(proof).classify(point, None);
        report.asserted = proxy;
        Ok(report)
    }

    /// Chen invariant bound for `c > 0`. `plane` defaults to the minimizing
    /// plane of the invariant.
    pub fn check_a4(&self, plane: Option<(&DVector<f64>, &DVector<f64>)>) -> Result<InequalityReport> {
        self.chen_bound("A4", true, plane)
    }

    /// Chen invariant bound for `c < 0`.
    pub fn check_a5(&self, plane: Option<(&DVector<f64>, &DVector<f64>)>) -> Result<InequalityReport> {
        self.chen_bound("A5", false, plane)
    }

    /// `T(L) = r C + coef C(L) - 2 tau + tau''` for the hyperplane `L = u^perp`.
    pub fn quadratic_t(&self, r: f64, u: &DVector<f64>) -> Result<f64> {
        self.require_n3()?;
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter { name: "r", value: r });
        }
        let point = self.point();
        if u.len() != point.n() || !(u.norm() > 0.0) {
            return Err(Error::InvalidVector(alloc::format!("hyperplane normal must be a non-zero {}-vector", point.n())));
        }
        let u = u.normalize();
        let cl = invariants::hyperplane_casorati(point, &u);
        let c = invariants::casorati_c(point);
        Ok(r * c + CasoratiProfile::coefficient(point.n(), r) * cl - 2.0 * self.tensors.scalar_tau() + self.tau_dprime())
    }

    /// Generalized δ-Casorati bound (hat version for `r > n^2 - n`). The
    /// identity column is `T` at the extremal hyperplane.
    pub fn check_b1(&self, r: f64) -> Result<InequalityReport> {
        self.require_n3()?;
        let profile = self.profile()?;
        let delta = profile.generalized(r)?;
        let n = self.n();
        let rho = self.tensors.normalized_rho();
        let rhs = n * (n - 1.0) * rho - self.tau_dprime();
        let t = self.quadratic_t(r, &profile.extremum(delta.variant).extremal_normal)?;
        Ok(InequalityReport::new("B1", Sense::Ge, delta.delta, rhs).identity(t).classify(self.point(), Some(r)))
    }

    /// Normalized δ-Casorati bounds, derived from the generalized bound at
    /// `r = n(n-1)/2` and `r = 2n(n-1)`.
    pub fn check_corollary(&self) -> Result<CorollaryReport> {
        self.require_n3()?;
        let n = self.n();
        let nn = n * (n - 1.0);
        let profile = self.profile()?;
        let norm = profile.normalized();
        let rhs = self.tensors.normalized_rho() - self.tau_dprime() / nn;
        let low = self.check_b1(nn / 2.0)?;
        let high = self.check_b1(2.0 * nn)?;
        let delta_c = InequalityReport::new("COR", Sense::Ge, norm.delta_c, rhs)
            .identity(low.slack / nn)
            .classify(self.point(), Some(nn / 2.0));
        let delta_c_hat = InequalityReport::new("COR", Sense::Ge, norm.delta_c_hat, rhs)
            .identity(high.slack / nn)
            .classify(self.point(), Some(2.0 * nn));
        Ok(CorollaryReport {
            delta_c,
            delta_c_hat,
            scaling_residual: [libm::fabs(low.lhs - nn * norm.delta_c), libm::fabs(high.lhs - nn * norm.delta_c_hat)],
        })
    }
}
