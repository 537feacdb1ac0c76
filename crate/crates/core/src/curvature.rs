//! Ambient, connection and induced curvature tensors on the tangent frame.
//!
//! Index conventions: `R(i, j, k, l) = <R(e_i, e_j) e_k, e_l>`. The scalar
//! curvature `tau` is the half sum over `i < j`; the ambient contraction
//! `tau'` and the connection contraction `tau''` are full sums over `i != j`.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::point::{tangency_decomposition, AmbientModel, SubmanifoldPoint, TangencyData};
use crate::tolerance;

/// `<R*(X, Y) Z, W>` of the quaternionic space form with parameter `c`.
pub fn ambient_r_star(
    ambient: &AmbientModel,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    w: &DVector<f64>,
) -> Result<f64> {
    let dim = ambient.dim();
    for v in [x, y, z, w] {
        if v.len() != dim {
            return Err(Error::Shape { expected: dim, found: v.len(), what: "curvature argument" });
        }
    }
    let mut acc = y.dot(z) * x.dot(w) - x.dot(z) * y.dot(w);
    for j in ambient.structure().matrices() {
        let jx = j * x;
        let jy = j * y;
        let jz = j * z;
        acc += jy.dot(z) * jx.dot(w) - jx.dot(z) * jy.dot(w) - 2.0 * jx.dot(y) * jz.dot(w);
    }
    Ok(ambient.c() * acc)
}

/// Dense rank-4 tensor over the tangent indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n * n * n];
        let mut idx = 0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        data[idx] = f(i, j, k, l);
                        idx += 1;
                    }
                }
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.data[((i * n + j) * n + k) * n + l]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Multilinear evaluation on tangent-coordinate vectors.
    pub fn eval(&self, a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>, d: &DVector<f64>) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let ab = a[i] * b[j];
                if ab == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let abc = ab * c[k];
                    if abc == 0.0 {
                        continue;
                    }
                    let base = ((i * n + j) * n + k) * n;
                    let row = &self.data[base..base + n];
                    acc += abc * row.iter().zip(d.iter()).map(|(r, x)| r * x).sum::<f64>();
                }
            }
        }
        acc
    }

    /// `S_w(i, l) = sum_{j,k} R(i, j, k, l) w_j w_k`; for an orthonormal pair
    /// `u, w` the sectional curvature is `u^T S_w u`. Symmetric whenever the
    /// tensor has the algebraic curvature symmetries.
    pub fn sectional_form(&self, w: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut s = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if w[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let wjk = w[j] * w[k];
                    if wjk == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        s[(i, l)] += self.get(i, j, k, l) * wjk;
                    }
                }
            }
        }
        s
    }

    fn check(&self, idx: [usize; 4]) -> Result<()> {
        for index in idx {
            if index >= self.n {
                return Err(Error::IndexOutOfRange { index, bound: self.n });
            }
        }
        Ok(())
    }
}

/// Per-point curvature data: the three tensors on the tangent frame plus
/// the tangency decomposition they were built from.
#[derive(Debug, Clone)]
pub struct CurvatureTensors<'p> {
    point: &'p SubmanifoldPoint,
    tangency: TangencyData,
    tau_prime: f64,
    r_star: Tensor4,
    r_dprime: Tensor4,
    induced: Tensor4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSummary {
    pub tau: f64,
    pub rho: f64,
    pub tau_prime: f64,
    pub tau_dprime: f64,
    /// Coordinate-plane sectional curvatures `K_ij`; the diagonal is zero.
    pub k: DMatrix<f64>,
}

impl<'p> CurvatureTensors<'p> {
    pub fn new(point: &'p SubmanifoldPoint) -> Self {
        let tangency = tangency_decomposition(point);
        let n = point.n();
        let c = point.c();
        let p = &tangency.p;
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        // <J_s e_a, e_b> = P_s(b, a)
        let r_star = Tensor4::from_fn(n, |i, j, k, l| {
            let mut acc = delta(j, k) * delta(i, l) - delta(i, k) * delta(j, l);
            for ps in p {
                acc += ps[(k, j)] * ps[(l, i)] - ps[(k, i)] * ps[(l, j)] - 2.0 * ps[(j, i)] * ps[(l, k)];
            }
            c * acc
        });
        let tau_prime = c * ((n * (n - 1)) as f64 + 3.0 * tangency.total_norm_p2());
        let ratio = tau_prime / n as f64;
        let mm = point.m_tensor();
        let r_dprime = Tensor4::from_fn(n, |i, j, k, l| {
            let correction =
                mm[(j, k)] * delta(i, l) - mm[(i, k)] * delta(j, l) + delta(j, k) * mm[(i, l)] - delta(i, k) * mm[(j, l)];
            r_star.get(i, j, k, l) - ratio * correction
        });
        let h = point.h();
        let induced = Tensor4::from_fn(n, |i, j, k, l| {
            let gauss: f64 = h.iter().map(|a| a[(i, k)] * a[(j, l)] - a[(i, l)] * a[(j, k)]).sum();
            r_dprime.get(i, j, k, l) - gauss
        });
        Self { point, tangency, tau_prime, r_star, r_dprime, induced }
    }

    pub fn point(&self) -> &'p SubmanifoldPoint {
        self.point
    }

    pub fn tangency(&self) -> &TangencyData {
        &self.tangency
    }

    pub fn n(&self) -> usize {
        self.point.n()
    }

    /// Ambient tensor restricted to the tangent frame.
    pub fn r_star(&self) -> &Tensor4 {
        &self.r_star
    }

    /// Connection curvature `R''` on the tangent frame.
    pub fn r_dprime(&self) -> &Tensor4 {
        &self.r_dprime
    }

    /// Induced curvature `R` from the Gauss equation.
    pub fn induced(&self) -> &Tensor4 {
        &self.induced
    }

    /// `tau' = c { n(n-1) + 3 sum_k |P_k|^2 }`.
    pub fn tau_prime(&self) -> f64 {
        self.tau_prime
    }

    /// `sum_{i != j} R*(e_i, e_j; e_j, e_i)` evaluated on ambient vectors.
    pub fn tau_prime_direct(&self) -> f64 {
        let e = self.point.tangent_frame();
        let n = self.n();
        let cols: Vec<DVector<f64>> = e.column_iter().map(|c| c.into_owned()).collect();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += ambient_r_star(self.point.ambient(), &cols[i], &cols[j], &cols[j], &cols[i])
                        .expect("frame vectors have ambient dimension");
                }
            }
        }
        acc
    }

    pub fn connection_r_dprime(&self, i: usize, j: usize, k: usize, l: usize) -> Result<f64> {
        self.r_dprime.check([i, j, k, l])?;
        Ok(self.r_dprime.get(i, j, k, l))
    }

    pub fn induced_r(&self, i: usize, j: usize, k: usize, l: usize) -> Result<f64> {
        self.induced.check([i, j, k, l])?;
        Ok(self.induced.get(i, j, k, l))
    }

    /// Sectional curvature of the plane spanned by two tangent-coordinate
    /// vectors.
    pub fn sectional_k(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        let n = self.n();
        for x in [u, v] {
            if x.len() != n {
                return Err(Error::Shape { expected: n, found: x.len(), what: "tangent coordinates" });
            }
        }
        let area2 = u.norm_squared() * v.norm_squared() - u.dot(v) * u.dot(v);
        if !(area2 >= tolerance::PLANE_AREA) {
            return Err(Error::DegeneratePlane { area2 });
        }
        Ok(self.induced.eval(u, v, v, u) / area2)
    }

    /// Coordinate-plane sectional curvatures `K_ij = R(e_i, e_j; e_j, e_i)`.
    pub fn coordinate_k(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { self.induced.get(i, j, j, i) })
    }

    /// `tau = sum_{i<j} K_ij`.
    pub fn scalar_tau(&self) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                acc += self.induced.get(i, j, j, i);
            }
        }
        acc
    }

    /// `rho = 2 tau / (n(n-1))`.
    pub fn normalized_rho(&self) -> f64 {
        let n = self.n() as f64;
        2.0 * self.scalar_tau() / (n * (n - 1.0))
    }

    /// Orthonormal tangent frame (in tangent coordinates) whose first vector
    /// is `x`, completed by Gram-Schmidt against the stored frame.
    pub fn frame_through(&self, x: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::Shape { expected: n, found: x.len(), what: "tangent coordinates" });
        }
        if !(libm::fabs(x.norm() - 1.0) <= tolerance::FRAME) {
            return Err(Error::InvalidVector(alloc::format!("not a unit vector: |X| = {}", x.norm())));
        }
        let first = x / x.norm();
        let mut frame = vec![first.clone()];
        frame.extend(linalg::complete_basis(&[first], n));
        Ok(frame)
    }

    /// `Ric(X) = sum_{j >= 2} R(X, e_j; e_j, X)` for a unit tangent-coordinate
    /// vector `X`.
    pub fn ricci(&self, x: &DVector<f64>) -> Result<f64> {
        let frame = self.frame_through(x)?;
        let s = self.induced.sectional_form(&frame[0]);
        Ok(frame[1..].iter().map(|e| e.dot(&(&s * e))).sum())
    }

    /// Ricci curvature in the direction of an ambient tangent vector.
    pub fn ricci_ambient(&self, x: &DVector<f64>) -> Result<f64> {
        let coords = self.point.tangent_coords(x)?;
        self.ricci(&coords)
    }

    /// `S''_{ij} = (tau'/n) [ delta_ij - {(n-2) M_ij + m_M delta_ij} ]`, the
    /// Ricci tensor of the connection under the Einstein reduction.
    pub fn s_dprime_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let id = DMatrix::<f64>::identity(n, n);
        let inner = self.point.m_tensor() * (n as f64 - 2.0) + &id * self.point.trace_m();
        (id - inner) * (self.tau_prime / n as f64)
    }

    pub fn s_dprime(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.n();
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, bound: n });
            }
        }
        Ok(self.s_dprime_matrix()[(i, j)])
    }

    /// `tau'' = (tau'/n) [ n - 2 m_M (n-1) ]`.
    pub fn tau_dprime(&self) -> f64 {
        let n = self.n() as f64;
        self.tau_prime / n * (n - 2.0 * self.point.trace_m() * (n - 1.0))
    }

    /// Trace of [`s_dprime_matrix`](Self::s_dprime_matrix).
    pub fn tau_dprime_trace(&self) -> f64 {
        self.s_dprime_matrix().trace()
    }

    /// `sum_{i != j} R''(e_i, e_j; e_j, e_i)` contracted from the tensor.
    pub fn tau_dprime_contraction(&self) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += self.r_dprime.get(i, j, j, i);
                }
            }
        }
        acc
    }

    pub fn summary(&self) -> CurvatureSummary {
        CurvatureSummary {
            tau: self.scalar_tau(),
            rho: self.normalized_rho(),
            tau_prime: self.tau_prime,
            tau_dprime: self.tau_dprime(),
            k: self.coordinate_k(),
        }
    }
}

/// `c { (n-1) + 3 sum_k |P_k|^2 / n }`, equal to `tau'/n`. Appears in every
/// inequality right-hand side.
pub fn structure_factor(point: &SubmanifoldPoint, tangency: &TangencyData) -> f64 {
    let n = point.n() as f64;
    point.c() * ((n - 1.0) + 3.0 * tangency.total_norm_p2() / n)
}
