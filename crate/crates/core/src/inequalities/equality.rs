use core::fmt;
use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::point::SubmanifoldPoint;
use crate::tolerance;

/// Pointwise shape of the second fundamental form in an equality case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EqualityCase {
    TotallyGeodesic,
    TotallyUmbilical,
    /// One normal direction with shape operator `diag(u, ..., u, n(n-1)/r u)`
    /// up to rotation, every other direction vanishing.
    QuasiUmbilical(f64),
    None,
}

impl fmt::Display for EqualityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TotallyGeodesic => f.write_str("totally_geodesic"),
            Self::TotallyUmbilical => f.write_str("totally_umbilical"),
            Self::QuasiUmbilical(r) => write!(f, "quasi_umbilical({r})"),
            Self::None => f.write_str("none"),
        }
    }
}

/// Classifies `h`. With `r = None` the quasi-umbilical parameter is inferred
/// from the eigenvalue ratio.
pub fn detect_equality_case(point: &SubmanifoldPoint, r: Option<f64>) -> EqualityCase {
    let n = point.n();
    let h = point.h();
    let norm = libm::sqrt(point.norm_h2());
    if norm <= tolerance::GEODESIC {
        return EqualityCase::TotallyGeodesic;
    }
    let scale = libm::fmax(norm, 1.0);
    let id = DMatrix::<f64>::identity(n, n);
    let umbilical = h
        .iter()
        .map(|a| (a - &id * (a.trace() / n as f64)).norm())
        .fold(0.0, libm::fmax);
    if umbilical <= tolerance::SHAPE_PATTERN * scale {
        return EqualityCase::TotallyUmbilical;
    }
    match quasi_umbilical_parameter(h, n, scale) {
        Some(found) => match r {
            Some(want) if libm::fabs(found - want) > tolerance::SHAPE_PATTERN * tolerance::scale(found, want) => {
                EqualityCase::None
            }
            Some(want) => EqualityCase::QuasiUmbilical(want),
            None => EqualityCase::QuasiUmbilical(found),
        },
        None => EqualityCase::None,
    }
}

/// Returns `r` when `h` is rank one across normal directions and the shared
/// shape operator has `n - 1` equal eigenvalues `u != 0` plus one eigenvalue
/// `lambda` with `lambda / u > 0`.
fn quasi_umbilical_parameter(h: &[DMatrix<f64>], n: usize, scale: f64) -> Option<f64> {
    let codim = h.len();
    let gram = DMatrix::from_fn(codim, codim, |a, b| h[a].dot(&h[b]));
    let (_, vecs) = linalg::symmetric_eigen(&gram);
    let dir: DVector<f64> = vecs.column(codim - 1).into_owned();
    let mut shape = DMatrix::zeros(n, n);
    for (a, &w) in dir.iter().enumerate() {
        shape += &h[a] * w;
    }
    let tol = tolerance::SHAPE_PATTERN * scale;
    let rank_one = h.iter().zip(dir.iter()).all(|(a, &w)| (a - &shape * w).norm() <= tol);
    if !rank_one {
        return None;
    }
    let (vals, _) = linalg::symmetric_eigen(&shape);
    let spread = |s: &[f64]| s.iter().fold(0.0, |acc, x| libm::fmax(acc, libm::fabs(x - s[0])));
    let candidates = [(&vals.as_slice()[..n - 1], vals[n - 1]), (&vals.as_slice()[1..], vals[0])];
    for (group, lambda) in candidates {
        if spread(group) > tol {
            continue;
        }
        let u = group.iter().sum::<f64>() / (n - 1) as f64;
        if libm::fabs(u) <= tol || u * lambda <= 0.0 {
            continue;
        }
        return Some((n * (n - 1)) as f64 * u / lambda);
    }
    None
}
