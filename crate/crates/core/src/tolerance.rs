//! Numerical tolerances shared by the validators and checkers.

/// Residual bound for the algebraic identities of the quaternionic structure.
pub const STRUCTURE: f64 = 1e-12;

/// Absolute tolerance for frame orthonormality and symmetry of `h` and `M`.
pub const FRAME: f64 = 1e-10;

/// Pivot threshold below which Gram-Schmidt reports a rank deficiency.
pub const PIVOT: f64 = 1e-10;

/// Squared-area threshold for a degenerate 2-plane.
pub const PLANE_AREA: f64 = 1e-12;

/// Relative tolerance for "holds" and "equality" flags of inequality reports.
pub const INEQUALITY: f64 = 1e-8;

/// Relative tolerance for closed-form identity cross-checks.
pub const IDENTITY: f64 = 1e-9;

/// Norm of `h` below which a point is totally geodesic.
pub const GEODESIC: f64 = 1e-10;

/// Relative tolerance for shape-operator pattern matching.
pub const SHAPE_PATTERN: f64 = 1e-8;

/// Scale used by the relative tolerances: `max(|a|, |b|, 1)`.
pub fn scale(a: f64, b: f64) -> f64 {
    libm::fmax(libm::fmax(libm::fabs(a), libm::fabs(b)), 1.0)
}
