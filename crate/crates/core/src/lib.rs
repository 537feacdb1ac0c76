//! Pointwise curvature engine for submanifolds of quaternionic space forms
//! carrying a Ricci quarter-symmetric metric connection.
//!
//! Everything in this crate works on a single tangent point: an orthonormal
//! tangent/normal frame inside `R^{4m}`, the second fundamental form in that
//! frame, and the connection deformation tensor `M` restricted to the tangent
//! space. From that datum the crate evaluates the ambient, connection and
//! induced curvature tensors, the mean and Casorati curvatures, the Chen
//! invariant, and the Chen/Casorati inequality family together with their
//! slack identities and equality-case classification.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, reports and the
//! command line live in the `cclab` companion crate.
//!
//! # Conventions
//!
//! * `R(X,Y;Z,W) = <R(X,Y)Z, W>`, so the sectional curvature of an
//!   orthonormal pair is `R(u,v;v,u)`.
//! * `tau` is the half sum `sum_{i<j} K_ij`; `tau_prime` and `tau_dprime` are
//!   full double contractions over `i != j`.
//! * The trace of `M` is called `m_M` (`SubmanifoldPoint::trace_m`) so it does not
//!   clash with the quaternionic dimension `m`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod curvature;
pub mod error;
pub mod inequalities;
pub mod invariants;
pub mod linalg;
pub mod point;
pub mod quat;
pub mod scenario;
pub mod tolerance;

pub use curvature::{CurvatureSummary, CurvatureTensors};
pub use error::{Error, Result};
pub use inequalities::{Analysis, EqualityCase, HessianSpectrum, InequalityReport, Sense};
pub use invariants::{CasoratiResult, ExtremumMode, PlaneData};
pub use point::{AmbientModel, SubmanifoldPoint, TangencyData};
pub use quat::QuaternionicStructure;
pub use scenario::{HSpec, MSpec, ScenarioKind, ScenarioSpec};
