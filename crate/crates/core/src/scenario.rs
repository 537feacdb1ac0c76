//! Deterministic construction of point data: invariant and anti-invariant
//! tangent spaces, seeded random points, and the named fixtures.
//!
//! | name | geometry |
//! |------|----------|
//! | `S0` | invariant totally geodesic point, `n = 4`, `4m = 8`, `c = 1`, `h = 0`, `M = 0` |
//! | `S1` | `S0` with `h^1 = I` on the first normal direction |
//! | `S2` | `S0` with `M = 0.1 I` |

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::point::{complete_normal_frame, tangency_decomposition, AmbientModel, SubmanifoldPoint};

/// Named fixtures with a one-line description.
pub const FIXTURES: [(&str, &str); 3] = [
    ("S0", "invariant totally geodesic point (n=4, 4m=8, c=1, h=0, M=0)"),
    ("S1", "S0 with umbilical h (h^1 = I on the first normal direction)"),
    ("S2", "S0 with M = 0.1 I (trace 0.4)"),
];

/// Default entry scale of random second fundamental forms.
pub const DEFAULT_H_SCALE: f64 = 1.0;
/// Default entry scale of random connection tensors.
pub const DEFAULT_M_SCALE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Tangent space spanned by quaternionic lines `{v, J1 v, J2 v, J3 v}`.
    Invariant,
    /// Tangent space spanned by real axes of distinct quaternionic blocks.
    AntiInvariant,
    /// Orthonormalized Gaussian tangent frame.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HSpec {
    Zero,
    /// `h^alpha = lambda_alpha I` for the listed leading normal directions.
    Umbilical(Vec<f64>),
    /// `h^1 = diag(u, ..., u, n(n-1)/r u)`, all other components zero.
    QuasiUmbilical { u: f64, r: f64 },
    Explicit(Vec<DMatrix<f64>>),
    /// Symmetric entries uniform in `[-scale, scale]`.
    Random { scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MSpec {
    Zero,
    ScaledIdentity(f64),
    Explicit(DMatrix<f64>),
    /// Symmetric entries uniform in `[-scale, scale]`.
    Random { scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    /// Submanifold dimension.
    pub n: usize,
    /// Quaternionic dimension (ambient dimension `4m`).
    pub m: usize,
    pub c: f64,
    pub h: HSpec,
    pub m_tensor: MSpec,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn invariant(n: usize, m: usize, c: f64) -> Self {
        Self { kind: ScenarioKind::Invariant, n, m, c, h: HSpec::Zero, m_tensor: MSpec::Zero, seed: 0 }
    }

    pub fn anti_invariant(n: usize, m: usize, c: f64) -> Self {
        Self { kind: ScenarioKind::AntiInvariant, ..Self::invariant(n, m, c) }
    }

    /// Random frame with random `h` and `M` at the default scales.
    pub fn random(n: usize, m: usize, c: f64, seed: u64) -> Self {
        Self {
            kind: ScenarioKind::Random,
            n,
            m,
            c,
            h: HSpec::Random { scale: DEFAULT_H_SCALE },
            m_tensor: MSpec::Random { scale: DEFAULT_M_SCALE },
            seed,
        }
    }

    /// Random scenario drawn from the validation envelope:
    /// `n in {3,4,5}`, `4m in {8,12}`, `c in [-2,2]`, `h` entries in `[-1,1]`,
    /// `M` entries in `[-0.3,0.3]`.
    pub fn random_envelope(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3 + rng.random_range(0..3usize);
        let m = 2 + rng.random_range(0..2usize);
        let c = rng.random_range(-2.0..=2.0);
        Self::random(n, m, c, rng.next_u64())
    }

    pub fn with_h(mut self, h: HSpec) -> Self {
        self.h = h;
        self
    }

    pub fn with_m(mut self, m_tensor: MSpec) -> Self {
        self.m_tensor = m_tensor;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Specification of a named fixture.
pub fn fixture(name: &str) -> Option<ScenarioSpec> {
    let s0 = ScenarioSpec::invariant(4, 2, 1.0);
    match name {
        "S0" => Some(s0),
        "S1" => Some(s0.with_h(HSpec::Umbilical(vec![1.0]))),
        "S2" => Some(s0.with_m(MSpec::ScaledIdentity(0.1))),
        _ => None,
    }
}

pub fn fixture_point(name: &str) -> Result<SubmanifoldPoint> {
    let spec = fixture(name).ok_or_else(|| Error::Precondition(format!("unknown fixture {name:?}")))?;
    build(&spec)
}

/// `h^1 = diag(u, ..., u, n(n-1)/r u)` and `h^alpha = 0` for `alpha >= 2`.
pub fn make_quasi_umbilical_h(n: usize, codim: usize, u: f64, r: f64) -> Result<Vec<DMatrix<f64>>> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    if codim < 1 {
        return Err(Error::InvalidDimension { what: "codim", value: codim, reason: "need codim >= 1" });
    }
    if n < 2 {
        return Err(Error::InvalidDimension { what: "n", value: n, reason: "need n >= 2" });
    }
    let mut h = vec![DMatrix::zeros(n, n); codim];
    for i in 0..n - 1 {
        h[0][(i, i)] = u;
    }
    h[0][(n - 1, n - 1)] = (n * (n - 1)) as f64 / r * u;
    Ok(h)
}

fn axis_frame(dim: usize, axes: impl Iterator<Item = usize>) -> DMatrix<f64> {
    let axes: Vec<usize> = axes.collect();
    let mut e = DMatrix::zeros(dim, axes.len());
    for (col, ax) in axes.into_iter().enumerate() {
        e[(ax, col)] = 1.0;
    }
    e
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = if scale > 0.0 { rng.random_range(-scale..=scale) } else { 0.0 };
            a[(i, j)] = x;
            a[(j, i)] = x;
        }
    }
    a
}

fn check_scale(name: &'static str, scale: f64) -> Result<()> {
    if scale >= 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value: scale })
    }
}

fn tangent_frame(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>> {
    let dim = 4 * spec.m;
    let n = spec.n;
    if n < 2 || n >= dim {
        return Err(Error::InvalidDimension { what: "n", value: n, reason: "need 2 <= n < 4m" });
    }
    match spec.kind {
        ScenarioKind::Invariant => {
            if n % 4 != 0 {
                return Err(Error::InvalidDimension {
                    what: "n",
                    value: n,
                    reason: "invariant tangent spaces need n divisible by 4",
                });
            }
            // v = first real axis of block b; {v, J1 v, J2 v, J3 v} are the block's axes
            Ok(axis_frame(dim, 0..n))
        }
        ScenarioKind::AntiInvariant => {
            if n > spec.m {
                return Err(Error::InvalidDimension {
                    what: "n",
                    value: n,
                    reason: "anti-invariant tangent spaces need n <= m",
                });
            }
            Ok(axis_frame(dim, (0..n).map(|b| 4 * b)))
        }
        ScenarioKind::Random => {
            let raw: Vec<DVector<f64>> =
                (0..n).map(|_| DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal))).collect();
            Ok(linalg::columns(&linalg::orthonormalize(&raw)?, dim))
        }
    }
}

/// Builds the point described by `spec`. Identical specs give bit-identical
/// points.
pub fn build(spec: &ScenarioSpec) -> Result<SubmanifoldPoint> {
    if spec.m < 1 {
        return Err(Error::InvalidDimension { what: "m", value: spec.m, reason: "need m >= 1" });
    }
    let ambient = AmbientModel::standard(spec.m, spec.c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let tangent = tangent_frame(spec, &mut rng)?;
    let normal = complete_normal_frame(&tangent)?;
    let n = spec.n;
    let codim = 4 * spec.m - n;

    let h = match &spec.h {
        HSpec::Zero => vec![DMatrix::zeros(n, n); codim],
        HSpec::Umbilical(lambdas) => {
            if lambdas.len() > codim {
                return Err(Error::Shape { expected: codim, found: lambdas.len(), what: "umbilical weights" });
            }
            let mut h = vec![DMatrix::zeros(n, n); codim];
            for (a, &l) in lambdas.iter().enumerate() {
                h[a] = DMatrix::identity(n, n) * l;
            }
            h
        }
        HSpec::QuasiUmbilical { u, r } => make_quasi_umbilical_h(n, codim, *u, *r)?,
        HSpec::Explicit(h) => h.clone(),
        HSpec::Random { scale } => {
            check_scale("h scale", *scale)?;
            (0..codim).map(|_| random_symmetric(&mut rng, n, *scale)).collect()
        }
    };
    let m_tensor = match &spec.m_tensor {
        MSpec::Zero => DMatrix::zeros(n, n),
        MSpec::ScaledIdentity(s) => DMatrix::identity(n, n) * *s,
        MSpec::Explicit(m) => m.clone(),
        MSpec::Random { scale } => {
            check_scale("M scale", *scale)?;
            random_symmetric(&mut rng, n, *scale)
        }
    };
    let point = SubmanifoldPoint::new(ambient, tangent, normal, h, m_tensor)?;

    let t = tangency_decomposition(&point);
    let expected = match spec.kind {
        ScenarioKind::Invariant => Some(n as f64),
        ScenarioKind::AntiInvariant => Some(0.0),
        ScenarioKind::Random => None,
    };
    if let Some(want) = expected {
        if t.norm_p2.iter().any(|&p| libm::fabs(p - want) > 1e-12) {
            return Err(Error::Precondition(format!("tangency norms {:?} differ from {want}", t.norm_p2)));
        }
    }
    Ok(point)
}

pub fn make_invariant_point(spec: &ScenarioSpec) -> Result<SubmanifoldPoint> {
    build(&ScenarioSpec { kind: ScenarioKind::Invariant, ..spec.clone() })
}

pub fn make_anti_invariant_point(spec: &ScenarioSpec) -> Result<SubmanifoldPoint> {
    build(&ScenarioSpec { kind: ScenarioKind::AntiInvariant, ..spec.clone() })
}

pub fn make_random_point(spec: &ScenarioSpec) -> Result<SubmanifoldPoint> {
    build(&ScenarioSpec { kind: ScenarioKind::Random, ..spec.clone() })
}
