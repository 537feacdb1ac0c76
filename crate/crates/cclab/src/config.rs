//! Run configuration files (JSON).
//!
//! ```json
//! {
//!   "scenarios": ["S0", "S1",
//!     {"id": "quasi", "kind": "invariant", "n": 4, "m": 2, "c": 1.0,
//!      "h": {"quasi_umbilical": {"u": 1.0, "r": 6.0}}, "M": "zero"}],
//!   "checks": ["A1", "B1", "HESS"],
//!   "r_grid": [6.0],
//!   "samples": 10,
//!   "seed": 7
//! }
//! ```
//!
//! Parsing is strict: unknown fields are rejected and the physics-bearing
//! scenario fields (`kind`, `n`, `m`, `c`, `h`, `M`) have no defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use cclab_core::scenario::{self, HSpec, MSpec, ScenarioKind, ScenarioSpec};
use nalgebra::DMatrix;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Environment variable overriding the run seed.
pub const SEED_ENV: &str = "CCLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
pub enum Check {
    A1,
    A2,
    A3,
    A4,
    A5,
    B1,
    COR,
    HESS,
    IDENTITIES,
}

impl Check {
    pub const ALL: [Check; 9] =
        [Check::A1, Check::A2, Check::A3, Check::A4, Check::A5, Check::B1, Check::COR, Check::HESS, Check::IDENTITIES];

    pub fn as_str(self) -> &'static str {
        match self {
            Check::A1 => "A1",
            Check::A2 => "A2",
            Check::A3 => "A3",
            Check::A4 => "A4",
            Check::A5 => "A5",
            Check::B1 => "B1",
            Check::COR => "COR",
            Check::HESS => "HESS",
            Check::IDENTITIES => "IDENTITIES",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindFile {
    Invariant,
    AntiInvariant,
    Random,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiParams {
    pub u: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleParams {
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HFile {
    Zero,
    Umbilical(Vec<f64>),
    QuasiUmbilical(QuasiParams),
    /// One `n x n` matrix (rows) per normal direction.
    Explicit(Vec<Vec<Vec<f64>>>),
    Random(ScaleParams),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MFile {
    Zero,
    ScaledIdentity(f64),
    Explicit(Vec<Vec<f64>>),
    Random(ScaleParams),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub id: Option<String>,
    pub kind: KindFile,
    pub n: usize,
    pub m: usize,
    pub c: f64,
    #[serde(deserialize_with = "h_with_default")]
    pub h: HFile,
    #[serde(rename = "M", deserialize_with = "m_with_default")]
    pub m_tensor: MFile,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub const DEFAULT_H_SCALE: f64 = 1.0;
pub const DEFAULT_M_SCALE: f64 = 0.3;

/// Accepts the externally tagged forms plus a bare `"random"`, which takes
/// the given default scale.
struct Shorthand<T> {
    random: fn() -> T,
    marker: std::marker::PhantomData<T>,
}

impl<'de, T: Deserialize<'de>> Visitor<'de> for Shorthand<T> {
    type Value = T;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a variant name or a single-key object")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<T, E> {
        if v == "random" {
            return Ok((self.random)());
        }
        T::deserialize(de::value::StrDeserializer::new(v))
    }

    fn visit_map<A: MapAccess<'de>>(self, map: A) -> std::result::Result<T, A::Error> {
        T::deserialize(de::value::MapAccessDeserializer::new(map))
    }
}

fn h_with_default<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<HFile, D::Error> {
    d.deserialize_any(Shorthand {
        random: || HFile::Random(ScaleParams { scale: DEFAULT_H_SCALE }),
        marker: std::marker::PhantomData,
    })
}

fn m_with_default<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<MFile, D::Error> {
    d.deserialize_any(Shorthand {
        random: || MFile::Random(ScaleParams { scale: DEFAULT_M_SCALE }),
        marker: std::marker::PhantomData,
    })
}

/// A scenario given either as a fixture name or as an explicit object.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioEntry {
    Fixture(String),
    Spec(ScenarioFile),
}

impl<'de> Deserialize<'de> for ScenarioEntry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EntryVisitor;

        impl<'de> Visitor<'de> for EntryVisitor {
            type Value = ScenarioEntry;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a fixture name or a scenario object")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                Ok(ScenarioEntry::Fixture(v.to_owned()))
            }

            fn visit_map<A: MapAccess<'de>>(self, map: A) -> std::result::Result<Self::Value, A::Error> {
                ScenarioFile::deserialize(de::value::MapAccessDeserializer::new(map)).map(ScenarioEntry::Spec)
            }
        }

        deserializer.deserialize_any(EntryVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenarios: Vec<ScenarioEntry>,
    pub checks: Vec<Check>,
    /// `r` values for B1 and HESS; when absent each scenario uses
    /// `1, n(n-1)/2, n^2-n-1, n^2-n+1, 2n(n-1)`.
    #[serde(default)]
    pub r_grid: Option<Vec<f64>>,
    /// Random unit vectors (A2) and random planes (A3) per scenario.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    /// Fault injection: checks whose right-hand side is negated before the
    /// flags are computed.
    #[serde(default)]
    pub flip_rhs: Vec<Check>,
}

fn default_samples() -> usize {
    10
}

/// A scenario ready to build.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub id: String,
    pub spec: ScenarioSpec,
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| CliError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Self::from_str(&text)
    }

    fn validate(&self) -> Result<()> {
        if self.checks.is_empty() {
            return Err(CliError::Config("checks must not be empty".into()));
        }
        if let Some(grid) = &self.r_grid {
            if let Some((i, r)) = grid.iter().enumerate().find(|(_, r)| !(**r > 0.0) || !r.is_finite()) {
                return Err(CliError::Schema { path: format!("r_grid[{i}]"), message: format!("r must be positive, got {r}") });
            }
        }
        for (i, entry) in self.scenarios.iter().enumerate() {
            match entry {
                ScenarioEntry::Fixture(name) => {
                    if scenario::fixture(name).is_none() {
                        let known: Vec<&str> = scenario::FIXTURES.iter().map(|f| f.0).collect();
                        return Err(CliError::Schema {
                            path: format!("scenarios[{i}]"),
                            message: format!("unknown fixture {name:?} (known: {})", known.join(", ")),
                        });
                    }
                }
                ScenarioEntry::Spec(s) => {
                    if !s.c.is_finite() {
                        return Err(CliError::Schema { path: format!("scenarios[{i}].c"), message: "c must be finite".into() });
                    }
                }
            }
        }
        let ids: Vec<String> = self.resolve_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::Config(format!("duplicate scenario id {:?}", w[0])));
        }
        Ok(())
    }

    fn resolve_ids(&self) -> Vec<String> {
        self.scenarios
            .iter()
            .enumerate()
            .map(|(i, e)| match e {
                ScenarioEntry::Fixture(name) => name.clone(),
                ScenarioEntry::Spec(s) => s.id.clone().unwrap_or_else(|| format!("scenario{i:03}")),
            })
            .collect()
    }

    /// The run seed, honouring the `CCLAB_SEED` override.
    pub fn effective_seed(&self) -> Result<u64> {
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
            Err(_) => Ok(self.seed),
        }
    }

    /// Scenario specs with ids; scenarios without their own seed use
    /// `run_seed`.
    pub fn resolve(&self, run_seed: u64) -> Result<Vec<ResolvedScenario>> {
        let ids = self.resolve_ids();
        self.scenarios
            .iter()
            .zip(ids)
            .enumerate()
            .map(|(i, (entry, id))| {
                let spec = match entry {
                    ScenarioEntry::Fixture(name) => scenario::fixture(name).expect("validated fixture name"),
                    ScenarioEntry::Spec(s) => to_spec(s, run_seed).map_err(|message| CliError::Schema {
                        path: format!("scenarios[{i}].{}", message.0),
                        message: message.1,
                    })?,
                };
                Ok(ResolvedScenario { id, spec })
            })
            .collect()
    }
}

fn matrix(rows: &[Vec<f64>], n: usize, field: &str) -> std::result::Result<DMatrix<f64>, (String, String)> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err((field.into(), format!("expected a {n}x{n} matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn to_spec(s: &ScenarioFile, run_seed: u64) -> std::result::Result<ScenarioSpec, (String, String)> {
    let kind = match s.kind {
        KindFile::Invariant => ScenarioKind::Invariant,
        KindFile::AntiInvariant => ScenarioKind::AntiInvariant,
        KindFile::Random => ScenarioKind::Random,
    };
    let n = s.n;
    let h = match &s.h {
        HFile::Zero => HSpec::Zero,
        HFile::Umbilical(l) => HSpec::Umbilical(l.clone()),
        HFile::QuasiUmbilical(q) => HSpec::QuasiUmbilical { u: q.u, r: q.r },
        HFile::Explicit(mats) => {
            let codim = (4 * s.m).saturating_sub(n);
            if mats.len() != codim {
                return Err(("h".into(), format!("expected {codim} matrices (one per normal direction), got {}", mats.len())));
            }
            let parsed = mats
                .iter()
                .enumerate()
                .map(|(a, rows)| matrix(rows, n, &format!("h[{a}]")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            HSpec::Explicit(parsed)
        }
        HFile::Random(p) => HSpec::Random { scale: p.scale },
    };
    let m_tensor = match &s.m_tensor {
        MFile::Zero => MSpec::Zero,
        MFile::ScaledIdentity(x) => MSpec::ScaledIdentity(*x),
        MFile::Explicit(rows) => MSpec::Explicit(matrix(rows, n, "M")?),
        MFile::Random(p) => MSpec::Random { scale: p.scale },
    };
    Ok(ScenarioSpec { kind, n, m: s.m, c: s.c, h, m_tensor, seed: s.seed.unwrap_or(run_seed) })
}
