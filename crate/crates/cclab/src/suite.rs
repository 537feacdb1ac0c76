//! Runs the configured checks over every scenario and flattens the reports
//! into rows.

use cclab_core::inequalities::{hessian_spectrum, Analysis, InequalityReport, Sense};
use cclab_core::invariants;
use cclab_core::scenario;
use cclab_core::tolerance;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Check, RunConfig};
use crate::error::{CliError, Result};
use crate::report::{sort_rows, Row, INFORMATIONAL};

/// Rows (sorted by scenario, check, subcase) plus notes on checks that did
/// not apply to a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violated()).count()
    }

    /// 0 when every asserted row holds, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.violations() == 0 {
            0
        } else {
            1
        }
    }
}

/// `1, n(n-1)/2, n^2-n-1, n^2-n+1, 2n(n-1)`.
pub fn default_r_grid(n: usize) -> Vec<f64> {
    let n = n as f64;
    vec![1.0, n * (n - 1.0) / 2.0, n * n - n - 1.0, n * n - n + 1.0, 2.0 * n * (n - 1.0)]
}

pub fn r_label(r: f64) -> String {
    format!("r={r:015.6}")
}

fn eigen_label(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| {
            let v = if v.abs() < 5e-10 { 0.0 } else { *v };
            let s = format!("{v:.9}");
            let s = s.trim_end_matches('0').trim_end_matches('.');
            s.to_owned()
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let norm = v.norm();
        if norm > 0.1 && norm <= 1.0 {
            return v / norm;
        }
    }
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

struct Emitter<'a> {
    id: &'a str,
    seed: u64,
    flip: &'a [Check],
    rows: Vec<Row>,
}

impl Emitter<'_> {
    fn push(&mut self, check: Check, subcase: String, report: &InequalityReport) {
        let report = if self.flip.contains(&check) {
            report.with_rhs(-report.rhs_canonical, report.rhs_variant.map(|v| -v))
        } else {
            report.clone()
        };
        let subcase = if report.asserted { subcase } else { subcase + INFORMATIONAL };
        self.rows.push(Row {
            scenario_id: self.id.to_owned(),
            check: check.as_str().to_owned(),
            subcase,
            lhs: report.lhs,
            rhs_canonical: report.rhs_canonical,
            rhs_variant: report.rhs_variant,
            slack: report.slack,
            holds: report.holds,
            equality: report.equality,
            equality_case: report.equality_case.to_string(),
            seed: self.seed,
        });
    }
}

fn scenario_error(i: usize, id: &str) -> impl Fn(cclab_core::Error) -> CliError + '_ {
    move |source| CliError::Scenario { context: format!("scenarios[{i}] ({id})"), source }
}

pub fn run_suite(config: &RunConfig) -> Result<SuiteOutcome> {
    let run_seed = config.effective_seed()?;
    let scenarios = config.resolve(run_seed)?;
    let mut checks = config.checks.clone();
    checks.sort();
    checks.dedup();
    let mut rows = Vec::new();
    let mut notes = Vec::new();

    for (i, sc) in scenarios.iter().enumerate() {
        let err = scenario_error(i, &sc.id);
        let point = scenario::build(&sc.spec).map_err(&err)?;
        let seed = sc.spec.seed;
        let n = point.n();
        let analysis = Analysis::new(&point, seed);
        let r_grid = config.r_grid.clone().unwrap_or_else(|| default_r_grid(n));
        let mut out = Emitter { id: &sc.id, seed, flip: &config.flip_rhs, rows: Vec::new() };
        let mut skip = |check: Check, why: &str| notes.push(format!("{}: {check} skipped ({why})", sc.id));

        for &check in &checks {
            if n < 3 && !matches!(check, Check::A1 | Check::A2) {
                skip(check, "needs n >= 3");
                continue;
            }
            match check {
                Check::A1 => out.push(check, "point".into(), &analysis.check_a1()),
                Check::A2 => {
                    for j in 0..n {
                        out.push(check, format!("e{j:03}"), &analysis.check_a2(&unit(n, j)).map_err(&err)?);
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA2);
                    for s in 0..config.samples {
                        let x = random_unit(&mut rng, n);
                        out.push(check, format!("x{s:03}"), &analysis.check_a2(&x).map_err(&err)?);
                    }
                }
                Check::A3 => {
                    for a in 0..n {
                        for b in (a + 1)..n {
                            let rep = analysis.check_a3(&unit(n, a), &unit(n, b)).map_err(&err)?;
                            out.push(check, format!("e{a:03}-{b:03}"), &rep);
                        }
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA3);
                    for s in 0..config.samples {
                        let u = random_unit(&mut rng, n);
                        let v = random_unit(&mut rng, n);
                        out.push(check, format!("p{s:03}"), &analysis.check_a3(&u, &v).map_err(&err)?);
                    }
                }
                Check::A4 | Check::A5 => {
                    let c = point.c();
                    let applies = if check == Check::A4 { c > 0.0 } else { c < 0.0 };
                    if !applies {
                        skip(check, if check == Check::A4 { "needs c > 0" } else { "needs c < 0" });
                        continue;
                    }
                    let rep = if check == Check::A4 { analysis.check_a4(None) } else { analysis.check_a5(None) };
                    out.push(check, "argmin".into(), &rep.map_err(&err)?);
                }
                Check::B1 => {
                    for &r in &r_grid {
                        out.push(check, r_label(r), &analysis.check_b1(r).map_err(&err)?);
                    }
                }
                Check::COR => {
                    let cor = analysis.check_corollary().map_err(&err)?;
                    out.push(check, "delta_c".into(), &cor.delta_c);
                    out.push(check, "delta_c_hat".into(), &cor.delta_c_hat);
                }
                Check::HESS => {
                    for &r in &r_grid {
                        let h = hessian_spectrum(n, r).map_err(&err)?;
                        let mut rep = InequalityReport::new("HESS", Sense::Ge, h.eigenvalues[0], 0.0);
                        rep.holds = h.psd && h.zero_multiplicity == 1 && h.all_match();
                        rep.equality = h.zero_multiplicity >= 1;
                        // the C(L) coefficient vanishes at r = n^2 - n
                        rep.asserted = (r - (n * n - n) as f64).abs() > 0.0;
                        out.push(check, format!("{};eig={}", r_label(r), eigen_label(&h.eigenvalues)), &rep);
                    }
                }
                Check::IDENTITIES => identities(&analysis, &r_grid, &mut out).map_err(&err)?,
            }
        }
        rows.extend(out.rows);
    }
    sort_rows(&mut rows);
    Ok(SuiteOutcome { rows, notes })
}

fn identities(a: &Analysis<'_>, r_grid: &[f64], out: &mut Emitter<'_>) -> cclab_core::Result<()> {
    let point = a.point();
    let t = a.tensors();
    let n = point.n() as f64;
    let id = |name: &str, lhs: f64, rhs: f64, tol: f64| {
        InequalityReport::with_tolerance(name, Sense::Eq, lhs, rhs, tol)
    };
    let h2 = a.mean().norm2;
    out.push(
        Check::IDENTITIES,
        "master".into(),
        &id("master", 2.0 * t.scalar_tau(), a.tau_dprime() + n * n * h2 - point.norm_h2(), tolerance::IDENTITY),
    );
    out.push(Check::IDENTITIES, "tau_prime".into(), &id("tau_prime", t.tau_prime(), t.tau_prime_direct(), tolerance::IDENTITY));
    out.push(Check::IDENTITIES, "tau_dprime_trace".into(), &id("tau_dprime_trace", t.tau_dprime(), t.tau_dprime_trace(), 1e-10));
    out.push(
        Check::IDENTITIES,
        "tau_dprime_contraction".into(),
        &id("tau_dprime_contraction", t.tau_dprime(), t.tau_dprime_contraction(), 1e-10),
    );
    let full: Vec<DVector<f64>> = (0..point.n()).map(|i| unit(point.n(), i)).collect();
    out.push(
        Check::IDENTITIES,
        "casorati".into(),
        &id("casorati", invariants::casorati_cv(point, &full)?, point.norm_h2() / n, 1e-12),
    );
    out.push(
        Check::IDENTITIES,
        "cauchy_schwarz".into(),
        &InequalityReport::new("cauchy_schwarz", Sense::Le, n * n * h2, n * point.norm_h2()),
    );
    let a1 = a.check_a1();
    out.push(Check::IDENTITIES, "a1_slack".into(), &id("a1_slack", a1.slack, a1.identity.unwrap_or(f64::NAN), tolerance::IDENTITY));
    if point.n() >= 3 {
        for &r in r_grid {
            let b1 = a.check_b1(r)?;
            out.push(
                Check::IDENTITIES,
                format!("b1_T;{}", r_label(r)),
                &id("b1_T", b1.slack, b1.identity.unwrap_or(f64::NAN), tolerance::INEQUALITY),
            );
        }
        let cor = a.check_corollary()?;
        let nn = n * (n - 1.0);
        let scale = tolerance::scale(a.check_b1(nn / 2.0)?.lhs, 1.0);
        out.push(Check::IDENTITIES, "scaling_low".into(), &id("scaling_low", cor.scaling_residual[0] / scale, 0.0, 1e-10));
        let scale = tolerance::scale(a.check_b1(2.0 * nn)?.lhs, 1.0);
        out.push(Check::IDENTITIES, "scaling_high".into(), &id("scaling_high", cor.scaling_residual[1] / scale, 0.0, 1e-10));
    }
    Ok(())
}
