use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use cclab::config::{Format, RunConfig};
use cclab::error::CliError;
use cclab::{oracle, report, suite};
use cclab_core::curvature::CurvatureTensors;
use cclab_core::inequalities::hessian_spectrum;
use cclab_core::invariants::{self, ExtremumMode};
use cclab_core::scenario::{self, ScenarioSpec};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cclab", version, about = "Curvature invariants and inequality checks at a submanifold point")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured checks and write a report.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Report path; defaults to the config's output, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Show the named fixtures.
    Fixtures {
        #[arg(long)]
        list: bool,
    },
    /// Spectrum of the δ-Casorati Hessian.
    Hessian {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: f64,
    },
    /// Compare the optimizers against dense-grid oracles on random points.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        #[arg(long, default_value_t = 50)]
        scenarios: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn check(config: PathBuf, out: Option<PathBuf>, format: Option<Format>) -> Result<i32, CliError> {
    let cfg = RunConfig::from_path(&config)?;
    let outcome = suite::run_suite(&cfg)?;
    for note in &outcome.notes {
        eprintln!("note: {note}");
    }
    let format = format.or(cfg.output.as_ref().map(|o| o.format)).unwrap_or_default();
    let path = out.or(cfg.output.as_ref().map(|o| o.path.clone()));
    match path {
        Some(p) => report::emit_report(&outcome.rows, format, &p)?,
        None => {
            let bytes = report::encode(&outcome.rows, format)?;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|source| CliError::Write { path: "<stdout>".into(), source })?;
        }
    }
    eprintln!("{} rows, {} violations", outcome.rows.len(), outcome.violations());
    for r in outcome.rows.iter().filter(|r| r.violated()) {
        eprintln!("violated: {} {} {} slack {:e}", r.scenario_id, r.check, r.subcase, r.slack);
    }
    Ok(outcome.exit_code())
}

fn hessian(n: usize, r: f64) -> Result<i32, CliError> {
    let h = hessian_spectrum(n, r).map_err(|source| CliError::Scenario { context: "hessian".into(), source })?;
    println!("n = {n}, r = {r}");
    println!("{:>4} {:>22} {:>22} {}", "i", "eigenvalue", "closed form", "match");
    for (i, ((e, c), m)) in h.eigenvalues.iter().zip(&h.closed_form).zip(&h.matches).enumerate() {
        println!("{i:>4} {e:>22.12} {c:>22.12} {m}");
    }
    println!("psd: {}, zero eigenvalues: {}, kernel residual: {:e}", h.psd, h.zero_multiplicity, h.kernel_residual);
    Ok(if h.psd && h.zero_multiplicity == 1 && h.all_match() { 0 } else { 1 })
}

fn run_oracle(n: usize, grid: usize, count: usize, seed: u64, tol: f64) -> Result<i32, CliError> {
    let ctx = |source| CliError::Scenario { context: "oracle".into(), source };
    let mut worst = 0.0f64;
    println!("{:>5} {:>10} {:>22} {:>22} {:>22}", "seed", "quantity", "optimizer", "oracle", "difference");
    for k in 0..count as u64 {
        let s = seed.wrapping_add(k);
        let mut spec = ScenarioSpec::random_envelope(s);
        spec.n = n;
        let point = scenario::build(&spec).map_err(ctx)?;
        let tensors = CurvatureTensors::new(&point);
        let inf = invariants::hyperplane_extrema(&point, ExtremumMode::Inf, s).map_err(ctx)?;
        let sup = invariants::hyperplane_extrema(&point, ExtremumMode::Sup, s).map_err(ctx)?;
        let chen = invariants::chen_delta(&tensors, s).map_err(ctx)?;
        let rows = [
            ("inf C(V)", inf.extremal_value, oracle::hyperplane_oracle(&point, ExtremumMode::Inf, grid)?.value),
            ("sup C(V)", sup.extremal_value, oracle::hyperplane_oracle(&point, ExtremumMode::Sup, grid)?.value),
            ("inf K", chen.inf_k, oracle::plane_oracle(&tensors, grid)?.value),
        ];
        for (name, opt, orc) in rows {
            let diff = (opt - orc).abs();
            worst = worst.max(diff);
            println!("{s:>5} {name:>10} {opt:>22.15} {orc:>22.15} {diff:>22.3e}");
        }
    }
    println!("max difference {worst:e} (tolerance {tol:e})");
    Ok(if worst <= tol { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { config, out, format } => check(config, out, format),
        Command::Fixtures { list: _ } => {
            for (name, desc) in scenario::FIXTURES {
                println!("{name}\t{desc}");
            }
            Ok(0)
        }
        Command::Hessian { n, r } => hessian(n, r),
        Command::Oracle { n, grid, scenarios, seed, tol } => run_oracle(n, grid, scenarios, seed, tol),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
