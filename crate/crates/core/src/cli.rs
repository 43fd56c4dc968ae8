//! Command-line surface. Exit codes: 0 success, 1 invalid input, 2 runtime
//! failure, 3 when `verify` finds a violated invariant.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::criteria::{self, DataFunctionals};
use crate::diagnostics::DiagnosticRecord;
use crate::dynamics::{evolve, RunStatus};
use crate::error::{Error, Result};
use crate::experiments::{fit_rate, run_lambda_sweep, AppendixSetup, APPENDIX_MASS_SCALE};
use crate::io::{self, RunConfig};
use crate::verify::run_verification;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rabinls", version, about = "Rabi-coupled two-component NLS simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one system at one λ and write the diagnostics time series.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides [output].dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the λ-list against the limit profile and fit the convergence rate.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the existence and blow-up criteria on the configured datum.
    CheckCriteria {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the built-in invariant checks.
    Verify,
    /// Mixed focusing/defocusing scenario with a linear limit.
    Appendix {
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        #[arg(long, default_value_t = APPENDIX_MASS_SCALE)]
        mass_scale: f64,
        #[arg(long)]
        points_per_dim: Option<usize>,
        #[arg(long)]
        t_end: Option<f64>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    io::parse_config(&text)
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Simulate { config, out } => {
            let cfg = load_config(&config).map_err(as_validation)?;
            simulate(&cfg, out.unwrap_or_else(|| cfg.output.dir.clone()))
        }
        Command::Sweep { config, out } => {
            let cfg = load_config(&config).map_err(as_validation)?;
            sweep(&cfg, out.unwrap_or_else(|| cfg.output.dir.clone()))
        }
        Command::CheckCriteria { config } => {
            let cfg = load_config(&config).map_err(as_validation)?;
            check_criteria(&cfg)
        }
        Command::Verify => verify(),
        Command::Appendix {
            lambda,
            mass_scale,
            points_per_dim,
            t_end,
        } => {
            let mut setup = AppendixSetup::default();
            if let Some(n) = points_per_dim {
                setup.points_per_dim = n;
            }
            if let Some(t) = t_end {
                setup.integrator.t_end = t;
            }
            appendix(&setup, lambda, mass_scale)
        }
    }
}

/// A config that cannot be read is bad input, not a runtime failure.
fn as_validation(e: Error) -> Error {
    match e {
        Error::Io { path, source } => Error::config(path.display().to_string(), source.to_string()),
        other => other,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn simulate(cfg: &RunConfig, dir: PathBuf) -> Result<i32> {
    let scenario = cfg.scenario();
    let psi0 = scenario.initial_field()?;
    let spec = cfg.system_spec();
    let traj = evolve(&psi0, &spec, &scenario.integrator)?;
    create_dir(&dir)?;
    let csv = dir.join("diagnostics.csv");
    io::write_diagnostics_csv(&csv, &traj.diagnostics)?;
    if cfg.output.write_snapshots {
        for (k, snap) in traj.snapshots.iter().enumerate() {
            io::write_snapshot(snap, &dir.join(format!("snapshot_{k:05}.bin")))?;
        }
    }
    let first = traj.diagnostics[0];
    let last = traj.diagnostics.last().copied().unwrap_or(first);
    println!("system: {:?}", spec.kind());
    println!("status: {}", traj.status.label());
    println!("steps: {} (dt = {:e})", traj.diagnostics.len() - 1, traj.dt);
    if let Some(rem) = traj.final_step {
        println!("shortened final step: {rem:e}");
    }
    print_drift("mass", &first, &last, |r| r.mass);
    print_drift("energy", &first, &last, |r| r.energy);
    println!("max gradient ratio: {:.6}", traj.max_gradient_ratio());
    println!("wrote {}", csv.display());
    Ok(EXIT_OK)
}

fn print_drift(name: &str, a: &DiagnosticRecord, b: &DiagnosticRecord, f: impl Fn(&DiagnosticRecord) -> f64) {
    let (x, y) = (f(a), f(b));
    println!("{name}: {x:.12e} -> {y:.12e} (drift {:.3e})", y - x);
}

fn sweep(cfg: &RunConfig, dir: PathBuf) -> Result<i32> {
    let lambdas = &cfg.experiment.lambdas;
    if lambdas.is_empty() {
        return Err(Error::config("experiment.lambdas", "sweep needs at least one lambda"));
    }
    let scenario = cfg.scenario();
    let advisory = scenario.limit_advisory();
    eprintln!(
        "limit system global existence: {} ({})",
        advisory.outcome,
        advisory.condition_label()
    );
    let results = run_lambda_sweep(&scenario, lambdas)?;
    create_dir(&dir)?;
    let csv = dir.join("sweep.csv");
    io::write_sweep_csv(&csv, &results)?;
    println!(
        "{:>12} {:>14} {:>14} {:>14}",
        "lambda", "sup sigma", "L4 value", "status"
    );
    for r in &results {
        println!(
            "{:>12} {:>14.6e} {:>14.6e} {:>14}",
            r.lambda,
            r.err_sup_sigma,
            r.err_q8n_l4.value,
            r.status_original.label()
        );
    }
    match fit_rate(&results) {
        Ok(rate) => println!("fitted rate: {rate:.4}"),
        Err(e) => println!("fitted rate: unavailable ({e})"),
    }
    println!("wrote {}", csv.display());
    Ok(EXIT_OK)
}

fn check_criteria(cfg: &RunConfig) -> Result<i32> {
    let s = cfg.scenario();
    let psi0 = s.initial_field()?;
    let lambda = cfg.physics.lambda;
    let d = DataFunctionals::of(&psi0, s.coupling, s.gamma, lambda);
    println!("M(0) = {:.12e}", d.mass0);
    println!("E(0) = {:.12e}", d.energy0);
    println!("I(0) = {:.12e}", d.virial0);
    println!("I'(0) = {:.12e}", d.virial_rate0);
    println!("beta defect = {}", criteria::beta_defect(s.coupling));
    let gwp = criteria::gwp_original(s.coupling, s.dim, lambda, s.gamma, &d, &cfg.gn_constants())?;
    print!("global existence: {} ({})", gwp.outcome, gwp.condition_label());
    match gwp.depends_on {
        Some(c) => println!(" [depends on user-supplied {c}]"),
        None => println!(),
    }
    if s.dim >= 2 {
        let bu = criteria::blowup_original(s.coupling, s.dim, lambda, s.gamma, &d)?;
        print!("blow-up: {} ({})", bu.outcome, bu.condition_label());
        match bu.certified_time_bound {
            Some(t) => println!(", T* <= {t:.6}"),
            None => println!(),
        }
    } else {
        println!("blow-up: not applicable in one dimension");
    }
    let lim = criteria::gwp_limit(s.coupling);
    println!("limit system: {} ({})", lim.outcome, lim.condition_label());
    Ok(EXIT_OK)
}

fn verify() -> Result<i32> {
    let checks = run_verification()?;
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:<36} {:.3e} (limit {:.1e})", c.name, c.value, c.limit);
        failed += usize::from(!c.passed);
    }
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY })
}

fn appendix(setup: &AppendixSetup, lambda: f64, mass_scale: f64) -> Result<i32> {
    let r = setup.run(lambda, mass_scale)?;
    println!("lambda = {}, first-component mass = {}", r.lambda, r.mass_scale);
    println!(
        "effective coefficients: chi = {}, chi_tilde = {}",
        r.effective.chi, r.effective.chi_tilde
    );
    println!("global existence: {} ({})", r.gwp.outcome, r.gwp.condition_label());
    println!("blow-up: {} ({})", r.blowup.outcome, r.blowup.condition_label());
    println!(
        "limit system: {} ({})",
        r.limit_gwp.outcome,
        r.limit_gwp.condition_label()
    );
    println!("status: {}", r.status.label());
    if let RunStatus::BlowupDetected { t_stop, .. } = r.status {
        println!("stopped at t = {t_stop:.6}");
    }
    println!("max gradient ratio: {:.6}", r.max_gradient_ratio);
    if let Some(s) = r.sweep {
        println!("sup sigma distance to limit profile: {:.6e}", s.err_sup_sigma);
    }
    Ok(EXIT_OK)
}
