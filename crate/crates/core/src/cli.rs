//! Command-line front end. Exit codes: 0 accept / success, 1 reject or a
//! failed verification suite, 2 usage or input error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certify::{
    certify, loglog_slope, sweep_epsilon, CertificationConfig, RoundSchedule, Verdict,
};
use crate::error::{Error, Result};
use crate::oracle::{EvolutionOracle, OracleMode};
use crate::pauli::PauliSum;
use crate::verify::{run_suite, SUITES};

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "HAMCERT_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "hamcert",
    version,
    about = "Certify a Hamiltonian against a reference from forward-only dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the hidden Hamiltonian equals the reference.
    Certify(CertifyArgs),
    /// Certify H0 + eps * direction for several eps and tabulate the cost.
    Sweep(SweepArgs),
    /// Run randomized property suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Trotter,
}

impl From<ModeArg> for OracleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => OracleMode::ExactEffective,
            ModeArg::Trotter => OracleMode::Trotterized,
        }
    }
}

#[derive(Args, Debug)]
struct Shared {
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run every round and OR the flags instead of stopping at the first.
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    c3: Option<f64>,
    #[arg(long)]
    c4: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    eps_trott: Option<f64>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    h0: PathBuf,
    /// Hidden Hamiltonian; read only to build the oracle.
    #[arg(long)]
    h: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    h0: PathBuf,
    /// Unit-Frobenius-norm perturbation direction.
    #[arg(long)]
    direction: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    eps_list: Vec<f64>,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("{SEED_ENV}={v} is not an integer"))),
        Err(_) => Ok(0),
    }
}

fn read_hamiltonian(path: &Path) -> Result<PauliSum> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    PauliSum::parse_text(&text)
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}

fn build_config(epsilon: f64, shared: &Shared) -> Result<CertificationConfig> {
    let mut cfg = CertificationConfig::new(epsilon, shared.delta, shared.k);
    cfg.c1 = shared.c1.unwrap_or(cfg.c1);
    cfg.c2 = shared.c2.unwrap_or(cfg.c2);
    cfg.c3 = shared.c3.unwrap_or(cfg.c3);
    cfg.c4 = shared.c4.unwrap_or(cfg.c4);
    cfg.c0 = shared.c0.unwrap_or(cfg.c0);
    cfg.eps_trott = shared.eps_trott;
    cfg.mode = shared.mode.into();
    cfg.schedule = if shared.parallel {
        RoundSchedule::Parallel
    } else {
        RoundSchedule::Sequential
    };
    cfg.seed = resolve_seed(shared.seed)?;
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_certify(args: &CertifyArgs) -> Result<Verdict> {
    let cfg = build_config(args.epsilon, &args.shared)?;
    let h0 = read_hamiltonian(&args.h0)?;
    let mut oracle = EvolutionOracle::new(read_hamiltonian(&args.h)?, cfg.mode)?;
    let mut report = certify(&h0, &mut oracle, &cfg)?;
    report
        .annotations
        .push(("h0_file".into(), args.h0.display().to_string()));
    report
        .annotations
        .push(("h_file".into(), args.h.display().to_string()));
    emit(args.shared.out.as_deref(), &report.to_text())?;
    Ok(report.verdict)
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let cfg = build_config(args.eps_list[0], &args.shared)?;
    let h0 = read_hamiltonian(&args.h0)?;
    let direction = read_hamiltonian(&args.direction)?;
    let rows = sweep_epsilon(&h0, &direction, &args.eps_list, &cfg)?;
    let mut csv = String::from("epsilon,total_time,queries,verdict,seed\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.epsilon,
            r.total_time,
            r.queries,
            r.verdict.as_str(),
            r.seed
        );
    }
    let slope = loglog_slope(&rows).map_or_else(|| "nan".to_string(), |s| s.to_string());
    let _ = writeln!(csv, "# loglog_slope={slope}");
    let _ = writeln!(
        csv,
        "# h0={} direction={} delta={} k={} mode={} schedule={} c1={} c2={} c3={} c4={} c0={} eps_trott={}",
        args.h0.display(),
        args.direction.display(),
        cfg.delta,
        cfg.k,
        cfg.mode.as_str(),
        cfg.schedule.as_str(),
        cfg.c1,
        cfg.c2,
        cfg.c3,
        cfg.c4,
        cfg.c0,
        cfg.eps_trott.map_or_else(|| "default".to_string(), |e| e.to_string()),
    );
    emit(args.shared.out.as_deref(), &csv)
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let seed = resolve_seed(args.seed)?;
    let names: Vec<&str> = if args.suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&args.suite.as_str()) {
        vec![args.suite.as_str()]
    } else {
        return Err(Error::InvalidParameter(format!(
            "unknown suite '{}'; expected one of {} or all",
            args.suite,
            SUITES.join(", ")
        )));
    };
    let mut all_pass = true;
    for name in names {
        let outcome = run_suite(name, args.trials, seed)?;
        all_pass &= outcome.passed();
        println!(
            "{}: {} ({} checks, {} failures; {})",
            outcome.name,
            if outcome.passed() { "PASS" } else { "FAIL" },
            outcome.checks,
            outcome.failures,
            outcome.detail
        );
    }
    Ok(all_pass)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Certify(a) => cmd_certify(a).map(|v| match v {
            Verdict::Accept => 0,
            Verdict::Reject => 1,
        }),
        Command::Sweep(a) => cmd_sweep(a).map(|()| 0),
        Command::Verify(a) => cmd_verify(a).map(|ok| if ok { 0 } else { 1 }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
