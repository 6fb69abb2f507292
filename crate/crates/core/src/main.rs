use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use thetamult::av::{PeriodMatrix, PolarizationType};
use thetamult::experiments::{
    load_period_matrix, random_siegel, run_sweep, verify_identities, SweepConfig, TauMode, VerifyConfig,
};
use thetamult::group::ThetaGroup;
use thetamult::multmap::{
    block_structure_check, injectivity_report, mult_matrix_formula, mult_matrix_interpolation, DEFAULT_RANK_TOL,
};
use thetamult::{Error, Verdict};

const OUT_DIR_ENV: &str = "THETAMULT_OUT_DIR";

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_DEFICIENT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "thetamult", version, about = "Injectivity of the theta multiplication map Sym^2 H^0(L) -> H^0(L^2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Injectivity report for a single period matrix.
    Check(CheckArgs),
    /// Seeded sweep over period matrices.
    Sweep(SweepArgs),
    /// Run the identity self-checks on the fixture set.
    Verify(VerifyArgs),
    /// Print the finite groups attached to a polarization type.
    DumpGroups(TypeArgs),
    /// Print the matrix of the multiplication map.
    DumpMatrix(DumpMatrixArgs),
}

#[derive(Args)]
struct TypeArgs {
    /// Polarization type, e.g. `1,2`.
    #[arg(long = "type", value_name = "D")]
    d: PolarizationType,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TauArgs {
    /// Polarization type, e.g. `1,2`.
    #[arg(long = "type", value_name = "D")]
    d: Option<PolarizationType>,
    /// Period matrix file; its type is used when `--type` is absent.
    #[arg(long)]
    tau: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
}

impl TauArgs {
    fn resolve(&self) -> Result<(PolarizationType, PeriodMatrix), Error> {
        match (&self.tau, &self.d) {
            (Some(path), d) => {
                let (tau, file_d) = load_period_matrix(path)?;
                if let Some(d) = d {
                    if *d != file_d {
                        return Err(Error::Precondition(format!("--type {d} disagrees with file type {file_d}")));
                    }
                }
                Ok((file_d, tau))
            }
            (None, Some(d)) => Ok((d.clone(), random_siegel(d.g(), self.seed, self.spread))),
            (None, None) => Err(Error::Precondition("need --type or --tau".into())),
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    tau: TauArgs,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Random,
    File,
    DiagonalProduct,
    PerturbedProduct,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "type", value_name = "D")]
    d: Option<PolarizationType>,
    /// Period matrix file (file mode).
    #[arg(long)]
    tau: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    /// Number of period matrices; defaults to 1 in file mode, 100 otherwise.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Random)]
    mode: Mode,
    /// Largest off-diagonal perturbation in perturbed-product mode.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
    /// Output directory; falls back to $THETAMULT_OUT_DIR, then `thetamult-out`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-13)]
    eps: f64,
    #[arg(long, default_value_t = 5)]
    samples: usize,
    /// Only genus-one fixtures.
    #[arg(long)]
    g1_only: bool,
    /// Perturb one matrix entry so that the oracle comparison must fail.
    #[arg(long, hide = true)]
    sabotage: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Formula,
    Interpolation,
}

#[derive(Args)]
struct DumpMatrixArgs {
    #[command(flatten)]
    tau: TauArgs,
    #[arg(long, value_enum, default_value_t = Source::Formula)]
    source: Source,
    /// Sample count for the interpolation oracle (default 3 * rows).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::InvalidPolarization(_)
        | Error::DimensionMismatch(_)
        | Error::InvalidTolerance(_)
        | Error::Precondition(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::NotSymmetric { .. }
        | Error::NotPositive { .. }
        | Error::SizeLimit { .. } => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

/// Writes `value` as pretty JSON to `out/name` if an output directory was
/// given, otherwise to stdout.
fn emit<T: Serialize>(value: &T, out: Option<&Path>, name: &str) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn env_out(flag: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    report: &'a thetamult::multmap::InjectivityReport,
    block_structure: thetamult::multmap::BlockStructure,
}

fn check(args: &CheckArgs) -> Result<u8, Error> {
    let (d, tau) = args.tau.resolve()?;
    let report = match injectivity_report(&d, &tau, args.tau.eps, args.rank_tol) {
        Ok(r) => r,
        Err(e @ Error::VerdictMismatch { .. }) => {
            eprintln!("{e}");
            return Ok(EXIT_NUMERICAL);
        }
        Err(e) => return Err(e),
    };
    let block_structure = block_structure_check(&d, &tau, args.tau.eps)?;
    emit(
        &CheckOutput {
            report: &report,
            block_structure,
        },
        env_out(&args.out).as_deref(),
        "check.json",
    )?;
    Ok(if report.block_verdict == Verdict::FullRank {
        EXIT_OK
    } else {
        EXIT_DEFICIENT
    })
}

fn sweep(args: &SweepArgs) -> Result<u8, Error> {
    let (d, tau_mode) = match args.mode {
        Mode::File => {
            let path = args
                .tau
                .clone()
                .ok_or_else(|| Error::Precondition("file mode needs --tau".into()))?;
            let (_, file_d) = load_period_matrix(&path)?;
            (args.d.clone().unwrap_or(file_d), TauMode::File { path })
        }
        other => {
            let d = args
                .d
                .clone()
                .ok_or_else(|| Error::Precondition("--type is required".into()))?;
            let mode = match other {
                Mode::Random => TauMode::Random,
                Mode::DiagonalProduct => TauMode::DiagonalProduct,
                Mode::PerturbedProduct => TauMode::PerturbedProduct { delta: args.delta },
                Mode::File => unreachable!(),
            };
            (d, mode)
        }
    };
    let default_samples = if matches!(tau_mode, TauMode::File { .. }) { 1 } else { 100 };
    let cfg = SweepConfig {
        d,
        n_samples: args.samples.unwrap_or(default_samples),
        seed: args.seed,
        eps: args.eps,
        rank_tol: args.rank_tol,
        spread: args.spread,
        tau_mode,
    };
    let report = run_sweep(&cfg, args.jobs)?;
    let out = env_out(&args.out).unwrap_or_else(|| PathBuf::from("thetamult-out"));
    report.write(&out)?;
    let a = &report.summary.aggregate;
    println!(
        "type {} mode {} samples {}: injective {} deficient {} mismatch {} leak {} error {}",
        cfg.d,
        cfg.tau_mode.name(),
        a.n_samples,
        a.n_injective,
        a.n_deficient,
        a.n_verdict_mismatch,
        a.n_block_leak,
        a.n_error
    );
    println!("report written to {}", out.display());
    Ok(report.exit_code() as u8)
}

fn verify(args: &VerifyArgs) -> Result<u8, Error> {
    let cfg = VerifyConfig {
        seed: args.seed,
        eps: args.eps,
        g1_only: args.g1_only,
        samples_per_fixture: args.samples,
        sabotage: args.sabotage,
    };
    let report = verify_identities(&cfg);
    for c in &report.checks {
        eprintln!(
            "{} {:<26} residual {:.3e} (tol {:.0e}){}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tolerance,
            c.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default()
        );
    }
    if let Some(dir) = env_out(&args.out) {
        emit(&report, Some(&dir), "verify.json")?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_NUMERICAL })
}

fn dump_groups(args: &TypeArgs) -> Result<u8, Error> {
    let dump = ThetaGroup::new(&args.d)?.dump()?;
    emit(&dump, env_out(&args.out).as_deref(), "groups.json")?;
    Ok(EXIT_OK)
}

fn dump_matrix(args: &DumpMatrixArgs) -> Result<u8, Error> {
    let (d, tau) = args.tau.resolve()?;
    let m = match args.source {
        Source::Formula => mult_matrix_formula(&d, &tau, args.tau.eps)?,
        Source::Interpolation => {
            let n = args.samples.unwrap_or(3 * (1usize << d.g()) * d.h0() as usize);
            mult_matrix_interpolation(&d, &tau, args.tau.eps, n, args.tau.seed)?
        }
    };
    emit(&m.dump(), env_out(&args.out).as_deref(), "matrix.json")?;
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Check(a) => check(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::DumpGroups(a) => dump_groups(a),
        Command::DumpMatrix(a) => dump_matrix(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
