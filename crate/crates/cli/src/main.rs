//! `dqdsim`: figure-data sweeps and validation suites for the double-dot
//! exchange simulator.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dqdsim_core::config::{RunConfig, SchemeKind};
use dqdsim_core::experiments::{run_experiment, Experiment, ExperimentSpec, GridSpec, Overrides};
use dqdsim_core::hamiltonian::{AssemblyMode, HamiltonianOptions};
use dqdsim_core::integrals::i0e;
use dqdsim_core::validation::{run_validation, ValidationOptions};

#[derive(Debug, Parser)]
#[command(name = "dqdsim", version, about = "Exchange and charge noise of a double-dot singlet-triplet qubit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// `key = value` config file; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    scheme: Option<SchemeArg>,

    /// Detuning grid in meV.
    #[arg(long, global = true, value_name = "LO:HI:STEP")]
    eps_range: Option<GridSpec>,

    /// Barrier grid in meV.
    #[arg(long, global = true, value_name = "LO:HI:STEP")]
    xi_range: Option<GridSpec>,

    /// Impurity position in nm.
    #[arg(long, global = true, value_name = "X_NM,Y_NM", value_parser = parse_pair, allow_hyphen_values = true)]
    impurity: Option<[f64; 2]>,

    /// Impurity charge in units of e.
    #[arg(long, global = true, value_name = "Q", allow_hyphen_values = true)]
    charge_e: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Paper)]
    mode: ModeArg,

    /// Exchange target in MHz (upper end for matched-J curves).
    #[arg(long = "J-mhz", global = true, value_name = "TARGET")]
    j_mhz: Option<f64>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest two levels and J vs ε (or ξ with --scheme barrier).
    Spectrum,
    /// δJ/J under tilt control.
    ExchangeTilt,
    /// δJ/J under barrier control, with a zoom block.
    ExchangeBarrier,
    /// χ at matched J from J₀ upward.
    NoiseCompare,
    /// Quality factors at matched J.
    Qfactor,
    /// δJ/J at matched J with the impurity moved along x, y and xy.
    ImpurityScan,
    /// Matched-J comparison with a weak impurity close to the dots.
    NearImpurity,
    /// Cuts of the confinement potential along x and y.
    PotentialProfile,
    /// Oracle and invariant suites; nonzero exit on any failure.
    Validate {
        /// Subsample every randomized suite.
        #[arg(long)]
        quick: bool,
        /// Test hook: perturb the Bessel routine used by the closed forms.
        #[arg(long, hide = true)]
        corrupt_bessel: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Tilt,
    Barrier,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Full,
}

impl From<ModeArg> for AssemblyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => AssemblyMode::PaperLiteral,
            ModeArg::Full => AssemblyMode::FullSlaterCondon,
        }
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let (x, y) = s.split_once(',').ok_or("expected X_NM,Y_NM")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    Ok([num(x)?, num(y)?])
}

fn corrupted_i0e(x: f64) -> dqdsim_core::Result<f64> {
    Ok(i0e(x)? * (1.0 + 1e-4))
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            RunConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = cli.scheme {
        cfg.scheme = match s {
            SchemeArg::Tilt => SchemeKind::Tilt,
            SchemeArg::Barrier => SchemeKind::Barrier,
        };
    }
    if cli.impurity.is_some() {
        cfg.impurity_xy_nm = cli.impurity;
    }
    if cli.charge_e.is_some() {
        cfg.charge_e = cli.charge_e;
    }
    cfg.device.check().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("DQDSIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("DQDSIM_THREADS must be a positive integer, found `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    configure_threads()?;
    let config = resolve_config(cli)?;
    let experiment = match cli.command {
        Command::Spectrum => Experiment::Spectrum,
        Command::ExchangeTilt => Experiment::ExchangeTilt,
        Command::ExchangeBarrier => Experiment::ExchangeBarrier,
        Command::NoiseCompare => Experiment::NoiseCompare,
        Command::Qfactor => Experiment::Qfactor,
        Command::ImpurityScan => Experiment::ImpurityScan,
        Command::NearImpurity => Experiment::NearImpurity,
        Command::PotentialProfile => Experiment::PotentialProfile,
        Command::Validate { quick, corrupt_bessel } => {
            let options = ValidationOptions {
                quick,
                seed: cli.seed,
                bessel: if corrupt_bessel { corrupted_i0e } else { i0e },
                hamiltonian: HamiltonianOptions::default().with_mode(cli.mode.into()),
            };
            let outcome = run_validation(&config.device, &options);
            emit(&cli.out, &outcome.to_string())?;
            return Ok(outcome.passed());
        }
    };
    let overrides = Overrides {
        eps_range: cli.eps_range,
        xi_range: cli.xi_range,
        j_target_mhz: cli.j_mhz,
        mode: cli.mode.into(),
        seed: cli.seed,
    };
    let spec = ExperimentSpec::resolve(experiment, config, &overrides).map_err(|e| e.to_string())?;
    let artifact = run_experiment(&spec).map_err(|e| format!("{experiment}: {e}"))?;
    emit(&cli.out, &artifact.csv)?;
    for line in &artifact.summary {
        eprintln!("{line}");
    }
    for f in &artifact.failures {
        eprintln!("error: {f}");
    }
    Ok(artifact.succeeded())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
