//! Command-line harness for `qmaxent`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 domain error (energy outside
//! the spectral span, degenerate Hamiltonian), 4 verification violation.

pub mod config;
pub mod report;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmaxent::channels::kraus_from_choi;
use qmaxent::entropy::{conditional_entropy, von_neumann_entropy};
use qmaxent::io::{from_json, write_json, ChannelFile, ChoiFile, StateFile};
use qmaxent::maxent::{
    channel_entropy_with, min_output_entropy, verify_fact1, verify_theorem1, ChannelEntropyOptions, TheoremOptions,
};
use qmaxent::states::derive_seed;
use qmaxent::thermo::{beta_from_energy, thermal_state};
use qmaxent::{ComplexMatrix, EntropyValue, Error, KrausChannel, Units};

use crate::config::{load_hamiltonian, ExperimentConfig};
use crate::report::EnergyResult;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

/// Default tolerance of the `beta(E)` solve.
const THERMAL_TOL: f64 = 1e-12;
/// Eigenvalues of a Choi matrix below this are dropped when extracting Kraus
/// operators; more negative ones make the file invalid.
const CHOI_TOL: f64 = 1e-10;

/// A failure with the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { exit_code: EXIT_INPUT, message: message.into() }
    }

    fn io(path: &Path, e: impl fmt::Display) -> Self {
        Self::input(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit_code = match e {
            Error::EnergyOutOfRange { .. } | Error::DegenerateHamiltonian(_) => EXIT_DOMAIN,
            _ => EXIT_INPUT,
        };
        Self { exit_code, message: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Nats,
    Bits,
}

impl From<UnitsArg> for Units {
    fn from(u: UnitsArg) -> Self {
        match u {
            UnitsArg::Nats => Units::Nats,
            UnitsArg::Bits => Units::Bits,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qmaxent", version, about = "Channel entropy and maximum-entropy checks")]
pub struct Cli {
    /// Seed for all randomness (0 when omitted; `verify` uses the config seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Solver tolerance: the pattern-search step for optimizations, the
    /// relative tolerance of the beta(E) solve for `thermal`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Unit for printed entropies.
    #[arg(long, global = true, value_enum, default_value = "nats")]
    pub units: UnitsArg,
    /// Output file: the Gibbs state, the witness state, or the report.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Von Neumann entropy of a state file.
    EntropyState {
        file: PathBuf,
    },
    /// Gibbs state of a Hamiltonian at a given beta or mean energy.
    Thermal(ThermalArgs),
    /// Channel entropy certificate of a Kraus or Choi channel file.
    ChannelEntropy {
        file: PathBuf,
        #[arg(long, default_value_t = qmaxent::maxent::DEFAULT_RESTARTS)]
        restarts: usize,
    },
    /// Minimum output entropy of a channel file.
    MinOutputEntropy {
        file: PathBuf,
        #[arg(long, default_value_t = qmaxent::maxent::DEFAULT_RESTARTS)]
        restarts: usize,
    },
    /// Run the maximum-entropy verification described by a config file.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ThermalArgs {
    /// Preset name (qubit01, qutrit012, qubitX, random:<dim>:<seed>) or file.
    #[arg(long)]
    pub hamiltonian: String,
    #[arg(long, conflicts_with = "energy", required_unless_present = "energy", allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let units = Units::from(cli.units);
    match &cli.command {
        Command::EntropyState { file } => cmd_entropy_state(file, units, out),
        Command::Thermal(args) => cmd_thermal(args, cli, units, out),
        Command::ChannelEntropy { file, restarts } => cmd_channel_entropy(file, *restarts, cli, units, out),
        Command::MinOutputEntropy { file, restarts } => cmd_min_output_entropy(file, *restarts, cli, units, out),
        Command::Verify { config } => cmd_verify(config, cli, out),
    }
}

fn print(out: &mut dyn Write, text: impl fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(|e| CliError::input(format!("stdout: {e}")))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn with_path(path: &Path, e: Error) -> CliError {
    let mut c = CliError::from(e);
    c.message = format!("{}: {}", path.display(), c.message);
    c
}

/// Both units, the selected one first.
fn entropy_lines(label: &str, s: EntropyValue, units: Units) -> String {
    let other = match units {
        Units::Nats => Units::Bits,
        Units::Bits => Units::Nats,
    };
    format!("{label}{}\n{label}{}", s.display(units), s.display(other))
}

fn cmd_entropy_state(file: &Path, units: Units, out: &mut dyn Write) -> Result<i32, CliError> {
    let parsed: StateFile = from_json(&read_text(file)?).map_err(|e| with_path(file, e))?;
    let rho = parsed.to_state().map_err(|e| with_path(file, e))?;
    print(out, entropy_lines("", von_neumann_entropy(&rho), units))?;
    if parsed.dims.is_some() {
        let bip = parsed.to_bipartite().map_err(|e| with_path(file, e))?;
        print(out, entropy_lines("S(A|R) = ", conditional_entropy(&bip), units))?;
    }
    Ok(0)
}

fn format_matrix(m: &ComplexMatrix) -> String {
    let mut lines = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let z = m[(i, j)];
                if z.im == 0.0 {
                    format!("{:.12}", z.re)
                } else {
                    format!("{:.12}{:+.12}i", z.re, z.im)
                }
            })
            .collect();
        lines.push(format!("  [{}]", row.join(", ")));
    }
    lines.join("\n")
}

fn cmd_thermal(args: &ThermalArgs, cli: &Cli, units: Units, out: &mut dyn Write) -> Result<i32, CliError> {
    let h = load_hamiltonian(&args.hamiltonian, None)?;
    let beta = match (args.beta, args.energy) {
        (Some(b), None) => b,
        (None, Some(e)) => beta_from_energy(&h, e, cli.tol.unwrap_or(THERMAL_TOL))?.beta,
        _ => return Err(CliError::input("thermal: give exactly one of --beta and --energy")),
    };
    let (gamma, spec) = thermal_state(&h, beta)?;
    print(out, format!("beta = {:.12e}", spec.beta))?;
    print(out, format!("Z = {:.12e}", spec.partition))?;
    print(out, format!("ln Z = {:.12e}", spec.log_partition))?;
    print(out, format!("E = {:.12}", spec.energy))?;
    print(out, entropy_lines("S = ", von_neumann_entropy(&gamma), units))?;
    print(out, format!("gamma =\n{}", format_matrix(gamma.matrix())))?;
    if let Some(path) = &cli.output {
        write_json(path, &StateFile::from_state(&gamma))?;
    }
    Ok(0)
}

/// Reads a Kraus file (`kraus` key) or a Choi file (`choi` key).
pub fn load_channel(file: &Path) -> Result<KrausChannel, CliError> {
    let text = read_text(file)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: parse error: {e}", file.display())))?;
    let is_choi = value.get("choi").is_some() && value.get("kraus").is_none();
    let ch = if is_choi {
        let parsed: ChoiFile = from_json(&text).map_err(|e| with_path(file, e))?;
        let choi = parsed.to_choi().map_err(|e| with_path(file, e))?;
        kraus_from_choi(&choi, CHOI_TOL)
    } else {
        let parsed: ChannelFile = from_json(&text).map_err(|e| with_path(file, e))?;
        parsed.to_channel()
    };
    ch.map_err(|e| with_path(file, e))
}

fn check_restarts(restarts: usize) -> Result<(), CliError> {
    if restarts == 0 {
        return Err(CliError::input("--restarts must be at least 1"));
    }
    Ok(())
}

fn cmd_channel_entropy(
    file: &Path,
    restarts: usize,
    cli: &Cli,
    units: Units,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    check_restarts(restarts)?;
    let ch = load_channel(file)?;
    let mut opts = ChannelEntropyOptions { restarts, channel_id: file.display().to_string(), ..Default::default() };
    if let Some(tol) = cli.tol {
        opts.tol = tol;
    }
    let cert = channel_entropy_with(&ch, &opts, cli.seed.unwrap_or(0))?;
    print(out, entropy_lines("channel entropy = ", EntropyValue(cert.value), units))?;
    print(out, format!("converged = {}", cert.converged))?;
    print(out, format!("restarts = {}", cert.restarts_used))?;
    print(out, format!("evaluations = {}", cert.evaluations))?;
    if let Some(path) = &cli.output {
        let d = ch.dim_in();
        write_json(path, &StateFile::from_pure(&cert.witness, Some([d, d])))?;
        print(out, format!("witness written to {}", path.display()))?;
    }
    Ok(0)
}

fn cmd_min_output_entropy(
    file: &Path,
    restarts: usize,
    cli: &Cli,
    units: Units,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    check_restarts(restarts)?;
    let ch = load_channel(file)?;
    let m = min_output_entropy(&ch, restarts, cli.seed.unwrap_or(0))?;
    print(out, entropy_lines("min output entropy = ", EntropyValue(m.value), units))?;
    print(out, format!("converged = {}", m.converged))?;
    if let Some(path) = &cli.output {
        write_json(path, &StateFile::from_pure(&m.witness, None))?;
        print(out, format!("witness written to {}", path.display()))?;
    }
    Ok(0)
}

/// Runs every target energy of a config and renders the report. Energy `k`
/// draws its randomness from `derive_seed(seed, k)`.
pub fn run_verify(config: &ExperimentConfig, base: Option<&Path>, tol: Option<f64>) -> Result<(String, bool), CliError> {
    let resolved = config.clone().resolve(base)?;
    let h = &resolved.hamiltonian;
    let cfg = &resolved.config;
    let mut opts = TheoremOptions { slack: cfg.slack, ..Default::default() };
    if let Some(t) = tol {
        opts.tol = t;
    }
    let mut results = Vec::with_capacity(resolved.energies.len());
    for (k, &e) in resolved.energies.iter().enumerate() {
        let s = derive_seed(cfg.seed, k as u64);
        let fact1 = verify_fact1(h, e, cfg.fact1_samples, derive_seed(s, 0))?;
        let theorem = verify_theorem1(h, e, cfg.samples, cfg.restarts, derive_seed(s, 1), &opts)?;
        results.push(EnergyResult { fact1, theorem });
    }
    let passed = results.iter().all(EnergyResult::passed);
    Ok((report::render(&cfg.hamiltonian, h.dim(), cfg.seed, &results), passed))
}

fn cmd_verify(config_path: &Path, cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut config = ExperimentConfig::load(config_path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let base = config_path.parent().filter(|p| !p.as_os_str().is_empty());
    let target = cli.output.clone().or_else(|| {
        config.output.as_ref().map(|p| match base {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.clone(),
        })
    });
    let (text, passed) = run_verify(&config, base, cli.tol)?;
    match &target {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
            let summary = text.split_once("## Summary").map_or("", |(_, s)| s);
            print(out, format!("report written to {}", path.display()))?;
            print(out, summary.trim())?;
        }
        None => print(out, text.trim_end())?,
    }
    Ok(if passed { 0 } else { EXIT_VIOLATION })
}
