mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use qco_core::{Error, ErrorCategory};

#[derive(Parser)]
#[command(
    name = "qco",
    version,
    about = "Coherent tunnelling of a Xe atom in a biased STM junction"
)]
struct Cli {
    /// TOML run configuration; every key is optional.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    /// Override one configuration value, e.g. `--set scan.u_min=-1.15`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Output directory (overrides QCO_OUT_DIR and `output.dir`).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    /// Validate the configuration and exit without computing.
    #[arg(long, global = true)]
    dry_run: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Junction potential curves and the packets `ψ₀`, `ψ_M`.
    Potential,
    /// `max ρ` against bias, with peak refinement and two-level fits.
    Scan,
    /// Exact evolution of `ψ₀` at the working bias.
    Evolve,
    /// Grid spectrum and the doublet carrying `ψ₀`.
    Spectrum,
    /// Quasi-classical orbit against the exact packet.
    Qc {
        #[command(subcommand)]
        action: Option<QcAction>,
    },
}

#[derive(Subcommand, Clone, Copy)]
enum QcAction {
    /// Effective potential `V_av(x, v)`.
    Surface,
    /// Switching orbit and confinement edge.
    Switch,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Potential => "potential",
            Command::Scan => "scan",
            Command::Evolve => "evolve",
            Command::Spectrum => "spectrum",
            Command::Qc { action: None } => "qc",
            Command::Qc { action: Some(QcAction::Surface) } => "qc surface",
            Command::Qc { action: Some(QcAction::Switch) } => "qc switch",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        ErrorCategory::Config => 1,
        ErrorCategory::PhysicsRegime | ErrorCategory::NumericalInstability => 2,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error[{}]: {e}", e.category().as_str());
    ExitCode::from(exit_code(e))
}

/// Builds what the command needs from the configuration without running it.
fn check(cfg: &config::RunConfig, command: &Command) -> qco_core::Result<()> {
    cfg.grid_spec()?;
    match command {
        Command::Scan => cfg.scan_config().map(|_| ()),
        Command::Potential | Command::Evolve | Command::Spectrum => {
            cfg.junction(cfg.potential.bias).map(|_| ())
        }
        Command::Qc { .. } => cfg.vpol().map(|_| ()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = match config::load(cli.config.as_deref(), &cli.overrides) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Err(e) = check(&cfg, &cli.command) {
        return fail(&e);
    }
    let name = cli.command.name();
    if cli.dry_run {
        println!("{name}: configuration ok");
        return ExitCode::SUCCESS;
    }
    let dir = cfg.out_dir(cli.out.as_deref());
    if let Err(e) = output::ensure_dir(&dir) {
        return fail(&e);
    }

    let start = Instant::now();
    let result = match cli.command {
        Command::Potential => commands::potential(&cfg, &dir),
        Command::Scan => commands::scan(&cfg, &dir),
        Command::Evolve => commands::evolve(&cfg, &dir),
        Command::Spectrum => commands::spectrum(&cfg, &dir),
        Command::Qc { action: None } => commands::qc(&cfg, &dir),
        Command::Qc { action: Some(QcAction::Surface) } => commands::qc_surface(&cfg, &dir),
        Command::Qc { action: Some(QcAction::Switch) } => commands::qc_switch(&cfg, &dir),
    };
    let wall = start.elapsed().as_secs_f64();
    if let Err(e) = output::write_manifest(&dir, name, &cfg, wall, result.as_ref()) {
        return fail(&e);
    }
    match result {
        Ok(report) => {
            for line in &report.notes {
                println!("{line}");
            }
            println!("{name}: wrote {} files to {} in {wall:.2} s", report.outputs.len(), dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
