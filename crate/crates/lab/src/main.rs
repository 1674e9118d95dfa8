use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kds_lab::config::{RunType, ScenarioConfig};
use kds_lab::error::{ConfigError, LabError, LabResult};
use kds_lab::presets::{preset, PRESETS};
use kds_lab::run::execute;

/// Linear waves on slowly rotating Kerr-de Sitter black holes.
///
/// Each run reads a `key = value` scenario file (or a built-in preset),
/// writes CSV/JSON artifacts and a manifest to its output directory, and
/// exits 0 on success, 2 on a configuration error and 1 on any other
/// failure, printing a one-line JSON error record to stderr.
#[derive(Parser)]
#[command(name = "kds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Scenario file.
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario (see `kds list`).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Horizon radii, surface gravities and α as a JSON-lines record.
    Horizons(Source),
    /// Certify the red-shift multiplier on M_δ ∖ K_2δ, with a negative control.
    CertifyRedshift(Source),
    /// Forward solution on the extended domain, one task per azimuthal mode.
    Evolve(Source),
    /// Near-horizon solve with Dirichlet data on ∂K_2δ.
    EvolveDirichlet(Source),
    /// Fundamental quasinormal modes for the configured (l, m).
    Qnm(Source),
    /// Argument-principle scan of a box in the ω plane.
    GapScan(Source),
    /// Exponential fit of a column of a CSV file.
    DecayFit(Source),
    /// Time-domain decay rate against the spectral decay rate.
    Crosscheck(Source),
    /// Refinement study of the flat benchmark.
    Convergence(Source),
    /// List the built-in scenarios.
    List {
        /// Print the full configuration of one preset.
        #[arg(long)]
        show: Option<String>,
    },
}

fn load(run: RunType, src: &Source) -> LabResult<(ScenarioConfig, String)> {
    let (text, base) = match (&src.config, &src.preset) {
        (_, Some(name)) => {
            let p = preset(name).ok_or_else(|| ConfigError::key("preset", &format!("no preset named `{name}`")))?;
            if p.run != run {
                return Err(ConfigError::key("run", &format!("preset `{name}` is a `{}` scenario", p.run)).into());
            }
            (p.text.to_string(), PathBuf::from("."))
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(LabError::io(path))?;
            let base = path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
            (text, base)
        }
        (None, None) => return Err(ConfigError::key("config", "give a scenario file or --preset").into()),
    };
    Ok((ScenarioConfig::from_text(&text, run, &base)?, text))
}

fn run(run: RunType, src: &Source) -> LabResult<()> {
    let (cfg, text) = load(run, src)?;
    let outcome = execute(&cfg, &text)?;
    let mut stdout = std::io::stdout().lock();
    if run == RunType::Horizons {
        if let Some(rec) = outcome.artifacts.get("horizons.jsonl") {
            let _ = stdout.write_all(rec);
        }
    }
    let dir = cfg.resolved_output_dir();
    for name in outcome.artifacts.names() {
        let _ = writeln!(stdout, "wrote {}", dir.join(name).display());
    }
    let _ = writeln!(stdout, "wrote {}", dir.join(kds_lab::manifest::MANIFEST_FILE).display());
    Ok(())
}

fn list(show: Option<&str>) -> LabResult<()> {
    let mut out = std::io::stdout().lock();
    match show {
        None => {
            for p in PRESETS {
                let _ = writeln!(out, "{:<20} {:<18} {}", p.name, p.run.name(), p.description);
            }
        }
        Some(name) => {
            let p = preset(name).ok_or_else(|| ConfigError::key("preset", &format!("no preset named `{name}`")))?;
            let _ = out.write_all(p.text.as_bytes());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Horizons(s) => run(RunType::Horizons, s),
        Command::CertifyRedshift(s) => run(RunType::CertifyRedshift, s),
        Command::Evolve(s) => run(RunType::Evolve, s),
        Command::EvolveDirichlet(s) => run(RunType::EvolveDirichlet, s),
        Command::Qnm(s) => run(RunType::Qnm, s),
        Command::GapScan(s) => run(RunType::GapScan, s),
        Command::DecayFit(s) => run(RunType::DecayFit, s),
        Command::Crosscheck(s) => run(RunType::Crosscheck, s),
        Command::Convergence(s) => run(RunType::Convergence, s),
        Command::List { show } => list(show.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
