use std::process::ExitCode;

use clap::Parser;
use rqi_cli::config::{parse_flat, parse_overrides};
use rqi_cli::{run, CliError, Command, RunConfig};

/// Reproducible runs driven by flat `key = value` config files.
///
/// Usage: rqi <COMMAND> [--config FILE] [--output FILE] [--key value ...]
///
/// Overrides take precedence over the config file. A manifest with every
/// resolved parameter is written to FILE.manifest, or to stderr when the
/// output goes to stdout.
#[derive(Parser)]
#[command(name = "rqi", version)]
struct Cli {
    /// cow-table, transport-fermion, transport-photon, measure, teleport,
    /// qrf-decohere, qrf-overlap or bhd
    command: Command,
    #[arg(
        trailing_var_arg = true,
        allow_hyphen_values = true,
        value_name = "--key value"
    )]
    args: Vec<String>,
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let overrides = parse_overrides(&cli.args)?;
    let mut layers = Vec::new();
    if let Some((_, path)) = overrides.iter().find(|(k, _)| k == "config") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("{path}: {e}")))?;
        let file = parse_flat(&text)?;
        if file.iter().any(|(k, _)| k == "config") {
            return Err(CliError::config(
                "config",
                "config files cannot include other files",
            ));
        }
        layers.push(file);
    }
    layers.push(overrides);
    RunConfig::resolve(cli.command, &layers)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let out = run(&cfg)?;
    match &cfg.output_path {
        Some(path) => {
            std::fs::write(path, out)?;
            std::fs::write(format!("{path}.manifest"), cfg.manifest())?;
        }
        None => {
            print!("{out}");
            eprint!("{}", cfg.manifest());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rqi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
