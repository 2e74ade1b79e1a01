//! `scatlen`: batch commands over the scattering-length library.
//!
//! Exit status: 0 on success, 2 when some row is flagged (unconverged, near
//! a threshold, outside tolerance), 64 on usage errors, 70 on internal
//! failures.

mod commands;
mod grid;
mod manifest;
mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::*;
use manifest::{fixture_hashes, manifest_path, sha256_hex, RunManifest};
use output::{Format, Rendered};

const EXIT_FLAGGED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

const DEFAULT_FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures");

#[derive(Parser, Debug)]
#[command(name = "scatlen", version, about = "Zero-energy s-wave scattering lengths of the Gaussian well")]
struct Cli {
    /// Output format; curves default to csv, structured results to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file (plus a `.manifest.json` beside it) instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Fixture directory.
    #[arg(long, global = true, env = "SCATLEN_FIXTURES")]
    fixtures: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Scattering length at one coupling or on a grid.
    Compute(ComputeArgs),
    /// Couplings at which bound states appear.
    Poles(PolesArgs),
    /// Fit a pole-sum model of order n.
    Fit(FitArgs),
    /// Regenerate the published W and α and compare with the fixtures.
    Tables(TablesArgs),
    /// Relative error as one solver parameter varies.
    Converge(ConvergeArgs),
    /// Model error when the first 3D threshold is rounded.
    Sensitivity(SensitivityArgs),
    /// ODE, integral-equation and (1D) series values side by side.
    Oracle(OracleArgs),
    /// Re-run the command recorded in a manifest and check the output hash.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Internal(format!("{}: {e}", path.display()))
}

fn parse(argv: &[String]) -> Result<Cli, clap::Error> {
    Cli::try_parse_from(std::iter::once("scatlen".to_string()).chain(argv.iter().cloned()))
}

fn dispatch(command: &Command, fixtures: &Path) -> Result<Rendered, Failure> {
    match command {
        Command::Compute(a) => compute(a),
        Command::Poles(a) => poles(a),
        Command::Fit(a) => fit(a),
        Command::Tables(a) => tables(a, fixtures),
        Command::Converge(a) => converge(a),
        Command::Sensitivity(a) => sensitivity(a),
        Command::Oracle(a) => oracle(a),
        Command::Replay { .. } => Err(Failure::Usage("a manifest cannot record a replay".into())),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Internal(format!("stdout: {e}"))),
    }
}

fn run(cli: &Cli, argv: &[String]) -> Result<bool, Failure> {
    let fixtures = cli.fixtures.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_FIXTURES));
    if let Command::Replay { manifest } = &cli.command {
        return replay(manifest, &fixtures, cli.out.as_deref());
    }
    let start = Instant::now();
    let rendered = dispatch(&cli.command, &fixtures)?;
    let text = rendered.text(cli.format);
    emit(text, cli.out.as_deref())?;
    if let Some(out) = &cli.out {
        let params = serde_json::to_value(&cli.command).expect("arguments serialize");
        let manifest = RunManifest {
            command: rendered.schema.split('.').next().unwrap_or_default().to_string(),
            argv: argv.to_vec(),
            params,
            schema: rendered.schema.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            fixtures: fixture_hashes(&fixtures).map_err(|e| io_failure(&fixtures, e))?,
            output_sha256: sha256_hex(text.as_bytes()),
            duration_secs: start.elapsed().as_secs_f64(),
        };
        let path = manifest_path(out);
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        fs::write(&path, json).map_err(|e| io_failure(&path, e))?;
    }
    Ok(rendered.flagged)
}

fn replay(path: &Path, fixtures: &Path, out: Option<&Path>) -> Result<bool, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let recorded = parse(&manifest.argv).map_err(|e| Failure::Usage(e.to_string()))?;
    let fixtures = recorded.fixtures.clone().unwrap_or_else(|| fixtures.to_path_buf());
    let now = fixture_hashes(&fixtures).map_err(|e| io_failure(&fixtures, e))?;
    if now != manifest.fixtures {
        eprintln!("warning: fixture files differ from the recorded run");
    }
    let rendered = dispatch(&recorded.command, &fixtures)?;
    let output = rendered.text(recorded.format);
    let digest = sha256_hex(output.as_bytes());
    if digest != manifest.output_sha256 {
        return Err(Failure::Internal(format!(
            "output hash {digest} differs from recorded {}",
            manifest.output_sha256
        )));
    }
    emit(output, out)?;
    eprintln!("reproduced {}", manifest.output_sha256);
    Ok(rendered.flagged)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli, &argv) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_FLAGGED),
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Internal(m) => eprintln!("internal error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
