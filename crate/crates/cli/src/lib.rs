//! Command-line front end: configuration loading, the four commands, run
//! manifests and atomic output.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::CommandReport;
use error::CliError;
use manifest::RunManifest;
use output::OutputDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Horizons, surface gravities and the threshold β.
    Params,
    /// Trapping census for T-orthogonal null data, plus the photon-orbit contrast.
    Trap,
    /// Quasinormal modes in a frequency window.
    Qnm,
    /// Convexity, escape, radial-point, Σ± and ergoregion claims over a parameter matrix.
    Certify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Params => "params",
            Command::Trap => "trap",
            Command::Qnm => "qnm",
            Command::Certify => "certify",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kds", version, about = "Kerr-de Sitter trapping certificates and quasinormal spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration, or a manifest from an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the seed from the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "kds-out")]
    pub out: PathBuf,
}

/// Outcome of one invocation after the manifest has been written.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Option<CommandReport>,
    pub error: Option<CliError>,
    pub manifest: Option<RunManifest>,
}

/// Honours KDS_THREADS by sizing the global rayon pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("KDS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("KDS_THREADS must be a positive integer, got {v:?}")))?;
    // A pool that already exists keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> RunOutcome {
    let fail = |e: CliError| RunOutcome {
        exit_code: e.exit_code(),
        report: None,
        error: Some(e),
        manifest: None,
    };
    let Some(path) = &cli.config else {
        return fail(CliError::Usage("--config <file> is required".into()));
    };
    let loaded = match config::load(path, cli.seed) {
        Ok(l) => l,
        Err(e) => return fail(e),
    };
    let mut out = match OutputDir::create(&cli.out) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let started_at = manifest::now();
    let cfg = &loaded.config;
    let result = match cli.command {
        Command::Params => commands::params::run(cfg, &mut out),
        Command::Trap => commands::trap::run(cfg, loaded.seed, &mut out),
        Command::Qnm => commands::qnm::run(cfg, &mut out),
        Command::Certify => commands::certify::run(cfg, loaded.seed, &mut out),
    };
    let (mut report, error) = match result {
        Ok(mut r) => {
            let e = r.failure.take();
            (Some(r), e)
        }
        Err(e) => (None, Some(e)),
    };
    let exit_code = error.as_ref().map_or(0, |e| e.exit_code());
    let mut manifest = RunManifest {
        tool: manifest::TOOL.into(),
        version: manifest::VERSION.into(),
        command: cli.command.name().into(),
        seed: loaded.seed,
        config: loaded.config.clone(),
        started_at,
        finished_at: String::new(),
        exit_code,
        verdicts: report.as_ref().map(|r| r.verdicts.clone()).unwrap_or_default(),
        outputs: out.written().to_vec(),
    };
    manifest.finished_at = manifest::now();
    if let Err(e) = out.write_json("manifest.json", &manifest) {
        return fail(e);
    }
    if let Some(r) = report.as_mut() {
        r.summary.push(format!("wrote {}", out.path().display()));
    }
    RunOutcome {
        exit_code,
        report,
        error,
        manifest: Some(manifest),
    }
}
