use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use scw_qkd::config::{DetectorSection, RunConfig};
use scw_qkd::detection::DetectorPreset;
use scw_qkd::keyrate::Protocol;
use scw_qkd::sweep::{self, Command};
use scw_qkd::{DMode, Error};

#[derive(Parser)]
#[command(name = "scw-qkd", version, about = "Key rate and QBER tables for subcarrier-wave QKD links")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML run configuration; the built-in defaults are used without it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    detector: Option<DetectorArg>,

    #[arg(long, global = true, value_enum)]
    protocol: Option<ProtocolArg>,

    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// E, G and QBER over the sweep.
    QberCurve,
    /// Holevo bound and secure key rate per protocol over the sweep.
    KeyrateCurve,
    /// Rate-maximising sideband photon number over the sweep.
    OptimalMu,
    /// Monte Carlo session checked against the analytic channel.
    Validate,
    /// BB84-OSD against two-detector BB84 over the sweep.
    CompareBb84,
}

#[derive(ValueEnum, Clone, Copy)]
enum DetectorArg {
    Snspd,
    Apd,
}

#[derive(ValueEnum, Clone, Copy)]
enum ProtocolArg {
    B92,
    Bb84Osd,
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    Exact,
    Asymptotic,
}

fn configure(cli: &Cli) -> scw_qkd::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(d) = cli.detector {
        cfg.detector = DetectorSection::preset(match d {
            DetectorArg::Snspd => DetectorPreset::Snspd,
            DetectorArg::Apd => DetectorPreset::Apd,
        });
    }
    if let Some(p) = cli.protocol {
        cfg.protocols = vec![match p {
            ProtocolArg::B92 => Protocol::B92,
            ProtocolArg::Bb84Osd => Protocol::Bb84Osd,
        }];
    }
    if let Some(m) = cli.mode {
        cfg.mode = match m {
            ModeArg::Exact => DMode::Exact,
            ModeArg::Asymptotic => DMode::Asymptotic,
        };
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.out.is_some() {
        cfg.output = cli.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> scw_qkd::Result<()> {
    let cfg = configure(cli)?;
    let command = match cli.command {
        Cmd::QberCurve => Command::QberCurve,
        Cmd::KeyrateCurve => Command::KeyrateCurve,
        Cmd::OptimalMu => Command::OptimalMu,
        Cmd::Validate => Command::Validate,
        Cmd::CompareBb84 => Command::CompareBb84,
    };
    let out: Box<dyn Write> = match &cfg.output {
        Some(path) => {
            let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(io::stdout().lock()),
    };
    sweep::run(command, &cfg, out, io::stderr())
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("error kind={kind} message={message:?}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            return fail("usage", text.lines().next().unwrap_or("").trim_start_matches("error: "));
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
