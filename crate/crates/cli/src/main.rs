use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use critorbit_cli::pipeline::{output_dir, run, Stage};
use critorbit_cli::{RunConfig, EXIT_ERROR};

#[derive(Parser)]
#[command(name = "critorbit", version, about = "Critical-orbit spectra, summability scans and stability diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for sample points and test families (overrides `seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    Spectrum,
    Summability,
    Measures,
    RuelleVerify,
    Diagnose,
    Render,
    All,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_ERROR as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = cli.config else {
        return fail("--config is required");
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global() {
            return fail(e);
        }
    }
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", path.display())),
    };
    let base = path.parent().map(PathBuf::from).unwrap_or_default();
    let (cfg, map) = match RunConfig::parse(&text, &base) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let stages = match cli.command {
        Command::Spectrum => vec![Stage::Spectrum],
        Command::Summability => vec![Stage::Summability],
        Command::Measures => vec![Stage::Measures],
        Command::RuelleVerify => vec![Stage::RuelleVerify],
        Command::Diagnose => vec![Stage::Diagnose],
        Command::Render => vec![Stage::Render],
        Command::All => Stage::all(&cfg),
    };
    let out = output_dir(cli.out, &cfg);
    let seed = cli.seed.unwrap_or(cfg.seed);
    let outcome = match run(&cfg, &map, &stages, &out, seed) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for e in &outcome.errors {
        eprintln!("error: stage {:?}: {}", e.stage, e.error);
    }
    for a in &outcome.artifacts {
        println!("{}", out.join(a).display());
    }
    ExitCode::from(outcome.exit_code() as u8)
}
