use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use tpg_nav::Error;

mod commands;
mod config;

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "tpg-nav", version, about = "Evolve and analyse tangled program graph agents in a first-person labyrinth")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// TOML file with run settings; missing keys use the defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory, overriding the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run both training phases and write the champion and run log.
    Train,
    /// Continue training from the checkpoint in the output directory.
    Resume,
    /// Run the per-region test protocol and the sign test.
    Test { champion: PathBuf },
    /// Release the champion in empty rooms and plot its paths.
    Probe {
        champion: PathBuf,
        /// One probe per labyrinth room surface, plus a composite plot.
        #[arg(long)]
        all_surfaces: bool,
    },
    /// Plot the paths taken from the centre of every spawn region.
    Paths { champion: PathBuf },
    /// Print size and state-footprint statistics of a champion.
    Report { champion: PathBuf },
}

fn load_config(opts: &GlobalOpts) -> tpg_nav::Result<RunConfig> {
    let mut cfg = match &opts.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &opts.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> tpg_nav::Result<()> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let cfg = load_config(&cli.global)?;
    match cli.command {
        Command::Train => commands::train(&cfg, false),
        Command::Resume => commands::train(&cfg, true),
        Command::Test { champion } => commands::test(&cfg, &champion),
        Command::Probe { champion, all_surfaces } => commands::probe(&cfg, &champion, all_surfaces),
        Command::Paths { champion } => commands::paths(&cfg, &champion),
        Command::Report { champion } => commands::report(&cfg, &champion),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
