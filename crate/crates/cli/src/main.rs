//! `pipeline`: runs the text-to-impulse-response pipeline stage by stage.
//!
//! Every stage reads the run config, consumes the artifacts of earlier
//! stages from the output directory, and writes its own artifacts plus a
//! manifest with SHA-256 hashes of everything read and written.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Run;
use error::CliError;

#[derive(Parser)]
#[command(name = "pipeline", version, about = "Seeded topic model to tax news to impulse responses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run config; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set lda_step1.seed=7`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Paragraph split, normalization, bigrams and vocabulary.
    Preprocess(Common),
    /// Unseeded LDA with K topics.
    #[command(name = "lda-step1")]
    LdaStep1(Common),
    /// Identify the tax topic and build the seeded step-2 prior.
    Seed(Common),
    /// LDA with K+1 topics under the seeded prior.
    #[command(name = "lda-step2")]
    LdaStep2(Common),
    /// Quarterly topic prevalence.
    Prevalence(Common),
    /// Noisy-news series and predictive F-tests.
    News(Common),
    /// Impulse responses (local projections, LP-IV, VAR) with bands.
    Lp(Common),
    /// Write the synthetic speeches and series fixture.
    Simulate(Common),
    /// Every stage from preprocess to lp, in order.
    All(Common),
    /// Print the full default config as TOML.
    Defaults,
}

type Stage = fn(&mut Run) -> Result<(), CliError>;

const STAGES: &[(&str, Stage, fn(&config::RunConfig) -> Option<u64>)] = &[
    ("preprocess", commands::preprocess, |_| None),
    ("lda-step1", commands::lda_step1, |c| Some(c.lda_step1.seed)),
    ("seed", commands::seed, |_| None),
    ("lda-step2", commands::lda_step2, |c| Some(c.lda_step2.seed)),
    ("prevalence", commands::prevalence_cmd, |_| None),
    ("news", commands::news, |_| None),
    ("lp", commands::lp, |c| Some(c.bootstrap.seed)),
];

fn run_stage(loaded: &config::Loaded, name: &'static str) -> Result<(), CliError> {
    let (stage, seed): (Stage, fn(&config::RunConfig) -> Option<u64>) = if name == "simulate" {
        (commands::simulate, |c| Some(c.simulate.seed))
    } else {
        let (_, s, seed) = STAGES.iter().find(|(n, ..)| *n == name).expect("known stage");
        (*s, *seed)
    };
    log::info!("running {name}");
    let mut run = Run::new(loaded, name);
    stage(&mut run)?;
    run.finish(seed(&loaded.config))
}

fn dispatch(command: Command) -> Result<(), (&'static str, CliError)> {
    let (name, common) = match command {
        Command::Defaults => {
            print!("{}", toml::to_string_pretty(&config::RunConfig::default()).expect("defaults serialize"));
            return Ok(());
        }
        Command::Preprocess(c) => ("preprocess", c),
        Command::LdaStep1(c) => ("lda-step1", c),
        Command::Seed(c) => ("seed", c),
        Command::LdaStep2(c) => ("lda-step2", c),
        Command::Prevalence(c) => ("prevalence", c),
        Command::News(c) => ("news", c),
        Command::Lp(c) => ("lp", c),
        Command::Simulate(c) => ("simulate", c),
        Command::All(c) => ("all", c),
    };
    let loaded = config::load(common.config.as_deref(), &common.overrides).map_err(|e| (name, e))?;
    if name == "all" {
        for (stage, ..) in STAGES {
            run_stage(&loaded, stage).map_err(|e| (*stage, e))?;
        }
        Ok(())
    } else {
        run_stage(&loaded, name).map_err(|e| (name, e))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err((command, e)) => {
            eprintln!("{}", e.to_json(command));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
