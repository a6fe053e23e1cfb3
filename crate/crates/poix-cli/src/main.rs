//! `poix` — staged evaluation pipeline for point-of-interest recommendation
//! on check-in data.
//!
//! Every subcommand works against a run directory: `pipeline` executes all
//! stages in order with checkpointing, while the per-stage subcommands rerun
//! a single stage against the artifacts already on disk.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use poix::config::PipelineConfig;
use poix::data::write_canonical_csv;
use poix::synth::{self, SynthParams};
use poix::{par, pipeline};

#[derive(Parser)]
#[command(name = "poix", version, about, max_term_width = 100)]
struct Cli {
    /// TOML configuration file; built-in defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Run directory override (defaults to `run.out_dir` from the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Master seed override; every per-job seed derives from it.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads; 0 = one per core. Ignored by sequential builds.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Rebuild artifacts even when they already exist.
    #[arg(long, global = true)]
    force: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage in order, resuming after the last completed one.
    Pipeline,
    /// Parse and clean the raw check-ins, label user origins.
    Ingest,
    /// Materialize the subsample grid with train/test splits.
    Subsample,
    /// Compute the trait vector of every usable subsample.
    Featurize,
    /// Train all configured models and dump ranked lists.
    Recommend,
    /// Score the dumps and select each model's winning configuration.
    Evaluate,
    /// Run the explanation stages: baseline filter, collinearity
    /// elimination, and the regressions.
    Explain,
    /// Render the Markdown report, coefficient figures, and heat maps.
    Report,
    /// Generate a deterministic city of check-ins for demos and tests.
    Synth(SynthArgs),
    /// Print the effective configuration as TOML.
    PrintConfig,
}

#[derive(Args)]
struct SynthArgs {
    /// Where to write the canonical check-in CSV.
    #[arg(long, value_name = "PATH")]
    output: PathBuf,

    #[arg(long, default_value_t = 500)]
    users: usize,

    #[arg(long, default_value_t = 300)]
    venues: usize,

    /// In-city check-ins to generate (visitor home traces come on top).
    #[arg(long, default_value_t = 20_000)]
    checkins: usize,

    /// Spatial clusters venues are scattered around.
    #[arg(long, default_value_t = 6)]
    clusters: usize,

    /// Popularity skew exponent; 0 = uniform venue popularity.
    #[arg(long, default_value_t = 1.0)]
    popularity_skew: f64,

    /// Fraction of each user's visits pushed into their preferred season.
    #[arg(long, default_value_t = 0.6)]
    seasonality: f64,

    /// Fraction of users whose home city is not the target city.
    #[arg(long, default_value_t = 0.25)]
    visitor_fraction: f64,

    /// Length of the generated check-in history in days.
    #[arg(long, default_value_t = 540)]
    span_days: u32,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();

    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)
            .with_context(|| format!("loading configuration {}", path.display()))?,
        None => {
            let mut cfg = PipelineConfig::default();
            cfg.resolve_data_paths();
            cfg
        }
    };
    if let Some(out) = cli.out {
        cfg.run.out_dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        cfg.run.jobs = jobs;
    }
    par::configure_jobs(cfg.run.jobs);

    match cli.command {
        Command::Pipeline => {
            pipeline::run_pipeline(&cfg, cli.force)?;
        }
        Command::Ingest => run_stage(&cfg, "ingest", cli.force)?,
        Command::Subsample => run_stage(&cfg, "subsample", cli.force)?,
        Command::Featurize => run_stage(&cfg, "featurize", cli.force)?,
        Command::Recommend => run_stage(&cfg, "recommend", cli.force)?,
        Command::Evaluate => run_stage(&cfg, "evaluate", cli.force)?,
        Command::Explain => {
            for stage in ["exclude", "eliminate", "regress"] {
                run_stage(&cfg, stage, cli.force)?;
            }
        }
        Command::Report => run_stage(&cfg, "report", cli.force)?,
        Command::Synth(args) => {
            let params = SynthParams {
                users: args.users,
                venues: args.venues,
                checkins: args.checkins,
                clusters: args.clusters,
                popularity_skew: args.popularity_skew,
                seasonality: args.seasonality,
                visitor_fraction: args.visitor_fraction,
                span_days: args.span_days,
                ..SynthParams::default()
            };
            let checkins = synth::generate(&params, cfg.run.seed)?;
            write_canonical_csv(&args.output, &checkins)?;
            eprintln!("[synth] wrote {} check-ins to {}", checkins.len(), args.output.display());
        }
        Command::PrintConfig => {
            print!("{}", cfg.to_toml_string());
        }
    }
    Ok(())
}

fn run_stage(cfg: &PipelineConfig, stage: &str, force: bool) -> anyhow::Result<()> {
    pipeline::run_single_stage(cfg, stage, force)
        .with_context(|| format!("stage `{stage}` failed"))?;
    Ok(())
}
