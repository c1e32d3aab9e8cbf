mod commands;
mod config;
mod manifest;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::Overrides;

#[derive(Parser, Debug)]
#[command(name = "pitchseq", version, about = "Next-action modeling for soccer event streams")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON or TOML run config (a previous run's manifest also works).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Open-data root: an http(s) URL or a local directory.
    #[arg(long, global = true)]
    data_source: Option<String>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    competition: Option<String>,
    /// Comma-separated season names, e.g. `2018/2019,2019/2020`.
    #[arg(long, global = true, value_delimiter = ',')]
    seasons: Option<Vec<String>>,
    #[arg(long, global = true)]
    seed_split: Option<u64>,
    #[arg(long, global = true)]
    seed_train: Option<u64>,
    #[arg(long, global = true)]
    context: Option<usize>,
    /// markov, mlp, transformer-small or transformer-large.
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[arg(long, global = true)]
    batch_size: Option<usize>,
    #[arg(long, global = true)]
    lr: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fetch, cache and convert the configured seasons to action tables.
    Ingest,
    /// Train a model on an ingested data directory.
    Train {
        #[arg(long)]
        data: PathBuf,
    },
    /// Score a trained model on data splits.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Comma-separated subset of train, val, test.
        #[arg(long, default_value = "val,test")]
        datasets: String,
    },
    /// Retrain along dataset-size, context and parameter axes.
    Scale {
        #[arg(long)]
        data: PathBuf,
        /// JSON or TOML scaling grid.
        #[arg(long)]
        grid: PathBuf,
    },
    /// Roll out future actions from a seed sequence.
    Generate {
        #[arg(long)]
        checkpoint: PathBuf,
        /// One token per line, as text (`True, pass, 4, 4`) or as an id.
        #[arg(long)]
        seed_sequence: PathBuf,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, value_parser = ["greedy", "temperature"], default_value = "temperature")]
        mode: String,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Export token embeddings with an optional 2-D projection.
    Embed {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, value_parser = ["pca", "none"], default_value = "pca")]
        projection: String,
    },
    /// Render scaling charts and pitch drawings.
    Plot {
        /// Scaling CSV.
        #[arg(long)]
        scaling: Option<PathBuf>,
        /// Ground-truth token sequence (same format as --seed-sequence).
        #[arg(long)]
        sequence: Option<PathBuf>,
        /// `NAME=FILE` predicted sequence; repeatable.
        #[arg(long)]
        prediction: Vec<String>,
        /// JSON style overrides.
        #[arg(long)]
        style: Option<PathBuf>,
    },
    /// Write a seeded synthetic league in the open-data layout.
    Synth {
        #[arg(long, default_value_t = 10)]
        matches_per_season: usize,
        #[arg(long, default_value_t = 600)]
        actions_per_period: usize,
        #[arg(long, default_value_t = 7)]
        synth_seed: u64,
    },
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            data_source: self.data_source.clone(),
            cache_dir: self.cache_dir.clone(),
            competition: self.competition.clone(),
            seasons: self.seasons.clone(),
            seed_split: self.seed_split,
            seed_train: self.seed_train,
            context: self.context,
            model: self.model.clone(),
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.lr,
            out: self.out.clone(),
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let flags = cli.global.overrides();
    let cfg = config::resolve(cli.global.config.as_deref(), &flags)?;
    std::fs::create_dir_all(&cfg.out)?;
    match cli.command {
        Command::Ingest => commands::ingest(&cfg),
        Command::Train { data } => commands::train(&cfg, &data),
        Command::Evaluate {
            data,
            checkpoint,
            datasets,
        } => commands::evaluate(&cfg, &flags, &data, &checkpoint, &datasets),
        Command::Scale { data, grid } => commands::scale(&cfg, &data, &grid),
        Command::Generate {
            checkpoint,
            seed_sequence,
            n,
            mode,
            temperature,
            top_k,
        } => commands::generate(&cfg, &flags, &checkpoint, &seed_sequence, n, &mode, temperature, top_k),
        Command::Embed { checkpoint, projection } => commands::embed(&cfg, &checkpoint, &projection),
        Command::Plot {
            scaling,
            sequence,
            prediction,
            style,
        } => commands::plot(
            &cfg,
            scaling.as_deref(),
            sequence.as_deref(),
            &prediction,
            style.as_deref(),
        ),
        Command::Synth {
            matches_per_season,
            actions_per_period,
            synth_seed,
        } => commands::synth(&cfg, matches_per_season, actions_per_period, synth_seed),
    }
}
