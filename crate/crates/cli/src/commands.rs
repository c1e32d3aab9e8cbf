use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use pitchseq::corpus::{make_windows, partition, split_matches, tokenize_matches, Partition, Split};
use pitchseq::generate::{rollout, rollout_records, write_rollout_jsonl, SamplerSpec};
use pitchseq::ingest::{self, list_matches, load_tables, save_tables, DataSource};
use pitchseq::markov::{self, TransitionModel};
use pitchseq::models::{ModelConfig, ModelKind, Network, TransformerConfig, CHECKPOINT_STEM};
use pitchseq::synth::{write_open_data, SynthOptions};
use pitchseq::tokenizer::{Token, Vocabulary};
use pitchseq::train_eval::{
    evaluate as score, read_scaling_csv, scaling_run, train as fit_network, write_loss_history, write_metrics_csv,
    write_scaling_csv, Predictor, ScalingCorpus, ScalingGrid,
};
use pitchseq::viz::{
    export_embeddings, plot_scaling, render_comparison, render_pitch, write_embeddings_csv, PitchScene, Projection,
    Style,
};

use crate::config::{Overrides, RunConfig};
use crate::manifest::Manifest;

const MARKOV_FILE: &str = "markov.bin";
const VOCAB_FILE: &str = "vocabulary.json";
const SPLIT_FILE: &str = "split.json";

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn ingest(cfg: &RunConfig) -> Result<()> {
    let source = DataSource::parse(&cfg.data_source);
    let listed = list_matches(&cfg.competition, &cfg.seasons, &source)?;
    log::info!("{} matches listed from {}", listed.len(), source.locator());
    let report = ingest::ingest(&listed, &source, &cfg.cache_dir)?;
    save_tables(&cfg.out, &report.matches)?;
    let mut m = Manifest::new("ingest", cfg);
    m.output(&cfg.out.join("actions.csv"))?;
    m.output(&cfg.out.join("matches.json"))?;
    m.stat("match_count", report.matches.len());
    m.stat("action_count", report.action_count());
    m.stat("dropped_missing_location", report.dropped_missing_location);
    m.stat("source_requests", source.request_count());
    m.write(&cfg.out)?;
    log::info!(
        "{} matches, {} actions ({} events dropped for missing location)",
        report.matches.len(),
        report.action_count(),
        report.dropped_missing_location
    );
    Ok(())
}

struct Data {
    vocab: Vocabulary,
    split: Split,
    parts: Partition,
}

/// Loads ingested tables, recording their hashes as inputs of `m`.
fn load_data(data_dir: &Path, split: Option<Split>, seed_split: u64, m: &mut Manifest) -> Result<Data> {
    let tables = load_tables(data_dir)?;
    m.input(&data_dir.join("actions.csv"))?;
    m.input(&data_dir.join("matches.json"))?;
    let vocab = Vocabulary::full();
    let seqs = tokenize_matches(&tables, &vocab)?;
    let split = match split {
        Some(s) => s,
        None => {
            let ids: Vec<u64> = tables.iter().map(|t| t.match_id).collect();
            split_matches(&ids, seed_split)?
        }
    };
    let parts = partition(&seqs, &split);
    Ok(Data { vocab, split, parts })
}

pub fn train(cfg: &RunConfig, data_dir: &Path) -> Result<()> {
    let mut m = Manifest::new("train", cfg);
    let data = load_data(data_dir, None, cfg.seed_split, &mut m)?;
    let kind = cfg.kind()?;
    let out = &cfg.out;
    write_text(&out.join(VOCAB_FILE), &data.vocab.to_json())?;
    write_text(&out.join(SPLIT_FILE), &serde_json::to_string_pretty(&data.split)?)?;
    match kind.config(data.vocab.len(), cfg.context) {
        None => {
            let model = markov::fit(
                &data.parts.train.iter().map(|s| s.ids.as_slice()).collect::<Vec<_>>(),
                data.vocab.len(),
            )?;
            let path = out.join(MARKOV_FILE);
            let mut w = create(&path)?;
            model.save(&mut w)?;
            w.flush()?;
            m.output(&path)?;
            m.stat("train_sequences", data.parts.train.len());
        }
        Some(config) => {
            let windows = make_windows(&data.parts.train, cfg.context);
            let options = cfg.train_options()?;
            log::info!("training {kind} on {} windows with {options:?}", windows.len());
            let outcome = fit_network::<f32>(config, &windows, &options)?;
            outcome.network.save(out)?;
            let history = out.join("loss_history.jsonl");
            let mut w = create(&history)?;
            write_loss_history(&mut w, &outcome.history)?;
            w.flush()?;
            m.output(&out.join(format!("{CHECKPOINT_STEM}.json")))?;
            m.output(&out.join(format!("{CHECKPOINT_STEM}.bin")))?;
            m.output(&history)?;
            m.stat("train_windows", windows.len());
            m.stat("parameters", config.count_parameters());
            m.stat("train_options", options);
            if let Some(last) = outcome.history.last() {
                m.stat("final_mean_loss", last.mean_loss);
            }
        }
    }
    m.output(&out.join(VOCAB_FILE))?;
    m.output(&out.join(SPLIT_FILE))?;
    m.write(out)?;
    Ok(())
}

enum Model {
    Markov(TransitionModel),
    Neural(Network<f32>),
}

impl Model {
    fn predictor(&self) -> &dyn Predictor {
        match self {
            Model::Markov(m) => m,
            Model::Neural(n) => n,
        }
    }
}

struct Checkpoint {
    model: Model,
    manifest: Manifest,
    vocab: Vocabulary,
}

/// Loads a `train` output directory after checking every file against the
/// hashes in its manifest.
fn load_checkpoint(dir: &Path) -> Result<Checkpoint> {
    let manifest = Manifest::read(dir, "train")?;
    let kind = manifest.config.kind()?;
    let model_files: Vec<String> = match kind {
        ModelKind::Markov => vec![MARKOV_FILE.into()],
        _ => vec![format!("{CHECKPOINT_STEM}.json"), format!("{CHECKPOINT_STEM}.bin")],
    };
    for f in model_files.iter().map(String::as_str).chain([VOCAB_FILE, SPLIT_FILE]) {
        manifest.verify(&dir.join(f), true)?;
    }
    let vocab = Vocabulary::from_json(&std::fs::read_to_string(dir.join(VOCAB_FILE))?)?;
    let model = match kind {
        ModelKind::Markov => {
            let f = File::open(dir.join(MARKOV_FILE))?;
            Model::Markov(TransitionModel::load(std::io::BufReader::new(f))?)
        }
        _ => {
            let net = Network::<f32>::load(dir)?;
            if net.config().context() != manifest.config.context {
                bail!(
                    "checkpoint context {} disagrees with its manifest",
                    net.config().context()
                );
            }
            Model::Neural(net)
        }
    };
    if model.predictor().vocab_size() != vocab.len() {
        bail!("checkpoint vocabulary size disagrees with {VOCAB_FILE}");
    }
    Ok(Checkpoint { model, manifest, vocab })
}

/// A flag that contradicts the checkpoint is refused rather than ignored.
fn check_flags(flags: &Overrides, trained: &RunConfig) -> Result<()> {
    if let Some(k) = flags.context.filter(|&k| k != trained.context) {
        bail!(
            "--context {k} does not match the checkpoint's context {}",
            trained.context
        );
    }
    if let Some(s) = flags.seed_split.filter(|&s| s != trained.seed_split) {
        bail!(
            "--seed-split {s} does not match the checkpoint's split seed {}",
            trained.seed_split
        );
    }
    if let Some(model) = flags.model.as_ref().filter(|m| **m != trained.model) {
        bail!(
            "--model {model} does not match the checkpoint's model {}",
            trained.model
        );
    }
    Ok(())
}

/// The checkpoint's model settings with this invocation's paths.
fn inherit(cfg: &RunConfig, trained: &RunConfig) -> RunConfig {
    RunConfig {
        seed_split: trained.seed_split,
        seed_train: trained.seed_train,
        context: trained.context,
        model: trained.model.clone(),
        learning_rate: trained.learning_rate,
        batch_size: trained.batch_size,
        epochs: trained.epochs,
        ..cfg.clone()
    }
}

pub fn evaluate(cfg: &RunConfig, flags: &Overrides, data_dir: &Path, checkpoint: &Path, datasets: &str) -> Result<()> {
    let ck = load_checkpoint(checkpoint)?;
    let trained = &ck.manifest.config;
    check_flags(flags, trained)?;
    for f in ["actions.csv", "matches.json"] {
        ck.manifest.verify(&data_dir.join(f), false)?;
    }
    let cfg = inherit(cfg, trained);
    let mut m = Manifest::new("evaluate", &cfg);
    let split: Split = serde_json::from_str(&std::fs::read_to_string(checkpoint.join(SPLIT_FILE))?)?;
    let data = load_data(data_dir, Some(split), cfg.seed_split, &mut m)?;
    m.input(&checkpoint.join(Manifest::file_name("train")))?;
    let mut records = Vec::new();
    for name in datasets.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let seqs = match name {
            "train" => &data.parts.train,
            "val" => &data.parts.val,
            "test" => &data.parts.test,
            other => bail!("unknown dataset {other:?} (train, val, test)"),
        };
        let windows = make_windows(seqs, cfg.context);
        let r = score(ck.model.predictor(), &windows, name, &cfg.model)?;
        log::info!(
            "{name}: accuracy {:.4}, mean log likelihood {:.4} over {}",
            r.accuracy,
            r.mean_log_likelihood,
            r.n
        );
        records.push(r);
    }
    m.stat("datasets", datasets);
    let path = cfg.out.join("metrics.csv");
    let mut w = create(&path)?;
    write_metrics_csv(&mut w, &records)?;
    w.flush()?;
    m.output(&path)?;
    m.write(&cfg.out)?;
    Ok(())
}

fn read_grid(path: &Path) -> Result<ScalingGrid> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading grid {}", path.display()))?;
    let grid: ScalingGrid = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text)?
    } else {
        serde_json::from_str(&text)?
    };
    Ok(grid)
}

fn write_charts(
    dir: &Path,
    records: &[pitchseq::train_eval::ScalingRecord],
    style: &Style,
    m: &mut Manifest,
) -> Result<()> {
    for (axis, svg) in plot_scaling(records, style)? {
        let path = dir.join(format!("scaling_{axis}.svg"));
        write_text(&path, &svg)?;
        m.output(&path)?;
    }
    Ok(())
}

pub fn scale(cfg: &RunConfig, data_dir: &Path, grid_path: &Path) -> Result<()> {
    let mut m = Manifest::new("scale", cfg);
    let grid = read_grid(grid_path)?;
    m.input(grid_path)?;
    let data = load_data(data_dir, None, cfg.seed_split, &mut m)?;
    let base = match cfg.kind()?.config(data.vocab.len(), cfg.context) {
        Some(ModelConfig::Transformer(t)) => t,
        _ => {
            log::warn!("scaling runs use the transformer; starting from the small configuration");
            TransformerConfig::small(data.vocab.len(), cfg.context)
        }
    };
    let corpus = ScalingCorpus {
        train: &data.parts.train,
        val: &data.parts.val,
    };
    let records = scaling_run(&grid, base, &corpus, &cfg.train_options()?, cfg.seed_split)?;
    let path = cfg.out.join("scaling.csv");
    let mut w = create(&path)?;
    write_scaling_csv(&mut w, &records)?;
    w.flush()?;
    m.output(&path)?;
    m.stat("skipped_points", records.iter().filter(|r| r.skipped.is_some()).count());
    write_charts(&cfg.out, &records, &Style::default(), &mut m)?;
    m.write(&cfg.out)?;
    Ok(())
}

/// One token per nonempty line, either as an id or in token text form.
fn read_sequence(path: &Path, vocab: &Vocabulary) -> Result<Vec<u32>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut ids = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let line = line.trim();
        let id = match line.parse::<u32>() {
            Ok(id) => {
                vocab.id_to_token(id)?;
                id
            }
            Err(_) => {
                let t: Token = line
                    .parse()
                    .with_context(|| format!("{}:{}: not a token", path.display(), i + 1))?;
                vocab.token_to_id(&t)?
            }
        };
        ids.push(id);
    }
    Ok(ids)
}

#[allow(clippy::too_many_arguments)]
pub fn generate(
    cfg: &RunConfig,
    flags: &Overrides,
    checkpoint: &Path,
    seed_sequence: &Path,
    n: usize,
    mode: &str,
    temperature: f64,
    top_k: Option<usize>,
) -> Result<()> {
    let ck = load_checkpoint(checkpoint)?;
    check_flags(flags, &ck.manifest.config)?;
    let cfg = RunConfig {
        seed_train: flags.seed_train.unwrap_or(ck.manifest.config.seed_train),
        ..inherit(cfg, &ck.manifest.config)
    };
    let mut m = Manifest::new("generate", &cfg);
    m.input(seed_sequence)?;
    m.input(&checkpoint.join(Manifest::file_name("train")))?;
    let seed_ids = read_sequence(seed_sequence, &ck.vocab)?;
    let mut spec = match mode {
        "greedy" => SamplerSpec::greedy(),
        _ => SamplerSpec::temperature(temperature, cfg.seed_train),
    };
    spec.top_k = top_k;
    m.stat("n", n);
    m.stat("sampler", spec);
    let steps = rollout(ck.model.predictor(), &seed_ids, n, &spec)?;
    let records = rollout_records(&steps, &ck.vocab)?;
    let path = cfg.out.join("rollout.jsonl");
    let mut w = create(&path)?;
    write_rollout_jsonl(&mut w, &records)?;
    w.flush()?;
    m.output(&path)?;
    m.write(&cfg.out)?;
    Ok(())
}

pub fn embed(cfg: &RunConfig, checkpoint: &Path, projection: &str) -> Result<()> {
    let ck = load_checkpoint(checkpoint)?;
    let Model::Neural(net) = &ck.model else {
        bail!("the Markov model has no embeddings");
    };
    let cfg = inherit(cfg, &ck.manifest.config);
    let mut m = Manifest::new("embed", &cfg);
    m.input(&checkpoint.join(Manifest::file_name("train")))?;
    let table = export_embeddings(net, &ck.vocab, projection.parse::<Projection>()?)?;
    let path = cfg.out.join("embeddings.csv");
    let mut w = create(&path)?;
    write_embeddings_csv(&mut w, &table)?;
    w.flush()?;
    m.output(&path)?;
    m.stat("projection", projection);
    m.write(&cfg.out)?;
    Ok(())
}

pub fn plot(
    cfg: &RunConfig,
    scaling: Option<&Path>,
    sequence: Option<&Path>,
    predictions: &[String],
    style: Option<&Path>,
) -> Result<()> {
    if scaling.is_none() && sequence.is_none() {
        bail!("nothing to plot: pass --scaling and/or --sequence");
    }
    if sequence.is_none() && !predictions.is_empty() {
        bail!("--prediction needs a ground-truth --sequence");
    }
    let mut m = Manifest::new("plot", cfg);
    let style = match style {
        Some(p) => {
            m.input(p)?;
            Style::from_json(&std::fs::read_to_string(p)?)?
        }
        None => Style::default(),
    };
    if let Some(p) = scaling {
        m.input(p)?;
        let records = read_scaling_csv(&std::fs::read_to_string(p)?)?;
        write_charts(&cfg.out, &records, &style, &mut m)?;
    }
    if let Some(p) = sequence {
        let vocab = Vocabulary::full();
        m.input(p)?;
        let scene_of = |path: &Path| -> Result<PitchScene> {
            let ids = read_sequence(path, &vocab)?;
            let tokens = ids
                .iter()
                .map(|&i| vocab.id_to_token(i))
                .collect::<pitchseq::Result<Vec<_>>>()?;
            Ok(PitchScene::from_tokens(&tokens).highlighted())
        };
        let truth = scene_of(p)?;
        let path = cfg.out.join("sequence.svg");
        write_text(&path, &render_pitch(&truth, &style)?)?;
        m.output(&path)?;
        if !predictions.is_empty() {
            let mut panels = Vec::new();
            for spec in predictions {
                let Some((name, file)) = spec.split_once('=') else {
                    bail!("--prediction expects NAME=FILE, got {spec:?}");
                };
                m.input(Path::new(file))?;
                panels.push((name.to_string(), scene_of(Path::new(file))?));
            }
            m.stat("predictions", predictions);
            let path = cfg.out.join("comparison.svg");
            write_text(&path, &render_comparison(&truth, &panels, cfg.context, &style)?)?;
            m.output(&path)?;
        }
    }
    m.write(&cfg.out)?;
    Ok(())
}

pub fn synth(cfg: &RunConfig, matches_per_season: usize, actions_per_period: usize, seed: u64) -> Result<()> {
    let opts = SynthOptions {
        competition_name: cfg.competition.clone(),
        seasons: cfg
            .seasons
            .iter()
            .enumerate()
            .map(|(i, s)| (i as u64 + 1, s.clone()))
            .collect(),
        matches_per_season,
        actions_per_period,
        seed,
        ..SynthOptions::default()
    };
    let written = write_open_data(&cfg.out, &opts)?;
    let mut m = Manifest::new("synth", cfg);
    m.stat("match_count", written.len());
    m.stat("synth_seed", seed);
    m.stat("matches_per_season", matches_per_season);
    m.stat("actions_per_period", actions_per_period);
    m.output(&cfg.out.join("competitions.json"))?;
    m.write(&cfg.out)?;
    log::info!("wrote {} synthetic matches under {}", written.len(), cfg.out.display());
    Ok(())
}
