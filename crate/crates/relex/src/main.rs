//! Command-line interface for the relation-extraction pipeline: synthetic
//! data generation, vocabulary construction, training of both scorers,
//! extraction, and precision/recall evaluation. Every artifact the CLI
//! writes gets a `<file>.manifest.json` sidecar recording the invocation
//! and the SHA-256 of all inputs and outputs.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use relex::config::{EpochStats, ModelConfig};
use relex::error::{RelexError, Result};
use relex::evaluation::{
    area_under_pr, precision_at_recall, precision_recall_curve, save_curve, GoldSet,
};
use relex::extractor::{extract_all, save_extractions, ExtractOptions, FusionMode};
use relex::ingest::mentions::{
    encode_mentions, load_mentions, remap_mention_labels, save_mentions, NA_LABEL,
};
use relex::ingest::synth::{generate_synthetic, SynthConfig};
use relex::ingest::triples::{
    filter_kb_by_test_pairs, load_relation_mapping, load_test_pairs, load_triples,
    remap_relations, save_triples, VocabPolicy,
};
use relex::ingest::vocab::{
    build_feature_vocabulary, build_relation_vocabulary, load_vocab, save_vocab, Vocabulary,
};
use relex::kbembed::{train_kb, CalibrationDirection, KBModel, KBTrainOptions};
use relex::manifest::Manifest;
use relex::mention2rel::{train_m2r, ConstraintMode, M2RModel, M2RTrainOptions};

#[derive(Parser)]
#[command(
    name = "relex",
    version,
    about = "Weakly supervised relation extraction with embedding models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with planted group structure.
    GenSynth(GenSynthArgs),
    /// Build feature and relationship vocabularies from a mention file.
    BuildVocab(BuildVocabArgs),
    /// Train the mention→relationship ranking model.
    TrainM2r(TrainM2rArgs),
    /// Train the translation-based knowledge-base model.
    TrainKb(TrainKbArgs),
    /// Score and rank candidate facts from test mentions.
    Extract(ExtractArgs),
    /// Compare ranked extractions against a gold set.
    Eval(EvalArgs),
}

/// Numeric hyperparameters shared by the training commands. Unset flags
/// fall back to the `--config` file, then to built-in defaults.
#[derive(Args, Debug, Clone)]
struct HyperArgs {
    /// Embedding dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Margin of the ranking hinge loss.
    #[arg(long)]
    margin: Option<f64>,
    /// SGD learning rate.
    #[arg(long)]
    lr: Option<f64>,
    /// Passes over the training data.
    #[arg(long)]
    epochs: Option<usize>,
    /// Seed of the per-run random generator.
    #[arg(long)]
    seed: Option<u64>,
    /// Rank-calibration threshold.
    #[arg(long)]
    calib_threshold: Option<usize>,
    /// JSON file with defaults for the flags above; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// The `--config` file: every field optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dim: Option<usize>,
    margin: Option<f64>,
    learning_rate: Option<f64>,
    epochs: Option<usize>,
    seed: Option<u64>,
    calibration_threshold: Option<usize>,
}

impl HyperArgs {
    /// Resolves flags over the config file over `base`, in that order.
    fn resolve(&self, base: ModelConfig) -> Result<ModelConfig> {
        let file = match &self.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| RelexError::io(path, e))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| RelexError::parse(path, e.line(), e.to_string()))?
            }
            None => FileConfig::default(),
        };
        let config = ModelConfig {
            dim: self.dim.or(file.dim).unwrap_or(base.dim),
            margin: self.margin.or(file.margin).unwrap_or(base.margin),
            learning_rate: self
                .lr
                .or(file.learning_rate)
                .unwrap_or(base.learning_rate),
            epochs: self.epochs.or(file.epochs).unwrap_or(base.epochs),
            seed: self.seed.or(file.seed).unwrap_or(base.seed),
            calibration_threshold: self
                .calib_threshold
                .or(file.calibration_threshold)
                .unwrap_or(base.calibration_threshold),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args, Debug)]
struct GenSynthArgs {
    /// Number of entities.
    #[arg(long, default_value_t = 60)]
    entities: usize,
    /// Number of relationships excluding the no-relation label.
    #[arg(long, default_value_t = 6)]
    relations: usize,
    /// Feature vocabulary size.
    #[arg(long, default_value_t = 200)]
    features: usize,
    /// Total mentions across the train and test splits.
    #[arg(long, default_value_t = 2000)]
    mentions: usize,
    /// Probability that a mention misrepresents its pair, in [0, 1).
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Entity groups; 0 derives the smallest count that fits the relations.
    #[arg(long, default_value_t = 0)]
    groups: usize,
    /// Fraction of gold test facts corroborated by a KB triple.
    #[arg(long, default_value_t = 0.6)]
    kb_corroboration: f64,
    /// Extra KB triples per relationship beyond the train-pair facts.
    #[arg(long, default_value_t = 20)]
    kb_extra_per_relation: usize,
    /// Output directory, created if missing.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct BuildVocabArgs {
    /// Mention TSV to scan.
    #[arg(long)]
    mentions: PathBuf,
    /// Keep the N most frequent feature tokens.
    #[arg(long, default_value_t = 100_000)]
    max_features: usize,
    /// Output prefix; writes `<prefix>.features.vocab` and
    /// `<prefix>.relations.vocab`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ConstraintModeArg {
    /// Rank against the same mention's other relationships.
    PerMention,
    /// Rank against other mentions' relationships.
    CrossMention,
}

impl From<ConstraintModeArg> for ConstraintMode {
    fn from(arg: ConstraintModeArg) -> Self {
        match arg {
            ConstraintModeArg::PerMention => ConstraintMode::PerMention,
            ConstraintModeArg::CrossMention => ConstraintMode::CrossMention,
        }
    }
}

#[derive(Args, Debug)]
struct TrainM2rArgs {
    /// Training mention TSV.
    #[arg(long)]
    mentions: PathBuf,
    /// Relation-mapping TSV applied to mention labels before training.
    #[arg(long)]
    remap: Option<PathBuf>,
    /// Feature vocabulary file; built from the data when absent.
    #[arg(long)]
    feature_vocab: Option<PathBuf>,
    /// Relationship vocabulary file; built from the data when absent.
    #[arg(long)]
    relation_vocab: Option<PathBuf>,
    /// Cap on the feature vocabulary built from the data.
    #[arg(long, default_value_t = 100_000)]
    max_features: usize,
    /// How ranking constraints pair positives with negatives.
    #[arg(long, value_enum, default_value_t = ConstraintModeArg::CrossMention)]
    constraint_mode: ConstraintModeArg,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Model prefix; writes `<prefix>.features` and `<prefix>.relations`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TrainKbArgs {
    /// Knowledge-base triple TSV.
    #[arg(long)]
    triples: PathBuf,
    /// Relation-mapping TSV applied before training.
    #[arg(long)]
    remap: Option<PathBuf>,
    /// Test-pair TSV; triples touching these pairs in either orientation
    /// are removed before training.
    #[arg(long)]
    filter_test_pairs: Option<PathBuf>,
    /// Wall-clock budget in seconds; training stops at an epoch boundary.
    #[arg(long)]
    max_seconds: Option<f64>,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Model prefix; writes `<prefix>.entities` and `<prefix>.relations`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FusionArg {
    /// Aggregate mention scores only.
    M2r,
    /// Mention scores plus the calibrated KB score.
    #[value(name = "m2r+kb")]
    M2rPlusKb,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum DirectionArg {
    /// Count how many relationships strictly beat the candidate.
    TopRank,
    /// Compare the beats-count rank itself against the threshold.
    Literal,
}

impl From<DirectionArg> for CalibrationDirection {
    fn from(arg: DirectionArg) -> Self {
        match arg {
            DirectionArg::TopRank => CalibrationDirection::TopRank,
            DirectionArg::Literal => CalibrationDirection::Literal,
        }
    }
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Test mention TSV.
    #[arg(long)]
    mentions: PathBuf,
    /// Mention-model prefix (`<prefix>.features`, `<prefix>.relations`).
    #[arg(long)]
    m2r: PathBuf,
    /// KB-model prefix; required with `--fusion m2r+kb`.
    #[arg(long)]
    kb: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FusionArg::M2r)]
    fusion: FusionArg,
    /// Rank-calibration threshold of the fused KB score.
    #[arg(long, default_value_t = 10)]
    calib_threshold: usize,
    #[arg(long, value_enum, default_value_t = DirectionArg::TopRank)]
    calib_direction: DirectionArg,
    /// Output extraction TSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Ranked extraction TSV produced by `extract`.
    #[arg(long)]
    extractions: PathBuf,
    /// Gold fact TSV (`head\trelation\ttail`).
    #[arg(long)]
    gold: PathBuf,
    /// Relation-mapping TSV applied to the gold facts.
    #[arg(long)]
    remap: Option<PathBuf>,
    /// Output curve TSV.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let outcome = match cli.command {
        Command::GenSynth(args) => gen_synth(args, &argv),
        Command::BuildVocab(args) => build_vocab(args, &argv),
        Command::TrainM2r(args) => train_m2r_cmd(args, &argv),
        Command::TrainKb(args) => train_kb_cmd(args, &argv),
        Command::Extract(args) => extract(args, &argv),
        Command::Eval(args) => eval(args, &argv),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Builds `<prefix>.<suffix>` the way the model loaders expect.
fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}.{suffix}", prefix.display()))
}

fn log_epochs(label: &str, stats: &[EpochStats]) {
    eprintln!("# {label}: epoch\tmean_hinge\tviolations");
    for s in stats {
        eprintln!("{}", s.tsv_line());
    }
}

fn write_tsv(path: &Path, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let file = File::create(path).map_err(|e| RelexError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for row in rows {
        writeln!(out, "{row}").map_err(|e| RelexError::io(path, e))?;
    }
    out.flush().map_err(|e| RelexError::io(path, e))
}

fn gen_synth(args: GenSynthArgs, argv: &[String]) -> Result<()> {
    let mut cfg = SynthConfig::new(
        args.entities,
        args.relations,
        args.features,
        args.mentions,
        args.noise,
        args.seed,
    );
    cfg.groups = args.groups;
    cfg.kb_corroboration = args.kb_corroboration;
    cfg.kb_extra_per_relation = args.kb_extra_per_relation;
    let data = generate_synthetic(&cfg)?;

    std::fs::create_dir_all(&args.out_dir).map_err(|e| RelexError::io(&args.out_dir, e))?;
    let train_path = args.out_dir.join("train_mentions.tsv");
    let test_path = args.out_dir.join("test_mentions.tsv");
    let kb_path = args.out_dir.join("kb.tsv");
    let gold_path = args.out_dir.join("gold.tsv");
    let pairs_path = args.out_dir.join("test_pairs.tsv");

    save_mentions(&train_path, &data.train_mentions)?;
    save_mentions(&test_path, &data.test_mentions)?;
    save_triples(&kb_path, &data.kb, &data.entity_vocab, &data.kb_relation_vocab)?;
    write_tsv(
        &gold_path,
        data.gold.iter().map(|(h, r, t)| format!("{h}\t{r}\t{t}")),
    )?;
    write_tsv(
        &pairs_path,
        data.test_pairs.iter().map(|(h, t)| format!("{h}\t{t}")),
    )?;

    let mut manifest = Manifest::new("gen-synth", argv, Some(args.seed));
    let outputs = [&train_path, &test_path, &kb_path, &gold_path, &pairs_path];
    for path in outputs {
        manifest.add_output(path)?;
    }
    for path in outputs {
        manifest.save_for(path)?;
    }
    eprintln!(
        "# gen-synth: {} train mentions, {} test mentions, {} KB triples, {} gold facts",
        data.train_mentions.len(),
        data.test_mentions.len(),
        data.kb.len(),
        data.gold.len()
    );
    Ok(())
}

fn build_vocab(args: BuildVocabArgs, argv: &[String]) -> Result<()> {
    let raws = load_mentions(&args.mentions)?;
    let features = build_feature_vocabulary(&raws, args.max_features);
    let relations = build_relation_vocabulary(&raws);

    let features_path = with_suffix(&args.out, "features.vocab");
    let relations_path = with_suffix(&args.out, "relations.vocab");
    save_vocab(&features_path, &features)?;
    save_vocab(&relations_path, &relations)?;

    let mut manifest = Manifest::new("build-vocab", argv, None);
    manifest.add_input(&args.mentions)?;
    manifest.add_output(&features_path)?;
    manifest.add_output(&relations_path)?;
    manifest.save_for(&features_path)?;
    manifest.save_for(&relations_path)?;
    eprintln!(
        "# build-vocab: {} features, {} relationships",
        features.len(),
        relations.len()
    );
    Ok(())
}

fn train_m2r_cmd(args: TrainM2rArgs, argv: &[String]) -> Result<()> {
    let config = args.hyper.resolve(ModelConfig::m2r_defaults())?;
    let mut raws = load_mentions(&args.mentions)?;
    if let Some(remap_path) = &args.remap {
        let mapping = load_relation_mapping(remap_path)?;
        remap_mention_labels(&mut raws, &mapping);
    }
    let feature_vocab = match &args.feature_vocab {
        Some(path) => load_vocab(path)?,
        None => build_feature_vocabulary(&raws, args.max_features),
    };
    let relation_vocab = match &args.relation_vocab {
        Some(path) => load_vocab(path)?,
        None => build_relation_vocabulary(&raws),
    };
    let records = encode_mentions(&raws, &feature_vocab, &relation_vocab)?;

    let options = M2RTrainOptions {
        mode: args.constraint_mode.into(),
        ..M2RTrainOptions::default()
    };
    let (model, stats) = train_m2r(&records, feature_vocab, relation_vocab, &config, &options)?;
    log_epochs("train-m2r", &stats);
    model.save(&args.out)?;

    let mut manifest = Manifest::new("train-m2r", argv, Some(config.seed));
    manifest.add_input(&args.mentions)?;
    for path in [&args.remap, &args.feature_vocab, &args.relation_vocab]
        .into_iter()
        .flatten()
    {
        manifest.add_input(path)?;
    }
    if let Some(path) = &args.hyper.config {
        manifest.add_input(path)?;
    }
    let features_path = with_suffix(&args.out, relex::mention2rel::FEATURES_SUFFIX);
    let relations_path = with_suffix(&args.out, relex::mention2rel::RELATIONS_SUFFIX);
    manifest.add_output(&features_path)?;
    manifest.add_output(&relations_path)?;
    manifest.save_for(&features_path)?;
    manifest.save_for(&relations_path)?;
    Ok(())
}

fn train_kb_cmd(args: TrainKbArgs, argv: &[String]) -> Result<()> {
    let config = args.hyper.resolve(ModelConfig::kb_defaults())?;
    let mut entity_vocab = Vocabulary::new();
    let mut relation_vocab = Vocabulary::new();
    let mut store = load_triples(
        &args.triples,
        &mut entity_vocab,
        &mut relation_vocab,
        VocabPolicy::Extend,
    )?;
    if let Some(remap_path) = &args.remap {
        let mapping = load_relation_mapping(remap_path)?;
        let (remapped, vocab) = remap_relations(&store, &relation_vocab, &mapping)?;
        store = remapped;
        relation_vocab = vocab;
    }
    if let Some(pairs_path) = &args.filter_test_pairs {
        let pairs = load_test_pairs(pairs_path)?;
        let before = store.len();
        store = filter_kb_by_test_pairs(&store, &pairs, &entity_vocab)?;
        eprintln!(
            "# train-kb: filtered {} triples touching {} test pairs",
            before - store.len(),
            pairs.len()
        );
    }

    let options = KBTrainOptions {
        max_seconds: args.max_seconds,
    };
    let (model, stats) = train_kb(&store, entity_vocab, relation_vocab, &config, &options)?;
    log_epochs("train-kb", &stats);
    model.save(&args.out)?;

    let mut manifest = Manifest::new("train-kb", argv, Some(config.seed));
    manifest.add_input(&args.triples)?;
    for path in [&args.remap, &args.filter_test_pairs, &args.hyper.config]
        .into_iter()
        .flatten()
    {
        manifest.add_input(path)?;
    }
    let entities_path = with_suffix(&args.out, relex::kbembed::ENTITIES_SUFFIX);
    let relations_path = with_suffix(&args.out, relex::kbembed::KB_RELATIONS_SUFFIX);
    manifest.add_output(&entities_path)?;
    manifest.add_output(&relations_path)?;
    manifest.save_for(&entities_path)?;
    manifest.save_for(&relations_path)?;
    Ok(())
}

fn extract(args: ExtractArgs, argv: &[String]) -> Result<()> {
    let m2r = M2RModel::load(&args.m2r)?;
    let kb = match (&args.kb, args.fusion) {
        (Some(prefix), _) => Some(KBModel::load(prefix)?),
        (None, FusionArg::M2rPlusKb) => {
            return Err(RelexError::InvalidArgument(
                "--fusion m2r+kb requires --kb".into(),
            ))
        }
        (None, FusionArg::M2r) => None,
    };
    if let Some(kb) = &kb {
        if kb.dim() != m2r.dim() {
            return Err(RelexError::DimensionMismatch {
                expected: m2r.dim(),
                got: kb.dim(),
            });
        }
    }

    let mut raws = load_mentions(&args.mentions)?;
    // Labels play no part in scoring; fold unknown ones into the
    // no-relation label so weakly labeled test files always encode.
    let relation_vocab = m2r.relation_vocab();
    if !relation_vocab.contains(NA_LABEL)
        && raws.iter().any(|m| !relation_vocab.contains(&m.label))
    {
        return Err(RelexError::InvalidArgument(
            "mention labels outside the model vocabulary and no NA fallback".into(),
        ));
    }
    for m in raws.iter_mut() {
        if !relation_vocab.contains(&m.label) {
            m.label = NA_LABEL.to_string();
        }
    }
    let records = encode_mentions(&raws, m2r.feature_vocab(), relation_vocab)?;

    let options = ExtractOptions {
        fusion: match args.fusion {
            FusionArg::M2r => FusionMode::MentionOnly,
            FusionArg::M2rPlusKb => FusionMode::MentionPlusKb,
        },
        threshold: args.calib_threshold,
        direction: args.calib_direction.into(),
    };
    let extractions = extract_all(&m2r, kb.as_ref(), &records, &options)?;
    save_extractions(&args.out, &extractions)?;

    let mut manifest = Manifest::new("extract", argv, None);
    manifest.add_input(&args.mentions)?;
    manifest.add_input(&with_suffix(&args.m2r, relex::mention2rel::FEATURES_SUFFIX))?;
    manifest.add_input(&with_suffix(&args.m2r, relex::mention2rel::RELATIONS_SUFFIX))?;
    if let Some(prefix) = &args.kb {
        manifest.add_input(&with_suffix(prefix, relex::kbembed::ENTITIES_SUFFIX))?;
        manifest.add_input(&with_suffix(prefix, relex::kbembed::KB_RELATIONS_SUFFIX))?;
    }
    manifest.add_output(&args.out)?;
    manifest.save_for(&args.out)?;
    eprintln!("# extract: {} candidate facts", extractions.len());
    Ok(())
}

fn eval(args: EvalArgs, argv: &[String]) -> Result<()> {
    let extractions = relex::extractor::load_extractions(&args.extractions)?;
    let mut gold = GoldSet::load(&args.gold)?;
    if let Some(remap_path) = &args.remap {
        let mapping: HashMap<String, String> = load_relation_mapping(remap_path)?;
        gold = gold.with_remapped_relations(&mapping)?;
    }
    let curve = precision_recall_curve(&extractions, &gold)?;
    save_curve(&args.out, &curve)?;

    let auc_01 = area_under_pr(&curve, 0.1)?;
    let auc_10 = area_under_pr(&curve, 1.0)?;
    match precision_at_recall(&curve, 0.5) {
        Some(p) => println!("auc@0.1={auc_01} auc@1.0={auc_10} precision@r0.5={p}"),
        None => println!("auc@0.1={auc_01} auc@1.0={auc_10} precision@r0.5=n/a"),
    }

    let mut manifest = Manifest::new("eval", argv, None);
    manifest.add_input(&args.extractions)?;
    manifest.add_input(&args.gold)?;
    if let Some(path) = &args.remap {
        manifest.add_input(path)?;
    }
    manifest.add_output(&args.out)?;
    manifest.save_for(&args.out)?;
    Ok(())
}
