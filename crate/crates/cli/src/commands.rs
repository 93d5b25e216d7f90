use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};

use backrank::backpack::{Backpack, BackpackConfig, Checkpoint};
use backrank::corpus::{
    generate_synthetic, group_run, read_qrels, read_run, read_tsv, write_run, Bm25Index, Bm25Params, Collection,
    KeyValues, RankedList, SynthConfig, Vocab,
};
use backrank::metrics::{bias_report, evaluate_effectiveness, filter_gendered_queries, GenderLexicon, Qrels};
use backrank::ranker::{build_examples, rerank, sweep_lambda, train_with, NegativeSource, SweepConfig, TrainConfig, SWEEP_HEADER};
use backrank::senses::{attribute_scores, build_sense_map, default_polarity_lexicon, load_polarity_lexicon, PolarityLexicon};

use crate::manifest::{ManifestError, RunManifest};
use crate::output::{emit, lambda_label, Csv};

#[derive(Parser, Debug)]
#[command(name = "backrank", version, about = "Backpack ranker with inference-time sense suppression")]
pub struct Cli {
    /// Seed recorded in every output; overrides any seed in --config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic collection with candidate pools.
    Synth(SynthArgs),
    /// First-stage BM25 retrieval into a TREC run.
    Retrieve(RetrieveArgs),
    /// Train (or resume training) a ranker checkpoint.
    Train(TrainArgs),
    /// Rerank a candidate run, optionally suppressing senses.
    Rank(RankArgs),
    /// MRR@k and NDCG@k of a run.
    Eval(EvalArgs),
    /// RaB / ARaB of a run.
    Bias(BiasArgs),
    /// Per-sense polarity scores of a checkpoint.
    Senses(SensesArgs),
    /// Effectiveness and bias across several λ values.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Flat key=value generator settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Overrides `rho` from the config.
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args, Debug)]
struct CollectionArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    queries: PathBuf,
}

#[derive(Args, Debug)]
struct RetrieveArgs {
    #[command(flatten)]
    collection: CollectionArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    depth: usize,
    #[arg(long, default_value_t = 0.9)]
    k1: f64,
    #[arg(long, default_value_t = 0.4)]
    b: f64,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    collection: CollectionArgs,
    #[arg(long)]
    qrels: PathBuf,
    /// Run whose per-query lists supply training candidates.
    #[arg(long)]
    candidates: PathBuf,
    /// Checkpoint written after every epoch.
    #[arg(long)]
    out: PathBuf,
    /// Training and model settings as key=value pairs.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    negative_source: Option<NegativeSource>,
    /// Continue from the checkpoint at --out.
    #[arg(long)]
    resume: bool,
    /// Per-step loss CSV; defaults to `<out>.loss.csv`.
    #[arg(long)]
    loss_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SenseArgs {
    /// Polarity pair file; the built-in English list by default.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Number of suppressed senses.
    #[arg(long, default_value_t = 2)]
    top_senses: usize,
}

#[derive(Args, Debug)]
struct RankArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[command(flatten)]
    collection: CollectionArgs,
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Weight of the suppressed senses, in (0, 1].
    #[arg(long)]
    lambda: Option<f64>,
    #[command(flatten)]
    senses: SenseArgs,
    #[arg(long, default_value = "backrank")]
    tag: String,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    run: PathBuf,
    #[arg(long)]
    qrels: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40")]
    cutoffs: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Tf,
    Bool,
    Both,
}

#[derive(Args, Debug)]
struct BiasArgs {
    #[arg(long)]
    run: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    /// Query file; when given, queries with gender terms are left out.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40")]
    cutoffs: Vec<usize>,
    #[arg(long, value_enum, default_value = "both")]
    variant: VariantArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SensesArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[command(flatten)]
    collection: CollectionArgs,
    #[arg(long)]
    qrels: PathBuf,
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1.0,0.7,0.5")]
    lambdas: Vec<f64>,
    #[command(flatten)]
    senses: SenseArgs,
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40")]
    cutoffs: Vec<usize>,
    /// Evaluate queries that contain gender terms too.
    #[arg(long)]
    keep_gendered: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error with its process exit code: 2 for bad input, 1 otherwise.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl From<ManifestError> for Failure {
    fn from(e: ManifestError) -> Self {
        Failure { code: 2, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<backrank::Error>() {
            Some(backrank::Error::Config { .. } | backrank::Error::Parse { .. }) => 2,
            _ => 1,
        };
        Failure { code, error }
    }
}

impl From<backrank::Error> for Failure {
    fn from(e: backrank::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn usage(message: String) -> Failure {
    Failure { code: 2, error: anyhow!(message) }
}

type CmdResult = Result<(), Failure>;

pub fn run(cli: Cli) -> CmdResult {
    let seed = cli.seed;
    match cli.command {
        Command::Synth(a) => synth(a, seed),
        Command::Retrieve(a) => retrieve(a, seed.unwrap_or(0)),
        Command::Train(a) => train(a, seed),
        Command::Rank(a) => rank(a, seed.unwrap_or(0)),
        Command::Eval(a) => eval(a, seed.unwrap_or(0)),
        Command::Bias(a) => bias(a, seed.unwrap_or(0)),
        Command::Senses(a) => senses(a, seed.unwrap_or(0)),
        Command::Sweep(a) => sweep(a, seed.unwrap_or(0)),
    }
}

fn start(manifest: RunManifest) -> Result<RunManifest, Failure> {
    manifest.validate()?;
    debug!("{}", manifest.summary());
    Ok(manifest)
}

fn load_queries_only(c: &CollectionArgs) -> anyhow::Result<Collection> {
    Ok(Collection { docs: read_tsv(&c.corpus)?, queries: read_tsv(&c.queries)?, qrels: Qrels::new() })
}

fn load_candidates(path: &Path) -> anyhow::Result<Vec<RankedList>> {
    Ok(group_run(&read_run(path)?))
}

fn polarity_pairs(path: Option<&Path>, vocab: &Vocab) -> anyhow::Result<PolarityLexicon> {
    let lex = match path {
        Some(p) => load_polarity_lexicon(p, Some(vocab))?,
        None => default_polarity_lexicon(Some(vocab)),
    };
    if lex.pairs.is_empty() {
        return Err(anyhow!("no polarity pair has both words in the checkpoint vocabulary"));
    }
    Ok(lex)
}

fn synth(a: SynthArgs, seed: Option<u64>) -> CmdResult {
    let mut kv = match &a.config {
        Some(p) if p.is_file() => KeyValues::read(p)?,
        Some(p) => return Err(usage(format!("{}: input file not found", p.display()))),
        None => KeyValues::default(),
    };
    if let Some(rho) = a.rho {
        kv.insert("rho", rho);
    }
    if let Some(s) = seed {
        kv.insert("seed", s);
    }
    let cfg = SynthConfig::from_key_values(&kv)?;
    if !a.out_dir.is_dir() {
        std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    }
    let m = start(RunManifest { config: a.config.clone(), ..RunManifest::new("synth", cfg.seed) })?;
    let syn = generate_synthetic(&cfg, &GenderLexicon::default())?;
    let dir = &a.out_dir;
    syn.collection.save(&dir.join("corpus.tsv"), &dir.join("queries.tsv"), &dir.join("qrels.txt"))?;
    let records: Vec<_> = syn.pools.iter().flat_map(|l| l.to_records("pool")).collect();
    write_run(dir.join("candidates.run"), &records)?;
    let settings = dir.join("synth.cfg");
    std::fs::write(&settings, cfg.to_key_values().to_text()).with_context(|| format!("writing {}", settings.display()))?;
    info!(
        "{} documents, {} queries written to {} (seed {})",
        syn.collection.docs.len(),
        syn.collection.queries.len(),
        dir.display(),
        m.seed
    );
    Ok(())
}

fn retrieve(a: RetrieveArgs, seed: u64) -> CmdResult {
    start(
        RunManifest::new("retrieve", seed)
            .input(&a.collection.corpus)
            .input(&a.collection.queries)
            .output(&a.out),
    )?;
    if a.depth == 0 {
        return Err(usage("--depth must be positive".into()));
    }
    let c = load_queries_only(&a.collection)?;
    let index = Bm25Index::build(&c.docs, Bm25Params { k1: a.k1, b: a.b });
    let records: Vec<_> = c
        .queries
        .iter()
        .flat_map(|(q, tokens)| index.retrieve(q, tokens, a.depth).to_records("bm25"))
        .collect();
    write_run(&a.out, &records)?;
    info!("retrieved {} lines for {} queries", records.len(), c.queries.len());
    Ok(())
}

fn train(a: TrainArgs, seed: Option<u64>) -> CmdResult {
    let mut manifest = RunManifest::new("train", 0)
        .input(&a.collection.corpus)
        .input(&a.collection.queries)
        .input(&a.qrels)
        .input(&a.candidates)
        .output(&a.out);
    manifest.config = a.config.clone();
    if a.resume {
        manifest = manifest.input(&a.out);
    }
    let loss_path = a.loss_csv.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".loss.csv");
        PathBuf::from(p)
    });
    manifest = manifest.output(&loss_path);
    manifest.validate()?;

    let mut kv = match &a.config {
        Some(p) => KeyValues::read(p)?,
        None => KeyValues::default(),
    };
    let known: Vec<&str> = TrainConfig::keys().iter().chain(BackpackConfig::keys()).copied().collect();
    kv.reject_unknown(&known)?;
    let overrides = [
        ("epochs", a.epochs.map(|v| v.to_string())),
        ("learning_rate", a.lr.map(|v| v.to_string())),
        ("batch_size", a.batch_size.map(|v| v.to_string())),
        ("negatives", a.negatives.map(|v| v.to_string())),
        ("negative_source", a.negative_source.map(|v| v.to_string())),
        ("seed", seed.map(|v| v.to_string())),
    ];
    for (k, v) in overrides {
        if let Some(v) = v {
            kv.insert(k, v);
        }
    }
    let cfg = TrainConfig::from_key_values(&kv)?;
    manifest.seed = cfg.seed;
    let manifest = start(manifest)?;

    let collection = Collection::load(&a.collection.corpus, &a.collection.queries, &a.qrels)?;
    let pools = load_candidates(&a.candidates)?;
    let mut ckpt = if a.resume {
        let ckpt = Checkpoint::<f64>::load(&a.out)?;
        info!("resuming from epoch {} of {}", ckpt.epochs_trained, cfg.epochs);
        ckpt
    } else {
        let vocab = Vocab::from_tokens(collection.vocabulary_tokens(&GenderLexicon::default()));
        let model_cfg = BackpackConfig::from_key_values(&kv, vocab.len())?;
        let model = Backpack::new(model_cfg, cfg.seed)?;
        info!("model with {} parameters over {} tokens", model.num_parameters(), vocab.len());
        Checkpoint::new(model, vocab)?
    };
    let examples = build_examples(&collection, &ckpt.vocab, &pools, &cfg)?;
    info!("{} training lists", examples.len());
    let out = a.out.clone();
    train_with(&mut ckpt, &examples, &cfg, |c| c.save(&out))?;
    if ckpt.epochs_trained == 0 {
        ckpt.save(&out)?;
    }

    let steps_per_epoch = examples.len().div_ceil(cfg.batch_size);
    let mut csv = Csv::new("step,epoch,loss");
    for (i, loss) in ckpt.loss_history.iter().enumerate() {
        csv.row(format!("{},{},{loss:.6}", i + 1, i / steps_per_epoch + 1));
    }
    emit(Some(&loss_path), &csv.finish(manifest.seed, "none"))?;
    Ok(())
}

fn rank(a: RankArgs, seed: u64) -> CmdResult {
    let manifest = RunManifest {
        lambda: a.lambda,
        top_senses: Some(a.senses.top_senses),
        ..RunManifest::new("rank", seed)
            .input(&a.checkpoint)
            .input(&a.collection.corpus)
            .input(&a.collection.queries)
            .input(&a.candidates)
            .output(&a.out)
    };
    let manifest = RunManifest { config: a.senses.lexicon.clone(), ..manifest };
    start(manifest)?;
    let ckpt = Checkpoint::<f64>::load(&a.checkpoint)?;
    let collection = load_queries_only(&a.collection)?;
    let candidates = load_candidates(&a.candidates)?;
    let map = match a.lambda {
        None => None,
        Some(lambda) => {
            let lex = polarity_pairs(a.senses.lexicon.as_deref(), &ckpt.vocab)?;
            let scores = attribute_scores(&ckpt.model, &ckpt.vocab, &lex.pairs)?;
            let map = build_sense_map(&scores, lambda, a.senses.top_senses).map_err(|e| usage(e.to_string()))?;
            let shown: Vec<usize> = map.suppressed().iter().map(|l| l + 1).collect();
            info!("suppressing senses {shown:?} with weight {lambda}");
            Some(map)
        }
    };
    let lists = rerank(&ckpt.model, &ckpt.vocab, &collection, &candidates, map.as_ref())?;
    let records: Vec<_> = lists.iter().flat_map(|l| l.to_records(&a.tag)).collect();
    write_run(&a.out, &records)?;
    Ok(())
}

fn eval(a: EvalArgs, seed: u64) -> CmdResult {
    start(RunManifest { cutoffs: a.cutoffs.clone(), ..RunManifest::new("eval", seed).input(&a.run).input(&a.qrels) })?;
    let lists = load_candidates(&a.run)?;
    let qrels = read_qrels(&a.qrels)?.qrels;
    let mut csv = Csv::new("cutoff,mrr,ndcg,queries");
    for row in evaluate_effectiveness(&lists, &qrels, &a.cutoffs) {
        csv.row(format!("{},{:.6},{:.6},{}", row.cutoff, row.mrr, row.ndcg, row.queries));
    }
    emit(a.out.as_deref(), &csv.finish(seed, "none"))?;
    Ok(())
}

fn bias(a: BiasArgs, seed: u64) -> CmdResult {
    let mut manifest = RunManifest { cutoffs: a.cutoffs.clone(), ..RunManifest::new("bias", seed).input(&a.run).input(&a.corpus) };
    if let Some(q) = &a.queries {
        manifest = manifest.input(q);
    }
    start(manifest)?;
    let lexicon = GenderLexicon::default();
    let docs = read_tsv(&a.corpus)?;
    let mut lists = load_candidates(&a.run)?;
    if let Some(q) = &a.queries {
        let queries = read_tsv(q)?;
        let filter = filter_gendered_queries(queries.iter().map(|(id, t)| (id.as_str(), t.as_slice())), &lexicon);
        info!("dropped {} queries with gender terms", filter.dropped);
        lists.retain(|l| filter.kept.contains(&l.query_id));
    }
    let report = bias_report(&lists, |d| docs.get(d).map(Vec::as_slice), &lexicon, &a.cutoffs, &Default::default())?;
    let header = match a.variant {
        VariantArg::Tf => "cutoff,rab_tf,arab_tf",
        VariantArg::Bool => "cutoff,rab_bool,arab_bool",
        VariantArg::Both => "cutoff,rab_tf,arab_tf,rab_bool,arab_bool",
    };
    let mut csv = Csv::new(header);
    for r in &report.rows {
        csv.row(match a.variant {
            VariantArg::Tf => format!("{},{:.6},{:.6}", r.cutoff, r.rab_tf, r.arab_tf),
            VariantArg::Bool => format!("{},{:.6},{:.6}", r.cutoff, r.rab_bool, r.arab_bool),
            VariantArg::Both => format!("{},{:.6},{:.6},{:.6},{:.6}", r.cutoff, r.rab_tf, r.arab_tf, r.rab_bool, r.arab_bool),
        });
    }
    emit(a.out.as_deref(), &csv.finish(seed, "none"))?;
    Ok(())
}

fn senses(a: SensesArgs, seed: u64) -> CmdResult {
    start(RunManifest { config: a.lexicon.clone(), ..RunManifest::new("senses", seed).input(&a.checkpoint) })?;
    let ckpt = Checkpoint::<f64>::load(&a.checkpoint)?;
    let lex = polarity_pairs(a.lexicon.as_deref(), &ckpt.vocab)?;
    let scores = attribute_scores(&ckpt.model, &ckpt.vocab, &lex.pairs)?;
    let order = scores.ranking();
    let mut csv = Csv::new("sense,score,rank");
    for (l, s) in scores.scores.iter().enumerate() {
        let rank = order.iter().position(|&o| o == l).expect("every sense is ranked") + 1;
        csv.row(format!("{},{s:.6},{rank}", l + 1));
    }
    emit(a.out.as_deref(), &csv.finish(seed, "none"))?;
    Ok(())
}

fn sweep(a: SweepArgs, seed: u64) -> CmdResult {
    let manifest = RunManifest {
        config: a.senses.lexicon.clone(),
        cutoffs: a.cutoffs.clone(),
        top_senses: Some(a.senses.top_senses),
        ..RunManifest::new("sweep", seed)
            .input(&a.checkpoint)
            .input(&a.collection.corpus)
            .input(&a.collection.queries)
            .input(&a.qrels)
            .input(&a.candidates)
    };
    let manifest = match &a.out {
        Some(o) => manifest.output(o),
        None => manifest,
    };
    start(manifest)?;
    if let Some(l) = a.lambdas.iter().find(|&&l| !(l > 0.0 && l <= 1.0)) {
        return Err(usage(format!("--lambdas must lie in (0, 1], got {l}")));
    }
    let ckpt = Checkpoint::<f64>::load(&a.checkpoint)?;
    let collection = Collection::load(&a.collection.corpus, &a.collection.queries, &a.qrels)?;
    let candidates = load_candidates(&a.candidates)?;
    let lex = polarity_pairs(a.senses.lexicon.as_deref(), &ckpt.vocab)?;
    let scores = attribute_scores(&ckpt.model, &ckpt.vocab, &lex.pairs)?;
    if a.senses.top_senses > scores.len() {
        return Err(usage(format!("--top-senses {} exceeds the {} senses of the model", a.senses.top_senses, scores.len())));
    }
    let cfg = SweepConfig {
        lambdas: a.lambdas.clone(),
        top_senses: a.senses.top_senses,
        cutoffs: a.cutoffs.clone(),
        filter_gendered: !a.keep_gendered,
        ..Default::default()
    };
    let rows = sweep_lambda(&ckpt.model, &ckpt.vocab, &collection, &candidates, &scores, &cfg)?;
    let mut csv = Csv::new(SWEEP_HEADER);
    for r in &rows {
        csv.row(r.to_csv());
    }
    emit(a.out.as_deref(), &csv.finish(seed, &lambda_label(&a.lambdas)))?;
    Ok(())
}
