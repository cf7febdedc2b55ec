//! Pipeline driver: each subcommand reads its predecessors' files, writes
//! its outputs into `--out`, and sidecars a config hash next to every file.

mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use chargraph::characters::{
    chart_to_csv, count_mention_types, default_pronoun_lexicon, extract_mentions,
    mentions_from_csv, mentions_to_csv, narrative_chart, AliasTable,
};
use chargraph::cooccur::{
    sentence_cooccurrences, window_cooccurrences, CooccurrenceStrategy, EdgeList,
};
use chargraph::corpus::{load_corpus, load_manifest, SegmentationConfig, TokenizedCorpus};
use chargraph::embed::{
    laplacian_eigenmap, node2vec, project_2d, word_embeddings, EmbeddingMatrix, Node2vecConfig,
    Provenance, WalkConfig, WordEmbeddingConfig,
};
use chargraph::eval::{
    benchmark_corpus, derive_labels, planted_partition, reports_to_csv, run_experiment,
    EvalReport, ExperimentArtifacts, ExperimentConfig, LabelAssignment, PlantedConfig,
};
use chargraph::gnn::{
    train_link_predictor, train_node_classifier, FeatureSource, GnnKind, TaskKind, TrainConfig,
};
use chargraph::graph::{
    betweenness, conventional_density, density, layout_fr, layout_to_csv, mean_degree,
    rank_centrality, read_graphml, shortest_path_stats, write_graphml, CentralityMeasure,
    CharacterGraph,
};

use output::OutputDir;

#[derive(Parser)]
#[command(
    name = "chargraph",
    about = "Character co-occurrence networks: extraction, metrics, embeddings, and GNNs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize and segment raw text into a corpus file
    Ingest(IngestArgs),
    /// Resolve named character mentions and per-work statistics
    Mentions(MentionsArgs),
    /// Character-by-chapter narrative chart
    Chart(ChartArgs),
    /// Extract a weighted co-occurrence edge list
    Extract(ExtractArgs),
    /// Build the character graph, metrics, and layout
    Graph(GraphArgs),
    /// Train word, node2vec, or Laplacian-eigenmap embeddings
    Embed(EmbedArgs),
    /// Train a GNN for classification or link prediction
    Train(TrainArgs),
    /// Run an experiment grid from a config file
    Evaluate(EvaluateArgs),
    /// Write the bundled fixture corpus and the synthetic benchmark
    Fixture(FixtureArgs),
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let (stage, result) = match cli.command {
        Command::Ingest(args) => ("ingest", run_ingest(args)),
        Command::Mentions(args) => ("mentions", run_mentions(args)),
        Command::Chart(args) => ("chart", run_chart(args)),
        Command::Extract(args) => ("extract", run_extract(args)),
        Command::Graph(args) => ("graph", run_graph(args)),
        Command::Embed(args) => ("embed", run_embed(args)),
        Command::Train(args) => ("train", run_train(args)),
        Command::Evaluate(args) => ("evaluate", run_evaluate(args)),
        Command::Fixture(args) => ("fixture", run_fixture(args)),
    };
    if let Err(err) = result {
        eprintln!("error in stage '{stage}': {err:#}");
        std::process::exit(1);
    }
}

fn read_corpus(path: &Path) -> Result<TokenizedCorpus> {
    let data =
        std::fs::read(path).with_context(|| format!("reading corpus {}", path.display()))?;
    Ok(serde_json::from_slice(&data)?)
}

fn read_mentions(path: &Path) -> Result<Vec<chargraph::characters::MentionRecord>> {
    let file = std::fs::File::open(path)
        .with_context(|| format!("reading mentions {}", path.display()))?;
    Ok(mentions_from_csv(std::io::BufReader::new(file))?)
}

fn read_graph(path: &Path) -> Result<CharacterGraph> {
    let file = std::fs::File::open(path)
        .with_context(|| format!("reading graph {}", path.display()))?;
    Ok(read_graphml(std::io::BufReader::new(file))?)
}

fn read_aliases(path: &Path) -> Result<Vec<(String, String)>> {
    if path.extension().is_some_and(|e| e == "json") {
        Ok(AliasTable::read_json(path)?)
    } else {
        Ok(AliasTable::read_tsv(path)?)
    }
}

// ---------------------------------------------------------------- ingest

#[derive(Args, Serialize)]
struct IngestArgs {
    /// JSON manifest listing work_id, title, path, chapter_delimiter
    #[arg(long)]
    manifest: PathBuf,
    /// Alias table; hyphenated aliases become tokenizer exceptions
    #[arg(long)]
    aliases: Option<PathBuf>,
    /// Default chapter delimiter pattern (per-work overrides in manifest)
    #[arg(long)]
    chapter_pattern: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

fn segmentation_config(
    aliases: Option<&PathBuf>,
    chapter_pattern: Option<&String>,
) -> Result<SegmentationConfig> {
    let mut config = SegmentationConfig::default();
    if let Some(pattern) = chapter_pattern {
        config.chapter_delimiter = pattern.clone();
    }
    if let Some(path) = aliases {
        let raw = read_aliases(path)?;
        config.token_exceptions = AliasTable::token_exceptions(&raw);
    }
    Ok(config)
}

fn run_ingest(args: IngestArgs) -> Result<()> {
    let out = OutputDir::new(&args.out, "ingest", serde_json::to_value(&args)?)?;
    let config = segmentation_config(args.aliases.as_ref(), args.chapter_pattern.as_ref())?;
    let documents = load_manifest(&args.manifest)?;
    let corpus = load_corpus(&documents, &config)?;
    out.write_json("corpus.json", &corpus)?;
    log::info!(
        "ingested {} works, {} tokens, {} chapters",
        corpus.works.len(),
        corpus.tokens.len(),
        corpus.chapters.len()
    );
    Ok(())
}

// -------------------------------------------------------------- mentions

#[derive(Args, Serialize)]
struct MentionsArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    aliases: PathBuf,
    /// Optional newline-separated nominal phrases to count (no attribution)
    #[arg(long)]
    nominal_lexicon: Option<PathBuf>,
    /// Work groups as JSON {"work_id": "class"} for label derivation
    #[arg(long)]
    work_groups: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn run_mentions(args: MentionsArgs) -> Result<()> {
    let out = OutputDir::new(&args.out, "mentions", serde_json::to_value(&args)?)?;
    let corpus = read_corpus(&args.corpus)?;
    let raw = read_aliases(&args.aliases)?;
    let mut seg = SegmentationConfig::default();
    seg.token_exceptions = AliasTable::token_exceptions(&raw);
    let table = AliasTable::compile(&raw, &seg)?;
    let mentions = extract_mentions(&corpus, &table);

    let mut csv = Vec::new();
    mentions_to_csv(&corpus, &mentions, &mut csv)?;
    out.write_bytes("mentions.csv", &csv)?;

    let nominal = match &args.nominal_lexicon {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Some(
                text.lines()
                    .filter(|l| !l.trim().is_empty())
                    .map(|l| l.split_whitespace().map(str::to_string).collect())
                    .collect::<std::collections::BTreeSet<Vec<String>>>(),
            )
        }
        None => None,
    };
    let stats =
        count_mention_types(&corpus, &table, &default_pronoun_lexicon(), nominal.as_ref())?;
    out.write_json("stats.json", &stats)?;

    let groups: Option<BTreeMap<String, String>> = match &args.work_groups {
        Some(path) => Some(serde_json::from_slice(&std::fs::read(path)?)?),
        None => None,
    };
    let labels = derive_labels(&mentions, &corpus, groups.as_ref())?;
    out.write_json("labels.json", &labels)?;
    log::info!("extracted {} mentions", mentions.len());
    Ok(())
}

// ----------------------------------------------------------------- chart

#[derive(Args, Serialize)]
struct ChartArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    mentions: PathBuf,
    /// Comma-separated canonical ids for the chart rows
    #[arg(long, value_delimiter = ',')]
    characters: Vec<String>,
    /// Newline-separated canonical ids (alternative to --characters)
    #[arg(long)]
    characters_file: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn run_chart(args: ChartArgs) -> Result<()> {
    let out = OutputDir::new(&args.out, "chart", serde_json::to_value(&args)?)?;
    let corpus = read_corpus(&args.corpus)?;
    let mentions = read_mentions(&args.mentions)?;
    let mut characters = args.characters.clone();
    if let Some(path) = &args.characters_file {
        characters.extend(
            std::fs::read_to_string(path)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string),
        );
    }
    let chart = narrative_chart(&mentions, &characters, &corpus)?;
    let mut csv = Vec::new();
    chart_to_csv(&chart, &mut csv)?;
    out.write_bytes("chart.csv", &csv)?;
    Ok(())
}

// --------------------------------------------------------------- extract

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum StrategyArg {
    Sentence,
    Window,
}

#[derive(Args, Serialize)]
struct ExtractArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    mentions: PathBuf,
    #[arg(long, value_enum, default_value_t = StrategyArg::Sentence)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 2000)]
    window_chars: usize,
    /// Count sentence pairs per mention instance instead of once
    #[arg(long)]
    multiplicity: bool,
    #[arg(long)]
    out: PathBuf,
}

fn run_extract(args: ExtractArgs) -> Result<()> {
    let out = OutputDir::new(&args.out, "extract", serde_json::to_value(&args)?)?;
    let corpus = read_corpus(&args.corpus)?;
    let mentions = read_mentions(&args.mentions)?;
    let edges = match args.strategy {
        StrategyArg::Sentence => sentence_cooccurrences(&mentions, &corpus, args.multiplicity),
        StrategyArg::Window => window_cooccurrences(&mentions, &corpus, args.window_chars),
    };
    let mut csv = Vec::new();
    edges.to_csv(&mut csv)?;
    out.write_bytes("edges.csv", &csv)?;
    log::info!(
        "{} edges, total weight {}",
        edges.entries.len(),
        edges.total_weight()
    );
    Ok(())
}

// ----------------------------------------------------------------- graph

#[derive(Args, Serialize)]
struct GraphArgs {
    #[arg(long)]
    edges: PathBuf,
    /// With --mentions: attach dominant-work node attributes
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    mentions: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    layout_iterations: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Rank length in metrics.json
    #[arg(long, default_value_t = 15)]
    top_k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct MetricsReport {
    nodes: usize,
    edges: usize,
    density: f64,
    density_conventional: f64,
    mean_degree: f64,
    diameter: usize,
    avg_shortest_path: f64,
    largest_component_only: bool,
    top_degree: Vec<String>,
    top_betweenness: Vec<String>,
    betweenness: BTreeMap<String, BetweennessEntry>,
}

#[derive(Serialize)]
struct BetweennessEntry {
    raw: f64,
    normalized: f64,
}

fn run_graph(args: GraphArgs) -> Result<()> {
    let out = OutputDir::new(&args.out, "graph", serde_json::to_value(&args)?)?;
    let file = std::fs::File::open(&args.edges)
        .with_context(|| format!("reading edges {}", args.edges.display()))?;
    let edges = EdgeList::from_csv(
        std::io::BufReader::new(file),
        CooccurrenceStrategy::Sentence {
            count_multiplicity: false,
        },
    )?;
    let mut graph = CharacterGraph::from_edge_list(&edges)?;

    if let (Some(corpus_path), Some(mentions_path)) = (&args.corpus, &args.mentions) {
        let corpus = read_corpus(corpus_path)?;
        let mentions = read_mentions(mentions_path)?;
        let assignment = derive_labels(&mentions, &corpus, None)?;
        for id in graph.nodes().to_vec() {
            if let Some(&label) = assignment.labels.get(&id) {
                graph.set_attribute(&id, "dominant_work", &assignment.classes[label])?;
            }
        }
    }

    let mut graphml = Vec::new();
    write_graphml(&graph, &mut graphml)?;
    out.write_bytes("graph.graphml", &graphml)?;

    let mut edge_csv = Vec::new();
    graph.edges_to_csv(&mut edge_csv)?;
    out.write_bytes("edges.csv", &edge_csv)?;

    let path_stats = shortest_path_stats(&graph)?;
    let scores = betweenness(&graph);
    let report = MetricsReport {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        density: density(&graph)?,
        density_conventional: conventional_density(&graph)?,
        mean_degree: mean_degree(&graph)?,
        diameter: path_stats.diameter,
        avg_shortest_path: path_stats.avg_shortest_path,
        largest_component_only: path_stats.largest_component_only,
        top_degree: rank_centrality(&graph, CentralityMeasure::Degree, args.top_k),
        top_betweenness: rank_centrality(&graph, CentralityMeasure::Betweenness, args.top_k),
        betweenness: graph
            .nodes()
            .iter()
            .zip(&scores)
            .map(|(id, s)| {
                (
                    id.clone(),
                    BetweennessEntry {
                        raw: s.raw,
                        normalized: s.normalized,
                    },
                )
            })
            .collect(),
    };
    out.write_json("metrics.json", &report)?;

    let layout = layout_fr(&graph, args.layout_iterations, args.seed);
    let mut layout_csv = Vec::new();
    layout_to_csv(&graph, &layout, &mut layout_csv)?;
    out.write_bytes("layout.csv", &layout_csv)?;
    Ok(())
}

// ----------------------------------------------------------------- embed

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum EmbedKind {
    Word,
    Node2vec,
    Le,
}

#[derive(Args, Serialize)]
struct EmbedArgs {
    #[arg(long, value_enum)]
    kind: EmbedKind,
    /// GraphML input (node2vec, le)
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Corpus input (word)
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    mentions: Option<PathBuf>,
    /// Train on raw text without collapsing mentions to canonical tokens
    #[arg(long)]
    raw_text: bool,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    lr: f64,
    #[arg(long, default_value_t = 5)]
    min_count: usize,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 10)]
    walks: usize,
    #[arg(long, default_value_t = 80)]
    walk_length: usize,
    /// Use co-occurrence weights (node2vec transitions, le Laplacian)
    #[arg(long)]
    weighted: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write a 2-D PCA projection of the embedding
    #[arg(long)]
    project: bool,
    #[arg(long)]
    out: PathBuf,
}

fn run_embed(args: EmbedArgs) -> Result<()> {
    let out = OutputDir::new(&args.out, "embed", serde_json::to_value(&args)?)?;
    let embedding: EmbeddingMatrix = match args.kind {
        EmbedKind::Word => {
            let corpus_path = args
                .corpus
                .as_ref()
                .context("--kind word requires --corpus")?;
            let corpus = read_corpus(corpus_path)?;
            let mentions = match &args.mentions {
                Some(path) => Some(read_mentions(path)?),
                None => None,
            };
            let config = WordEmbeddingConfig {
                dim: args.dims.unwrap_or(300),
                window: args.window.unwrap_or(5),
                negative_samples: args.negatives,
                epochs: args.epochs,
                learning_rate: args.lr,
                min_count: args.min_count,
                seed: args.seed,
                resolve_mentions: !args.raw_text,
            };
            let result = word_embeddings(&corpus, mentions.as_deref(), &config)?;
            log::info!(
                "word embedding: vocab {}, loss {:.4} -> {:.4}",
                result.embedding.len(),
                result.epoch_losses.first().unwrap_or(&0.0),
                result.epoch_losses.last().unwrap_or(&0.0)
            );
            result.embedding
        }
        EmbedKind::Node2vec => {
            let graph_path = args
                .graph
                .as_ref()
                .context("--kind node2vec requires --graph")?;
            let graph = read_graph(graph_path)?;
            let walk_config = WalkConfig {
                p: args.p,
                q: args.q,
                walks_per_node: args.walks,
                walk_length: args.walk_length,
                seed: args.seed,
                weighted: args.weighted,
            };
            let config = Node2vecConfig {
                dim: args.dims.unwrap_or(20),
                window: args.window.unwrap_or(10),
                negative_samples: args.negatives,
                epochs: args.epochs,
                learning_rate: args.lr,
            };
            node2vec(&graph, &walk_config, &config)?.embedding
        }
        EmbedKind::Le => {
            let graph_path = args.graph.as_ref().context("--kind le requires --graph")?;
            let graph = read_graph(graph_path)?;
            let result = laplacian_eigenmap(&graph, args.dims.unwrap_or(20), args.weighted)?;
            if result.used_largest_component {
                log::warn!("graph disconnected; embedding covers the largest component");
            }
            result.embedding
        }
    };

    let mut csv = Vec::new();
    embedding.to_csv(&mut csv)?;
    out.write_bytes_with_extra(
        "embedding.csv",
        &csv,
        serde_json::json!({
            "provenance": embedding.provenance,
            "dim": embedding.dim,
            "entities": embedding.len(),
            "config": embedding.config,
        }),
    )?;

    if args.project {
        let projection = project_2d(&embedding)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["entity_id", "x", "y"])?;
        for (id, (x, y)) in &projection {
            w.write_record([id.as_str(), &format!("{x}"), &format!("{y}")])?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
        out.write_bytes("projection.csv", &bytes)?;
    }
    Ok(())
}

// ----------------------------------------------------------------- train

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum TaskArg {
    Classify,
    Linkpred,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ModelArg {
    Gcn,
    Gat,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum FeatureArg {
    Ohe,
    Embedding,
}

#[derive(Args, Serialize)]
struct TrainArgs {
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelArg::Gcn)]
    model: ModelArg,
    #[arg(long, value_enum, default_value_t = FeatureArg::Ohe)]
    features: FeatureArg,
    #[arg(long)]
    embedding: Option<PathBuf>,
    /// Label assignment JSON (classification)
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long, default_value_t = 20)]
    hidden: usize,
    /// Output dimension for link prediction
    #[arg(long, default_value_t = 20)]
    dims: usize,
    #[arg(long)]
    weighted: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fraction of labeled nodes used for training (classification)
    #[arg(long, default_value_t = 0.9)]
    train_fraction: f64,
    /// Semi-supervised: exactly one labeled node per class
    #[arg(long)]
    semi: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct Checkpoint<'a> {
    task: TaskKind,
    seed: u64,
    config: &'a TrainConfig,
    params: &'a chargraph::gnn::ModelParams,
}

fn load_embedding(path: &Path) -> Result<EmbeddingMatrix> {
    let meta_path = path.with_file_name(format!(
        "{}.meta.json",
        path.file_name().unwrap().to_string_lossy()
    ));
    let (provenance, config) = if meta_path.exists() {
        let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(&meta_path)?)?;
        let provenance = meta
            .get("provenance")
            .and_then(|p| serde_json::from_value(p.clone()).ok())
            .unwrap_or(Provenance::Node2vec);
        (provenance, meta.get("config").cloned().unwrap_or_default())
    } else {
        (Provenance::Node2vec, serde_json::Value::Null)
    };
    let file = std::fs::File::open(path)
        .with_context(|| format!("reading embedding {}", path.display()))?;
    Ok(EmbeddingMatrix::from_csv(
        std::io::BufReader::new(file),
        provenance,
        config,
    )?)
}

fn training_mask(labels: &[usize], train_fraction: f64, semi: bool, seed: u64) -> Result<Vec<bool>> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    if semi {
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut mask = vec![false; labels.len()];
        for class in 0..n_classes {
            let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            if members.is_empty() {
                bail!("class {class} has no members");
            }
            mask[*members.choose(&mut rng).unwrap()] = true;
        }
        return Ok(mask);
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        bail!("--train-fraction must lie in (0, 1)");
    }
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.shuffle(&mut rng);
    let cut = ((labels.len() as f64) * train_fraction).round() as usize;
    let mut mask = vec![false; labels.len()];
    for &i in &order[..cut.max(1)] {
        mask[i] = true;
    }
    Ok(mask)
}

fn run_train(args: TrainArgs) -> Result<()> {
    let out = OutputDir::new(&args.out, "train", serde_json::to_value(&args)?)?;
    let graph = read_graph(&args.graph)?;
    let embedding = match (&args.features, &args.embedding) {
        (FeatureArg::Embedding, Some(path)) => Some(load_embedding(path)?),
        (FeatureArg::Embedding, None) => bail!("--features embedding requires --embedding"),
        _ => None,
    };
    let features = match &embedding {
        Some(e) => FeatureSource::Embedding(e),
        None => FeatureSource::OneHot,
    };
    let kind = match args.model {
        ModelArg::Gcn => GnnKind::Gcn,
        ModelArg::Gat => GnnKind::Gat,
    };

    match args.task {
        TaskArg::Classify => {
            let labels_path = args
                .labels
                .as_ref()
                .context("classification needs --labels")?;
            let assignment: LabelAssignment =
                serde_json::from_slice(&std::fs::read(labels_path)?)?;
            let labels = assignment.for_graph(&graph)?;
            let mask = training_mask(&labels, args.train_fraction, args.semi, args.seed)?;
            let config = TrainConfig {
                model: kind,
                epochs: args.epochs.unwrap_or(5000),
                learning_rate: args.lr.unwrap_or(1e-4),
                hidden_dim: args.hidden,
                weighted_adjacency: args.weighted,
                seed: args.seed,
            };
            let trained = train_node_classifier(&graph, features, &labels, &mask, &config)?;

            out.write_json(
                "model.json",
                &Checkpoint {
                    task: TaskKind::NodeClassification,
                    seed: args.seed,
                    config: &config,
                    params: &trained.params,
                },
            )?;
            out.write_loss_csv("log.csv", &trained.epoch_losses)?;

            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["node", "true_class", "predicted_class", "in_train_mask"])?;
            for (i, id) in graph.nodes().iter().enumerate() {
                w.write_record([
                    id.as_str(),
                    &assignment.classes[labels[i]],
                    &assignment.classes[trained.predictions[i]],
                    if mask[i] { "true" } else { "false" },
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
            out.write_bytes("predictions.csv", &bytes)?;

            let mut hidden_csv = Vec::new();
            trained.hidden.to_csv(&mut hidden_csv)?;
            out.write_bytes("hidden.csv", &hidden_csv)?;
        }
        TaskArg::Linkpred => {
            let config = TrainConfig {
                model: kind,
                epochs: args.epochs.unwrap_or(15000),
                learning_rate: args.lr.unwrap_or(1e-3),
                hidden_dim: args.hidden,
                weighted_adjacency: args.weighted,
                seed: args.seed,
            };
            let trained = train_link_predictor(&graph, features, args.dims, &config)?;
            out.write_json(
                "model.json",
                &Checkpoint {
                    task: TaskKind::LinkPrediction,
                    seed: args.seed,
                    config: &config,
                    params: &trained.params,
                },
            )?;
            out.write_loss_csv("log.csv", &trained.epoch_losses)?;

            let vectors = EmbeddingMatrix::new(
                graph.nodes().to_vec(),
                trained.node_vectors.clone(),
                Provenance::GnnHidden,
                serde_json::to_value(&config)?,
            );
            let mut csv = Vec::new();
            vectors.to_csv(&mut csv)?;
            out.write_bytes("node_vectors.csv", &csv)?;
        }
    }
    Ok(())
}

// -------------------------------------------------------------- evaluate

#[derive(Args, Serialize)]
struct EvaluateArgs {
    /// Evaluation config JSON: jobs plus the experiment grid
    #[arg(long)]
    config: PathBuf,
    /// Overrides the experiment seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct EvaluateJob {
    name: String,
    graph: PathBuf,
    #[serde(default)]
    labels: Option<PathBuf>,
    #[serde(default)]
    corpus: Option<PathBuf>,
    #[serde(default)]
    mentions: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct EvaluateFile {
    jobs: Vec<EvaluateJob>,
    experiment: ExperimentConfig,
}

fn run_evaluate(args: EvaluateArgs) -> Result<()> {
    let base = args
        .config
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();
    let mut file: EvaluateFile = serde_json::from_slice(&std::fs::read(&args.config)?)?;
    if let Some(seed) = args.seed {
        file.experiment.seed = seed;
    }
    let out = OutputDir::new(&args.out, "evaluate", serde_json::to_value(&file)?)?;

    let resolve = |p: &PathBuf| {
        if p.is_relative() {
            base.join(p)
        } else {
            p.clone()
        }
    };
    let mut all: Vec<(String, EvalReport)> = Vec::new();
    for job in &file.jobs {
        let graph = read_graph(&resolve(&job.graph))
            .context("missing graph; run the 'graph' stage (or 'fixture') first")?;
        let labels: Vec<usize> = match &job.labels {
            Some(path) => {
                let assignment: LabelAssignment =
                    serde_json::from_slice(&std::fs::read(resolve(path)).context(
                        "missing labels; run the 'mentions' stage (or 'fixture') first",
                    )?)?;
                assignment.for_graph(&graph)?
            }
            None => vec![0; graph.node_count()],
        };
        let corpus = match &job.corpus {
            Some(path) => Some(
                read_corpus(&resolve(path))
                    .context("missing corpus; run the 'ingest' stage first")?,
            ),
            None => None,
        };
        let mentions = match &job.mentions {
            Some(path) => Some(
                read_mentions(&resolve(path))
                    .context("missing mentions; run the 'mentions' stage first")?,
            ),
            None => None,
        };
        let artifacts = ExperimentArtifacts {
            graph: &graph,
            labels: &labels,
            corpus: corpus.as_ref(),
            mentions: mentions.as_deref(),
        };
        let reports = run_experiment(&artifacts, &file.experiment)?;
        log::info!("job '{}': {} reports", job.name, reports.len());
        all.extend(reports.into_iter().map(|r| (job.name.clone(), r)));
    }

    if file.jobs.len() == 1 {
        let reports: Vec<EvalReport> = all.iter().map(|(_, r)| r.clone()).collect();
        let mut csv = Vec::new();
        reports_to_csv(&reports, &mut csv)?;
        out.write_bytes("results.csv", &csv)?;
    } else {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "job",
            "task",
            "method",
            "features",
            "f1_mean",
            "f1_sd",
            "precision_mean",
            "precision_sd",
            "recall_mean",
            "recall_sd",
            "auc_mean",
            "auc_sd",
        ])?;
        for (job, report) in &all {
            let cell = |metric: &str, mean: bool| -> String {
                report
                    .aggregate
                    .get(metric)
                    .map(|s| format!("{}", if mean { s.mean } else { s.sd }))
                    .unwrap_or_default()
            };
            let task = match report.task {
                TaskKind::NodeClassification => "classification",
                TaskKind::LinkPrediction => "link_prediction",
            };
            w.write_record([
                job.as_str(),
                task,
                &report.method,
                &report.feature_source,
                &cell("f1", true),
                &cell("f1", false),
                &cell("precision", true),
                &cell("precision", false),
                &cell("recall", true),
                &cell("recall", false),
                &cell("auc", true),
                &cell("auc", false),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
        out.write_bytes("results.csv", &bytes)?;
    }
    out.write_json(
        "reports.json",
        &all
            .iter()
            .map(|(j, r)| serde_json::json!({ "job": j, "report": r }))
            .collect::<Vec<_>>(),
    )?;
    Ok(())
}

// --------------------------------------------------------------- fixture

#[derive(Args, Serialize)]
struct FixtureArgs {
    /// Benchmark graph seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn run_fixture(args: FixtureArgs) -> Result<()> {
    let out = OutputDir::new(&args.out, "fixture", serde_json::to_value(&args)?)?;

    // Bundled hand-annotated fixture corpus.
    out.write_bytes(
        "fixture/works/shire.txt",
        include_bytes!("../../../data/fixture/works/shire.txt"),
    )?;
    out.write_bytes(
        "fixture/works/mountain.txt",
        include_bytes!("../../../data/fixture/works/mountain.txt"),
    )?;
    out.write_bytes(
        "fixture/manifest.json",
        include_bytes!("../../../data/fixture/manifest.json"),
    )?;
    out.write_bytes(
        "fixture/aliases.tsv",
        include_bytes!("../../../data/fixture/aliases.tsv"),
    )?;

    // Synthetic planted-partition benchmark with a matching text corpus.
    let config = PlantedConfig {
        seed: args.seed,
        ..Default::default()
    };
    let benchmark = planted_partition(&config)?;
    let mut graphml = Vec::new();
    write_graphml(&benchmark.graph, &mut graphml)?;
    out.write_bytes("benchmark/graph.graphml", &graphml)?;

    let labels = LabelAssignment {
        classes: benchmark.classes.clone(),
        labels: benchmark
            .graph
            .nodes()
            .iter()
            .cloned()
            .zip(benchmark.labels.iter().copied())
            .collect(),
        counts: BTreeMap::new(),
    };
    out.write_json("benchmark/labels.json", &labels)?;

    let documents = benchmark_corpus(&benchmark, args.seed);
    let manifest: Vec<serde_json::Value> = documents
        .iter()
        .map(|d| {
            serde_json::json!({
                "work_id": d.work_id,
                "title": d.title,
                "path": format!("works/{}.txt", d.work_id),
            })
        })
        .collect();
    for d in &documents {
        out.write_bytes(
            &format!("benchmark/works/{}.txt", d.work_id),
            d.text.as_bytes(),
        )?;
    }
    out.write_json("benchmark/manifest.json", &manifest)?;
    let aliases: String = benchmark
        .graph
        .nodes()
        .iter()
        .map(|n| format!("{n}\t{n}\n"))
        .collect();
    out.write_bytes("benchmark/aliases.tsv", aliases.as_bytes())?;

    out.write_bytes(
        "benchmark/experiment.json",
        include_bytes!("../../../data/benchmark/experiment.json"),
    )?;
    log::info!(
        "benchmark: {} nodes, {} edges",
        benchmark.graph.node_count(),
        benchmark.graph.edge_count()
    );
    Ok(())
}
