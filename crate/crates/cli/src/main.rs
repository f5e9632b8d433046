use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use twinwl::bench::{bench_compare, parse_methods, BenchError};
use twinwl::io::generate::{self, wl_hard_suite, Family, GroundTruth};
use twinwl::io::{parse_edgelist, parse_tu_dataset, read_features, write_edgelist, write_features};
use twinwl::mlp::{kfold_cv, DenseMatrix, MlpError, TrainConfig};
use twinwl::ntwin::NtwinConfig;
use twinwl::{embed_corpus, twin_iso_test, wl_iso_test, Corpus, EmbedError, IsoDecision, Method};

#[derive(Parser)]
#[command(
    name = "twinwl",
    version,
    about = "Twin-WL isomorphism tests and graph embeddings"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "TWINWL_THREADS")]
    threads: Option<usize>,
    /// Suppress informational messages on standard error.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write synthetic graphs as edge-list files plus manifest.json.
    Gen(GenArgs),
    /// Decide whether two edge-list graphs are distinguishable.
    Isotest(IsotestArgs),
    /// Embed every graph of a dataset into feature records.
    Embed(EmbedArgs),
    /// Stratified k-fold MLP classification of feature records.
    Classify(ClassifyArgs),
    /// Compare embedding runtimes with a Welch t-test.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Cycle,
    DisjointCycles,
    Circulant,
    Rook4x4,
    Shrikhande,
    Er,
    Csl,
    WlHard,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Node count (cycle, circulant, er, csl).
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated cycle lengths (disjoint-cycles).
    #[arg(long, value_delimiter = ',')]
    lengths: Vec<usize>,
    /// Comma-separated skips (circulant).
    #[arg(long, value_delimiter = ',')]
    skips: Vec<usize>,
    /// Edge probability (er).
    #[arg(long)]
    p: Option<f64>,
    /// Number of graphs (er) or pairs (wl-hard).
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Skip pair for csl: circulant(n, {1, s1}) against circulant(n, {1, s2}).
    #[arg(long)]
    s1: Option<usize>,
    #[arg(long)]
    s2: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum IsoMethod {
    Wl,
    Stwin,
}

#[derive(Args)]
struct IsotestArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, value_enum, default_value = "stwin")]
    method: IsoMethod,
    #[arg(long, default_value_t = 3)]
    iters: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tu,
    Edgelist,
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value = "tu")]
    format: Format,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// wl, stwin, stwin-matrix or ntwin.
    #[arg(long, default_value = "stwin")]
    method: String,
    #[arg(long, default_value_t = 3)]
    iters: usize,
    #[arg(long, default_value_t = 2)]
    ntwin_layers: usize,
    #[arg(long, default_value_t = 16)]
    hidden: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 15)]
    patience: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[arg(long, default_value = "wl,stwin")]
    methods: String,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 3)]
    iters: usize,
}

enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => m,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::UnknownMethod(_) => usage(e.to_string()),
            EmbedError::Ntwin(_) => data(e),
        }
    }
}

impl From<MlpError> for CliError {
    fn from(e: MlpError) -> Self {
        match e {
            MlpError::InvalidConfig(_) => usage(e.to_string()),
            _ => data(e),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Embed(inner) => inner.into(),
            other => usage(other.to_string()),
        }
    }
}

struct Context {
    seed: u64,
    quiet: bool,
}

impl Context {
    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn emit(value: &Value) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out).map_err(|e| CliError::Internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let ctx = Context {
        seed: cli.seed,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Gen(a) => gen(&ctx, a),
        Command::Isotest(a) => isotest(a),
        Command::Embed(a) => embed(&ctx, a),
        Command::Classify(a) => classify(&ctx, a),
        Command::Bench(a) => bench(&ctx, a),
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| usage(format!("this family needs --{flag}")))
}

fn gen(ctx: &Context, a: GenArgs) -> Result<(), CliError> {
    let mut graphs = Vec::new();
    let mut pairs = Vec::new();
    let families: Vec<Family> = match a.family {
        FamilyArg::Cycle => vec![Family::Cycle {
            n: require(a.n, "n")?,
        }],
        FamilyArg::DisjointCycles => vec![Family::DisjointCycles {
            lengths: a.lengths.clone(),
        }],
        FamilyArg::Circulant => vec![Family::Circulant {
            n: require(a.n, "n")?,
            skips: a.skips.clone(),
        }],
        FamilyArg::Rook4x4 => vec![Family::Rook4x4],
        FamilyArg::Shrikhande => vec![Family::Shrikhande],
        FamilyArg::Er => {
            let (n, p) = (require(a.n, "n")?, require(a.p, "p")?);
            (0..a.count as u64)
                .map(|i| Family::ErRandom {
                    n,
                    p,
                    seed: ctx.seed.wrapping_add(i),
                })
                .collect()
        }
        FamilyArg::Csl => vec![Family::HardPairCsl {
            n: require(a.n, "n")?,
            s1: require(a.s1, "s1")?,
            s2: require(a.s2, "s2")?,
        }],
        FamilyArg::WlHard => {
            for (i, pair) in wl_hard_suite(a.count).pairs.into_iter().enumerate() {
                let (ia, ib) = (format!("pair{i:03}_a"), format!("pair{i:03}_b"));
                pairs.push(json!({
                    "a": format!("{ia}.edgelist"),
                    "b": format!("{ib}.edgelist"),
                    "family": pair.family,
                    "isomorphic": pair.truth == GroundTruth::Isomorphic,
                }));
                graphs.push(pair.a.with_id(ia));
                graphs.push(pair.b.with_id(ib));
            }
            Vec::new()
        }
    };
    for family in &families {
        let generated = generate::generate(family).map_err(|e| usage(e.to_string()))?;
        let batch: Vec<_> = generated.graphs().into_iter().cloned().collect();
        if batch.len() == 2 {
            pairs.push(json!({
                "a": format!("{}.edgelist", batch[0].id()),
                "b": format!("{}.edgelist", batch[1].id()),
                "family": family.tag(),
                "isomorphic": false,
            }));
        }
        graphs.extend(batch);
    }

    fs::create_dir_all(&a.out).map_err(|e| data(format!("{}: {e}", a.out.display())))?;
    let mut files = Vec::with_capacity(graphs.len());
    for g in &graphs {
        let name = format!("{}.edgelist", g.id());
        let path = a.out.join(&name);
        fs::write(&path, write_edgelist(g))
            .map_err(|e| data(format!("{}: {e}", path.display())))?;
        files.push(json!({ "file": name, "nodes": g.n(), "edges": g.edge_count() }));
    }
    let manifest = json!({
        "family": a.family_name(),
        "seed": ctx.seed,
        "graphs": files,
        "pairs": pairs,
    });
    let path = a.out.join("manifest.json");
    let text =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Internal(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| data(format!("{}: {e}", path.display())))?;
    ctx.info(format!(
        "wrote {} graphs to {}",
        graphs.len(),
        a.out.display()
    ));
    emit(&manifest)
}

impl GenArgs {
    fn family_name(&self) -> &'static str {
        match self.family {
            FamilyArg::Cycle => "cycle",
            FamilyArg::DisjointCycles => "disjoint-cycles",
            FamilyArg::Circulant => "circulant",
            FamilyArg::Rook4x4 => "rook4x4",
            FamilyArg::Shrikhande => "shrikhande",
            FamilyArg::Er => "er",
            FamilyArg::Csl => "csl",
            FamilyArg::WlHard => "wl-hard",
        }
    }
}

fn isotest(a: IsotestArgs) -> Result<(), CliError> {
    let ga = parse_edgelist(&a.a).map_err(data)?;
    let gb = parse_edgelist(&a.b).map_err(data)?;
    let (decision, method) = match a.method {
        IsoMethod::Wl => (wl_iso_test(&ga, &gb, a.iters), "wl"),
        IsoMethod::Stwin => (twin_iso_test(&ga, &gb, a.iters), "stwin"),
    };
    let value = match decision {
        IsoDecision::NonIsomorphic { iteration, witness } => json!({
            "decision": "non-isomorphic",
            "iteration": iteration,
            "method": method,
            "witness": witness,
        }),
        IsoDecision::PossiblyIsomorphic { iterations_run } => json!({
            "decision": "possibly-isomorphic",
            "iteration": Value::Null,
            "method": method,
            "iterations_run": iterations_run,
        }),
    };
    emit(&value)
}

/// Finds the single `NAME_graph_indicator.txt` in `dir`.
fn tu_name(dir: &Path) -> Result<String, CliError> {
    const SUFFIX: &str = "_graph_indicator.txt";
    let entries = fs::read_dir(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            e.file_name()
                .to_str()?
                .strip_suffix(SUFFIX)
                .map(str::to_string)
        })
        .collect();
    names.sort();
    match names.len() {
        1 => Ok(names.pop().unwrap()),
        0 => Err(data(format!("{}: no *{SUFFIX} file", dir.display()))),
        _ => Err(data(format!(
            "{}: several datasets: {}",
            dir.display(),
            names.join(", ")
        ))),
    }
}

fn load_corpus(d: &DatasetArgs) -> Result<Corpus, CliError> {
    match d.format {
        Format::Tu => {
            let name = tu_name(&d.dataset)?;
            Ok(parse_tu_dataset(&d.dataset, &name).map_err(data)?.corpus)
        }
        Format::Edgelist => {
            let entries = fs::read_dir(&d.dataset)
                .map_err(|e| data(format!("{}: {e}", d.dataset.display())))?;
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "edgelist"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(data(format!(
                    "{}: no *.edgelist files",
                    d.dataset.display()
                )));
            }
            let graphs = paths
                .iter()
                .map(|p| parse_edgelist(p).map_err(data))
                .collect::<Result<Vec<_>, _>>()?;
            Corpus::new(graphs).map_err(data)
        }
    }
}

fn embed(ctx: &Context, a: EmbedArgs) -> Result<(), CliError> {
    let method: Method = a.method.parse()?;
    let corpus = load_corpus(&a.data)?;
    let cfg = NtwinConfig {
        layers: a.ntwin_layers,
        hidden: a.hidden,
        rounds_per_layer: None,
        seed: ctx.seed,
    };
    let records = embed_corpus(&corpus, method, a.iters, &cfg)?;
    write_features(&a.out, &records).map_err(|e| data(format!("{}: {e}", a.out.display())))?;
    ctx.info(format!(
        "wrote {} records to {}",
        records.len(),
        a.out.display()
    ));
    emit(&json!({
        "method": method.name(),
        "iterations": if method == Method::Ntwin { a.ntwin_layers } else { a.iters },
        "records": records.len(),
        "width": records.first().map_or(0, |r| r.dense.len()),
        "out": a.out.display().to_string(),
    }))
}

fn classify(ctx: &Context, a: ClassifyArgs) -> Result<(), CliError> {
    let records =
        read_features(&a.features).map_err(|e| data(format!("{}: {e}", a.features.display())))?;
    if records.is_empty() {
        return Err(data("no feature records"));
    }
    let width = records[0].dense.len();
    let mut rows = Vec::with_capacity(records.len());
    let mut labels = Vec::with_capacity(records.len());
    for r in &records {
        if r.dense.len() != width {
            return Err(data(format!(
                "record {} has {} features, expected {width}",
                r.graph_id,
                r.dense.len()
            )));
        }
        let label = r
            .label
            .ok_or_else(|| data(format!("record {} has no class label", r.graph_id)))?;
        rows.push(r.dense.clone());
        labels.push(label as usize);
    }
    let x = DenseMatrix::from_rows(&rows)?;
    let cfg = TrainConfig {
        learning_rate: a.lr,
        batch_size: a.batch,
        max_epochs: a.epochs,
        patience: a.patience,
        seed: ctx.seed,
        ..TrainConfig::default()
    };
    let report = kfold_cv(&x, &labels, a.folds, &cfg)?;
    ctx.info(format!(
        "{}-fold accuracy {:.4} ± {:.4}",
        a.folds, report.mean, report.std
    ));
    emit(&serde_json::to_value(&report).map_err(|e| CliError::Internal(e.to_string()))?)
}

fn bench(ctx: &Context, a: BenchArgs) -> Result<(), CliError> {
    let methods = parse_methods(&a.methods)?;
    let corpus = load_corpus(&a.data)?;
    let cfg = NtwinConfig {
        seed: ctx.seed,
        ..NtwinConfig::default()
    };
    let report = bench_compare(&corpus, &methods, a.repeats, a.iters, &cfg)?;
    emit(&serde_json::to_value(&report).map_err(|e| CliError::Internal(e.to_string()))?)
}
