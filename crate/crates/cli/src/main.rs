use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use graphsim::aligner::{describe, overlap_tree, structure_labels, Description, DescribeOptions, MatchOptions};
use graphsim::generators::{self, PlantSpec};
use graphsim::graph::{load_alignment, load_edge_list};
use graphsim::similarity::{self, NmdResult};
use graphsim::summarizer::{summarize, LedgerEntry, Summary, SummarizerConfig};
use graphsim::{Graph, Model, NodeAlignment, Structure, StructureKind};

mod error;

use error::CliError;

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "graphsim", version, about = "Summarize graphs with MDL structures and compare their summaries")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic graph.
    Gen(GenArgs),
    /// Summarize a graph into a model.
    Summarize(SummarizeArgs),
    /// Compare two graphs through their models.
    Describe(DescribeArgs),
    /// NMD matrix over every edge-list file in a directory.
    Matrix(MatrixArgs),
    /// Node overlap tree of a model, in DOT.
    Tree(TreeArgs),
}

#[derive(Args)]
struct SummarizerFlags {
    /// TOML file with summarizer settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    max_structures: Option<usize>,
    /// Minimum seed component size; turns off the small-graph threshold.
    #[arg(long)]
    min_size: Option<usize>,
    #[arg(long)]
    max_rejections: Option<usize>,
}

impl SummarizerFlags {
    fn resolve(&self) -> CliResult<SummarizerConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
            }
            None => SummarizerConfig::default(),
        };
        if let Some(v) = self.max_structures {
            cfg.max_structures = v;
        }
        if let Some(v) = self.min_size {
            cfg.min_component_size = v;
            cfg.small_graph_mode = false;
        }
        if let Some(v) = self.max_rejections {
            cfg.max_rejections = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct InputFlags {
    /// Report reciprocal pairs as directed edges collapsed into one.
    #[arg(long)]
    directed: bool,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Edge-list output; stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Erdős–Rényi G(n, p).
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
    /// Preferential attachment with `k` edges per arriving node.
    Ba {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Planted structures in ER noise.
    Plant {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// clique:SIZE, star:SPOKES, biclique:LxR or starclique:LxR; repeatable.
        #[arg(long = "spec", required = true)]
        specs: Vec<String>,
        /// Ground-truth JSON output.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Planted-composition grid: one graph per size and non-empty kind subset.
    Grid {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Structures per graph, split evenly over the kinds present.
        #[arg(long, default_value_t = 100)]
        budget: usize,
        /// Expected noise degree per node.
        #[arg(long, default_value_t = 2.0)]
        noise_degree: f64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct SummarizeArgs {
    graph: PathBuf,
    /// Model JSON output; stdout if omitted (the report then goes to stderr).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    summarizer: SummarizerFlags,
    #[command(flatten)]
    input: InputFlags,
}

#[derive(Args)]
struct DescribeArgs {
    graph1: PathBuf,
    graph2: PathBuf,
    /// Model of the first graph; summarized if omitted.
    #[arg(long)]
    model1: Option<PathBuf>,
    #[arg(long)]
    model2: Option<PathBuf>,
    /// Node alignment file with `label1 label2` lines.
    #[arg(long)]
    alignment: Option<PathBuf>,
    /// Skip the overlap-based matching phase.
    #[arg(long)]
    no_overlap: bool,
    /// Description JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for DOT overlap trees (side 1, side 2, common).
    #[arg(long)]
    dot_dir: Option<PathBuf>,
    #[command(flatten)]
    summarizer: SummarizerFlags,
    #[command(flatten)]
    input: InputFlags,
}

#[derive(Args)]
struct MatrixArgs {
    dir: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Model cache directory; defaults to $GRAPHSIM_CACHE.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    no_overlap: bool,
    #[command(flatten)]
    summarizer: SummarizerFlags,
    #[command(flatten)]
    input: InputFlags,
}

#[derive(Args)]
struct TreeArgs {
    /// Model JSON as written by `summarize`.
    model: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Model file contents: the model plus the admission ledger.
#[derive(Serialize)]
struct ModelFile<'a> {
    n: u64,
    m: u64,
    structures: &'a [Structure],
    ledger: &'a [LedgerEntry],
}

#[derive(Serialize)]
struct DescribeOutput<'a> {
    #[serde(flatten)]
    description: &'a Description,
    nmd: Option<NmdResult>,
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::internal(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn load_graph(path: &Path, input: &InputFlags) -> CliResult<Graph> {
    load_edge_list(path, input.directed).map_err(|e| CliError::from(e).context(path))
}

fn load_model(path: &Path, g: &Graph) -> CliResult<Model> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let model: Model = serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    model.validate().map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if (model.n, model.m) != (g.node_count() as u64, g.edge_count() as u64) {
        return Err(CliError::input(format!(
            "{}: model is for n={}, m={} but the graph has n={}, m={}",
            path.display(),
            model.n,
            model.m,
            g.node_count(),
            g.edge_count()
        )));
    }
    Ok(model)
}

fn parse_spec(s: &str) -> CliResult<PlantSpec> {
    let bad = || CliError::input(format!("bad structure spec {s:?}; expected e.g. clique:30 or biclique:8x12"));
    let (kind, size) = s.split_once(':').ok_or_else(bad)?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let pair = || -> CliResult<(usize, usize)> {
        let (l, r) = size.split_once('x').ok_or_else(bad)?;
        Ok((num(l)?, num(r)?))
    };
    Ok(match kind.trim() {
        "clique" => PlantSpec::Clique { size: num(size)? },
        "star" => PlantSpec::Star { spokes: num(size)? },
        "biclique" => {
            let (left, right) = pair()?;
            PlantSpec::Biclique { left, right }
        }
        "starclique" => {
            let (left, right) = pair()?;
            PlantSpec::Starclique { left, right }
        }
        _ => return Err(bad()),
    })
}

fn census_text(kinds: impl IntoIterator<Item = StructureKind>) -> String {
    let c = graphsim::model::census(kinds);
    let parts: Vec<String> = StructureKind::ALL
        .iter()
        .filter(|k| c[k.index()] > 0)
        .map(|k| format!("{} {}", k, c[k.index()]))
        .collect();
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(", ")
    }
}

fn report(s: &Summary) -> String {
    let m = &s.model;
    format!(
        "nodes {}  edges {}\nstructures {} ({})\ncandidates {}  tested {}  rejected {}\nbits: baseline {:.2}  model {:.2}  data {:.2}  total {:.2}\nL% {:.2}\n",
        m.n,
        m.m,
        m.structures.len(),
        census_text(m.structures.iter().map(|x| x.kind())),
        s.candidates_generated,
        s.candidates_tested,
        s.rejected,
        s.baseline_bits,
        s.model_bits,
        s.data_bits,
        s.total_bits(),
        s.compression_pct
    )
}

fn cmd_gen(args: &GenArgs) -> CliResult<()> {
    let out = args.out.as_deref();
    match &args.kind {
        GenKind::Er { n, p } => write_edges(&generators::er(*n, *p, args.seed)?, out),
        GenKind::Ba { n, k } => write_edges(&generators::ba(*n, *k, args.seed)?, out),
        GenKind::Plant { n, noise, specs, truth } => {
            let specs = specs.iter().map(|s| parse_spec(s)).collect::<CliResult<Vec<_>>>()?;
            let (g, planted) = generators::plant(*n, *noise, &specs, args.seed, false)?;
            if let Some(t) = truth {
                write_output(Some(t), &to_json(&planted)?)?;
            }
            write_edges(&g, out)
        }
        GenKind::Grid {
            sizes,
            budget,
            noise_degree,
            out_dir,
        } => {
            let grid = generators::composition_grid(sizes, *budget, *noise_degree, args.seed)?;
            fs::create_dir_all(out_dir).map_err(|e| CliError::input(format!("{}: {e}", out_dir.display())))?;
            for (i, item) in grid.iter().enumerate() {
                let tag: Vec<&str> = item.composition.iter().map(|k| k.name()).collect();
                let stem = format!("g{i:03}_n{}_{}", item.n, tag.join("-"));
                if let Some(g) = &item.graph {
                    write_edges(g, Some(&out_dir.join(format!("{stem}.txt"))))?;
                }
                write_output(Some(&out_dir.join(format!("{stem}.truth.json"))), &to_json(&item.planted)?)?;
            }
            Ok(())
        }
    }
}

fn write_edges(g: &Graph, out: Option<&Path>) -> CliResult<()> {
    let mut buf = Vec::new();
    g.write_edge_list(&mut buf)?;
    write_output(out, &String::from_utf8_lossy(&buf))
}

fn cmd_summarize(args: &SummarizeArgs) -> CliResult<()> {
    let cfg = args.summarizer.resolve()?;
    let g = load_graph(&args.graph, &args.input)?;
    let s = summarize(&g, &cfg)?;
    let file = ModelFile {
        n: s.model.n,
        m: s.model.m,
        structures: &s.model.structures,
        ledger: &s.ledger,
    };
    let json = to_json(&file)?;
    match &args.out {
        Some(path) => {
            write_output(Some(path), &json)?;
            print!("{}", report(&s));
        }
        None => {
            write_output(None, &json)?;
            eprint!("{}", report(&s));
        }
    }
    Ok(())
}

fn model_for(path: Option<&Path>, g: &Graph, cfg: &SummarizerConfig) -> CliResult<Model> {
    match path {
        Some(p) => load_model(p, g),
        None => Ok(summarize(g, cfg)?.model),
    }
}

fn cmd_describe(args: &DescribeArgs) -> CliResult<()> {
    let cfg = args.summarizer.resolve()?;
    let g1 = load_graph(&args.graph1, &args.input)?;
    let g2 = load_graph(&args.graph2, &args.input)?;
    let alignment = match &args.alignment {
        Some(p) => load_alignment(p, &g1, &g2).map_err(|e| CliError::from(e).context(p))?,
        None => NodeAlignment::new(),
    };
    let (m1, m2) = rayon::join(
        || model_for(args.model1.as_deref(), &g1, &cfg),
        || model_for(args.model2.as_deref(), &g2, &cfg),
    );
    let (m1, m2) = (m1?, m2?);
    let opts = DescribeOptions {
        matching: MatchOptions {
            no_overlap: args.no_overlap,
        },
        maxent_tol: cfg.maxent_tol,
        maxent_max_iter: cfg.maxent_max_iter,
    };
    let desc = describe(&g1, &g2, &alignment, &m1, &m2, &opts)?;
    let nmd = match similarity::nmd(&desc, &m1, &m2) {
        Ok(r) => Some(r),
        Err(graphsim::Error::Degenerate) => None,
        Err(e) => return Err(e.into()),
    };

    // side 1 of the description is the larger graph
    let (first, second) = if desc.swapped { ("graph 2", "graph 1") } else { ("graph 1", "graph 2") };
    let mut text = format!(
        "shared {} ({})\nspecific to {first}: {} ({})\nspecific to {second}: {} ({})\n",
        desc.shared.len(),
        census_text(desc.shared.iter().map(|e| e.kind)),
        desc.unmatched_1.len(),
        census_text(desc.unmatched_1.iter().map(|s| s.kind())),
        desc.unmatched_2.len(),
        census_text(desc.unmatched_2.iter().map(|s| s.kind())),
    );
    let l = desc.lengths;
    text.push_str(&format!(
        "bits: common {:.2}  transform {:.2}  data {:.2}  objective {:.2}\n",
        l.common_model, l.transform, l.data, l.objective
    ));
    match nmd {
        Some(r) => text.push_str(&format!("NMD {:.6}{}\n", r.value, if r.clamped { " (clamped)" } else { "" })),
        None => text.push_str("NMD undefined: both models are empty\n"),
    }

    let output = DescribeOutput {
        description: &desc,
        nmd,
    };
    let json = to_json(&output)?;
    if let Some(dir) = &args.dot_dir {
        write_trees(dir, &desc, &m1, &m2)?;
    }
    match &args.out {
        Some(p) => {
            write_output(Some(p), &json)?;
            print!("{text}");
        }
        None => {
            write_output(None, &json)?;
            eprint!("{text}");
        }
    }
    Ok(())
}

fn write_trees(dir: &Path, desc: &Description, m1: &Model, m2: &Model) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    let (s1, s2) = if desc.swapped {
        (&m2.structures, &m1.structures)
    } else {
        (&m1.structures, &m2.structures)
    };
    let t1 = overlap_tree(s1);
    let t2 = overlap_tree(s2);
    let matching = graphsim::aligner::Matching {
        pairs: desc.shared.iter().map(|e| (e.index_1, e.index_2)).collect(),
    };
    let common = graphsim::aligner::common_overlap_tree(&matching, s1, s2);
    let common_labels: Vec<String> = desc.shared.iter().map(|e| format!("{} {}/{}", e.kind, e.index_1, e.index_2)).collect();
    write_output(Some(&dir.join("side1.dot")), &t1.to_dot(&structure_labels(s1)))?;
    write_output(Some(&dir.join("side2.dot")), &t2.to_dot(&structure_labels(s2)))?;
    write_output(Some(&dir.join("common.dot")), &common.to_dot(&common_labels))?;
    Ok(())
}

fn cmd_matrix(args: &MatrixArgs) -> CliResult<()> {
    let cfg = args.summarizer.resolve()?;
    let mut files: Vec<PathBuf> = fs::read_dir(&args.dir)
        .map_err(|e| CliError::input(format!("{}: {e}", args.dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_none_or(|x| x != "json"))
        .collect();
    files.sort();
    if files.len() < 2 {
        return Err(CliError::input(format!(
            "{}: need at least 2 graph files, found {}",
            args.dir.display(),
            files.len()
        )));
    }
    let graphs = files.iter().map(|p| load_graph(p, &args.input)).collect::<CliResult<Vec<_>>>()?;
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_stem().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    let cache = args.cache.clone().or_else(similarity::cache_dir_from_env);
    let opts = MatchOptions {
        no_overlap: args.no_overlap,
    };
    let matrix = similarity::pairwise_matrix(names, &graphs, &cfg, opts, cache.as_deref())?;
    let csv = matrix.to_csv();
    if let Some(p) = &args.json {
        write_output(Some(p), &to_json(&matrix)?)?;
    }
    match &args.csv {
        Some(p) => write_output(Some(p), &csv)?,
        None => write_output(None, &csv)?,
    }
    let degenerate = matrix.pairs.iter().filter(|p| p.degenerate).count();
    if degenerate > 0 {
        eprintln!("{degenerate} pairs with two empty models were set to 0");
    }
    Ok(())
}

fn cmd_tree(args: &TreeArgs) -> CliResult<()> {
    let text = fs::read_to_string(&args.model).map_err(|e| CliError::input(format!("{}: {e}", args.model.display())))?;
    let model: Model =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", args.model.display())))?;
    model.validate()?;
    let tree = overlap_tree(&model.structures);
    write_output(args.out.as_deref(), &tree.to_dot(&structure_labels(&model.structures)))
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::input("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::internal(e.to_string()))?;
    }
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Summarize(a) => cmd_summarize(a),
        Command::Describe(a) => cmd_describe(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Tree(a) => cmd_tree(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("graphsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
