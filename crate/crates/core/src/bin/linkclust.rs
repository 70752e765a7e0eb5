use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use linkclust::clustering::{run_linked_kmeans_with, ClusterParams, DEFAULT_ALPHA};
use linkclust::error::{Error, Result};
use linkclust::eval;
use linkclust::harness::{self, ExperimentParams, Method, SynthSpec};
use linkclust::output::ClusterReport;
use linkclust::preprocess::{load_stoplist, DocumentVectors, Preprocessor};
use linkclust::{load_corpus, Corpus};

#[derive(Parser)]
#[command(
    name = "linkclust",
    version,
    about = "Link-seeded k-means clustering of search results"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a JSONL corpus.
    Cluster(ClusterArgs),
    /// Score a cluster output against the corpus labels.
    Eval {
        #[arg(long)]
        result: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus from a spec file.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus and compare methods on it.
    Compare {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "linked,kmeans,skmeans")]
        methods: Vec<Method>,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Baseline k; defaults to the number of categories.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print corpus statistics as JSON.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
    },
}

#[derive(clap::Args)]
struct ClusterArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "linked")]
    method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    max_passes: usize,
    /// Number of clusters for the k-means baselines.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long)]
    stoplist: Option<PathBuf>,
    #[arg(long)]
    dump_seeds: Option<PathBuf>,
    /// Write tf-idf vectors as CSV.
    #[arg(long)]
    dump_vectors: Option<PathBuf>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Linked,
    Kmeans,
    Skmeans,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn write_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    let shown = path.map(Path::to_path_buf).unwrap_or_else(|| "<stdout>".into());
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(shown, e))
}

fn with_io<T>(path: Option<&Path>, r: std::io::Result<T>) -> Result<T> {
    r.map_err(|e| Error::io(path.map(Path::to_path_buf).unwrap_or_else(|| "<stdout>".into()), e))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Cluster(args) => cluster(args),
        Command::Eval {
            result,
            corpus,
            format,
            out,
        } => {
            let corpus = load_corpus(&corpus)?;
            let text = std::fs::read_to_string(&result).map_err(|e| Error::io(&result, e))?;
            let report: ClusterReport = serde_json::from_str(&text)?;
            let partition = report.to_result(corpus.len())?;
            let metrics = eval::evaluate(&report.method, &partition, &corpus.labels)?;
            match format {
                Format::Json => write_json(&metrics, out.as_deref()),
                Format::Csv => {
                    let mut w = sink(out.as_deref())?;
                    with_io(
                        out.as_deref(),
                        eval::write_csv(&[metrics], &mut w).and_then(|_| w.flush()),
                    )
                }
            }
        }
        Command::Synth { spec, out } => harness::generate_corpus(&read_spec(&spec)?, &out),
        Command::Compare {
            spec,
            methods,
            alpha,
            k,
            seed,
            out,
        } => {
            let spec = read_spec(&spec)?;
            let params = ExperimentParams {
                cluster: ClusterParams::with_alpha(alpha)?,
                k,
                kmeans_seed: seed,
                ..ExperimentParams::default()
            };
            let (runs, reports) = harness::run_experiment(&spec, &methods, &params)?;
            let mut w = sink(out.as_deref())?;
            with_io(
                out.as_deref(),
                harness::write_comparison_csv(&runs, &reports, &mut w).and_then(|_| w.flush()),
            )
        }
        Command::Stats { corpus } => write_json(&load_corpus(&corpus)?.stats(), None),
    }
}

fn read_spec(path: &Path) -> Result<SynthSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn cluster(args: ClusterArgs) -> Result<()> {
    let corpus: Corpus = load_corpus(&args.corpus)?;
    let pre = match &args.stoplist {
        Some(p) => Preprocessor::with_stoplist(load_stoplist(p)?),
        None => Preprocessor::default(),
    };
    let params = ClusterParams::new(args.alpha, args.max_passes)?;

    let (report, vectors) = match args.method {
        MethodArg::Linked => {
            let outcome = run_linked_kmeans_with(&corpus, &pre, &params)?;
            if let Some(p) = &args.dump_seeds {
                write_json(&outcome.seeds, Some(p))?;
            }
            (ClusterReport::from_linked(&outcome), outcome.vectors)
        }
        MethodArg::Kmeans | MethodArg::Skmeans => {
            let method = if matches!(args.method, MethodArg::Kmeans) {
                Method::KMeans
            } else {
                Method::SKMeans
            };
            let k = args
                .k
                .ok_or_else(|| Error::InvalidParam(format!("--k is required for --method {}", method.name())))?;
            let vectors = DocumentVectors::build(corpus.docs.iter().map(|d| d.text.as_str()), &pre);
            let (result, state) = harness::run_baseline(
                &corpus,
                &vectors,
                method == Method::SKMeans,
                k,
                args.max_iter,
                args.seed,
            )?;
            (
                ClusterReport::from_baseline(method.name(), &result, &state, &vectors),
                vectors,
            )
        }
    };

    if let Some(p) = &args.dump_vectors {
        let mut w = sink(Some(p))?;
        with_io(Some(p), vectors.write_csv(&mut w).and_then(|_| w.flush()))?;
    }
    write_json(&report, args.out.as_deref())
}
