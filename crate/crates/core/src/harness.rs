//! Synthetic labeled corpora with planted categories, and the experiment
//! driver that runs and scores several methods on one corpus.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::{
    baseline_result, run_kmeans_baseline, run_linked_kmeans_with, run_spherical_kmeans_baseline, ClusterParams,
    ClusteringResult, KMeansState,
};
use crate::corpus::{Corpus, CorpusLine, DocId};
use crate::error::{Error, Result};
use crate::eval::{self, MetricsReport};
use crate::output::ClusterReport;
use crate::preprocess::{DocumentVectors, Preprocessor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorySpec {
    pub name: String,
    pub size: usize,
    pub vocab: Vec<String>,
}

/// Recipe for a planted-partition corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub categories: Vec<CategorySpec>,
    #[serde(default)]
    pub shared_vocab: Vec<String>,
    /// Probability that a token is drawn from the shared vocabulary.
    #[serde(default)]
    pub mix: f64,
    pub p_intra: f64,
    #[serde(default)]
    pub p_inter: f64,
    /// Mean tokens per document; lengths are uniform in [L/2, 3L/2].
    pub doc_length: usize,
    #[serde(default)]
    pub rng_seed: u64,
}

/// Page counts per category of a 27-query smartphone crawl (1028 pages).
pub const SMARTPHONE_SIZES: [usize; 27] = [
    47, 46, 46, 49, 34, 49, 45, 46, 48, 19, 42, 46, 44, 19, 45, 16, 19, 45, 47, 43, 46, 17, 34, 34, 34, 34, 34,
];

impl SynthSpec {
    /// Disjoint per-category vocabularies of `terms` words each, and a
    /// shared vocabulary of the same size.
    pub fn planted(
        sizes: &[usize],
        terms: usize,
        doc_length: usize,
        p_intra: f64,
        p_inter: f64,
        mix: f64,
        rng_seed: u64,
    ) -> Self {
        let categories = sizes
            .iter()
            .enumerate()
            .map(|(c, &size)| CategorySpec {
                name: format!("topic{c:02}"),
                size,
                vocab: (0..terms).map(|j| format!("q{c:02}w{j:03}")).collect(),
            })
            .collect();
        SynthSpec {
            categories,
            shared_vocab: (0..terms).map(|j| format!("shared{j:03}")).collect(),
            mix,
            p_intra,
            p_inter,
            doc_length,
            rng_seed,
        }
    }

    /// 27 categories sized like the smartphone crawl.
    pub fn smartphone_shape(p_intra: f64, rng_seed: u64) -> Self {
        Self::planted(&SMARTPHONE_SIZES, 30, 40, p_intra, 0.0, 0.0, rng_seed)
    }

    pub fn total_docs(&self) -> usize {
        self.categories.iter().map(|c| c.size).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        for (name, p) in [("mix", self.mix), ("p_intra", self.p_intra), ("p_inter", self.p_inter)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must be in [0,1], got {p}"));
            }
        }
        if self.doc_length == 0 {
            return bad("doc_length must be positive".into());
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.categories {
            if c.size == 0 {
                return bad(format!("category {:?} has size 0", c.name));
            }
            if c.vocab.is_empty() {
                return bad(format!("category {:?} has an empty vocabulary", c.name));
            }
            for t in &c.vocab {
                if !seen.insert(t.as_str()) {
                    return bad(format!("term {t:?} appears in more than one category"));
                }
            }
        }
        if self.mix > 0.0 && self.shared_vocab.is_empty() {
            return bad("mix > 0 needs a shared vocabulary".into());
        }
        Ok(())
    }
}

/// Corpus lines for a spec. Document order is shuffled; deterministic for a
/// fixed `rng_seed`.
pub fn generate_lines(spec: &SynthSpec) -> Result<Vec<CorpusLine>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);

    let mut docs: Vec<(usize, usize)> = spec
        .categories
        .iter()
        .enumerate()
        .flat_map(|(c, cat)| (0..cat.size).map(move |i| (c, i)))
        .collect();
    docs.shuffle(&mut rng);

    let urls: Vec<String> = docs
        .iter()
        .map(|&(c, i)| format!("http://synth.example/{}/{i}", spec.categories[c].name))
        .collect();

    let lo = (spec.doc_length / 2).max(1);
    let hi = spec.doc_length + spec.doc_length / 2;
    let mut lines: Vec<CorpusLine> = docs
        .iter()
        .zip(&urls)
        .map(|(&(c, i), url)| {
            let cat = &spec.categories[c];
            let len = rng.gen_range(lo..=hi);
            let words: Vec<&str> = (0..len)
                .map(|_| {
                    let pool = if spec.mix > 0.0 && rng.gen_bool(spec.mix) {
                        &spec.shared_vocab
                    } else {
                        &cat.vocab
                    };
                    pool[rng.gen_range(0..pool.len())].as_str()
                })
                .collect();
            CorpusLine {
                url: url.clone(),
                title: Some(format!("{} {i}", cat.name)),
                html: None,
                text: Some(words.join(" ")),
                outlinks: Vec::new(),
                label: Some(cat.name.clone()),
            }
        })
        .collect();

    // Unordered pairs, one direction each.
    let n = docs.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if docs[i].0 == docs[j].0 {
                spec.p_intra
            } else {
                spec.p_inter
            };
            if p > 0.0 && rng.gen_bool(p) {
                let (src, dst) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
                let target = urls[dst].clone();
                lines[src].outlinks.push(target);
            }
        }
    }
    Ok(lines)
}

pub fn write_jsonl(lines: &[CorpusLine], mut out: impl Write) -> Result<()> {
    for l in lines {
        serde_json::to_writer(&mut out, l)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

/// Generate a spec's corpus and write it as JSONL.
pub fn generate_corpus(spec: &SynthSpec, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let lines = generate_lines(spec)?;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_jsonl(&lines, &mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn generate_in_memory(spec: &SynthSpec) -> Result<Corpus> {
    Corpus::from_lines(generate_lines(spec)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Linked,
    KMeans,
    SKMeans,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Linked => "linked",
            Method::KMeans => "kmeans",
            Method::SKMeans => "skmeans",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linked" => Ok(Method::Linked),
            "kmeans" => Ok(Method::KMeans),
            "skmeans" => Ok(Method::SKMeans),
            other => Err(Error::InvalidParam(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentParams {
    pub cluster: ClusterParams,
    /// k for the baselines; defaults to the number of gold categories.
    pub k: Option<usize>,
    pub kmeans_seed: u64,
    pub max_iter: usize,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams {
            cluster: ClusterParams::default(),
            k: None,
            kmeans_seed: 0,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub result: ClusteringResult,
    pub output: ClusterReport,
    pub runtime: Duration,
}

impl MethodRun {
    pub fn k_seed(&self) -> usize {
        self.result.k_seed
    }

    pub fn k_final(&self) -> usize {
        self.result.k_final()
    }
}

/// Run a k-means baseline over a corpus. Documents with no usable text are
/// left to the miscellaneous group.
pub fn run_baseline(
    corpus: &Corpus,
    vectors: &DocumentVectors,
    spherical: bool,
    k: usize,
    max_iter: usize,
    seed: u64,
) -> Result<(ClusteringResult, KMeansState)> {
    let ids: Vec<DocId> = (0..vectors.len()).filter(|&d| !vectors.vectors[d].is_empty()).collect();
    let usable: Vec<_> = ids.iter().map(|&d| vectors.vectors[d].clone()).collect();
    let state = if spherical {
        run_spherical_kmeans_baseline(&usable, k, max_iter, seed)?
    } else {
        run_kmeans_baseline(&usable, k, max_iter, seed)?
    };
    Ok((baseline_result(corpus.len(), &ids, &state), state))
}

/// Run each method on the corpus.
pub fn run_methods(corpus: &Corpus, methods: &[Method], params: &ExperimentParams) -> Result<Vec<MethodRun>> {
    let pre = Preprocessor::default();
    let mut runs = Vec::with_capacity(methods.len());
    for &method in methods {
        let start = Instant::now();
        let (result, output) = match method {
            Method::Linked => {
                let out = run_linked_kmeans_with(corpus, &pre, &params.cluster)?;
                let report = ClusterReport::from_linked(&out);
                (out.result, report)
            }
            Method::KMeans | Method::SKMeans => {
                let vectors = DocumentVectors::build(corpus.docs.iter().map(|d| d.text.as_str()), &pre);
                let k = params.k.unwrap_or_else(|| corpus.labels.category_count().max(1));
                let (result, state) = run_baseline(
                    corpus,
                    &vectors,
                    method == Method::SKMeans,
                    k,
                    params.max_iter,
                    params.kmeans_seed,
                )?;
                let report = ClusterReport::from_baseline(method.name(), &result, &state, &vectors);
                (result, report)
            }
        };
        runs.push(MethodRun {
            method,
            result,
            output,
            runtime: start.elapsed(),
        });
    }
    Ok(runs)
}

/// Generate the corpus for `spec`, run every method and score it.
pub fn run_experiment(
    spec: &SynthSpec,
    methods: &[Method],
    params: &ExperimentParams,
) -> Result<(Vec<MethodRun>, Vec<MetricsReport>)> {
    let corpus = generate_in_memory(spec)?;
    let runs = run_methods(&corpus, methods, params)?;
    let named: Vec<(&str, &ClusteringResult)> = runs.iter().map(|r| (r.method.name(), &r.result)).collect();
    let reports = eval::compare_report(&named, &corpus.labels)?;
    Ok((runs, reports))
}

pub const COMPARISON_HEADER: &str =
    "method,cluster_id,size,matched_category,purity,entropy,precision,recall,k_seed,k_final,runtime_ms";

/// Metric rows extended with each method's k_seed, k_final and runtime.
pub fn write_comparison_csv(runs: &[MethodRun], reports: &[MetricsReport], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{COMPARISON_HEADER}")?;
    for (run, report) in runs.iter().zip(reports) {
        let ms = run.runtime.as_secs_f64() * 1e3;
        for row in eval::report_csv_rows(report) {
            writeln!(out, "{row},{},{},{ms:.3}", run.k_seed(), run.k_final())?;
        }
    }
    Ok(())
}
