//! Text to tf-idf vectors: tokenize, drop stopwords, stem, weight, normalize.

mod porter;
mod stopwords;

use std::collections::{HashMap, HashSet};
use std::io::Write;

use crate::corpus::DocId;
use crate::sparse::{SparseVector, TermId};

pub use porter::stem;
pub use stopwords::{default_stoplist, load_stoplist, parse_stoplist, DEFAULT_STOPWORDS};

/// Tokens of one document after the text pipeline.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSequence {
    pub doc_id: DocId,
    pub tokens: Vec<String>,
}

/// Lowercase, split on non-alphanumerics, drop tokens shorter than two
/// characters and tokens made only of digits.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| t.chars().count() >= 2 && !t.chars().all(|c| c.is_ascii_digit()))
        .collect()
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &HashSet<String>) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

/// The full token pipeline with a fixed stoplist.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    stoplist: HashSet<String>,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Preprocessor {
            stoplist: default_stoplist(),
        }
    }
}

impl Preprocessor {
    pub fn with_stoplist(stoplist: HashSet<String>) -> Self {
        Preprocessor { stoplist }
    }

    pub fn stoplist(&self) -> &HashSet<String> {
        &self.stoplist
    }

    pub fn process(&self, doc_id: DocId, text: &str) -> TokenSequence {
        let tokens = remove_stopwords(tokenize(text), &self.stoplist)
            .into_iter()
            .map(|t| stem(&t))
            .collect();
        TokenSequence { doc_id, tokens }
    }
}

/// Term ids and document frequencies for one corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocabulary {
    ids: HashMap<String, TermId>,
    terms: Vec<String>,
    df: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    /// Ids are assigned in first-occurrence order scanning documents in the
    /// given order.
    pub fn build<'a>(sequences: impl IntoIterator<Item = &'a TokenSequence>) -> Self {
        let mut vocab = Vocabulary::default();
        for seq in sequences {
            vocab.n_docs += 1;
            let mut seen = HashSet::new();
            for tok in &seq.tokens {
                let id = match vocab.ids.get(tok) {
                    Some(&id) => id,
                    None => {
                        let id = vocab.terms.len();
                        vocab.ids.insert(tok.clone(), id);
                        vocab.terms.push(tok.clone());
                        vocab.df.push(0);
                        id
                    }
                };
                if seen.insert(id) {
                    vocab.df[id] += 1;
                }
            }
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn id(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> Option<&str> {
        self.terms.get(id).map(String::as_str)
    }

    pub fn df(&self, id: TermId) -> usize {
        self.df[id]
    }

    pub fn idf(&self, id: TermId) -> f64 {
        (self.n_docs as f64 / self.df[id] as f64).ln()
    }
}

/// Raw-count tf times ln(N/df). Not normalized. Unknown terms are ignored;
/// terms present in every document get weight 0 and are not stored.
pub fn tfidf_vectorize(seq: &TokenSequence, vocab: &Vocabulary) -> SparseVector {
    let mut tf: HashMap<TermId, usize> = HashMap::new();
    for tok in &seq.tokens {
        if let Some(id) = vocab.id(tok) {
            *tf.entry(id).or_insert(0) += 1;
        }
    }
    SparseVector::from_pairs(tf.into_iter().map(|(id, count)| (id, count as f64 * vocab.idf(id))))
}

pub fn l2_normalize(v: &SparseVector) -> SparseVector {
    v.l2_normalized()
}

/// Unit tf-idf vectors for a whole corpus plus the vocabulary behind them.
#[derive(Debug, Clone, Default)]
pub struct DocumentVectors {
    pub vocab: Vocabulary,
    /// One per document in doc_id order; empty when nothing survives.
    pub vectors: Vec<SparseVector>,
}

impl DocumentVectors {
    pub fn build<'a>(texts: impl IntoIterator<Item = &'a str>, pre: &Preprocessor) -> Self {
        let seqs: Vec<TokenSequence> = texts.into_iter().enumerate().map(|(i, t)| pre.process(i, t)).collect();
        let vocab = Vocabulary::build(&seqs);
        let vectors = seqs
            .iter()
            .map(|s| tfidf_vectorize(s, &vocab).l2_normalized())
            .collect();
        DocumentVectors { vocab, vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Term strings for the heaviest `n` weights of `v`.
    pub fn top_terms(&self, v: &SparseVector, n: usize) -> Vec<String> {
        v.top_terms(n)
            .into_iter()
            .filter_map(|t| self.vocab.term(t).map(str::to_string))
            .collect()
    }

    /// CSV dump `doc_id,term,weight`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "doc_id,term,weight")?;
        for (doc, v) in self.vectors.iter().enumerate() {
            for &(t, w) in v.entries() {
                writeln!(out, "{doc},{},{w}", self.vocab.term(t).unwrap_or(""))?;
            }
        }
        Ok(())
    }
}
