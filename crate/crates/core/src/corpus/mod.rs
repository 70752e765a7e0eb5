//! Loading and link resolution for one search result set.

mod html;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use html::extract_text;

/// Dense 0-based document index.
pub type DocId = usize;

/// One page of the result set.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentRecord {
    pub doc_id: DocId,
    /// Normalized URL.
    pub url: String,
    pub title: String,
    pub raw_html: Option<String>,
    /// Plain text after extraction.
    pub text: String,
    /// Outlinks as written in the source, including external ones.
    pub outlink_urls: Vec<String>,
    pub gold_label: Option<String>,
}

/// One line of the JSONL corpus format.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusLine {
    pub url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub html: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default)]
    pub outlinks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Directed in-corpus hyperlinks. No self-loops, no duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkAdjacency {
    n: usize,
    edges: BTreeSet<(DocId, DocId)>,
}

impl LinkAdjacency {
    pub fn new(n: usize) -> Self {
        LinkAdjacency {
            n,
            edges: BTreeSet::new(),
        }
    }

    /// Build from an edge list, dropping self-loops and duplicates.
    ///
    /// Fails if an endpoint is out of range.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (DocId, DocId)>) -> Result<Self> {
        let mut adj = LinkAdjacency::new(n);
        for (src, dst) in edges {
            adj.add_edge(src, dst)?;
        }
        Ok(adj)
    }

    /// Returns whether the edge was inserted.
    pub fn add_edge(&mut self, src: DocId, dst: DocId) -> Result<bool> {
        if src >= self.n || dst >= self.n {
            return Err(Error::InvalidParam(format!(
                "edge ({src},{dst}) out of range for n={}",
                self.n
            )));
        }
        if src == dst {
            return Ok(false);
        }
        Ok(self.edges.insert((src, dst)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (DocId, DocId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, src: DocId, dst: DocId) -> bool {
        self.edges.contains(&(src, dst))
    }

    /// Neighborhoods ignoring edge direction.
    pub fn undirected_neighbors(&self) -> Vec<BTreeSet<DocId>> {
        let mut nb = vec![BTreeSet::new(); self.n];
        for &(a, b) in &self.edges {
            nb[a].insert(b);
            nb[b].insert(a);
        }
        nb
    }
}

/// Gold category per labeled document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldLabels {
    labels: BTreeMap<DocId, String>,
}

impl GoldLabels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, doc: DocId, label: impl Into<String>) {
        self.labels.insert(doc, label.into());
    }

    pub fn get(&self, doc: DocId) -> Option<&str> {
        self.labels.get(&doc).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of distinct categories.
    pub fn category_count(&self) -> usize {
        self.histogram().len()
    }

    /// Documents per category.
    pub fn histogram(&self) -> BTreeMap<String, usize> {
        let mut h = BTreeMap::new();
        for l in self.labels.values() {
            *h.entry(l.clone()).or_insert(0) += 1;
        }
        h
    }

    pub fn iter(&self) -> impl Iterator<Item = (DocId, &str)> {
        self.labels.iter().map(|(&d, l)| (d, l.as_str()))
    }
}

impl FromIterator<(DocId, String)> for GoldLabels {
    fn from_iter<I: IntoIterator<Item = (DocId, String)>>(iter: I) -> Self {
        GoldLabels {
            labels: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub n: usize,
    pub edge_count: usize,
    pub labeled_count: usize,
    pub category_histogram: BTreeMap<String, usize>,
}

/// A loaded, link-resolved result set. Immutable after construction.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub docs: Vec<DocumentRecord>,
    pub links: LinkAdjacency,
    pub labels: GoldLabels,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn stats(&self) -> CorpusStats {
        corpus_stats(self)
    }

    /// Build from parsed lines, numbered from 1 in error messages.
    /// `text` wins over `html` when both are present.
    pub fn from_lines(lines: Vec<CorpusLine>) -> Result<Self> {
        let numbered = lines.into_iter().enumerate().map(|(i, l)| (i + 1, l)).collect();
        Self::from_numbered_lines(numbered)
    }

    fn from_numbered_lines(lines: Vec<(usize, CorpusLine)>) -> Result<Self> {
        let mut by_url: HashMap<String, (DocId, usize)> = HashMap::with_capacity(lines.len());
        let mut docs = Vec::with_capacity(lines.len());
        let mut labels = GoldLabels::new();

        for (doc_id, (line_no, line)) in lines.into_iter().enumerate() {
            if line.url.trim().is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "field `url` is empty".into(),
                });
            }
            let url = normalize_url(&line.url);
            if let Some(&(_, first)) = by_url.get(&url) {
                return Err(Error::DuplicateUrl {
                    url,
                    first,
                    second: line_no,
                });
            }
            by_url.insert(url.clone(), (doc_id, line_no));

            let text = match (&line.text, &line.html) {
                (Some(t), _) => t.clone(),
                (None, Some(h)) => extract_text(h),
                (None, None) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "one of `html` or `text` is required".into(),
                    })
                }
            };
            if let Some(label) = &line.label {
                labels.insert(doc_id, label.clone());
            }
            docs.push(DocumentRecord {
                doc_id,
                url,
                title: line.title.unwrap_or_default(),
                raw_html: line.html,
                text,
                outlink_urls: line.outlinks,
                gold_label: line.label,
            });
        }

        let mut links = LinkAdjacency::new(docs.len());
        for doc in &docs {
            for out in &doc.outlink_urls {
                if let Some(&(dst, _)) = by_url.get(&normalize_url(out)) {
                    links.add_edge(doc.doc_id, dst)?;
                }
            }
        }

        Ok(Corpus { docs, links, labels })
    }

    /// Parse JSONL from a reader. Blank lines are skipped.
    pub fn from_reader(reader: impl BufRead) -> Result<Self> {
        let mut lines = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: CorpusLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            lines.push((line_no, parsed));
        }
        Self::from_numbered_lines(lines)
    }

    pub fn from_jsonl_str(s: &str) -> Result<Self> {
        Self::from_reader(s.as_bytes())
    }
}

/// Load a JSONL corpus file.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Corpus::from_reader(std::io::BufReader::new(file))
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    CorpusStats {
        n: corpus.docs.len(),
        edge_count: corpus.links.edge_count(),
        labeled_count: corpus.labels.len(),
        category_histogram: corpus.labels.histogram(),
    }
}

/// Canonical form of a URL used for link resolution.
///
/// Lowercases scheme and host, drops the default port and the fragment, and
/// removes the trailing slash of an empty path. Strings that do not parse
/// as absolute URLs are returned trimmed and lowercased.
pub fn normalize_url(raw: &str) -> String {
    let trimmed = raw.trim();
    match url::Url::parse(trimmed) {
        Ok(mut u) => {
            u.set_fragment(None);
            let mut s = u.to_string();
            if u.path() == "/" && u.query().is_none() && s.ends_with('/') {
                s.pop();
            }
            s
        }
        Err(_) => trimmed.to_lowercase(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(url: &str, outlinks: &[&str]) -> CorpusLine {
        CorpusLine {
            url: url.into(),
            text: Some(format!("text of {url}")),
            outlinks: outlinks.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_url("HTTP://Example.com/"), "http://example.com");
        assert_eq!(normalize_url("http://example.com:80/a#x"), "http://example.com/a");
        assert_eq!(normalize_url("not a url"), "not a url");
        assert_eq!(normalize_url("  Not A URL "), "not a url");
        assert_eq!(normalize_url("https://a.org:443/?q=1"), "https://a.org/?q=1");
        assert_eq!(normalize_url("https://a.org:8443/x/"), "https://a.org:8443/x/");
    }

    #[test]
    fn empty_corpus() {
        let c = Corpus::from_jsonl_str("").unwrap();
        assert!(c.is_empty());
        assert_eq!(c.links.n(), 0);
        assert!(c.labels.is_empty());
        assert_eq!(c.stats(), CorpusStats::default());
    }

    #[test]
    fn in_corpus_link_resolved() {
        let c = Corpus::from_lines(vec![
            line("http://a.example/", &["HTTP://B.example"]),
            line("http://b.example", &[]),
        ])
        .unwrap();
        assert_eq!(c.links.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn external_links_kept_but_not_edges() {
        let c = Corpus::from_lines(vec![line("http://a.example", &["http://external.example/z"])]).unwrap();
        assert_eq!(c.links.edge_count(), 0);
        assert_eq!(c.docs[0].outlink_urls, vec!["http://external.example/z"]);
    }

    #[test]
    fn self_loops_and_duplicates_dropped() {
        let c = Corpus::from_lines(vec![
            line(
                "http://a.example",
                &["http://a.example", "http://b.example", "http://b.example/#top"],
            ),
            line("http://b.example", &[]),
        ])
        .unwrap();
        assert_eq!(c.links.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn duplicate_url_rejected_with_lines() {
        let src = "{\"url\":\"http://a.example/\",\"text\":\"x\"}\n\n{\"url\":\"HTTP://A.EXAMPLE\",\"text\":\"y\"}\n";
        match Corpus::from_jsonl_str(src) {
            Err(Error::DuplicateUrl { first, second, .. }) => {
                assert_eq!((first, second), (1, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_fields_rejected() {
        assert!(matches!(
            Corpus::from_jsonl_str("{\"text\":\"x\"}"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Corpus::from_jsonl_str("{\"url\":\"http://a\"}\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Corpus::from_jsonl_str("{\"url\":\"\",\"text\":\"t\"}\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn html_field_is_extracted() {
        let c =
            Corpus::from_jsonl_str(r#"{"url":"http://a","html":"<p>Big cats</p>","label":"Animal","title":"Cats"}"#)
                .unwrap();
        assert_eq!(c.docs[0].text, "Big cats");
        assert_eq!(c.docs[0].title, "Cats");
        assert_eq!(c.labels.get(0), Some("Animal"));
    }

    #[test]
    fn stats_small() {
        let mut lines = vec![
            line("http://a", &["http://b"]),
            line("http://b", &["http://c"]),
            line("http://c", &[]),
        ];
        for (l, lab) in lines.iter_mut().zip(["x", "y", "x"]) {
            l.label = Some(lab.into());
        }
        let s = Corpus::from_lines(lines).unwrap().stats();
        assert_eq!((s.n, s.edge_count, s.labeled_count), (3, 2, 3));
        assert_eq!(s.category_histogram.get("x"), Some(&2));
    }

    #[test]
    fn jaguar_shaped_histogram_has_21_categories() {
        // Category sizes of the jaguar result set.
        let sizes = [55, 17, 4, 1, 1, 1, 2, 1, 1, 1, 1, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1];
        let mut lines = Vec::new();
        for (c, &size) in sizes.iter().enumerate() {
            for i in 0..size {
                let mut l = line(&format!("http://jaguar.example/{c}/{i}"), &[]);
                l.label = Some(format!("cat{c}"));
                lines.push(l);
            }
        }
        let s = Corpus::from_lines(lines).unwrap().stats();
        assert_eq!(s.category_histogram.len(), 21);
        assert_eq!(s.n, 96);
    }

    #[test]
    fn adjacency_rejects_out_of_range() {
        assert!(LinkAdjacency::from_edges(2, [(0, 2)]).is_err());
        let adj = LinkAdjacency::from_edges(3, [(0, 0), (0, 1), (0, 1)]).unwrap();
        assert_eq!(adj.edge_count(), 1);
    }
}
