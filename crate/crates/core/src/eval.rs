//! Cluster quality against gold labels: purity, entropy, precision, recall.
//!
//! Each cluster is matched to its leading category (the most frequent
//! label inside it, lowest name on ties). Unlabeled documents are left out
//! of every count. Aggregates are size-weighted means over clusters; the
//! miscellaneous group gets its own row and is not aggregated.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::clustering::ClusteringResult;
use crate::corpus::{DocId, GoldLabels};
use crate::error::{Error, Result};

/// Category histogram of the labeled members of one cluster.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    per_category: BTreeMap<String, usize>,
    size: usize,
}

impl ConfusionCounts {
    pub fn from_members(members: &[DocId], gold: &GoldLabels) -> Self {
        let mut c = ConfusionCounts::default();
        for &d in members {
            if let Some(label) = gold.get(d) {
                c.add(label, 1);
            }
        }
        c
    }

    pub fn from_counts<'a>(counts: impl IntoIterator<Item = (&'a str, usize)>) -> Self {
        let mut c = ConfusionCounts::default();
        for (label, n) in counts {
            c.add(label, n);
        }
        c
    }

    fn add(&mut self, label: &str, n: usize) {
        if n == 0 {
            return;
        }
        *self.per_category.entry(label.to_string()).or_insert(0) += n;
        self.size += n;
    }

    /// Labeled documents in the cluster.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn count(&self, category: &str) -> usize {
        self.per_category.get(category).copied().unwrap_or(0)
    }

    /// Most frequent category and its count; lowest name wins ties.
    pub fn leading(&self) -> Option<(&str, usize)> {
        let mut best: Option<(&str, usize)> = None;
        for (label, &n) in &self.per_category {
            if best.is_none_or(|(_, b)| n > b) {
                best = Some((label, n));
            }
        }
        best
    }
}

fn non_empty(counts: &ConfusionCounts) -> Result<(&str, usize)> {
    counts
        .leading()
        .ok_or_else(|| Error::Metric("cluster has no labeled documents".into()))
}

/// Fraction of the cluster in its leading category.
pub fn purity(counts: &ConfusionCounts) -> Result<f64> {
    let (_, lead) = non_empty(counts)?;
    Ok(lead as f64 / counts.size as f64)
}

/// Category entropy normalized by ln(c), c = total categories in the gold set.
pub fn entropy(counts: &ConfusionCounts, categories: usize) -> Result<f64> {
    non_empty(counts)?;
    if categories < 2 {
        return Err(Error::Metric(format!(
            "entropy needs at least 2 categories, got {categories}"
        )));
    }
    let n = counts.size as f64;
    let h: f64 = counts
        .per_category
        .values()
        .map(|&k| {
            let p = k as f64 / n;
            if k == counts.size {
                0.0
            } else {
                -p * p.ln()
            }
        })
        .sum();
    Ok(h / (categories as f64).ln())
}

/// Precision and recall of the cluster against its leading category.
pub fn precision_recall(counts: &ConfusionCounts, gold: &GoldLabels) -> Result<(f64, f64)> {
    let (category, _) = non_empty(counts)?;
    let class_size = gold.iter().filter(|&(_, l)| l == category).count();
    precision_recall_with_class_size(counts, class_size)
}

fn precision_recall_with_class_size(counts: &ConfusionCounts, class_size: usize) -> Result<(f64, f64)> {
    let (category, lead) = non_empty(counts)?;
    if class_size < lead {
        return Err(Error::Metric(format!(
            "cluster holds {lead} documents of {category:?} but the category has {class_size}"
        )));
    }
    Ok((lead as f64 / counts.size as f64, lead as f64 / class_size as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterMetrics {
    /// Centroid id, or "misc" for the miscellaneous group.
    pub cluster_id: String,
    /// Labeled members.
    pub size: usize,
    pub matched_category: String,
    pub purity: f64,
    /// `None` when the gold set has fewer than two categories.
    pub entropy: Option<f64>,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateMetrics {
    pub clusters: usize,
    pub documents: usize,
    pub purity: f64,
    pub entropy: Option<f64>,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub method: String,
    /// Categories used for entropy normalization.
    pub categories: usize,
    pub weighting: &'static str,
    pub clusters: Vec<ClusterMetrics>,
    /// Excluded from the aggregate.
    pub miscellaneous: Option<ClusterMetrics>,
    pub aggregate: Option<AggregateMetrics>,
    /// Clustered or miscellaneous documents without a gold label.
    pub unlabeled: usize,
}

fn cluster_metrics(
    id: String,
    counts: &ConfusionCounts,
    class_sizes: &BTreeMap<String, usize>,
) -> Result<ClusterMetrics> {
    let (category, _) = non_empty(counts)?;
    let c = class_sizes.len();
    let (precision, recall) = precision_recall_with_class_size(counts, class_sizes[category])?;
    Ok(ClusterMetrics {
        cluster_id: id,
        size: counts.size(),
        matched_category: category.to_string(),
        purity: purity(counts)?,
        entropy: if c >= 2 { Some(entropy(counts, c)?) } else { None },
        precision,
        recall,
    })
}

/// Metrics for one clustering against gold labels.
pub fn evaluate(method: &str, result: &ClusteringResult, gold: &GoldLabels) -> Result<MetricsReport> {
    if gold.is_empty() {
        return Err(Error::Unlabeled);
    }
    let class_sizes = gold.histogram();
    let mut unlabeled = 0;
    let mut rows = Vec::new();
    for cluster in &result.clusters {
        let counts = ConfusionCounts::from_members(&cluster.members, gold);
        unlabeled += cluster.members.len() - counts.size();
        if counts.size() == 0 {
            continue;
        }
        rows.push(cluster_metrics(cluster.centroid_id.to_string(), &counts, &class_sizes)?);
    }
    let misc_counts = ConfusionCounts::from_members(&result.miscellaneous, gold);
    unlabeled += result.miscellaneous.len() - misc_counts.size();
    let miscellaneous = if misc_counts.size() > 0 {
        Some(cluster_metrics("misc".into(), &misc_counts, &class_sizes)?)
    } else {
        None
    };

    let documents: usize = rows.iter().map(|r| r.size).sum();
    let aggregate = (documents > 0).then(|| {
        let weighted = |f: &dyn Fn(&ClusterMetrics) -> f64| {
            rows.iter().map(|r| f(r) * r.size as f64).sum::<f64>() / documents as f64
        };
        AggregateMetrics {
            clusters: rows.len(),
            documents,
            purity: weighted(&|r| r.purity),
            entropy: (class_sizes.len() >= 2).then(|| weighted(&|r| r.entropy.unwrap_or(0.0))),
            precision: weighted(&|r| r.precision),
            recall: weighted(&|r| r.recall),
        }
    });

    Ok(MetricsReport {
        method: method.to_string(),
        categories: class_sizes.len(),
        weighting: "size",
        clusters: rows,
        miscellaneous,
        aggregate,
        unlabeled,
    })
}

/// One report per method, all against the same gold labels.
pub fn compare_report(results: &[(&str, &ClusteringResult)], gold: &GoldLabels) -> Result<Vec<MetricsReport>> {
    results.iter().map(|(m, r)| evaluate(m, r, gold)).collect()
}

pub const CSV_HEADER: &str = "method,cluster_id,size,matched_category,purity,entropy,precision,recall";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One line per cluster, then the miscellaneous row (`misc`) and the
/// size-weighted aggregate (`all`, empty matched_category).
pub fn report_csv_rows(report: &MetricsReport) -> Vec<String> {
    let method = csv_field(&report.method);
    let mut lines = Vec::new();
    for r in report.clusters.iter().chain(report.miscellaneous.as_ref()) {
        lines.push(format!(
            "{method},{},{},{},{},{},{},{}",
            r.cluster_id,
            r.size,
            csv_field(&r.matched_category),
            r.purity,
            fmt_opt(r.entropy),
            r.precision,
            r.recall
        ));
    }
    if let Some(a) = &report.aggregate {
        lines.push(format!(
            "{method},all,{},,{},{},{},{}",
            a.documents,
            a.purity,
            fmt_opt(a.entropy),
            a.precision,
            a.recall
        ));
    }
    lines
}

pub fn write_csv(reports: &[MetricsReport], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        for line in report_csv_rows(r) {
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{Assignment, Cluster, Origin};
    use proptest::prelude::*;

    fn counts(pairs: &[(&str, usize)]) -> ConfusionCounts {
        ConfusionCounts::from_counts(pairs.iter().copied())
    }

    fn gold_from(sizes: &[(&str, usize)]) -> GoldLabels {
        let mut g = GoldLabels::new();
        let mut d = 0;
        for &(l, n) in sizes {
            for _ in 0..n {
                g.insert(d, l);
                d += 1;
            }
        }
        g
    }

    #[test]
    fn purity_examples() {
        assert_eq!(purity(&counts(&[("a", 7)])).unwrap(), 1.0);
        assert!((purity(&counts(&[("a", 25), ("b", 1)])).unwrap() - 25.0 / 26.0).abs() < 1e-15);
        assert!((purity(&counts(&[("a", 25), ("b", 1)])).unwrap() - 0.9615).abs() < 1e-4);
        assert_eq!(purity(&counts(&[("a", 5), ("b", 5)])).unwrap(), 0.5);
        assert!(purity(&ConfusionCounts::default()).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&counts(&[("a", 9)]), 21).unwrap(), 0.0);
        assert!(entropy(&counts(&[("a", 9)]), 21).unwrap().is_sign_positive());
        let uniform = entropy(&counts(&[("a", 4), ("b", 4), ("c", 4)]), 3).unwrap();
        assert!((uniform - 1.0).abs() <= 1e-12);
        let e = entropy(&counts(&[("a", 3), ("b", 1)]), 2).unwrap();
        let expected = -(0.75 * 0.75f64.ln() + 0.25 * 0.25f64.ln()) / 2f64.ln();
        assert!((e - expected).abs() < 1e-15);
        assert!((e - 0.8113).abs() < 1e-4);
        assert!(entropy(&counts(&[("a", 1)]), 1).is_err());
        assert!(entropy(&ConfusionCounts::default(), 3).is_err());
    }

    #[test]
    fn precision_recall_examples() {
        let gold = gold_from(&[("car", 10), ("cat", 5)]);
        let whole = counts(&[("cat", 5)]);
        assert_eq!(precision_recall(&whole, &gold).unwrap(), (1.0, 1.0));

        let gold = gold_from(&[("a", 104), ("b", 50)]);
        let (p, r) = precision_recall(&counts(&[("a", 95), ("b", 5)]), &gold).unwrap();
        assert_eq!(p, 0.95);
        assert!((r - 95.0 / 104.0).abs() < 1e-15);
        assert!((r - 0.9135).abs() < 1e-4);

        let gold = gold_from(&[("x", 10), ("y", 3)]);
        assert_eq!(precision_recall(&counts(&[("x", 1)]), &gold).unwrap(), (1.0, 0.1));
        assert!(precision_recall(&counts(&[("y", 4)]), &gold).is_err());
    }

    #[test]
    fn leading_tie_breaks_by_name() {
        let c = counts(&[("zebra", 3), ("apple", 3), ("m", 1)]);
        assert_eq!(c.leading(), Some(("apple", 3)));
    }

    fn result_of(clusters: Vec<Vec<DocId>>, misc: Vec<DocId>, n: usize) -> ClusteringResult {
        let mut assignment = vec![Assignment::Miscellaneous; n];
        let clusters: Vec<Cluster> = clusters
            .into_iter()
            .enumerate()
            .map(|(i, members)| {
                for &d in &members {
                    assignment[d] = Assignment::Cluster(i);
                }
                Cluster {
                    centroid_id: i,
                    origin: Origin::Seed,
                    members,
                }
            })
            .collect();
        ClusteringResult {
            clusters,
            miscellaneous: misc,
            assignment,
            ..Default::default()
        }
    }

    #[test]
    fn pure_cluster_row() {
        let gold = gold_from(&[("car", 3), ("animal", 2)]);
        let r = result_of(vec![vec![3, 4]], vec![0, 1, 2], 5);
        let report = evaluate("linked", &r, &gold).unwrap();
        let row = &report.clusters[0];
        assert_eq!(
            (row.purity, row.entropy, row.precision, row.recall),
            (1.0, Some(0.0), 1.0, 1.0)
        );
        assert_eq!(row.matched_category, "animal");
        assert_eq!(report.miscellaneous.as_ref().unwrap().cluster_id, "misc");
        assert_eq!(report.aggregate.as_ref().unwrap().documents, 2);
    }

    #[test]
    fn identical_results_identical_rows() {
        let gold = gold_from(&[("a", 3), ("b", 3)]);
        let r = result_of(vec![vec![0, 1, 3], vec![2, 4, 5]], vec![], 6);
        let reports = compare_report(&[("x", &r), ("x", &r)], &gold).unwrap();
        assert_eq!(reports[0], reports[1]);
    }

    #[test]
    fn unlabeled_corpus_rejected() {
        let r = result_of(vec![vec![0, 1]], vec![], 2);
        assert!(matches!(evaluate("m", &r, &GoldLabels::new()), Err(Error::Unlabeled)));
    }

    #[test]
    fn unlabeled_docs_excluded() {
        let mut gold = GoldLabels::new();
        gold.insert(0, "a");
        gold.insert(1, "a");
        gold.insert(4, "b");
        let r = result_of(vec![vec![0, 1, 2], vec![3, 5]], vec![4], 6);
        let report = evaluate("m", &r, &gold).unwrap();
        assert_eq!(report.clusters.len(), 1);
        assert_eq!(report.clusters[0].size, 2);
        assert_eq!(report.unlabeled, 3);
    }

    #[test]
    fn single_category_entropy_is_none() {
        let gold = gold_from(&[("only", 4)]);
        let r = result_of(vec![vec![0, 1, 2, 3]], vec![], 4);
        let report = evaluate("m", &r, &gold).unwrap();
        assert_eq!(report.clusters[0].purity, 1.0);
        assert_eq!(report.clusters[0].entropy, None);
        let mut buf = Vec::new();
        write_csv(&[report], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some(CSV_HEADER));
        assert!(text.contains("m,0,4,only,1,,1,1"));
        assert!(text.contains("m,all,4,,1,,1,1"));
    }

    proptest! {
        #[test]
        fn metrics_in_unit_interval(raw in proptest::collection::vec(0usize..30, 2..6), extra in 0usize..20) {
            let names: Vec<String> = (0..raw.len()).map(|i| format!("c{i}")).collect();
            let c = ConfusionCounts::from_counts(names.iter().map(String::as_str).zip(raw.iter().copied()));
            prop_assume!(c.size() > 0);
            let mut sizes: Vec<(&str, usize)> = names.iter().map(String::as_str).zip(raw.iter().map(|&x| x + extra)).collect();
            sizes.push(("other", 1));
            let gold = gold_from(&sizes);
            let p = purity(&c).unwrap();
            let e = entropy(&c, gold.category_count()).unwrap();
            let (prec, rec) = precision_recall(&c, &gold).unwrap();
            for x in [p, e, prec, rec] {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&x));
            }
            prop_assert_eq!(prec, p);
            prop_assert_eq!(e == 0.0, c.per_category.len() == 1);
        }

        #[test]
        fn purity_monotone_in_lead(lead in 1usize..50, rest in 1usize..50) {
            prop_assume!(lead > rest);
            let before = purity(&counts(&[("a", lead), ("b", rest)])).unwrap();
            let after = purity(&counts(&[("a", lead + 1), ("b", rest - 1)])).unwrap();
            prop_assert!(after > before);
        }

        #[test]
        fn relabeling_invariance(raw in proptest::collection::vec(1usize..20, 2..5), shift in 1usize..4) {
            let k = raw.len();
            let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
            let renamed: Vec<String> = (0..k).map(|i| format!("c{}", (i + shift) % k)).collect();
            let a = ConfusionCounts::from_counts(names.iter().map(String::as_str).zip(raw.iter().copied()));
            let b = ConfusionCounts::from_counts(renamed.iter().map(String::as_str).zip(raw.iter().copied()));
            prop_assert_eq!(purity(&a).unwrap(), purity(&b).unwrap());
            prop_assert!((entropy(&a, k).unwrap() - entropy(&b, k).unwrap()).abs() < 1e-12);
        }
    }
}
