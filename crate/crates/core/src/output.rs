//! JSON documents written by the CLI: the clustering output and the seed dump.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clustering::{Assignment, Cluster, ClusteringResult, KMeansState, LinkedOutcome, Origin};
use crate::corpus::DocId;
use crate::error::{Error, Result};
use crate::preprocess::DocumentVectors;

pub const TOP_TERMS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub centroid_id: usize,
    pub origin: Origin,
    pub members: Vec<DocId>,
    #[serde(default)]
    pub top_terms: Vec<String>,
}

/// The `cluster` command's output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    #[serde(default = "default_method")]
    pub method: String,
    pub k_seed: usize,
    pub k_final: usize,
    pub clusters: Vec<ClusterEntry>,
    pub miscellaneous: Vec<DocId>,
    /// Keyed by doc_id; JSON object keys are strings.
    #[serde(default)]
    pub similarities: BTreeMap<DocId, f64>,
}

fn default_method() -> String {
    "linked".into()
}

impl ClusterReport {
    pub fn from_linked(outcome: &LinkedOutcome) -> Self {
        let r = &outcome.result;
        let clusters = r
            .clusters
            .iter()
            .map(|c| {
                let top_terms = outcome
                    .centroids
                    .get(c.centroid_id)
                    .map(|cent| outcome.vectors.top_terms(cent.vector(), TOP_TERMS))
                    .unwrap_or_default();
                ClusterEntry {
                    centroid_id: c.centroid_id,
                    origin: c.origin,
                    members: c.members.clone(),
                    top_terms,
                }
            })
            .collect();
        ClusterReport {
            method: "linked".into(),
            k_seed: r.k_seed,
            k_final: r.k_final(),
            clusters,
            miscellaneous: r.miscellaneous.clone(),
            similarities: r.similarity.clone(),
        }
    }

    pub fn from_baseline(
        method: &str,
        result: &ClusteringResult,
        state: &KMeansState,
        vectors: &DocumentVectors,
    ) -> Self {
        let clusters = result
            .clusters
            .iter()
            .map(|c| ClusterEntry {
                centroid_id: c.centroid_id,
                origin: c.origin,
                members: c.members.clone(),
                top_terms: vectors.top_terms(&state.centroids[c.centroid_id], TOP_TERMS),
            })
            .collect();
        ClusterReport {
            method: method.into(),
            k_seed: result.k_seed,
            k_final: result.k_final(),
            clusters,
            miscellaneous: result.miscellaneous.clone(),
            similarities: result.similarity.clone(),
        }
    }

    /// Rebuild a partition over `n` documents, checking that every document
    /// appears exactly once.
    pub fn to_result(&self, n: usize) -> Result<ClusteringResult> {
        let mut assignment: Vec<Option<Assignment>> = vec![None; n];
        let mut place = |d: DocId, a: Assignment| -> Result<()> {
            let slot = assignment
                .get_mut(d)
                .ok_or_else(|| Error::InvalidParam(format!("doc {d} out of range for {n} documents")))?;
            if slot.replace(a).is_some() {
                return Err(Error::InvalidParam(format!("doc {d} appears more than once")));
            }
            Ok(())
        };
        for c in &self.clusters {
            for &d in &c.members {
                place(d, Assignment::Cluster(c.centroid_id))?;
            }
        }
        for &d in &self.miscellaneous {
            place(d, Assignment::Miscellaneous)?;
        }
        let assignment = assignment
            .into_iter()
            .enumerate()
            .map(|(d, a)| a.ok_or_else(|| Error::InvalidParam(format!("doc {d} missing from result"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(ClusteringResult {
            clusters: self
                .clusters
                .iter()
                .map(|c| Cluster {
                    centroid_id: c.centroid_id,
                    origin: c.origin,
                    members: c.members.clone(),
                })
                .collect(),
            miscellaneous: self.miscellaneous.clone(),
            assignment,
            similarity: self.similarities.clone(),
            seeded: Default::default(),
            k_seed: self.k_seed,
        })
    }
}
