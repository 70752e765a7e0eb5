//! Threshold-gated cosine assignment on top of link-derived seeds, plus the
//! k-means baselines it is compared against.

mod kmeans;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DocId};
use crate::error::{Error, Result};
use crate::preprocess::{DocumentVectors, Preprocessor};
use crate::seeding::{self, SeedGroups};
use crate::sparse::SparseVector;

pub use kmeans::{
    euclidean_objective, kmeans_from_init, nearest_cosine, nearest_euclidean, random_init, run_kmeans_baseline,
    run_spherical_kmeans_baseline, spherical_kmeans_from_init, spherical_objective, KMeansState,
};

pub const DEFAULT_ALPHA: f64 = 0.50;

/// Cosine similarity of two non-empty vectors.
pub fn cosine_similarity(a: &SparseVector, b: &SparseVector) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyVector);
    }
    Ok(a.dot(b) / (a.norm() * b.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterParams {
    /// Minimum cosine similarity for joining an existing centroid.
    pub alpha: f64,
    /// 1 runs the single assignment pass. Larger values add refinement
    /// passes that move documents to their nearest centroid.
    pub max_passes: usize,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            alpha: DEFAULT_ALPHA,
            max_passes: 1,
        }
    }
}

impl ClusterParams {
    pub fn new(alpha: f64, max_passes: usize) -> Result<Self> {
        let p = ClusterParams { alpha, max_passes };
        p.validate()?;
        Ok(p)
    }

    pub fn with_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParam(format!(
                "alpha must be in [0,1], got {}",
                self.alpha
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidParam("max_passes must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Seed,
    Spawned,
}

/// A unit centroid and the documents assigned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub id: usize,
    pub origin: Origin,
    vector: SparseVector,
    /// Unnormalized sum of member vectors.
    sum: SparseVector,
    members: BTreeSet<DocId>,
}

impl Centroid {
    fn from_members(id: usize, origin: Origin, members: BTreeSet<DocId>, vectors: &[SparseVector]) -> Self {
        let sum = SparseVector::sum(members.iter().map(|&d| &vectors[d]));
        Centroid {
            id,
            origin,
            vector: sum.l2_normalized(),
            sum,
            members,
        }
    }

    pub fn vector(&self) -> &SparseVector {
        &self.vector
    }

    pub fn members(&self) -> &BTreeSet<DocId> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Add a member and recompute the centroid as the normalized sum of all
/// member vectors.
pub fn update_centroid(centroid: &mut Centroid, doc: DocId, vector: &SparseVector) {
    debug_assert!(!vector.is_empty());
    if centroid.members.insert(doc) {
        centroid.sum = centroid.sum.add(vector);
        centroid.vector = centroid.sum.l2_normalized();
    }
}

/// Ordered centroids with disjoint member sets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CentroidSet {
    centroids: Vec<Centroid>,
}

impl CentroidSet {
    /// Seed centroids from heuristic groups. Members with empty vectors are
    /// left out; groups left with no usable member are dropped.
    pub fn from_seeds(groups: &SeedGroups, vectors: &[SparseVector]) -> Self {
        let mut centroids = Vec::new();
        for g in &groups.groups {
            let members: BTreeSet<DocId> = g.iter().copied().filter(|&d| !vectors[d].is_empty()).collect();
            if members.is_empty() {
                continue;
            }
            let id = centroids.len();
            centroids.push(Centroid::from_members(id, Origin::Seed, members, vectors));
        }
        CentroidSet { centroids }
    }

    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Centroid> {
        self.centroids.iter()
    }

    pub fn get(&self, id: usize) -> Option<&Centroid> {
        self.centroids.iter().find(|c| c.id == id)
    }

    fn next_id(&self) -> usize {
        self.centroids.last().map_or(0, |c| c.id + 1)
    }

    fn spawn(&mut self, doc: DocId, vector: &SparseVector) -> usize {
        let id = self.next_id();
        self.centroids.push(Centroid {
            id,
            origin: Origin::Spawned,
            vector: vector.l2_normalized(),
            sum: vector.clone(),
            members: BTreeSet::from([doc]),
        });
        id
    }

    /// Highest similarity and its position, lowest position on ties.
    fn best_match(&self, v: &SparseVector) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (pos, c) in self.centroids.iter().enumerate() {
            let sim = v.dot(&c.vector) / v.norm();
            if best.is_none_or(|(_, b)| sim > b) {
                best = Some((pos, sim));
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assignment {
    Cluster(usize),
    Miscellaneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub centroid_id: usize,
    pub origin: Origin,
    pub members: Vec<DocId>,
}

/// Final partition of the documents.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusteringResult {
    /// Ascending centroid id; each has two or more members.
    pub clusters: Vec<Cluster>,
    pub miscellaneous: Vec<DocId>,
    /// Indexed by doc_id.
    pub assignment: Vec<Assignment>,
    /// Similarity recorded when each document was placed. Seed members carry
    /// their similarity to the initial seed centroid; documents that
    /// founded a centroid carry 1.0 while it survives, else the best
    /// similarity they had. Empty-vector documents have no entry.
    pub similarity: BTreeMap<DocId, f64>,
    /// Documents placed by the heuristic phase.
    pub seeded: BTreeSet<DocId>,
    pub k_seed: usize,
}

impl ClusteringResult {
    pub fn k_final(&self) -> usize {
        self.clusters.len()
    }

    pub fn clustered_count(&self) -> usize {
        self.clusters.iter().map(|c| c.members.len()).sum()
    }

    /// Clustered documents that were pre-assigned by seeding.
    pub fn seeded_clustered_count(&self) -> usize {
        self.clusters
            .iter()
            .flat_map(|c| &c.members)
            .filter(|d| self.seeded.contains(d))
            .count()
    }

    /// Check the partition and threshold invariants. Returns a description
    /// of the first violation.
    pub fn check_invariants(&self, n: usize, alpha: f64) -> std::result::Result<(), String> {
        if self.assignment.len() != n {
            return Err(format!("assignment covers {} of {n} docs", self.assignment.len()));
        }
        let mut seen = vec![false; n];
        for c in &self.clusters {
            if c.members.len() < 2 {
                return Err(format!("cluster {} has {} members", c.centroid_id, c.members.len()));
            }
            for &d in &c.members {
                if d >= n || std::mem::replace(&mut seen[d], true) {
                    return Err(format!("doc {d} out of range or placed twice"));
                }
                if self.assignment[d] != Assignment::Cluster(c.centroid_id) {
                    return Err(format!("doc {d} assignment disagrees with cluster list"));
                }
                if !self.seeded.contains(&d) {
                    match self.similarity.get(&d) {
                        Some(&s) if s >= alpha => {}
                        other => return Err(format!("doc {d} joined with similarity {other:?} < {alpha}")),
                    }
                }
            }
        }
        for &d in &self.miscellaneous {
            if d >= n || std::mem::replace(&mut seen[d], true) {
                return Err(format!("misc doc {d} out of range or placed twice"));
            }
            if self.assignment[d] != Assignment::Miscellaneous {
                return Err(format!("doc {d} assignment disagrees with miscellaneous"));
            }
        }
        match seen.iter().position(|s| !s) {
            Some(d) => Err(format!("doc {d} unassigned")),
            None => Ok(()),
        }
    }
}

/// Assign every document not already held by a seed centroid.
///
/// Unseeded documents are visited in ascending doc_id order. Each joins its
/// most similar centroid when that similarity reaches `alpha`, otherwise it
/// becomes a new centroid that later documents may join. Centroids left
/// with a single member end up in the miscellaneous group.
pub fn assign_documents(
    vectors: &[SparseVector],
    seeds: CentroidSet,
    params: &ClusterParams,
) -> (CentroidSet, ClusteringResult) {
    let n = vectors.len();
    let mut set = seeds;
    let k_seed = set.len();
    let mut similarity = BTreeMap::new();
    let mut seeded = BTreeSet::new();
    let mut fallback_sim: BTreeMap<DocId, f64> = BTreeMap::new();
    let mut held = vec![false; n];

    for c in &set.centroids {
        for &d in &c.members {
            held[d] = true;
            seeded.insert(d);
            similarity.insert(d, vectors[d].dot(&c.vector) / vectors[d].norm());
        }
    }

    for doc in 0..n {
        if held[doc] || vectors[doc].is_empty() {
            continue;
        }
        let v = &vectors[doc];
        match set.best_match(v) {
            Some((pos, y)) if y >= params.alpha => {
                update_centroid(&mut set.centroids[pos], doc, v);
                similarity.insert(doc, y);
            }
            best => {
                set.spawn(doc, v);
                similarity.insert(doc, 1.0);
                fallback_sim.insert(doc, best.map_or(0.0, |(_, y)| y));
            }
        }
    }

    for _ in 1..params.max_passes {
        if !refine_pass(&mut set, vectors, params.alpha, &mut similarity) {
            break;
        }
    }

    // Centroids with one member dissolve; their vector stays in the set
    // only for centroids that keep a cluster.
    let mut assignment = vec![Assignment::Miscellaneous; n];
    let mut clusters = Vec::new();
    let mut miscellaneous = Vec::new();
    let mut kept = Vec::new();
    for c in set.centroids {
        if c.members.len() >= 2 {
            for &d in &c.members {
                assignment[d] = Assignment::Cluster(c.id);
            }
            clusters.push(Cluster {
                centroid_id: c.id,
                origin: c.origin,
                members: c.members.iter().copied().collect(),
            });
            kept.push(c);
        } else {
            for &d in &c.members {
                if let Some(&s) = fallback_sim.get(&d) {
                    similarity.insert(d, s);
                }
                miscellaneous.push(d);
            }
        }
    }
    for (d, a) in assignment.iter().enumerate() {
        if *a == Assignment::Miscellaneous && vectors[d].is_empty() {
            miscellaneous.push(d);
        }
    }
    miscellaneous.sort_unstable();

    let result = ClusteringResult {
        clusters,
        miscellaneous,
        assignment,
        similarity,
        seeded,
        k_seed,
    };
    (CentroidSet { centroids: kept }, result)
}

/// Move each member to its most similar centroid when that similarity
/// reaches `alpha`, then rebuild every centroid from its members. Returns
/// whether anything moved.
fn refine_pass(
    set: &mut CentroidSet,
    vectors: &[SparseVector],
    alpha: f64,
    similarity: &mut BTreeMap<DocId, f64>,
) -> bool {
    let mut moves = Vec::new();
    for (from, c) in set.centroids.iter().enumerate() {
        for &d in &c.members {
            if let Some((to, y)) = set.best_match(&vectors[d]) {
                if to != from && y >= alpha {
                    moves.push((d, from, to, y));
                }
            }
        }
    }
    if moves.is_empty() {
        return false;
    }
    for &(d, from, to, y) in &moves {
        set.centroids[from].members.remove(&d);
        set.centroids[to].members.insert(d);
        similarity.insert(d, y);
    }
    let rebuilt = std::mem::take(&mut set.centroids)
        .into_iter()
        .filter(|c| !c.members.is_empty())
        .map(|c| Centroid::from_members(c.id, c.origin, c.members, vectors))
        .collect();
    set.centroids = rebuilt;
    true
}

/// Everything produced by one linked k-means run.
#[derive(Debug, Clone)]
pub struct LinkedOutcome {
    /// Seed groups after dropping groups with no usable text.
    pub seeds: SeedGroups,
    pub centroids: CentroidSet,
    pub result: ClusteringResult,
    pub vectors: DocumentVectors,
}

/// Preprocess, seed from links, then assign.
pub fn run_linked_kmeans(corpus: &Corpus, params: &ClusterParams) -> Result<LinkedOutcome> {
    run_linked_kmeans_with(corpus, &Preprocessor::default(), params)
}

pub fn run_linked_kmeans_with(corpus: &Corpus, pre: &Preprocessor, params: &ClusterParams) -> Result<LinkedOutcome> {
    params.validate()?;
    let vectors = DocumentVectors::build(corpus.docs.iter().map(|d| d.text.as_str()), pre);
    let groups = seeding::seed_groups(&corpus.links);
    let (seeds, _) = seeding::build_seed_centroids(&groups, &vectors.vectors);
    let centroid_seeds = CentroidSet::from_seeds(&seeds, &vectors.vectors);
    let (centroids, result) = assign_documents(&vectors.vectors, centroid_seeds, params);
    Ok(LinkedOutcome {
        seeds,
        centroids,
        result,
        vectors,
    })
}

/// Turn a baseline assignment into a partition. Documents with empty
/// vectors and singleton clusters go to the miscellaneous group.
pub fn baseline_result(n: usize, doc_ids: &[DocId], state: &KMeansState) -> ClusteringResult {
    let mut members: Vec<Vec<DocId>> = vec![Vec::new(); state.k];
    for (pos, &c) in state.assignment.iter().enumerate() {
        members[c].push(doc_ids[pos]);
    }
    let mut assignment = vec![Assignment::Miscellaneous; n];
    let mut clusters = Vec::new();
    let mut miscellaneous = Vec::new();
    for (id, m) in members.into_iter().enumerate() {
        if m.len() >= 2 {
            for &d in &m {
                assignment[d] = Assignment::Cluster(id);
            }
            clusters.push(Cluster {
                centroid_id: id,
                origin: Origin::Seed,
                members: m,
            });
        } else {
            miscellaneous.extend(m);
        }
    }
    let in_baseline: BTreeSet<DocId> = doc_ids.iter().copied().collect();
    miscellaneous.extend((0..n).filter(|d| !in_baseline.contains(d)));
    miscellaneous.sort_unstable();
    let seeded = clusters.iter().flat_map(|c| c.members.iter().copied()).collect();
    ClusteringResult {
        clusters,
        miscellaneous,
        assignment,
        similarity: BTreeMap::new(),
        seeded,
        k_seed: state.k,
    }
}
