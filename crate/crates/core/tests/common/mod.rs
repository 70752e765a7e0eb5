#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use linkclust::clustering::{run_linked_kmeans, ClusterParams, LinkedOutcome};
use linkclust::corpus::{DocId, LinkAdjacency};
use linkclust::Corpus;
use rand::Rng;

/// Connected components with at least two nodes, by breadth-first search,
/// each sorted, ordered by smallest member.
pub fn bfs_components(adj: &LinkAdjacency) -> Vec<Vec<DocId>> {
    let n = adj.n();
    let mut nbrs = vec![Vec::new(); n];
    for (a, b) in adj.edges() {
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &nbrs[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        if comp.len() >= 2 {
            comp.sort_unstable();
            out.push(comp);
        }
    }
    out
}

pub fn random_graph(rng: &mut impl Rng, n: usize, density: f64) -> LinkAdjacency {
    let mut adj = LinkAdjacency::new(n);
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(density) {
                adj.add_edge(a, b).unwrap();
            }
        }
    }
    adj
}

/// Run linked k-means and fail on any partition, threshold or centroid-norm
/// violation.
pub fn checked_run(corpus: &Corpus, params: &ClusterParams) -> LinkedOutcome {
    let out = run_linked_kmeans(corpus, params).unwrap();
    if let Err(e) = check_outcome(&out, corpus.len(), params.alpha) {
        panic!("invariant violated: {e}");
    }
    out
}

pub fn check_outcome(out: &LinkedOutcome, n: usize, alpha: f64) -> Result<(), String> {
    out.result.check_invariants(n, alpha)?;
    let clustered: BTreeSet<usize> = out.result.clusters.iter().map(|c| c.centroid_id).collect();
    for c in out.centroids.iter().filter(|c| clustered.contains(&c.id)) {
        let norm = c.vector().norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(format!("centroid {} has norm {norm}", c.id));
        }
    }
    Ok(())
}
