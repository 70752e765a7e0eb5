//! Lloyd k-means (Euclidean) and spherical k-means baselines over sparse
//! document vectors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansState {
    pub k: usize,
    pub centroids: Vec<SparseVector>,
    /// Cluster index per input vector.
    pub assignment: Vec<usize>,
    /// Euclidean: mean squared distance to the assigned centroid.
    /// Spherical: total cosine similarity to the assigned centroid.
    pub objective: f64,
    /// Objective after every centroid update, in order.
    pub history: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Geometry {
    Euclidean,
    Spherical,
}

impl Geometry {
    fn centroid(self, members: &[&SparseVector]) -> SparseVector {
        let sum = SparseVector::sum(members.iter().copied());
        match self {
            Geometry::Euclidean => sum.scaled(1.0 / members.len() as f64),
            Geometry::Spherical => sum.l2_normalized(),
        }
    }

    fn nearest(self, v: &SparseVector, centroids: &[SparseVector]) -> usize {
        match self {
            Geometry::Euclidean => nearest_euclidean(v, centroids),
            Geometry::Spherical => nearest_cosine(v, centroids),
        }
    }

    /// Cost of one point; lower is better for both geometries.
    fn cost(self, v: &SparseVector, c: &SparseVector) -> f64 {
        match self {
            Geometry::Euclidean => v.squared_distance(c),
            Geometry::Spherical => -cosine(v, c),
        }
    }

    fn objective(self, vectors: &[SparseVector], centroids: &[SparseVector], assignment: &[usize]) -> f64 {
        match self {
            Geometry::Euclidean => euclidean_objective(vectors, centroids, assignment),
            Geometry::Spherical => spherical_objective(vectors, centroids, assignment),
        }
    }
}

fn cosine(v: &SparseVector, c: &SparseVector) -> f64 {
    let denom = v.norm() * c.norm();
    if denom == 0.0 {
        0.0
    } else {
        v.dot(c) / denom
    }
}

/// Index of the closest centroid by Euclidean distance, lowest index on ties.
pub fn nearest_euclidean(v: &SparseVector, centroids: &[SparseVector]) -> usize {
    argmin(centroids.iter().map(|c| v.squared_distance(c)))
}

/// Index of the most cosine-similar centroid, lowest index on ties.
pub fn nearest_cosine(v: &SparseVector, centroids: &[SparseVector]) -> usize {
    argmin(centroids.iter().map(|c| -cosine(v, c)))
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, x) in values.enumerate() {
        if x < best.1 {
            best = (i, x);
        }
    }
    best.0
}

/// `(1/n) * sum ||d - c(d)||^2`, computed from scratch.
pub fn euclidean_objective(vectors: &[SparseVector], centroids: &[SparseVector], assignment: &[usize]) -> f64 {
    if vectors.is_empty() {
        return 0.0;
    }
    let total: f64 = vectors
        .iter()
        .zip(assignment)
        .map(|(v, &a)| v.squared_distance(&centroids[a]))
        .sum();
    total / vectors.len() as f64
}

/// Sum of cosine similarities to the assigned centroids.
pub fn spherical_objective(vectors: &[SparseVector], centroids: &[SparseVector], assignment: &[usize]) -> f64 {
    vectors
        .iter()
        .zip(assignment)
        .map(|(v, &a)| cosine(v, &centroids[a]))
        .sum()
}

/// `k` distinct indices in `[0, n)` drawn from a seeded RNG.
pub fn random_init(n: usize, k: usize, rng_seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rand::seq::index::sample(&mut rng, n, k).into_vec()
}

fn check_inputs(vectors: &[SparseVector], k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParam("k must be positive".into()));
    }
    if k > vectors.len() {
        return Err(Error::InvalidParam(format!(
            "k = {k} exceeds the {} available vectors",
            vectors.len()
        )));
    }
    if vectors.iter().any(SparseVector::is_empty) {
        return Err(Error::EmptyVector);
    }
    Ok(())
}

/// Lloyd iterations from `k` random distinct documents.
pub fn run_kmeans_baseline(vectors: &[SparseVector], k: usize, max_iter: usize, rng_seed: u64) -> Result<KMeansState> {
    check_inputs(vectors, k)?;
    let init = random_init(vectors.len(), k, rng_seed);
    Ok(lloyd(vectors, &init, max_iter, Geometry::Euclidean))
}

/// Spherical k-means from `k` random distinct documents. Inputs must be
/// unit vectors.
pub fn run_spherical_kmeans_baseline(
    vectors: &[SparseVector],
    k: usize,
    max_iter: usize,
    rng_seed: u64,
) -> Result<KMeansState> {
    check_inputs(vectors, k)?;
    if let Some(i) = vectors.iter().position(|v| !v.is_unit()) {
        return Err(Error::InvalidParam(format!("vector {i} is not unit length")));
    }
    let init = random_init(vectors.len(), k, rng_seed);
    Ok(lloyd(vectors, &init, max_iter, Geometry::Spherical))
}

/// Euclidean Lloyd from explicit initial documents.
pub fn kmeans_from_init(vectors: &[SparseVector], init: &[usize], max_iter: usize) -> Result<KMeansState> {
    check_inputs(vectors, init.len())?;
    Ok(lloyd(vectors, init, max_iter, Geometry::Euclidean))
}

/// Spherical k-means from explicit initial documents.
pub fn spherical_kmeans_from_init(vectors: &[SparseVector], init: &[usize], max_iter: usize) -> Result<KMeansState> {
    check_inputs(vectors, init.len())?;
    Ok(lloyd(vectors, init, max_iter, Geometry::Spherical))
}

fn lloyd(vectors: &[SparseVector], init: &[usize], max_iter: usize, geometry: Geometry) -> KMeansState {
    let k = init.len();
    let mut centroids: Vec<SparseVector> = init.iter().map(|&i| geometry.centroid(&[&vectors[i]])).collect();
    let mut assignment: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut iterations = 0;

    while iterations < max_iter {
        let next: Vec<usize> = vectors.iter().map(|v| geometry.nearest(v, &centroids)).collect();
        if next == assignment {
            break;
        }
        assignment = next;
        iterations += 1;
        reseed_empty(vectors, &centroids, &mut assignment, k, geometry);

        let mut members: Vec<Vec<&SparseVector>> = vec![Vec::new(); k];
        for (v, &a) in vectors.iter().zip(&assignment) {
            members[a].push(v);
        }
        centroids = members.iter().map(|m| geometry.centroid(m)).collect();
        history.push(geometry.objective(vectors, &centroids, &assignment));
    }

    if assignment.is_empty() {
        assignment = vectors.iter().map(|v| geometry.nearest(v, &centroids)).collect();
    }
    let objective = geometry.objective(vectors, &centroids, &assignment);
    KMeansState {
        k,
        centroids,
        assignment,
        objective,
        history,
        iterations,
    }
}

/// Give every empty cluster the point that currently fits its own centroid
/// worst, never emptying another cluster in the process.
fn reseed_empty(
    vectors: &[SparseVector],
    centroids: &[SparseVector],
    assignment: &mut [usize],
    k: usize,
    geometry: Geometry,
) {
    let mut sizes = vec![0usize; k];
    for &a in assignment.iter() {
        sizes[a] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut worst: Option<(usize, f64)> = None;
        for (i, v) in vectors.iter().enumerate() {
            let a = assignment[i];
            if sizes[a] < 2 {
                continue;
            }
            let cost = geometry.cost(v, &centroids[a]);
            if worst.is_none_or(|(_, w)| cost > w) {
                worst = Some((i, cost));
            }
        }
        if let Some((i, _)) = worst {
            sizes[assignment[i]] -= 1;
            assignment[i] = empty;
            sizes[empty] = 1;
        }
    }
}
