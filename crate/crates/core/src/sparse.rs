//! Sparse nonnegative term vectors.

use serde::{Deserialize, Serialize};

pub type TermId = usize;

/// Tolerance used for unit-norm checks throughout the crate.
pub const UNIT_NORM_TOL: f64 = 1e-9;

/// Sorted `(term_id, weight)` pairs with strictly increasing ids and
/// strictly positive weights, plus the cached L2 norm.
///
/// A vector with no entries is the "empty" vector: it has norm zero and is
/// what normalization of a zero vector yields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(TermId, f64)>,
    norm: f64,
}

impl SparseVector {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from arbitrary pairs. Duplicate ids are summed; zero weights
    /// are dropped. Panics on negative or non-finite weights.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (TermId, f64)>) -> Self {
        let mut entries: Vec<(TermId, f64)> = pairs.into_iter().collect();
        for &(_, w) in &entries {
            assert!(w.is_finite() && w >= 0.0, "weight must be finite and >= 0, got {w}");
        }
        entries.sort_by_key(|&(t, _)| t);
        let mut merged: Vec<(TermId, f64)> = Vec::with_capacity(entries.len());
        for (t, w) in entries {
            match merged.last_mut() {
                Some((lt, lw)) if *lt == t => *lw += w,
                _ => merged.push((t, w)),
            }
        }
        merged.retain(|&(_, w)| w > 0.0);
        Self::from_sorted_unchecked(merged)
    }

    /// Dense slice to sparse, index = term id.
    pub fn from_dense(values: &[f64]) -> Self {
        Self::from_pairs(values.iter().copied().enumerate())
    }

    fn from_sorted_unchecked(entries: Vec<(TermId, f64)>) -> Self {
        let norm = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        SparseVector { entries, norm }
    }

    pub fn entries(&self) -> &[(TermId, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn get(&self, term: TermId) -> f64 {
        self.entries
            .binary_search_by_key(&term, |&(t, _)| t)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn is_unit(&self) -> bool {
        (self.norm - 1.0).abs() <= UNIT_NORM_TOL
    }

    /// Dot product over shared term ids.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        let mut acc = 0.0;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Squared Euclidean distance.
    pub fn squared_distance(&self, other: &SparseVector) -> f64 {
        (self.norm * self.norm + other.norm * other.norm - 2.0 * self.dot(other)).max(0.0)
    }

    /// Divide every weight by the L2 norm. A zero vector yields the empty vector.
    pub fn l2_normalized(&self) -> SparseVector {
        if self.norm == 0.0 {
            return SparseVector::empty();
        }
        let entries = self.entries.iter().map(|&(t, w)| (t, w / self.norm)).collect();
        Self::from_sorted_unchecked(entries)
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        assert!(factor.is_finite() && factor >= 0.0);
        if factor == 0.0 {
            return SparseVector::empty();
        }
        Self::from_sorted_unchecked(self.entries.iter().map(|&(t, w)| (t, w * factor)).collect())
    }

    /// Elementwise sum of two vectors.
    pub fn add(&self, other: &SparseVector) -> SparseVector {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        Self::from_sorted_unchecked(out)
    }

    /// Sum of many vectors.
    pub fn sum<'a>(vectors: impl IntoIterator<Item = &'a SparseVector>) -> SparseVector {
        let mut acc = std::collections::BTreeMap::<TermId, f64>::new();
        for v in vectors {
            for &(t, w) in &v.entries {
                *acc.entry(t).or_insert(0.0) += w;
            }
        }
        Self::from_sorted_unchecked(acc.into_iter().filter(|&(_, w)| w > 0.0).collect())
    }

    /// Indices of the `n` largest weights, heaviest first, ties by lower id.
    pub fn top_terms(&self, n: usize) -> Vec<TermId> {
        let mut idx: Vec<&(TermId, f64)> = self.entries.iter().collect();
        idx.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        idx.into_iter().take(n).map(|&(t, _)| t).collect()
    }
}
