//! One-at-a-time greedy deletion toward a target class distribution.

use rand::Rng;

use crate::counts::ClassCounts;
use crate::distribution::{ClassDistribution, Distance};
use crate::sample::{LabelSet, Labeled, Sample};

/// Candidates whose post-deletion distance is within this of the minimum
/// are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Scores single deletions against a fixed pool tally.
///
/// Removing a sample with `k` labels shrinks the label total to `S - k` and
/// lowers `k` class counts by one. For each distinct `k` the scorer caches
/// the full distance at total `S - k` with unchanged counts; a candidate is
/// then scored by swapping the terms of its own classes, so each evaluation
/// costs `O(k)`.
pub struct DeletionScorer<'a> {
    counts: &'a [u64],
    total: u64,
    target: &'a ClassDistribution,
    classes: usize,
    distance: Distance,
    base: Vec<Option<f64>>,
}

impl<'a> DeletionScorer<'a> {
    pub fn new(counts: &'a ClassCounts, target: &'a ClassDistribution, distance: Distance) -> Self {
        DeletionScorer {
            counts: counts.as_slice(),
            total: counts.total(),
            target,
            classes: counts.len().max(target.len()),
            distance,
            base: Vec::new(),
        }
    }

    fn count(&self, class: usize) -> u64 {
        self.counts.get(class).copied().unwrap_or(0)
    }

    fn base(&mut self, k: usize) -> f64 {
        if self.base.len() <= k {
            self.base.resize(k + 1, None);
        }
        if let Some(v) = self.base[k] {
            return v;
        }
        let remaining = (self.total - k as u64) as f64;
        let v = (0..self.classes)
            .map(|j| {
                self.distance
                    .term(self.count(j) as f64 / remaining, self.target.get(j), self.classes)
            })
            .sum();
        self.base[k] = Some(v);
        v
    }

    /// Distance of the pool with one sample carrying `labels` removed.
    pub fn score(&mut self, labels: &LabelSet) -> f64 {
        let k = labels.len();
        if self.total <= k as u64 {
            return f64::INFINITY;
        }
        let remaining = (self.total - k as u64) as f64;
        let mut v = self.base(k);
        for c in labels.iter() {
            let j = c.index();
            let m = self.count(j) as f64;
            let q = self.target.get(j);
            v -= self.distance.term(m / remaining, q, self.classes);
            v += self.distance.term((m - 1.0) / remaining, q, self.classes);
        }
        v
    }
}

/// Picks uniformly among the indices whose score is within
/// [`TIE_TOLERANCE`] of the smallest.
fn pick_minimizer<R: Rng>(scores: &[f64], rng: &mut R) -> usize {
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let ties: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= min + TIE_TOLERANCE)
        .map(|(i, _)| i)
        .collect();
    match ties.len() {
        0 => rng.gen_range(0..scores.len()),
        1 => ties[0],
        n => ties[rng.gen_range(0..n)],
    }
}

/// Index of the candidate whose deletion leaves the pool closest to
/// `target`. `counts` must be the tally of `candidates`.
///
/// # Panics
///
/// If `candidates` is empty.
pub fn ocdm_delete_argmin<T: Labeled, R: Rng>(
    counts: &ClassCounts,
    candidates: &[T],
    target: &ClassDistribution,
    distance: Distance,
    rng: &mut R,
) -> usize {
    assert!(!candidates.is_empty(), "cannot delete from an empty pool");
    if candidates.len() == 1 {
        return 0;
    }
    let mut scorer = DeletionScorer::new(counts, target, distance);
    let scores: Vec<f64> = candidates.iter().map(|c| scorer.score(c.labels())).collect();
    pick_minimizer(&scores, rng)
}

#[derive(Debug, Default)]
pub struct PruneOutcome {
    pub deleted: Vec<Sample>,
    pub scan_count: u64,
}

/// Deletes `deletions` samples from `pool` one at a time, each time removing
/// the greedy minimizer. `counts` is kept in sync with `pool`.
pub fn greedy_prune<R: Rng>(
    pool: &mut Vec<Sample>,
    counts: &mut ClassCounts,
    deletions: usize,
    target: &ClassDistribution,
    distance: Distance,
    rng: &mut R,
) -> PruneOutcome {
    assert!(deletions <= pool.len());
    let mut out = PruneOutcome {
        deleted: Vec::with_capacity(deletions),
        scan_count: 0,
    };
    let mut scores = Vec::with_capacity(pool.len());
    for _ in 0..deletions {
        out.scan_count += pool.len() as u64;
        let idx = {
            let mut scorer = DeletionScorer::new(counts, target, distance);
            scores.clear();
            scores.extend(pool.iter().map(|s| scorer.score(&s.labels)));
            pick_minimizer(&scores, rng)
        };
        let removed = pool.swap_remove(idx);
        counts.remove(&removed.labels);
        out.deleted.push(removed);
    }
    out
}
