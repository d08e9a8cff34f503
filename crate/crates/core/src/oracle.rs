//! Exhaustive solver for tiny subset-selection instances, used as ground
//! truth for the greedy strategy.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::counts::{rebuild_counts, ClassCounts};
use crate::distribution::{ClassDistribution, Distance};
use crate::error::{Error, Result};
use crate::sample::{Labeled, Sample};
use crate::strategy::{greedy_prune, TIE_TOLERANCE};

/// Largest number of subsets the oracle will enumerate.
pub const MAX_SUBSETS: u128 = 2_000_000;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_distance: f64,
    /// Sorted index sets, in lexicographic order.
    pub optimal_subsets: Vec<Vec<usize>>,
    pub subsets_evaluated: u64,
}

impl OracleResult {
    /// Distinct class-count vectors among the optimal subsets.
    pub fn optimal_counts<T: Labeled>(&self, pool: &[T]) -> BTreeSet<Vec<u64>> {
        let classes = rebuild_counts(pool).len();
        self.optimal_subsets
            .iter()
            .map(|subset| {
                let mut c = rebuild_counts(subset.iter().map(|&i| &pool[i]));
                c.ensure_len(classes);
                c.as_slice().to_vec()
            })
            .collect()
    }
}

/// `n choose k`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of classes both the oracle and the greedy comparison evaluate over.
fn universe<T: Labeled>(pool: &[T], target: &ClassDistribution) -> usize {
    rebuild_counts(pool).len().max(target.len())
}

/// Enumerates every `m`-subset of `pool` and returns all minimizers of the
/// distance to `target`.
pub fn brute_force_select<T: Labeled>(
    pool: &[T],
    m: usize,
    target: &ClassDistribution,
    distance: Distance,
) -> Result<OracleResult> {
    let n = pool.len();
    if m == 0 || m > n {
        return Err(Error::InvalidInstance(format!(
            "cannot select {m} of {n} samples"
        )));
    }
    let subsets = binomial(n as u64, m as u64);
    if subsets > MAX_SUBSETS {
        return Err(Error::InstanceTooLarge {
            subsets,
            limit: MAX_SUBSETS,
        });
    }
    let classes = universe(pool, target);

    let mut idx: Vec<usize> = (0..m).collect();
    let mut counts = ClassCounts::with_len(classes);
    for &i in &idx {
        counts.add(pool[i].labels());
    }

    let mut scored: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut best = f64::INFINITY;
    let mut evaluated: u64 = 0;
    loop {
        let d = distance
            .of_counts(counts.as_slice(), target, classes)
            .unwrap_or(f64::INFINITY);
        evaluated += 1;
        if d <= best + TIE_TOLERANCE {
            best = best.min(d);
            scored.push((d, idx.clone()));
        }

        // advance to the next combination in lexicographic order
        let Some(pivot) = (0..m).rev().find(|&i| idx[i] < n - m + i) else {
            break;
        };
        for &i in &idx[pivot..] {
            counts.remove(pool[i].labels());
        }
        idx[pivot] += 1;
        for j in pivot + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
        for &i in &idx[pivot..] {
            counts.add(pool[i].labels());
        }
    }

    let optimal_subsets = scored
        .into_iter()
        .filter(|(d, _)| *d <= best + TIE_TOLERANCE)
        .map(|(_, s)| s)
        .collect();
    Ok(OracleResult {
        best_distance: best,
        optimal_subsets,
        subsets_evaluated: evaluated,
    })
}

/// Outcome of one greedy run on an oracle instance.
#[derive(Debug, Clone)]
pub struct GreedyRun {
    pub distance: f64,
    pub counts: Vec<u64>,
}

/// Shrinks `pool` to `m` samples with the greedy rule.
pub fn greedy_select(
    pool: &[Sample],
    m: usize,
    target: &ClassDistribution,
    distance: Distance,
    seed: u64,
) -> Result<GreedyRun> {
    if m == 0 || m > pool.len() {
        return Err(Error::InvalidInstance(format!(
            "cannot select {m} of {} samples",
            pool.len()
        )));
    }
    let classes = universe(pool, target);
    let mut work = pool.to_vec();
    let mut counts = rebuild_counts(&work);
    counts.ensure_len(classes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    greedy_prune(
        &mut work,
        &mut counts,
        pool.len() - m,
        target,
        distance,
        &mut rng,
    );
    Ok(GreedyRun {
        distance: distance
            .of_counts(counts.as_slice(), target, classes)
            .unwrap_or(f64::INFINITY),
        counts: counts.as_slice().to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapStats {
    pub best_distance: f64,
    pub mean_gap: f64,
    pub max_gap: f64,
    /// Fraction of trials whose greedy distance is within tolerance of the
    /// optimum.
    pub match_rate: f64,
    /// Fraction of trials whose greedy class counts equal those of some
    /// optimal subset.
    pub count_match_rate: f64,
    pub trials: usize,
}

/// Runs the greedy rule `trials` times (seeds `seed..seed + trials`) and
/// compares each result with the exhaustive optimum.
pub fn greedy_gap(
    pool: &[Sample],
    m: usize,
    target: &ClassDistribution,
    distance: Distance,
    trials: usize,
    seed: u64,
) -> Result<GapStats> {
    if trials == 0 {
        return Err(Error::InvalidInstance("trials must be positive".into()));
    }
    let oracle = brute_force_select(pool, m, target, distance)?;
    let optimal_counts = oracle.optimal_counts(pool);
    let mut sum = 0.0;
    let mut max = 0.0f64;
    let mut matches = 0usize;
    let mut count_matches = 0usize;
    for t in 0..trials {
        let run = greedy_select(pool, m, target, distance, seed.wrapping_add(t as u64))?;
        let gap = (run.distance - oracle.best_distance).max(0.0);
        sum += gap;
        max = max.max(gap);
        if gap <= TIE_TOLERANCE {
            matches += 1;
        }
        let mut c = run.counts;
        c.resize(optimal_counts.iter().next().map_or(c.len(), Vec::len), 0);
        if optimal_counts.contains(&c) {
            count_matches += 1;
        }
    }
    Ok(GapStats {
        best_distance: oracle.best_distance,
        mean_gap: sum / trials as f64,
        max_gap: max,
        match_rate: matches as f64 / trials as f64,
        count_match_rate: count_matches as f64 / trials as f64,
        trials,
    })
}
