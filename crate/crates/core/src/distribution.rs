//! Class distributions over the known class universe and the distances used
//! to compare a memory's distribution against its target.

use std::fmt;
use std::str::FromStr;

use crate::counts::{ClassCounts, FrequencyTracker};
use crate::error::{Error, Result};

/// Additive smoothing applied per class before evaluating KL.
pub const KL_SMOOTHING: f64 = 1e-12;

/// Tolerance on the sum of a valid distribution.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistribution {
    probs: Vec<f64>,
}

impl ClassDistribution {
    /// Validates nonnegativity and unit mass.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidSpec(
                "distribution entries must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidSpec(format!(
                "distribution sums to {sum}, expected 1"
            )));
        }
        Ok(ClassDistribution { probs })
    }

    pub fn uniform(n: usize) -> Self {
        ClassDistribution {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, class: usize) -> f64 {
        self.probs.get(class).copied().unwrap_or(0.0)
    }

    /// Zero-extends to `len` classes.
    pub fn padded(&self, len: usize) -> ClassDistribution {
        let mut probs = self.probs.clone();
        if probs.len() < len {
            probs.resize(len, 0.0);
        }
        ClassDistribution { probs }
    }
}

/// Power applied to running class frequencies when forming the target.
/// 0 gives a uniform target over seen classes, 1 a stream-proportional one.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct AllocationPower(f64);

impl AllocationPower {
    pub fn new(rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidAllocationPower(rho));
        }
        Ok(AllocationPower(rho))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for AllocationPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DistanceKind {
    #[default]
    Kl,
    TotalVariation,
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kl" => Ok(DistanceKind::Kl),
            "tv" | "total-variation" => Ok(DistanceKind::TotalVariation),
            other => Err(Error::InvalidSpec(format!("unknown distance {other:?}"))),
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceKind::Kl => "kl",
            DistanceKind::TotalVariation => "tv",
        })
    }
}

/// Which side of the KL divergence the memory distribution sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum KlDirection {
    /// KL(memory ‖ target)
    #[default]
    MemoryFirst,
    /// KL(target ‖ memory)
    TargetFirst,
}

impl FromStr for KlDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "memory-first" | "forward" => Ok(KlDirection::MemoryFirst),
            "target-first" | "reverse" => Ok(KlDirection::TargetFirst),
            other => Err(Error::InvalidSpec(format!(
                "unknown KL direction {other:?}"
            ))),
        }
    }
}

/// A distance between a memory distribution and a target distribution.
///
/// Every supported distance is a sum of per-class terms, each depending only
/// on that class's two probabilities. The greedy deletion scorer relies on
/// this to re-evaluate a candidate deletion in time proportional to its
/// label count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Distance {
    pub kind: DistanceKind,
    pub direction: KlDirection,
}

impl Distance {
    pub fn new(kind: DistanceKind) -> Self {
        Distance {
            kind,
            direction: KlDirection::MemoryFirst,
        }
    }

    pub fn with_direction(mut self, direction: KlDirection) -> Self {
        self.direction = direction;
        self
    }

    /// Per-class contribution for memory probability `p` and target
    /// probability `q` in a universe of `n` classes.
    #[inline]
    pub(crate) fn term(&self, p: f64, q: f64, n: usize) -> f64 {
        match self.kind {
            DistanceKind::TotalVariation => 0.5 * (p - q).abs(),
            DistanceKind::Kl => {
                let z = 1.0 + n as f64 * KL_SMOOTHING;
                let ps = (p + KL_SMOOTHING) / z;
                let qs = (q + KL_SMOOTHING) / z;
                match self.direction {
                    KlDirection::MemoryFirst => ps * (ps / qs).ln(),
                    KlDirection::TargetFirst => qs * (qs / ps).ln(),
                }
            }
        }
    }

    /// Distance of raw class counts to `target` over a universe of
    /// `classes` classes, without materializing the distribution.
    pub(crate) fn of_counts(
        &self,
        counts: &[u64],
        target: &ClassDistribution,
        classes: usize,
    ) -> Option<f64> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return None;
        }
        let total = total as f64;
        let sum: f64 = (0..classes)
            .map(|j| {
                let m = counts.get(j).copied().unwrap_or(0) as f64;
                self.term(m / total, target.get(j), classes)
            })
            .sum();
        Some(sum.max(0.0))
    }

    /// Distance from `memory` to `target`. Lengths may differ; the shorter
    /// one is zero-extended, matching the lazily grown class universe.
    pub fn between(&self, memory: &ClassDistribution, target: &ClassDistribution) -> f64 {
        let n = memory.len().max(target.len());
        let sum: f64 = (0..n)
            .map(|j| self.term(memory.get(j), target.get(j), n))
            .sum();
        sum.max(0.0)
    }
}

/// Normalizes class counts into a distribution.
pub fn empirical_distribution(counts: &ClassCounts) -> Result<ClassDistribution> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let total = total as f64;
    Ok(ClassDistribution {
        probs: counts.as_slice().iter().map(|&m| m as f64 / total).collect(),
    })
}

/// Target distribution from running class frequencies: each seen class gets
/// mass proportional to `freq^rho`; unseen classes get none, including at
/// `rho == 0`.
pub fn target_distribution(
    freq: &FrequencyTracker,
    rho: AllocationPower,
) -> Result<ClassDistribution> {
    let weights: Vec<f64> = freq
        .as_slice()
        .iter()
        .map(|&n| {
            if n == 0 {
                0.0
            } else {
                (n as f64).powf(rho.value())
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Err(Error::NoClassesSeen);
    }
    Ok(ClassDistribution {
        probs: weights.into_iter().map(|w| w / total).collect(),
    })
}

/// `kind` distance with `p` as the first argument. Unlike
/// [`Distance::between`], lengths must match.
pub fn distance(p: &ClassDistribution, q: &ClassDistribution, kind: DistanceKind) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(Distance::new(kind).between(p, q))
}
