//! Buffer-update strategies.
//!
//! Every strategy receives a batch whose labels have already been folded
//! into the stream's [`FrequencyTracker`] and leaves the buffer at most at
//! capacity. Once a buffer is full it stays exactly full.

mod baselines;
mod greedy;
mod ocdm;
mod reservoir;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::buffer::MemoryBuffer;
use crate::counts::{ClassCounts, FrequencyTracker};
use crate::distribution::{
    empirical_distribution, target_distribution, AllocationPower, ClassDistribution, Distance,
};
use crate::error::{Error, Result};
use crate::sample::Sample;

pub use baselines::{MaxDeletion, RandomDeletion};
pub use greedy::{greedy_prune, ocdm_delete_argmin, DeletionScorer, PruneOutcome, TIE_TOLERANCE};
pub use ocdm::{Ocdm, OnlyOne};
pub use reservoir::Reservoir;

/// Target allocation and the distance used to measure a memory against it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Objective {
    pub rho: AllocationPower,
    pub distance: Distance,
}

impl Objective {
    pub fn new(rho: AllocationPower, distance: Distance) -> Self {
        Objective { rho, distance }
    }

    pub fn target(&self, freq: &FrequencyTracker) -> Result<ClassDistribution> {
        target_distribution(freq, self.rho)
    }

    /// Distance of `counts` to `target`, or `None` for an empty memory.
    pub fn distance_of(&self, counts: &ClassCounts, target: &ClassDistribution) -> Option<f64> {
        empirical_distribution(counts)
            .ok()
            .map(|p| self.distance.between(&p, target))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateReport {
    /// Samples that left the pool, either evicted residents or rejected
    /// arrivals. When the buffer was full before the update this has one
    /// entry per batch sample.
    pub deleted_sample_ids: Vec<u64>,
    pub distance_before: Option<f64>,
    pub distance_after: Option<f64>,
    /// Candidate evaluations performed during deletion.
    pub scan_count: u64,
}

pub trait UpdateStrategy: Send {
    fn name(&self) -> &'static str;

    fn update(
        &mut self,
        buf: &mut MemoryBuffer,
        batch: Vec<Sample>,
        freq: &FrequencyTracker,
    ) -> Result<UpdateReport>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Ocdm,
    Reservoir,
    OnlyOne,
    Random,
    Max,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Ocdm,
        StrategyKind::Reservoir,
        StrategyKind::OnlyOne,
        StrategyKind::Random,
        StrategyKind::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Ocdm => "ocdm",
            StrategyKind::Reservoir => "reservoir",
            StrategyKind::OnlyOne => "onlyone",
            StrategyKind::Random => "random",
            StrategyKind::Max => "max",
        }
    }

    /// Builds a strategy. `objective` drives deletion for OCDM and OnlyOne
    /// and is used only for reporting by the others.
    pub fn build(self, objective: Objective, seed: u64) -> Box<dyn UpdateStrategy> {
        match self {
            StrategyKind::Ocdm => Box::new(Ocdm::new(objective, seed)),
            StrategyKind::Reservoir => Box::new(Reservoir::new(seed).with_objective(objective)),
            StrategyKind::OnlyOne => Box::new(OnlyOne::new(objective, seed)),
            StrategyKind::Random => Box::new(RandomDeletion::new(seed).with_objective(objective)),
            StrategyKind::Max => Box::new(MaxDeletion::new(seed).with_objective(objective)),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == lower || (lower == "rs" && *k == StrategyKind::Reservoir))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown strategy {s:?}")))
    }
}

/// Inserts a random subset of `min(batch, free space)` samples directly and
/// returns the rest.
pub(crate) fn warm_up<R: Rng>(
    buf: &mut MemoryBuffer,
    mut batch: Vec<Sample>,
    rng: &mut R,
) -> Result<Vec<Sample>> {
    let free = buf.free_space();
    if free == 0 {
        return Ok(batch);
    }
    if batch.len() > free {
        batch.shuffle(rng);
    }
    let take = free.min(batch.len());
    let leftovers = batch.split_off(take);
    for s in batch {
        buf.insert(s)?;
    }
    Ok(leftovers)
}

/// Moves the buffer contents plus `extra` into one pool with its counts.
pub(crate) fn pool_with(buf: &mut MemoryBuffer, extra: Vec<Sample>) -> (Vec<Sample>, ClassCounts) {
    let (mut pool, mut counts) = buf.take_contents();
    for s in extra {
        counts.add(&s.labels);
        pool.push(s);
    }
    (pool, counts)
}

/// Target and pre-update distance shared by all strategies' reports.
pub(crate) fn report_start(
    objective: &Objective,
    buf: &MemoryBuffer,
    freq: &FrequencyTracker,
) -> (Option<ClassDistribution>, Option<f64>) {
    let target = objective.target(freq).ok();
    let before = target
        .as_ref()
        .and_then(|t| objective.distance_of(buf.counts(), t));
    (target, before)
}

pub(crate) fn report_end(
    objective: &Objective,
    buf: &MemoryBuffer,
    target: Option<&ClassDistribution>,
) -> Option<f64> {
    target.and_then(|t| objective.distance_of(buf.counts(), t))
}
