//! Per-step run instrumentation: distance to target, update timing, scan
//! counts and periodic class-count snapshots.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Duration;

use crate::buffer::MemoryBuffer;
use crate::counts::FrequencyTracker;
use crate::error::{Error, Result};
use crate::sample::ClassId;
use crate::strategy::Objective;
use crate::stream::Tier;

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    /// Task the batch came from, when known.
    pub task: Option<usize>,
    pub distance: f64,
    pub update_us: u64,
    pub scan_count: u64,
    pub buffer_full: bool,
    /// Buffer class counts, present every `snapshot_period` steps.
    pub counts: Option<Vec<u64>>,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    objective: Objective,
    snapshot_period: usize,
    task: Option<usize>,
    steps: Vec<StepRecord>,
    final_counts: Vec<u64>,
}

impl RunTrace {
    /// `snapshot_period == 0` disables snapshots.
    pub fn new(objective: Objective, snapshot_period: usize) -> Self {
        RunTrace {
            objective,
            snapshot_period,
            task: None,
            steps: Vec::new(),
            final_counts: Vec::new(),
        }
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    /// Tags subsequent steps with `task`.
    pub fn set_task(&mut self, task: Option<usize>) {
        self.task = task;
    }

    /// Appends the distance between the buffer's class distribution and the
    /// target implied by `freq`.
    pub fn record_step(
        &mut self,
        buf: &MemoryBuffer,
        freq: &FrequencyTracker,
        elapsed: Duration,
        scan_count: u64,
    ) -> Result<()> {
        if buf.is_empty() {
            return Err(Error::EmptyCounts);
        }
        let target = self.objective.target(freq)?;
        let distance = self
            .objective
            .distance_of(buf.counts(), &target)
            .ok_or(Error::EmptyCounts)?;
        let step = self.steps.last().map_or(0, |s| s.step + 1);
        let mut counts = buf.counts().as_slice().to_vec();
        counts.resize(counts.len().max(freq.len()), 0);
        let snapshot = self.snapshot_period > 0 && step.is_multiple_of(self.snapshot_period as u64);
        self.steps.push(StepRecord {
            step,
            task: self.task,
            distance,
            update_us: elapsed.as_micros() as u64,
            scan_count,
            buffer_full: buf.is_full(),
            counts: snapshot.then(|| counts.clone()),
        });
        self.final_counts = counts;
        Ok(())
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Buffer class counts as of the last recorded step.
    pub fn final_counts(&self) -> &[u64] {
        &self.final_counts
    }

    /// Zeroes all timing fields so output depends only on the inputs.
    pub fn clear_timing(&mut self) {
        for s in &mut self.steps {
            s.update_us = 0;
        }
    }

    /// `step,distance,update_us,scan_count`, one row per step.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "step,distance,update_us,scan_count")?;
        for s in &self.steps {
            writeln!(out, "{},{},{},{}", s.step, s.distance, s.update_us, s.scan_count)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub steps: usize,
    pub final_distance: f64,
    pub mean_update_us: f64,
    /// Sum of final buffer class counts over each tier's classes.
    pub tier_counts: BTreeMap<Tier, u64>,
    pub max_class_count: u64,
    pub min_class_count: u64,
}

impl Summary {
    /// `max / min` over tiered classes; infinite when some class is absent.
    pub fn imbalance_ratio(&self) -> f64 {
        if self.min_class_count == 0 {
            f64::INFINITY
        } else {
            self.max_class_count as f64 / self.min_class_count as f64
        }
    }
}

pub fn summarize(trace: &RunTrace, tiers: &BTreeMap<ClassId, Tier>) -> Result<Summary> {
    let last = trace.steps.last().ok_or(Error::EmptyTrace)?;
    let count = |c: &ClassId| trace.final_counts.get(c.index()).copied().unwrap_or(0);
    let mut tier_counts: BTreeMap<Tier, u64> = Tier::ALL.iter().map(|&t| (t, 0)).collect();
    for (c, t) in tiers {
        *tier_counts.get_mut(t).unwrap() += count(c);
    }
    let total_us: u64 = trace.steps.iter().map(|s| s.update_us).sum();
    Ok(Summary {
        steps: trace.steps.len(),
        final_distance: last.distance,
        mean_update_us: total_us as f64 / trace.steps.len() as f64,
        tier_counts,
        max_class_count: tiers.keys().map(count).max().unwrap_or(0),
        min_class_count: tiers.keys().map(count).min().unwrap_or(0),
    })
}

/// `class_id,count,tier` rows for every tiered class.
pub fn write_histogram<W: Write>(
    mut out: W,
    counts: &[u64],
    tiers: &BTreeMap<ClassId, Tier>,
) -> Result<()> {
    writeln!(out, "class_id,count,tier")?;
    for (c, t) in tiers {
        let n = counts.get(c.index()).copied().unwrap_or(0);
        writeln!(out, "{c},{n},{t}")?;
    }
    out.flush()?;
    Ok(())
}
