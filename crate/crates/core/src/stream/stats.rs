use std::collections::BTreeMap;
use std::fmt;

use crate::counts::FrequencyTracker;
use crate::error::{Error, Result};
use crate::sample::{ClassId, Sample};

/// Per-class sample counts split by whether the sample is multi-label.
#[derive(Debug, Clone, Default)]
pub struct LabelStats {
    total: Vec<u64>,
    multi: Vec<u64>,
    samples: u64,
}

impl LabelStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples<'a, I: IntoIterator<Item = &'a Sample>>(samples: I) -> Self {
        let mut stats = Self::new();
        for s in samples {
            stats.observe(s);
        }
        stats
    }

    pub fn observe(&mut self, sample: &Sample) {
        let need = sample.labels.max_class().index() + 1;
        if self.total.len() < need {
            self.total.resize(need, 0);
            self.multi.resize(need, 0);
        }
        let multi = sample.labels.is_multi_label() as u64;
        for c in sample.labels.iter() {
            self.total[c.index()] += 1;
            self.multi[c.index()] += multi;
        }
        self.samples += 1;
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// Fraction of class-`c` samples carrying more than one label.
    pub fn mlr(&self, c: ClassId) -> Result<f64> {
        match self.total.get(c.index()) {
            Some(&n) if n > 0 => Ok(self.multi[c.index()] as f64 / n as f64),
            _ => Err(Error::ClassAbsent(c.0)),
        }
    }

    /// Unweighted mean of [`LabelStats::mlr`] over the classes present.
    pub fn amlr(&self) -> Result<f64> {
        let present: Vec<usize> = (0..self.total.len()).filter(|&j| self.total[j] > 0).collect();
        if present.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let sum: f64 = present
            .iter()
            .map(|&j| self.multi[j] as f64 / self.total[j] as f64)
            .sum();
        Ok(sum / present.len() as f64)
    }
}

pub fn mlr<'a, I: IntoIterator<Item = &'a Sample>>(dataset: I, c: ClassId) -> Result<f64> {
    LabelStats::from_samples(dataset).mlr(c)
}

pub fn amlr<'a, I: IntoIterator<Item = &'a Sample>>(dataset: I) -> Result<f64> {
    LabelStats::from_samples(dataset).amlr()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    Majority,
    Moderate,
    Minority,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Majority, Tier::Moderate, Tier::Minority];

    pub fn name(self) -> &'static str {
        match self {
            Tier::Majority => "majority",
            Tier::Moderate => "moderate",
            Tier::Minority => "minority",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stream-frequency cut points. Counts above `majority_min` are majority,
/// below `minority_max` minority, and the closed range between is moderate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TierThresholds {
    majority_min: u64,
    minority_max: u64,
}

impl TierThresholds {
    pub fn new(majority_min: u64, minority_max: u64) -> Result<Self> {
        if minority_max >= majority_min {
            return Err(Error::InvalidSpec(format!(
                "minority threshold {minority_max} must be below majority threshold {majority_min}"
            )));
        }
        Ok(TierThresholds {
            majority_min,
            minority_max,
        })
    }

    pub fn tier(&self, count: u64) -> Tier {
        if count > self.majority_min {
            Tier::Majority
        } else if count < self.minority_max {
            Tier::Minority
        } else {
            Tier::Moderate
        }
    }
}

impl Default for TierThresholds {
    fn default() -> Self {
        TierThresholds {
            majority_min: 600,
            minority_max: 100,
        }
    }
}

/// Tier of every class seen in the stream.
pub fn tier_classes(freq: &FrequencyTracker, thresholds: TierThresholds) -> BTreeMap<ClassId, Tier> {
    freq.seen_classes()
        .map(|c| (c, thresholds.tier(freq.get(c))))
        .collect()
}
