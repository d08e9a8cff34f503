//! Replay-buffer maintenance for multi-label data streams.
//!
//! The central piece is [`strategy::Ocdm`], which keeps the class
//! distribution of a fixed-size memory close to a target derived from the
//! stream's running class frequencies by greedily deleting one sample at a
//! time. Reservoir sampling and several ablations share the same
//! [`strategy::UpdateStrategy`] interface, [`oracle`] solves tiny instances
//! exactly, and [`stream`] and [`metrics`] provide synthetic streams and
//! run instrumentation.

pub mod buffer;
pub mod counts;
pub mod distribution;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod oracle;
pub mod sample;
pub mod strategy;
pub mod stream;

pub use buffer::MemoryBuffer;
pub use counts::{rebuild_counts, ClassCounts, FrequencyTracker};
pub use distribution::{
    distance, empirical_distribution, target_distribution, AllocationPower, ClassDistribution,
    Distance, DistanceKind, KlDirection,
};
pub use error::{Error, Result};
pub use sample::{ClassId, LabelSet, Labeled, Sample};
pub use strategy::{Objective, StrategyKind, UpdateReport, UpdateStrategy};
