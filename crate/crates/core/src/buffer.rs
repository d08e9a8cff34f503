use crate::counts::{rebuild_counts, ClassCounts};
use crate::error::{Error, Result};
use crate::sample::Sample;

/// Fixed-capacity sample store with incrementally maintained class counts.
///
/// Removal is swap-remove: the last sample moves into the vacated slot, so
/// positions are not stable across removals.
#[derive(Debug, Clone)]
pub struct MemoryBuffer {
    capacity: usize,
    samples: Vec<Sample>,
    counts: ClassCounts,
}

impl MemoryBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::ZeroCapacity);
        }
        Ok(MemoryBuffer {
            capacity,
            samples: Vec::with_capacity(capacity),
            counts: ClassCounts::new(),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.samples.len() == self.capacity
    }

    pub fn free_space(&self) -> usize {
        self.capacity - self.samples.len()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn counts(&self) -> &ClassCounts {
        &self.counts
    }

    pub fn insert(&mut self, sample: Sample) -> Result<()> {
        if self.is_full() {
            return Err(Error::CapacityExceeded {
                capacity: self.capacity,
            });
        }
        self.counts.add(&sample.labels);
        self.samples.push(sample);
        Ok(())
    }

    pub fn remove(&mut self, index: usize) -> Result<Sample> {
        if index >= self.samples.len() {
            return Err(Error::OutOfBounds {
                index,
                len: self.samples.len(),
            });
        }
        let sample = self.samples.swap_remove(index);
        self.counts.remove(&sample.labels);
        Ok(sample)
    }

    /// Puts `sample` at `index` and returns the previous occupant.
    pub fn replace(&mut self, index: usize, sample: Sample) -> Result<Sample> {
        if index >= self.samples.len() {
            return Err(Error::OutOfBounds {
                index,
                len: self.samples.len(),
            });
        }
        self.counts.remove(&self.samples[index].labels);
        self.counts.add(&sample.labels);
        Ok(std::mem::replace(&mut self.samples[index], sample))
    }

    /// Hands the contents to a caller that will return a new set of at most
    /// `capacity` samples through [`MemoryBuffer::restore`].
    pub(crate) fn take_contents(&mut self) -> (Vec<Sample>, ClassCounts) {
        (
            std::mem::take(&mut self.samples),
            std::mem::take(&mut self.counts),
        )
    }

    pub(crate) fn restore(&mut self, samples: Vec<Sample>, counts: ClassCounts) {
        debug_assert!(samples.len() <= self.capacity);
        debug_assert!(counts.same_as(&rebuild_counts(&samples)));
        self.samples = samples;
        self.counts = counts;
    }

    /// True when the maintained counts agree with a fresh tally.
    pub fn counts_consistent(&self) -> bool {
        self.counts.same_as(&rebuild_counts(&self.samples))
    }
}
