use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{report_end, report_start, Objective, UpdateReport, UpdateStrategy};
use crate::buffer::MemoryBuffer;
use crate::counts::FrequencyTracker;
use crate::error::Result;
use crate::sample::Sample;

/// Classic reservoir sampling (Algorithm R). Positions are counted per
/// sample, so batch size has no effect on retention probabilities.
pub struct Reservoir {
    seen: u64,
    objective: Objective,
    rng: ChaCha8Rng,
}

impl Reservoir {
    pub fn new(seed: u64) -> Self {
        Reservoir {
            seen: 0,
            objective: Objective::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Resumes a stream after `seen` samples have already gone by.
    pub fn with_seen(mut self, seen: u64) -> Self {
        self.seen = seen;
        self
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }
}

impl UpdateStrategy for Reservoir {
    fn name(&self) -> &'static str {
        "reservoir"
    }

    fn update(
        &mut self,
        buf: &mut MemoryBuffer,
        batch: Vec<Sample>,
        freq: &FrequencyTracker,
    ) -> Result<UpdateReport> {
        let (target, distance_before) = report_start(&self.objective, buf, freq);
        let mut deleted = Vec::new();
        let capacity = buf.capacity() as u64;
        for sample in batch {
            self.seen += 1;
            if !buf.is_full() {
                buf.insert(sample)?;
                continue;
            }
            // keep with probability M/n
            let slot = self.rng.gen_range(0..self.seen);
            if slot < capacity {
                let evicted = buf.replace(slot as usize, sample)?;
                deleted.push(evicted.id);
            } else {
                deleted.push(sample.id);
            }
        }
        Ok(UpdateReport {
            deleted_sample_ids: deleted,
            distance_before,
            distance_after: report_end(&self.objective, buf, target.as_ref()),
            scan_count: 0,
        })
    }
}
