//! Ablation strategies that delete without consulting the target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{pool_with, report_end, report_start, warm_up, Objective, UpdateReport, UpdateStrategy};
use crate::buffer::MemoryBuffer;
use crate::counts::FrequencyTracker;
use crate::error::Result;
use crate::sample::{ClassId, Sample};

/// Deletes uniformly random pool members until the pool fits.
pub struct RandomDeletion {
    objective: Objective,
    rng: ChaCha8Rng,
}

impl RandomDeletion {
    pub fn new(seed: u64) -> Self {
        RandomDeletion {
            objective: Objective::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }
}

impl UpdateStrategy for RandomDeletion {
    fn name(&self) -> &'static str {
        "random"
    }

    fn update(
        &mut self,
        buf: &mut MemoryBuffer,
        batch: Vec<Sample>,
        freq: &FrequencyTracker,
    ) -> Result<UpdateReport> {
        let (target, distance_before) = report_start(&self.objective, buf, freq);
        let leftovers = warm_up(buf, batch, &mut self.rng)?;
        let mut deleted = Vec::with_capacity(leftovers.len());
        if !leftovers.is_empty() {
            let deletions = leftovers.len();
            let (mut pool, mut counts) = pool_with(buf, leftovers);
            for _ in 0..deletions {
                let idx = self.rng.gen_range(0..pool.len());
                let s = pool.swap_remove(idx);
                counts.remove(&s.labels);
                deleted.push(s.id);
            }
            buf.restore(pool, counts);
        }
        Ok(UpdateReport {
            deleted_sample_ids: deleted,
            distance_before,
            distance_after: report_end(&self.objective, buf, target.as_ref()),
            scan_count: 0,
        })
    }
}

/// Repeatedly finds the class with the largest pooled count and deletes a
/// random pool sample carrying it.
pub struct MaxDeletion {
    objective: Objective,
    rng: ChaCha8Rng,
}

impl MaxDeletion {
    pub fn new(seed: u64) -> Self {
        MaxDeletion {
            objective: Objective::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }
}

impl UpdateStrategy for MaxDeletion {
    fn name(&self) -> &'static str {
        "max"
    }

    fn update(
        &mut self,
        buf: &mut MemoryBuffer,
        batch: Vec<Sample>,
        freq: &FrequencyTracker,
    ) -> Result<UpdateReport> {
        let (target, distance_before) = report_start(&self.objective, buf, freq);
        let leftovers = warm_up(buf, batch, &mut self.rng)?;
        let mut deleted = Vec::with_capacity(leftovers.len());
        let mut scan_count = 0;
        if !leftovers.is_empty() {
            let deletions = leftovers.len();
            let (mut pool, mut counts) = pool_with(buf, leftovers);
            let mut holders = Vec::new();
            for _ in 0..deletions {
                let max = counts.as_slice().iter().copied().max().unwrap_or(0);
                let top: Vec<usize> = (0..counts.len())
                    .filter(|&j| counts.as_slice()[j] == max)
                    .collect();
                let class = ClassId(top[self.rng.gen_range(0..top.len())] as u32);
                holders.clear();
                holders.extend((0..pool.len()).filter(|&i| pool[i].labels.contains(class)));
                scan_count += pool.len() as u64;
                let idx = holders[self.rng.gen_range(0..holders.len())];
                let s = pool.swap_remove(idx);
                counts.remove(&s.labels);
                deleted.push(s.id);
            }
            buf.restore(pool, counts);
        }
        Ok(UpdateReport {
            deleted_sample_ids: deleted,
            distance_before,
            distance_after: report_end(&self.objective, buf, target.as_ref()),
            scan_count,
        })
    }
}
