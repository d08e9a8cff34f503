use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    greedy_prune, pool_with, report_end, report_start, warm_up, Objective, UpdateReport,
    UpdateStrategy,
};
use crate::buffer::MemoryBuffer;
use crate::counts::FrequencyTracker;
use crate::error::Result;
use crate::sample::Sample;

/// Greedy class-distribution control.
///
/// While the buffer has room, a random subset of the batch fills it. Any
/// remaining batch samples are pooled with the whole memory, and the pool is
/// shrunk back to capacity by repeatedly deleting the sample whose removal
/// brings the pool's class distribution closest to the target.
pub struct Ocdm {
    objective: Objective,
    rng: ChaCha8Rng,
}

impl Ocdm {
    pub fn new(objective: Objective, seed: u64) -> Self {
        Ocdm {
            objective,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }
}

impl UpdateStrategy for Ocdm {
    fn name(&self) -> &'static str {
        "ocdm"
    }

    fn update(
        &mut self,
        buf: &mut MemoryBuffer,
        batch: Vec<Sample>,
        freq: &FrequencyTracker,
    ) -> Result<UpdateReport> {
        let (target, distance_before) = report_start(&self.objective, buf, freq);
        let leftovers = warm_up(buf, batch, &mut self.rng)?;
        let mut report = UpdateReport {
            distance_before,
            ..UpdateReport::default()
        };
        if !leftovers.is_empty() {
            // freq already includes this batch, so a target exists
            let target = match &target {
                Some(t) => t.clone(),
                None => self.objective.target(freq)?,
            };
            let deletions = leftovers.len();
            let (mut pool, mut counts) = pool_with(buf, leftovers);
            let out = greedy_prune(
                &mut pool,
                &mut counts,
                deletions,
                &target,
                self.objective.distance,
                &mut self.rng,
            );
            buf.restore(pool, counts);
            report.deleted_sample_ids = out.deleted.iter().map(|s| s.id).collect();
            report.scan_count = out.scan_count;
        }
        report.distance_after = report_end(&self.objective, buf, target.as_ref());
        Ok(report)
    }
}

/// OCDM restricted to single-label arrivals; multi-label batch samples are
/// dropped before they reach the buffer.
pub struct OnlyOne {
    inner: Ocdm,
}

impl OnlyOne {
    pub fn new(objective: Objective, seed: u64) -> Self {
        OnlyOne {
            inner: Ocdm::new(objective, seed),
        }
    }
}

impl UpdateStrategy for OnlyOne {
    fn name(&self) -> &'static str {
        "onlyone"
    }

    fn update(
        &mut self,
        buf: &mut MemoryBuffer,
        batch: Vec<Sample>,
        freq: &FrequencyTracker,
    ) -> Result<UpdateReport> {
        let (single, multi): (Vec<Sample>, Vec<Sample>) = batch
            .into_iter()
            .partition(|s| !s.labels.is_multi_label());
        let mut report = self.inner.update(buf, single, freq)?;
        report.deleted_sample_ids.extend(multi.iter().map(|s| s.id));
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::rebuild_counts;
    use crate::distribution::{AllocationPower, ClassDistribution, Distance};
    use crate::sample::{ClassId, LabelSet};

    fn s(id: u64, labels: &[u32]) -> Sample {
        Sample::new(id, LabelSet::new(labels.iter().copied()).unwrap())
    }

    fn single_label_pool(sizes: &[usize]) -> Vec<Sample> {
        let mut id = 0;
        let mut out = Vec::new();
        for (c, &n) in sizes.iter().enumerate() {
            for _ in 0..n {
                out.push(s(id, &[c as u32]));
                id += 1;
            }
        }
        out
    }

    fn observe(freq: &mut FrequencyTracker, batch: &[Sample]) {
        freq.observe_all(batch);
    }

    #[test]
    fn worked_example_removes_only_from_largest_class() {
        // memory of 1000 with counts [300,500,200], then a batch of 100
        // class-2 samples makes the pool [300,500,300]
        let pool = single_label_pool(&[300, 500, 300]);
        let (mem, batch): (Vec<_>, Vec<_>) = pool.into_iter().partition(|x| x.id < 1000);
        let mut buf = MemoryBuffer::new(1000).unwrap();
        let mut freq = FrequencyTracker::new();
        observe(&mut freq, &mem);
        for x in mem {
            buf.insert(x).unwrap();
        }
        observe(&mut freq, &batch);
        let mut ocdm = Ocdm::new(Objective::default(), 7);
        let report = ocdm.update(&mut buf, batch, &freq).unwrap();
        assert_eq!(buf.counts().as_slice(), &[300, 400, 300]);
        assert_eq!(report.deleted_sample_ids.len(), 100);
        let by_id = single_label_pool(&[300, 500, 300]);
        for id in &report.deleted_sample_ids {
            assert_eq!(by_id[*id as usize].labels.as_slice(), &[ClassId(1)]);
        }
        assert_eq!(report.scan_count, (0..100).map(|i| 1100 - i).sum::<u64>());
        assert!(report.distance_after.unwrap() < report.distance_before.unwrap());
        assert!(buf.counts_consistent());
    }

    #[test]
    fn empty_batch_is_identity() {
        let mut buf = MemoryBuffer::new(3).unwrap();
        let mut freq = FrequencyTracker::new();
        let init = vec![s(0, &[0]), s(1, &[1]), s(2, &[0, 1])];
        observe(&mut freq, &init);
        for x in init {
            buf.insert(x).unwrap();
        }
        let before: Vec<u64> = buf.samples().iter().map(|x| x.id).collect();
        let report = Ocdm::new(Objective::default(), 0)
            .update(&mut buf, Vec::new(), &freq)
            .unwrap();
        let after: Vec<u64> = buf.samples().iter().map(|x| x.id).collect();
        assert_eq!(before, after);
        assert_eq!(report.distance_before, report.distance_after);
        assert!(report.deleted_sample_ids.is_empty());
    }

    #[test]
    fn hand_checked_pool_deletes_a_or_d() {
        // memory {a:{0}, b:{1}, c:{0,1}} + batch {d:{0}}, uniform target
        for seed in 0..20 {
            let mut buf = MemoryBuffer::new(3).unwrap();
            for x in [s(0, &[0]), s(1, &[1]), s(2, &[0, 1])] {
                buf.insert(x).unwrap();
            }
            let freq = FrequencyTracker::from_vec(vec![3, 2]);
            let report = Ocdm::new(Objective::default(), seed)
                .update(&mut buf, vec![s(3, &[0])], &freq)
                .unwrap();
            assert_eq!(report.deleted_sample_ids.len(), 1);
            assert!(matches!(report.deleted_sample_ids[0], 0 | 3));
            assert_eq!(buf.counts().as_slice(), &[2, 2]);
            assert!(report.distance_after.unwrap() < 1e-12);
        }
    }

    #[test]
    fn warm_up_overflow_fills_then_prunes() {
        let mut buf = MemoryBuffer::new(4).unwrap();
        let mut freq = FrequencyTracker::new();
        let first = vec![s(0, &[0]), s(1, &[0])];
        observe(&mut freq, &first);
        let mut ocdm = Ocdm::new(Objective::default(), 11);
        ocdm.update(&mut buf, first, &freq).unwrap();
        assert_eq!(buf.len(), 2);
        let batch: Vec<Sample> = (2..7).map(|i| s(i, &[(i % 2) as u32])).collect();
        observe(&mut freq, &batch);
        let report = ocdm.update(&mut buf, batch, &freq).unwrap();
        assert!(buf.is_full());
        assert_eq!(report.deleted_sample_ids.len(), 3);
        assert_eq!(report.scan_count, 7 + 6 + 5);
        assert_eq!(buf.counts().as_slice(), &[2, 2]);
    }

    #[test]
    fn orphaned_class_keeps_target_mass() {
        let freq = FrequencyTracker::from_vec(vec![10, 10, 1]);
        let target = Objective::default().target(&freq).unwrap();
        let counts = rebuild_counts([s(0, &[0]), s(1, &[1])]);
        let d = Objective::default().distance_of(&counts, &target).unwrap();
        assert!(d.is_finite() && d > 0.0);
    }

    #[test]
    fn onlyone_ignores_multi_label_batches() {
        let mut buf = MemoryBuffer::new(2).unwrap();
        let mut freq = FrequencyTracker::new();
        let init = vec![s(0, &[0]), s(1, &[1])];
        observe(&mut freq, &init);
        for x in init {
            buf.insert(x).unwrap();
        }
        let batch = vec![s(2, &[0, 1]), s(3, &[1, 2])];
        observe(&mut freq, &batch);
        let report = OnlyOne::new(Objective::default(), 0)
            .update(&mut buf, batch, &freq)
            .unwrap();
        let ids: Vec<u64> = buf.samples().iter().map(|x| x.id).collect();
        assert_eq!(ids, [0, 1]);
        assert_eq!(report.deleted_sample_ids, [2, 3]);
        assert_eq!(report.scan_count, 0);
    }

    #[test]
    fn onlyone_matches_ocdm_on_single_label_batches() {
        let objective = Objective::new(AllocationPower::new(0.3).unwrap(), Distance::default());
        let mut a_buf = MemoryBuffer::new(5).unwrap();
        let mut b_buf = MemoryBuffer::new(5).unwrap();
        let mut ocdm = Ocdm::new(objective, 42);
        let mut only = OnlyOne::new(objective, 42);
        let mut freq = FrequencyTracker::new();
        for t in 0..10u64 {
            let batch: Vec<Sample> = (0..3).map(|i| s(t * 3 + i, &[((t + i) % 4) as u32])).collect();
            observe(&mut freq, &batch);
            let ra = ocdm.update(&mut a_buf, batch.clone(), &freq).unwrap();
            let rb = only.update(&mut b_buf, batch, &freq).unwrap();
            assert_eq!(ra, rb);
        }
        let ids = |b: &MemoryBuffer| b.samples().iter().map(|x| x.id).collect::<Vec<_>>();
        assert_eq!(ids(&a_buf), ids(&b_buf));
    }

    #[test]
    fn onlyone_mixed_batch_uses_single_label_only() {
        let mut buf = MemoryBuffer::new(4).unwrap();
        let freq = FrequencyTracker::from_vec(vec![2, 1]);
        OnlyOne::new(Objective::default(), 0)
            .update(&mut buf, vec![s(0, &[0]), s(1, &[0, 1])], &freq)
            .unwrap();
        assert_eq!(buf.len(), 1);
        assert_eq!(buf.samples()[0].id, 0);
    }

    #[test]
    fn uniform_target_helper_matches() {
        let freq = FrequencyTracker::from_vec(vec![7, 1, 3]);
        assert_eq!(
            Objective::default().target(&freq).unwrap(),
            ClassDistribution::uniform(3)
        );
    }
}
