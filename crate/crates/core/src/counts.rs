use crate::sample::{ClassId, LabelSet, Labeled};

/// Per-class tally of stored samples. A multi-label sample contributes to
/// every one of its classes. The vector grows lazily as new class ids show
/// up; classes beyond the current length count as zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassCounts {
    counts: Vec<u64>,
}

impl ClassCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_len(len: usize) -> Self {
        ClassCounts {
            counts: vec![0; len],
        }
    }

    pub fn from_vec(counts: Vec<u64>) -> Self {
        ClassCounts { counts }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, class: ClassId) -> u64 {
        self.counts.get(class.index()).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Zero-extends to at least `len` classes.
    pub fn ensure_len(&mut self, len: usize) {
        if self.counts.len() < len {
            self.counts.resize(len, 0);
        }
    }

    pub fn add(&mut self, labels: &LabelSet) {
        self.ensure_len(labels.max_class().index() + 1);
        for c in labels.iter() {
            self.counts[c.index()] += 1;
        }
    }

    /// Panics if any class of `labels` is already at zero, which would mean
    /// the counts are out of sync with the samples they describe.
    pub fn remove(&mut self, labels: &LabelSet) {
        for c in labels.iter() {
            let slot = &mut self.counts[c.index()];
            assert!(*slot > 0, "class {c} count underflow");
            *slot -= 1;
        }
    }

    /// Elementwise comparison that ignores trailing zeros.
    pub fn same_as(&self, other: &ClassCounts) -> bool {
        let n = self.len().max(other.len());
        (0..n as u32).all(|j| self.get(ClassId(j)) == other.get(ClassId(j)))
    }
}

/// Recounts per-class membership from scratch.
pub fn rebuild_counts<I>(samples: I) -> ClassCounts
where
    I: IntoIterator,
    I::Item: Labeled,
{
    let mut counts = ClassCounts::new();
    for s in samples {
        counts.add(s.labels());
    }
    counts
}

/// Running number of stream samples containing each class. Never
/// decremented.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTracker {
    freq: Vec<u64>,
}

impl FrequencyTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vec(freq: Vec<u64>) -> Self {
        FrequencyTracker { freq }
    }

    pub fn observe(&mut self, labels: &LabelSet) {
        let need = labels.max_class().index() + 1;
        if self.freq.len() < need {
            self.freq.resize(need, 0);
        }
        for c in labels.iter() {
            self.freq[c.index()] += 1;
        }
    }

    pub fn observe_all<'a, I, T>(&mut self, samples: I)
    where
        I: IntoIterator<Item = &'a T>,
        T: Labeled + 'a,
    {
        for s in samples {
            self.observe(s.labels());
        }
    }

    pub fn len(&self) -> usize {
        self.freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq.is_empty()
    }

    pub fn get(&self, class: ClassId) -> u64 {
        self.freq.get(class.index()).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.freq
    }

    /// Classes observed at least once, in id order.
    pub fn seen_classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.freq
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, _)| ClassId(i as u32))
    }
}
