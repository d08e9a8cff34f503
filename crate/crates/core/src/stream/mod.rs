//! Synthetic multi-task, imbalanced, multi-label streams.
//!
//! Tasks own disjoint class sets and are emitted one after another. Within
//! a task each sample draws a primary class so that primary-class counts
//! follow the task's size profile exactly, then independently picks up
//! every other task class `k` with probability `colabel(primary, k) *
//! size_k / size_max`.

mod file;
mod stats;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sample::{ClassId, LabelSet, Sample};

pub use file::{read_stream_file, write_stream, write_stream_file, StreamReader};
pub use stats::{amlr, mlr, tier_classes, LabelStats, Tier, TierThresholds};

/// Co-labeling probabilities within a task.
#[derive(Debug, Clone, PartialEq)]
pub enum CoLabel {
    /// Same base probability for every ordered pair of classes.
    Scalar(f64),
    /// `matrix[i][k]`: base probability that a sample whose primary class is
    /// the task's `i`-th class also carries its `k`-th class.
    Matrix(Vec<Vec<f64>>),
}

impl CoLabel {
    fn base(&self, primary: usize, other: usize) -> f64 {
        match self {
            CoLabel::Scalar(p) => *p,
            CoLabel::Matrix(m) => m[primary][other],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub classes: Vec<ClassId>,
    /// Imbalance profile: relative primary-class sizes.
    pub class_sizes: Vec<u64>,
    pub colabel: CoLabel,
    pub n_samples: u64,
}

impl TaskSpec {
    /// Task whose sample count equals the sum of `class_sizes`.
    pub fn new(classes: Vec<ClassId>, class_sizes: Vec<u64>, colabel: CoLabel) -> Self {
        let n_samples = class_sizes.iter().sum();
        TaskSpec {
            classes,
            class_sizes,
            colabel,
            n_samples,
        }
    }

    /// Long-tailed task: the `r`-th class (0-based) has
    /// `round(head * (r + 1)^-exponent)` samples, at least one.
    pub fn power_law(classes: Vec<ClassId>, head: u64, exponent: f64, colabel: CoLabel) -> Self {
        let sizes = (0..classes.len())
            .map(|r| ((head as f64) * ((r + 1) as f64).powf(-exponent)).round().max(1.0) as u64)
            .collect();
        TaskSpec::new(classes, sizes, colabel)
    }

    fn validate(&self, index: usize) -> Result<()> {
        let err = |m: String| Err(Error::InvalidSpec(format!("task {index}: {m}")));
        let k = self.classes.len();
        if k == 0 {
            return err("no classes".into());
        }
        if self.class_sizes.len() != k {
            return err(format!("{} classes but {} sizes", k, self.class_sizes.len()));
        }
        if self.class_sizes.contains(&0) {
            return err("class sizes must be positive".into());
        }
        if self.n_samples == 0 {
            return err("n_samples must be positive".into());
        }
        let unique: HashSet<_> = self.classes.iter().collect();
        if unique.len() != k {
            return err("duplicate class".into());
        }
        let in_range = |p: f64| (0.0..=1.0).contains(&p);
        match &self.colabel {
            CoLabel::Scalar(p) if !in_range(*p) => return err(format!("colabel {p} outside [0, 1]")),
            CoLabel::Matrix(m) => {
                if m.len() != k || m.iter().any(|row| row.len() != k) {
                    return err(format!("colabel matrix must be {k}x{k}"));
                }
                if m.iter().flatten().any(|&p| !in_range(p)) {
                    return err("colabel entries must lie in [0, 1]".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Splits `n_samples` across classes proportionally to `class_sizes`
    /// (largest remainder, ties to the lower index).
    fn primary_counts(&self) -> Vec<u64> {
        let total: u64 = self.class_sizes.iter().sum();
        let exact: Vec<f64> = self
            .class_sizes
            .iter()
            .map(|&s| s as f64 * self.n_samples as f64 / total as f64)
            .collect();
        let mut counts: Vec<u64> = exact.iter().map(|x| x.floor() as u64).collect();
        let mut short = self.n_samples - counts.iter().sum::<u64>();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
        });
        for &i in order.iter().cycle() {
            if short == 0 {
                break;
            }
            counts[i] += 1;
            short -= 1;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamSpec {
    pub tasks: Vec<TaskSpec>,
    pub batch_size: usize,
    pub seed: u64,
    pub shuffle_within_task: bool,
}

impl StreamSpec {
    pub fn new(tasks: Vec<TaskSpec>, batch_size: usize, seed: u64) -> Self {
        StreamSpec {
            tasks,
            batch_size,
            seed,
            shuffle_within_task: true,
        }
    }

    /// `tasks` power-law tasks of `classes_per_task` consecutive class ids
    /// each.
    pub fn synthetic(
        tasks: usize,
        classes_per_task: usize,
        head: u64,
        exponent: f64,
        colabel: f64,
        batch_size: usize,
        seed: u64,
    ) -> Self {
        let tasks = (0..tasks)
            .map(|t| {
                let classes = (0..classes_per_task)
                    .map(|c| ClassId((t * classes_per_task + c) as u32))
                    .collect();
                TaskSpec::power_law(classes, head, exponent, CoLabel::Scalar(colabel))
            })
            .collect();
        StreamSpec::new(tasks, batch_size, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::InvalidSpec("no tasks".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidSpec("batch size must be positive".into()));
        }
        let mut seen = HashSet::new();
        for (i, task) in self.tasks.iter().enumerate() {
            task.validate(i)?;
            for c in &task.classes {
                if !seen.insert(*c) {
                    return Err(Error::InvalidSpec(format!(
                        "class {c} appears in more than one task"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn total_samples(&self) -> u64 {
        self.tasks.iter().map(|t| t.n_samples).sum()
    }

    /// Sorted class ids across all tasks.
    pub fn classes(&self) -> Vec<ClassId> {
        let mut all: Vec<ClassId> = self.tasks.iter().flat_map(|t| t.classes.clone()).collect();
        all.sort_unstable();
        all
    }
}

/// Same tasks in a new order: position `i` of the result holds the task at
/// `permutation[i]`.
pub fn reorder_tasks(spec: &StreamSpec, permutation: &[usize]) -> Result<StreamSpec> {
    let n = spec.tasks.len();
    if permutation.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "expected {n} entries, got {}",
            permutation.len()
        )));
    }
    let mut hit = vec![false; n];
    for &p in permutation {
        if p >= n || std::mem::replace(&mut hit[p], true) {
            return Err(Error::InvalidPermutation(format!(
                "{permutation:?} is not a permutation of 0..{n}"
            )));
        }
    }
    Ok(StreamSpec {
        tasks: permutation.iter().map(|&p| spec.tasks[p].clone()).collect(),
        ..spec.clone()
    })
}

/// Iterator over the batches of a synthetic stream.
pub struct StreamGenerator {
    spec: StreamSpec,
    task: usize,
    pending: std::vec::IntoIter<Sample>,
    next_id: u64,
}

/// Validates `spec` and returns its batch iterator. Identical specs yield
/// identical streams.
pub fn generate_stream(spec: &StreamSpec) -> Result<StreamGenerator> {
    spec.validate()?;
    Ok(StreamGenerator {
        spec: spec.clone(),
        task: 0,
        pending: Vec::new().into_iter(),
        next_id: 0,
    })
}

impl StreamGenerator {
    pub fn spec(&self) -> &StreamSpec {
        &self.spec
    }

    /// Index (in stream order) of the task the next batch comes from, or
    /// `None` once the stream is exhausted.
    pub fn current_task(&self) -> Option<usize> {
        if self.pending.len() > 0 {
            Some(self.task - 1)
        } else if self.task < self.spec.tasks.len() {
            Some(self.task)
        } else {
            None
        }
    }

    fn materialize(&mut self, index: usize) -> Vec<Sample> {
        let task = &self.spec.tasks[index];
        // one generator per task position keeps tasks independent of each
        // other's sample counts
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        rng.set_stream(index as u64);

        let mut primaries: Vec<usize> = task
            .primary_counts()
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize))
            .collect();
        if self.spec.shuffle_within_task {
            primaries.shuffle(&mut rng);
        }

        let max_size = *task.class_sizes.iter().max().unwrap() as f64;
        let mut out = Vec::with_capacity(primaries.len());
        let mut labels = Vec::new();
        for primary in primaries {
            labels.clear();
            labels.push(task.classes[primary]);
            for (k, &class) in task.classes.iter().enumerate() {
                if k == primary {
                    continue;
                }
                let p = task.colabel.base(primary, k) * task.class_sizes[k] as f64 / max_size;
                if p > 0.0 && rng.gen::<f64>() < p {
                    labels.push(class);
                }
            }
            let set = LabelSet::new(labels.iter().copied()).expect("primary label present");
            out.push(Sample::new(self.next_id, set));
            self.next_id += 1;
        }
        out
    }
}

impl Iterator for StreamGenerator {
    type Item = Vec<Sample>;

    fn next(&mut self) -> Option<Vec<Sample>> {
        while self.pending.len() == 0 {
            if self.task >= self.spec.tasks.len() {
                return None;
            }
            let samples = self.materialize(self.task);
            self.pending = samples.into_iter();
            self.task += 1;
        }
        let batch: Vec<Sample> = self.pending.by_ref().take(self.spec.batch_size).collect();
        Some(batch)
    }
}
