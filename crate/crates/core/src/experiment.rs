//! Drives a strategy over a stream and measures update cost.

use std::time::Instant;

use crate::buffer::MemoryBuffer;
use crate::counts::FrequencyTracker;
use crate::error::{Error, Result};
use crate::metrics::RunTrace;
use crate::sample::{ClassId, Sample};
use crate::strategy::{Objective, StrategyKind, UpdateStrategy};
use crate::stream::{generate_stream, CoLabel, LabelStats, StreamSpec, TaskSpec};

/// One stream batch, tagged with its task when the source knows it.
#[derive(Debug, Clone)]
pub struct Batch {
    pub task: Option<usize>,
    pub samples: Vec<Sample>,
}

/// Batches of a synthetic stream with their task positions.
pub fn synthetic_batches(spec: &StreamSpec) -> Result<impl Iterator<Item = Result<Batch>>> {
    let mut gen = generate_stream(spec)?;
    Ok(std::iter::from_fn(move || {
        // the task index must be read before the batch is pulled
        let task = gen.current_task();
        gen.next().map(|samples| Ok(Batch { task, samples }))
    }))
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub capacity: usize,
    pub objective: Objective,
    pub snapshot_period: usize,
}

impl RunConfig {
    pub fn new(capacity: usize, objective: Objective) -> Self {
        RunConfig {
            capacity,
            objective,
            snapshot_period: 0,
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub trace: RunTrace,
    pub buffer: MemoryBuffer,
    pub freq: FrequencyTracker,
    /// Label statistics of the whole stream.
    pub stream_stats: LabelStats,
}

/// Feeds every batch to `strategy`, updating stream frequencies first and
/// recording one trace step per batch.
pub fn run_stream<I>(
    strategy: &mut dyn UpdateStrategy,
    batches: I,
    config: &RunConfig,
) -> Result<RunOutcome>
where
    I: IntoIterator<Item = Result<Batch>>,
{
    let mut buffer = MemoryBuffer::new(config.capacity)?;
    let mut freq = FrequencyTracker::new();
    let mut stream_stats = LabelStats::new();
    let mut trace = RunTrace::new(config.objective, config.snapshot_period);
    for batch in batches {
        let Batch { task, samples } = batch?;
        if samples.is_empty() {
            continue;
        }
        freq.observe_all(&samples);
        for s in &samples {
            stream_stats.observe(s);
        }
        let start = Instant::now();
        let report = strategy.update(&mut buffer, samples, &freq)?;
        let elapsed = start.elapsed();
        trace.set_task(task);
        trace.record_step(&buffer, &freq, elapsed, report.scan_count)?;
    }
    Ok(RunOutcome {
        trace,
        buffer,
        freq,
        stream_stats,
    })
}

/// Convenience wrapper: build `kind` and run it over a synthetic stream.
pub fn run_synthetic(
    kind: StrategyKind,
    spec: &StreamSpec,
    config: &RunConfig,
    strategy_seed: u64,
) -> Result<RunOutcome> {
    let mut strategy = kind.build(config.objective, strategy_seed);
    run_stream(strategy.as_mut(), synthetic_batches(spec)?, config)
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub strategy: StrategyKind,
    pub objective: Objective,
    pub memories: Vec<usize>,
    pub batch_size: usize,
    /// Timed full-buffer updates per repeat.
    pub steps: usize,
    /// Each memory size is measured this many times; the median is kept.
    pub repeats: usize,
    pub classes: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            strategy: StrategyKind::Ocdm,
            objective: Objective::default(),
            memories: vec![250, 500, 1000, 2000],
            batch_size: 10,
            steps: 100,
            repeats: 5,
            classes: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPoint {
    pub memory: usize,
    pub mean_update_us: f64,
    /// Candidate evaluations per timed update.
    pub mean_scan_count: f64,
}

/// Single-task long-tailed stream with at least `needed` samples.
fn bench_stream(classes: usize, batch_size: usize, needed: u64, seed: u64) -> StreamSpec {
    let ids: Vec<ClassId> = (0..classes as u32).map(ClassId).collect();
    let mut head = 64;
    loop {
        let task = TaskSpec::power_law(ids.clone(), head, 0.8, CoLabel::Scalar(0.3));
        if task.n_samples >= needed {
            return StreamSpec::new(vec![task], batch_size, seed);
        }
        head *= 2;
    }
}

/// Mean per-update wall time with a full buffer, for each memory size.
pub fn bench(config: &BenchConfig) -> Result<Vec<BenchPoint>> {
    if config.steps == 0 || config.repeats == 0 || config.batch_size == 0 {
        return Err(Error::InvalidSpec(
            "steps, repeats and batch size must be positive".into(),
        ));
    }
    let mut points = Vec::with_capacity(config.memories.len());
    for &memory in &config.memories {
        let needed = (memory + config.steps * config.batch_size) as u64;
        let spec = bench_stream(config.classes, config.batch_size, needed, config.seed);
        let mut times = Vec::with_capacity(config.repeats);
        let mut scans = 0.0;
        for rep in 0..config.repeats {
            let mut strategy = config
                .strategy
                .build(config.objective, config.seed.wrapping_add(rep as u64));
            let mut buf = MemoryBuffer::new(memory)?;
            let mut freq = FrequencyTracker::new();
            let mut batches = generate_stream(&spec)?;
            while !buf.is_full() {
                let b = batches.next().expect("bench stream long enough");
                freq.observe_all(&b);
                strategy.update(&mut buf, b, &freq)?;
            }
            let mut total = std::time::Duration::ZERO;
            let mut scan_total = 0u64;
            for _ in 0..config.steps {
                let b = batches.next().expect("bench stream long enough");
                freq.observe_all(&b);
                let start = Instant::now();
                let report = strategy.update(&mut buf, b, &freq)?;
                total += start.elapsed();
                scan_total += report.scan_count;
            }
            times.push(total.as_secs_f64() * 1e6 / config.steps as f64);
            scans = scan_total as f64 / config.steps as f64;
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.push(BenchPoint {
            memory,
            mean_update_us: times[times.len() / 2],
            mean_scan_count: scans,
        });
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ys` on `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}
