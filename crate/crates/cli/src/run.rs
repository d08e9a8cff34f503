//! `ocdm run`: strategy-vs-stream experiments over seeds and rho values.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Command;
use ocdm::experiment::{run_stream, synthetic_batches, Batch, RunConfig, RunOutcome};
use ocdm::metrics::{summarize, write_histogram, Summary};
use ocdm::stream::{read_stream_file, tier_classes, StreamSpec, Tier, TierThresholds};
use ocdm::StrategyKind;
use rayon::prelude::*;

use crate::common::{self, positive};
use crate::params::{config_arg, flag, opt, usage, CliResult, Params};

pub fn command() -> Command {
    Command::new("run")
        .about("Run a strategy over a stream and write traces, histograms and a summary")
        .arg(config_arg())
        .arg(opt("strategy", "ocdm, reservoir, onlyone, random or max", Some("ocdm")))
        .arg(opt("rho", "Allocation power, or a comma-separated sweep", Some("0")))
        .args(common::distance_args())
        .arg(opt("memory", "Memory capacity", Some("1000")))
        .arg(opt("batch", "Stream batch size", Some("10")))
        .arg(opt("seeds", "Comma-separated seeds [default: $OCDM_SEED or 0]", None))
        .arg(opt("stream-file", "Read the stream from a label file instead of generating it", None))
        .args(common::synthetic_args())
        .arg(opt("majority-min", "Classes seen more often than this are majority", Some("600")))
        .arg(opt("minority-max", "Classes seen less often than this are minority", Some("100")))
        .arg(opt("out", "Output directory", Some("out")))
        .arg(opt("jobs", "Runs executed in parallel", Some("1")))
        .arg(flag("omit-timing", "Write zero for all timings so outputs are reproducible"))
}

enum Source {
    File(PathBuf),
    Synthetic(Vec<StreamSpec>),
}

struct Job {
    rho: f64,
    seed: u64,
    /// Index into the synthetic specs, parallel to the seed list.
    spec: usize,
}

struct Row {
    rho: f64,
    seed: u64,
    summary: Summary,
}

pub fn execute(p: &Params) -> CliResult<()> {
    let strategy: StrategyKind = p.get("strategy")?;
    let rhos: Vec<f64> = p.list("rho")?;
    for &rho in &rhos {
        common::allocation_power(rho)?;
    }
    common::distance(p)?;
    let memory = positive(p, "memory")?;
    let batch = positive(p, "batch")?;
    let seeds = p.seeds("seeds")?;
    let jobs = positive(p, "jobs")?;
    let omit_timing = p.flag("omit-timing")?;
    let thresholds = TierThresholds::new(p.get("majority-min")?, p.get("minority-max")?)
        .map_err(|e| usage(e.to_string()))?;
    let out: PathBuf = p.get("out")?;

    let source = match p.opt::<PathBuf>("stream-file")? {
        Some(path) => Source::File(path),
        None => Source::Synthetic(
            seeds
                .iter()
                .map(|&s| common::synthetic_spec(p, batch, s))
                .collect::<CliResult<_>>()?,
        ),
    };

    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let jobs_list: Vec<Job> = rhos
        .iter()
        .flat_map(|&rho| {
            seeds
                .iter()
                .enumerate()
                .map(move |(spec, &seed)| Job { rho, seed, spec })
        })
        .collect();

    let pool = common::thread_pool(jobs)?;
    let rows: Vec<anyhow::Result<Row>> = pool.install(|| {
        jobs_list
            .par_iter()
            .map(|job| {
                let objective = common::objective(p, job.rho).expect("validated above");
                let config = RunConfig::new(memory, objective);
                let mut strat = strategy.build(objective, job.seed);
                let outcome = match &source {
                    Source::File(path) => {
                        let batches = read_stream_file(path, batch)?
                            .map(|b| b.map(|samples| Batch { task: None, samples }));
                        run_stream(strat.as_mut(), batches, &config)
                            .with_context(|| format!("reading {}", path.display()))?
                    }
                    Source::Synthetic(specs) => {
                        run_stream(strat.as_mut(), synthetic_batches(&specs[job.spec])?, &config)?
                    }
                };
                write_run(&out, strategy, job, outcome, thresholds, omit_timing)
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<anyhow::Result<Vec<Row>>>()?;
    write_summary(&out.join("summary.csv"), strategy, &rows)?;
    println!("wrote {} runs to {}", rows.len(), out.display());
    Ok(())
}

fn file_stem(strategy: StrategyKind, rho: f64, seed: u64) -> String {
    format!("{strategy}_rho{rho}_seed{seed}")
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_run(
    out: &Path,
    strategy: StrategyKind,
    job: &Job,
    mut outcome: RunOutcome,
    thresholds: TierThresholds,
    omit_timing: bool,
) -> anyhow::Result<Row> {
    if outcome.trace.is_empty() {
        anyhow::bail!("stream produced no samples");
    }
    if omit_timing {
        outcome.trace.clear_timing();
    }
    let stem = file_stem(strategy, job.rho, job.seed);
    let tiers = tier_classes(&outcome.freq, thresholds);
    outcome.trace.write_csv(create(&out.join(format!("trace_{stem}.csv")))?)?;
    write_histogram(
        create(&out.join(format!("hist_{stem}.csv")))?,
        outcome.trace.final_counts(),
        &tiers,
    )?;
    Ok(Row {
        rho: job.rho,
        seed: job.seed,
        summary: summarize(&outcome.trace, &tiers)?,
    })
}

fn write_summary(path: &Path, strategy: StrategyKind, rows: &[Row]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record([
        "strategy",
        "rho",
        "seed",
        "steps",
        "final_distance",
        "mean_update_us",
        "majority",
        "moderate",
        "minority",
        "max_class_count",
        "min_class_count",
        "max_min_ratio",
    ])?;
    for r in rows {
        let s = &r.summary;
        w.write_record([
            strategy.to_string(),
            r.rho.to_string(),
            r.seed.to_string(),
            s.steps.to_string(),
            s.final_distance.to_string(),
            s.mean_update_us.to_string(),
            s.tier_counts[&Tier::Majority].to_string(),
            s.tier_counts[&Tier::Moderate].to_string(),
            s.tier_counts[&Tier::Minority].to_string(),
            s.max_class_count.to_string(),
            s.min_class_count.to_string(),
            s.imbalance_ratio().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
