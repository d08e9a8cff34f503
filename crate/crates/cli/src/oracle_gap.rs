//! `ocdm oracle-gap`: greedy deletion against the exhaustive optimum on
//! random small pools.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::Command;
use ocdm::oracle::{binomial, greedy_gap, GapStats, MAX_SUBSETS};
use ocdm::{ClassId, FrequencyTracker, LabelSet, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::common::{self, positive};
use crate::params::{config_arg, opt, usage, CliError, CliResult, Params};

pub fn command() -> Command {
    Command::new("oracle-gap")
        .about("Compare greedy deletion with brute-force optimal subsets")
        .arg(config_arg())
        .arg(opt("pool", "Samples per pool", Some("12")))
        .arg(opt("memory", "Samples kept from each pool", Some("8")))
        .arg(opt("classes", "Number of classes", Some("3")))
        .arg(opt("instances", "Random pools per suite", Some("100")))
        .arg(opt("trials", "Greedy runs per pool, each with its own seed", Some("10")))
        .arg(opt("colabel", "Chance of each extra label in the multi-label suite", Some("0.5")))
        .arg(opt("rho", "Allocation power of the target", Some("0")))
        .args(common::distance_args())
        .arg(opt("seed", "Seed [default: $OCDM_SEED or 0]", None))
        .arg(opt("out", "Output directory", Some("out")))
        .arg(opt("jobs", "Pools evaluated in parallel", Some("1")))
}

#[derive(Clone, Copy, PartialEq)]
enum Suite {
    Single,
    Multi,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Single => "single-label",
            Suite::Multi => "multi-label",
        }
    }
}

/// One sample with a uniform primary class; with `extra`, each other class is
/// added independently with that probability.
fn random_sample(rng: &mut ChaCha8Rng, id: u64, classes: u32, extra: Option<f64>) -> Sample {
    let primary = rng.gen_range(0..classes);
    let mut labels = vec![ClassId(primary)];
    if let Some(p) = extra {
        for c in (0..classes).filter(|&c| c != primary) {
            if rng.gen::<f64>() < p {
                labels.push(ClassId(c));
            }
        }
    }
    Sample::new(id, LabelSet::new(labels).expect("primary label"))
}

pub fn execute(p: &Params) -> CliResult<()> {
    let n = positive(p, "pool")?;
    let m = positive(p, "memory")?;
    let classes: u32 = p.get("classes")?;
    let instances = positive(p, "instances")?;
    let trials = positive(p, "trials")?;
    let colabel: f64 = p.get("colabel")?;
    let rho: f64 = p.get("rho")?;
    let objective = common::objective(p, rho)?;
    let seed = p.seed("seed")?;
    let jobs = positive(p, "jobs")?;
    let out: PathBuf = p.get("out")?;
    if classes == 0 {
        return Err(usage("--classes must be at least 1"));
    }
    if !(0.0..=1.0).contains(&colabel) {
        return Err(usage(format!("--colabel must lie in [0, 1], got {colabel}")));
    }
    if m > n {
        return Err(usage(format!("--memory {m} exceeds --pool {n}")));
    }
    let subsets = binomial(n as u64, m as u64);
    if subsets > MAX_SUBSETS {
        return Err(usage(format!(
            "instance too large: C({n}, {m}) = {subsets} subsets exceeds the limit of {MAX_SUBSETS}"
        )));
    }

    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let pool = common::thread_pool(jobs)?;
    let suites = [(Suite::Single, None), (Suite::Multi, Some(colabel))];
    let mut rows = Vec::new();
    for (index, &(suite, extra)) in suites.iter().enumerate() {
        let stats: Vec<ocdm::Result<GapStats>> = pool.install(|| {
            (0..instances)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(((index as u64) << 32) | i as u64);
                    let samples: Vec<Sample> = (0..n)
                        .map(|j| random_sample(&mut rng, j as u64, classes, extra))
                        .collect();
                    let mut freq = FrequencyTracker::new();
                    freq.observe_all(&samples);
                    let target = objective.target(&freq)?;
                    greedy_gap(&samples, m, &target, objective.distance, trials, seed)
                })
                .collect()
        });
        for (i, s) in stats.into_iter().enumerate() {
            rows.push((suite, i, s?));
        }
    }

    let mut w = csv::Writer::from_path(out.join("oracle_gap.csv")).context("writing oracle_gap.csv")?;
    w.write_record([
        "suite",
        "instance",
        "best_distance",
        "mean_gap",
        "max_gap",
        "match_rate",
        "count_match_rate",
    ])
    .map_err(anyhow::Error::from)?;
    for (suite, i, s) in &rows {
        w.write_record([
            suite.name().to_string(),
            i.to_string(),
            s.best_distance.to_string(),
            s.mean_gap.to_string(),
            s.max_gap.to_string(),
            s.match_rate.to_string(),
            s.count_match_rate.to_string(),
        ])
        .map_err(anyhow::Error::from)?;
    }
    w.flush().map_err(anyhow::Error::from)?;

    let mut w = csv::Writer::from_path(out.join("oracle_gap_summary.csv"))
        .context("writing oracle_gap_summary.csv")?;
    w.write_record(["suite", "instances", "mean_gap", "max_gap", "match_rate", "count_match_rate"])
        .map_err(anyhow::Error::from)?;
    let mut single_rate = 1.0;
    for (suite, _) in suites {
        let of: Vec<&GapStats> = rows.iter().filter(|r| r.0 == suite).map(|r| &r.2).collect();
        let k = of.len() as f64;
        let mean_gap = of.iter().map(|s| s.mean_gap).sum::<f64>() / k;
        let max_gap = of.iter().map(|s| s.max_gap).fold(0.0, f64::max);
        let match_rate = of.iter().map(|s| s.match_rate).sum::<f64>() / k;
        let count_rate = of.iter().map(|s| s.count_match_rate).sum::<f64>() / k;
        w.write_record([
            suite.name().to_string(),
            of.len().to_string(),
            mean_gap.to_string(),
            max_gap.to_string(),
            match_rate.to_string(),
            count_rate.to_string(),
        ])
        .map_err(anyhow::Error::from)?;
        println!(
            "{}: {} pools, mean gap {mean_gap:.3e}, max gap {max_gap:.3e}, match rate {match_rate:.4}",
            suite.name(),
            of.len()
        );
        if suite == Suite::Single {
            single_rate = count_rate;
        }
    }
    w.flush().map_err(anyhow::Error::from)?;

    if single_rate < 1.0 {
        return Err(CliError::Runtime(anyhow::anyhow!(
            "single-label greedy matched the optimum in only {:.2}% of trials",
            single_rate * 100.0
        )));
    }
    println!("single-label optimality: PASS");
    Ok(())
}
