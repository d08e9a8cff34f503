//! `ocdm bench`: update time per step as memory grows.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::Command;
use ocdm::experiment::{bench, linear_fit, BenchConfig, BenchPoint};
use ocdm::StrategyKind;

use crate::common::{self, positive};
use crate::params::{config_arg, opt, usage, CliResult, Params};

pub fn command() -> Command {
    Command::new("bench")
        .about("Time full-buffer updates across memory sizes")
        .arg(config_arg())
        .arg(opt("strategy", "Strategy to time", Some("ocdm")))
        .arg(opt("baseline", "Strategy to compare against, or none", Some("reservoir")))
        .arg(opt("memories", "Comma-separated memory sizes", Some("250,500,1000,2000")))
        .arg(opt("batch", "Stream batch size", Some("10")))
        .arg(opt("steps", "Timed updates per repeat", Some("100")))
        .arg(opt("repeats", "Repeats per memory size; the median is reported", Some("5")))
        .arg(opt("classes", "Classes in the benchmark stream", Some("20")))
        .arg(opt("rho", "Allocation power of the target", Some("0")))
        .args(common::distance_args())
        .arg(opt("seed", "Seed [default: $OCDM_SEED or 0]", None))
        .arg(opt("out", "Output directory", Some("out")))
}

pub fn execute(p: &Params) -> CliResult<()> {
    let strategy: StrategyKind = p.get("strategy")?;
    let baseline = match p.get::<String>("baseline")?.as_str() {
        "none" => None,
        name => Some(name.parse::<StrategyKind>().map_err(|e| usage(e.to_string()))?),
    };
    let memories: Vec<usize> = p.list("memories")?;
    if memories.contains(&0) {
        return Err(usage("--memories must all be at least 1"));
    }
    let rho: f64 = p.get("rho")?;
    let base = BenchConfig {
        strategy,
        objective: common::objective(p, rho)?,
        memories,
        batch_size: positive(p, "batch")?,
        steps: positive(p, "steps")?,
        repeats: positive(p, "repeats")?,
        classes: positive(p, "classes")?,
        seed: p.seed("seed")?,
    };
    let out: PathBuf = p.get("out")?;
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let mut results: Vec<(StrategyKind, Vec<BenchPoint>)> = Vec::new();
    for kind in std::iter::once(strategy).chain(baseline) {
        let config = BenchConfig { strategy: kind, ..base.clone() };
        results.push((kind, bench(&config)?));
    }

    let mut w = csv::Writer::from_path(out.join("bench.csv")).context("writing bench.csv")?;
    w.write_record(["strategy", "memory", "mean_update_us", "mean_scan_count"])
        .map_err(anyhow::Error::from)?;
    for (kind, points) in &results {
        for pt in points {
            w.write_record([
                kind.to_string(),
                pt.memory.to_string(),
                pt.mean_update_us.to_string(),
                pt.mean_scan_count.to_string(),
            ])
            .map_err(anyhow::Error::from)?;
        }
    }
    w.flush().map_err(anyhow::Error::from)?;

    let mut w = csv::Writer::from_path(out.join("bench_fit.csv")).context("writing bench_fit.csv")?;
    w.write_record(["strategy", "slope_us_per_slot", "intercept_us", "r_squared"])
        .map_err(anyhow::Error::from)?;
    for (kind, points) in &results {
        let xs: Vec<f64> = points.iter().map(|p| p.memory as f64).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.mean_update_us).collect();
        match linear_fit(&xs, &ys) {
            Some(fit) => {
                println!(
                    "{kind}: {:.4} us per memory slot, intercept {:.1} us, R^2 {:.4}",
                    fit.slope, fit.intercept, fit.r_squared
                );
                w.write_record([
                    kind.to_string(),
                    fit.slope.to_string(),
                    fit.intercept.to_string(),
                    fit.r_squared.to_string(),
                ])
                .map_err(anyhow::Error::from)?;
            }
            None => println!("{kind}: fewer than two memory sizes, no fit"),
        }
    }
    w.flush().map_err(anyhow::Error::from)?;

    if let [(a, pa), (b, pb)] = results.as_slice() {
        for (x, y) in pa.iter().zip(pb) {
            println!(
                "M={}: {a} {:.1} us, {b} {:.1} us, ratio {:.2}",
                x.memory,
                x.mean_update_us,
                y.mean_update_us,
                x.mean_update_us / y.mean_update_us
            );
        }
    }
    Ok(())
}
