//! Option groups shared by several subcommands.

use clap::Arg;
use ocdm::stream::{reorder_tasks, StreamSpec};
use ocdm::{AllocationPower, Distance, DistanceKind, KlDirection, Objective};

use crate::params::{opt, usage, CliError, CliResult, Params};

pub fn synthetic_args() -> Vec<Arg> {
    vec![
        opt("tasks", "Number of tasks in the synthetic stream", Some("4")),
        opt("classes-per-task", "Classes assigned to each task", Some("5")),
        opt("head", "Samples of the largest class in each task", Some("2000")),
        opt("exponent", "Power-law exponent of class sizes within a task", Some("2.0")),
        opt("colabel", "Co-labeling probability scale in [0, 1]", Some("0.8")),
        opt("permutation", "Task order as comma-separated task indices", None),
    ]
}

pub fn distance_args() -> Vec<Arg> {
    vec![
        opt("distance", "Distance to the target: kl or tv", Some("kl")),
        opt("kl-direction", "memory-first or target-first", Some("memory-first")),
    ]
}

pub fn synthetic_spec(p: &Params, batch_size: usize, seed: u64) -> CliResult<StreamSpec> {
    let colabel: f64 = p.get("colabel")?;
    if !(0.0..=1.0).contains(&colabel) {
        return Err(usage(format!("--colabel must lie in [0, 1], got {colabel}")));
    }
    let exponent: f64 = p.get("exponent")?;
    if !exponent.is_finite() || exponent < 0.0 {
        return Err(usage(format!("--exponent must be non-negative, got {exponent}")));
    }
    let spec = StreamSpec::synthetic(
        p.get("tasks")?,
        p.get("classes-per-task")?,
        p.get("head")?,
        exponent,
        colabel,
        batch_size,
        seed,
    );
    spec.validate().map_err(|e| usage(e.to_string()))?;
    match p.opt::<String>("permutation")? {
        None => Ok(spec),
        Some(_) => {
            let perm: Vec<usize> = p.list("permutation")?;
            reorder_tasks(&spec, &perm).map_err(|e| usage(e.to_string()))
        }
    }
}

pub fn distance(p: &Params) -> CliResult<Distance> {
    let kind: DistanceKind = p.get("distance")?;
    let direction: KlDirection = p.get("kl-direction")?;
    Ok(Distance::new(kind).with_direction(direction))
}

pub fn allocation_power(rho: f64) -> CliResult<AllocationPower> {
    AllocationPower::new(rho).map_err(|e| usage(e.to_string()))
}

pub fn objective(p: &Params, rho: f64) -> CliResult<Objective> {
    Ok(Objective::new(allocation_power(rho)?, distance(p)?))
}

pub fn positive(p: &Params, key: &str) -> CliResult<usize> {
    match p.get::<usize>(key)? {
        0 => Err(usage(format!("--{key} must be at least 1"))),
        n => Ok(n),
    }
}

pub fn thread_pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Runtime(e.into()))
}
