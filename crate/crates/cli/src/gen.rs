//! `ocdm gen`: write a synthetic stream to a label file.

use std::path::PathBuf;

use clap::Command;
use ocdm::stream::{generate_stream, write_stream_file, LabelStats};
use ocdm::Sample;

use crate::common;
use crate::params::{config_arg, opt, CliResult, Params};

pub fn command() -> Command {
    Command::new("gen")
        .about("Write a synthetic stream as `id<TAB>labels` lines")
        .arg(config_arg())
        .arg(opt("output", "Stream file to write", None))
        .args(common::synthetic_args())
        .arg(opt("seed", "Seed [default: $OCDM_SEED or 0]", None))
}

pub fn execute(p: &Params) -> CliResult<()> {
    let output: PathBuf = p.get("output")?;
    let seed = p.seed("seed")?;
    // batching does not change the generated samples
    let spec = common::synthetic_spec(p, 1, seed)?;
    let samples: Vec<Sample> = generate_stream(&spec)?.flatten().collect();
    write_stream_file(&output, &samples)?;
    let stats = LabelStats::from_samples(&samples);
    println!(
        "wrote {} samples to {} (AMLR {:.3})",
        samples.len(),
        output.display(),
        stats.amlr()?
    );
    Ok(())
}
