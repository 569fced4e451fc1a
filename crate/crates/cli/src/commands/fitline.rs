use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use linxfer::schedules::fit_linear;
use linxfer::{AngleConvention, LinearFit};
use serde::Serialize;

use crate::inputs::{read_schedule, usage};
use crate::output::{emit, write_json, Provenance};

#[derive(Debug, Args, Serialize)]
pub struct FitlineArgs {
    /// Schedule JSON or StrategyReport JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// LinearFit JSON destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct FitOutput<'a> {
    p: usize,
    convention: Option<AngleConvention>,
    gamma: LinearFit,
    beta: LinearFit,
    #[serde(flatten)]
    provenance: Provenance<'a, FitlineArgs>,
}

pub fn run(args: &FitlineArgs) -> Result<()> {
    let (schedule, convention) = read_schedule(&args.input)?;
    let p = schedule.p();
    if p < 2 {
        return Err(usage(format!("a line fit needs p >= 2, the schedule has p = {p}")));
    }
    let out = FitOutput {
        p,
        convention,
        gamma: fit_linear(schedule.gammas(), p)?,
        beta: fit_linear(schedule.betas(), p)?,
        provenance: Provenance::new("fitline", args),
    };
    match &args.out {
        Some(path) => write_json(path, &out),
        None => emit(&(serde_json::to_string_pretty(&out)? + "\n")),
    }
}
