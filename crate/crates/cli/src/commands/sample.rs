use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use linxfer::problems::{normalization_factor, scale_instance};
use linxfer::schedules::linear_schedule;
use linxfer::simulator::{self, evolve};
use linxfer::{AngleConvention, CostTable, Schedule};
use serde::Serialize;

use crate::inputs::{
    normalization, parse_params, read_schedule, usage, ConventionArg, InstanceArgs, NormArg, ReferenceArgs,
};
use crate::output::{emit, write_json, write_text, Provenance};

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub instances: InstanceArgs,
    /// Schedule JSON or StrategyReport JSON.
    #[arg(long, conflicts_with = "params")]
    pub schedule: Option<PathBuf>,
    /// Linear parameters: `reference`, `rough-guess` or a JSON file.
    #[arg(long)]
    pub params: Option<String>,
    /// Depth used with --params.
    #[arg(long)]
    pub p: Option<usize>,
    /// Defaults to the schedule file's convention, else gate.
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    #[arg(long, value_enum, default_value_t = NormArg::None)]
    pub normalization: NormArg,
    #[arg(long)]
    pub x: Option<f64>,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    #[arg(long, default_value_t = 1024)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub sample_seed: u64,
    /// SampleSet CSV; a JSON summary is written next to it.
    #[arg(long, default_value = "samples.csv")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct SampleSummary<'a> {
    instance: &'a str,
    convention: AngleConvention,
    schedule: &'a Schedule,
    normalization_factor: f64,
    e_ref: Option<f64>,
    expectation: f64,
    shots: u64,
    sample_mean: f64,
    sample_std: f64,
    sample_best: f64,
    #[serde(flatten)]
    provenance: Provenance<'a, SampleArgs>,
}

pub fn run(args: &SampleArgs) -> Result<()> {
    if args.shots == 0 {
        return Err(usage("--shots must be positive"));
    }
    let loaded = args.instances.load_one()?;
    let (schedule, file_convention) = match (&args.schedule, &args.params) {
        (Some(path), None) => read_schedule(path)?,
        (None, Some(spec)) => {
            let p = args.p.ok_or_else(|| usage("--params needs --p"))?;
            (linear_schedule(&parse_params(spec)?, p)?, None)
        }
        _ => return Err(usage("give exactly one of --schedule or --params")),
    };
    let convention = match (args.convention.map(AngleConvention::from), file_convention) {
        (Some(a), Some(b)) if a != b => {
            return Err(usage("--convention contradicts the schedule file"));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => AngleConvention::Gate,
    };
    let table = CostTable::build(&loaded.instance)?;
    let (factor, e_ref) = match normalization(args.normalization, args.x)? {
        None => (1.0, None),
        Some(mode) => {
            let e_ref = args.reference.resolve(&loaded.instance)?.energy;
            (normalization_factor(&loaded.instance, mode, e_ref)?, Some(e_ref))
        }
    };
    let hamiltonian = convention.to_hamiltonian(&schedule);
    let state = if factor == 1.0 {
        evolve(&table, &hamiltonian)
    } else {
        evolve(
            &CostTable::build(&scale_instance(&loaded.instance, 1.0 / factor)?)?,
            &hamiltonian,
        )
    };
    let expectation = simulator::expectation(&state, &table)?;
    let samples = simulator::sample(&state, args.shots, args.sample_seed, &table)?;
    write_text(&args.out, &samples.to_csv())?;
    let summary = SampleSummary {
        instance: loaded.instance.label(),
        convention,
        schedule: &schedule,
        normalization_factor: factor,
        e_ref,
        expectation,
        shots: samples.shots,
        sample_mean: samples.mean_energy,
        sample_std: samples.energy_std(),
        sample_best: samples.best_energy,
        provenance: Provenance::new("sample", args),
    };
    write_json(&args.out.with_extension("json"), &summary)?;
    emit(&format!(
        "{}\tmean {:.6}\tbest {:.6}\texact {:.6}\n",
        loaded.instance.label(),
        samples.mean_energy,
        samples.best_energy,
        expectation
    ))
}
