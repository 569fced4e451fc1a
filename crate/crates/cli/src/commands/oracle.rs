use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use linxfer::oracle::GroundTruth;
use serde::Serialize;

use crate::inputs::{InstanceArgs, ReferenceArg, ReferenceArgs};
use crate::output::{emit, write_json, Provenance};

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub instances: InstanceArgs,
    #[arg(long, value_enum, default_value_t = ReferenceArg::Auto)]
    pub method: ReferenceArg,
    #[arg(long, default_value_t = linxfer::oracle::AnnealingSchedule::default().sweeps)]
    pub sweeps: usize,
    #[arg(long, default_value_t = linxfer::oracle::AnnealingSchedule::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub sa_seed: u64,
    /// Oracle JSON destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct OracleOutput<'a> {
    #[serde(flatten)]
    truth: GroundTruth,
    instance: &'a str,
    n_qubits: usize,
    #[serde(flatten)]
    provenance: Provenance<'a, OracleArgs>,
}

pub fn run(args: &OracleArgs) -> Result<()> {
    let loaded = args.instances.load_one()?;
    let reference = ReferenceArgs {
        reference: args.method,
        e_ref: None,
        sweeps: args.sweeps,
        restarts: args.restarts,
        sa_seed: args.sa_seed,
    };
    let truth = reference.ground_truth(&loaded.instance)?;
    let out = OracleOutput {
        truth,
        instance: loaded.instance.label(),
        n_qubits: loaded.instance.n_qubits(),
        provenance: Provenance::new("oracle", args),
    };
    match &args.out {
        Some(path) => write_json(path, &out),
        None => emit(&(serde_json::to_string_pretty(&out)? + "\n")),
    }
}
