use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use linxfer::oracle::Method;
use linxfer::simulator::{self, SampleSet};
use linxfer::strategies::{linxfer_state, Target};
use linxfer::{AngleConvention, LinearParams, NormalizationMode};
use rayon::prelude::*;
use serde::Serialize;

use crate::inputs::{normalization, parse_params, usage, ConventionArg, InstanceArgs, Loaded, NormArg, ReferenceArgs};
use crate::output::{create_dir, emit, opt, write_json, write_text, Provenance};

#[derive(Debug, Args, Serialize)]
pub struct TransferArgs {
    #[command(flatten)]
    pub instances: InstanceArgs,
    /// Linear parameters: `reference`, `rough-guess` or a JSON file.
    #[arg(long, default_value = "reference")]
    pub params: String,
    #[arg(long, default_value_t = 8)]
    pub p: usize,
    /// Normalization of the second variant; `none` runs only the unnormalized one.
    #[arg(long, value_enum, default_value_t = NormArg::SqrtEdges)]
    pub normalization: NormArg,
    #[arg(long)]
    pub x: Option<f64>,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    #[arg(long, value_enum, default_value_t = ConventionArg::Gate)]
    pub convention: ConventionArg,
    /// Shots per variant; 0 reports exact expectations only.
    #[arg(long, default_value_t = 1024)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub sample_seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value = "transfer-out")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct VariantRow {
    target: String,
    instance_seed: Option<u64>,
    variant: &'static str,
    normalization: Option<NormalizationMode>,
    factor: f64,
    e_ref: f64,
    e_ref_method: Method,
    expectation: f64,
    ratio: f64,
    sample_mean: Option<f64>,
    sample_std: Option<f64>,
    sample_best: Option<f64>,
    best_ratio: Option<f64>,
}

#[derive(Serialize)]
struct TransferFile<'a> {
    #[serde(flatten)]
    provenance: Provenance<'a, TransferArgs>,
    params: LinearParams,
    rows: &'a [VariantRow],
}

pub fn run(args: &TransferArgs) -> Result<()> {
    if args.p == 0 {
        return Err(usage("--p must be positive"));
    }
    if args.workers == 0 {
        return Err(usage("--workers must be positive"));
    }
    let lp = parse_params(&args.params)?;
    let mode = normalization(args.normalization, args.x)?;
    let loaded = args.instances.load()?;
    create_dir(&args.out)?;

    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.workers).build()?;
    let per_target: Vec<Vec<VariantRow>> = pool.install(|| {
        loaded
            .par_iter()
            .map(|l| run_target(args, &lp, mode, l))
            .collect::<Result<_>>()
    })?;
    let rows: Vec<VariantRow> = per_target.into_iter().flatten().collect();

    let csv = summary_csv(&rows);
    write_text(&args.out.join("transfer.csv"), &csv)?;
    write_json(
        &args.out.join("transfer.json"),
        &TransferFile {
            provenance: Provenance::new("transfer", args),
            params: lp,
            rows: &rows,
        },
    )?;
    emit(&csv)
}

fn run_target(
    args: &TransferArgs,
    lp: &LinearParams,
    mode: Option<NormalizationMode>,
    loaded: &Loaded,
) -> Result<Vec<VariantRow>> {
    let reference = args.reference.resolve(&loaded.instance)?;
    let target = Target::with_reference(loaded.instance.clone(), reference)?
        .with_convention(AngleConvention::from(args.convention));
    let mut variants = vec![("unnormalized", None)];
    if mode.is_some() {
        variants.push(("normalized", mode));
    }
    let mut rows = Vec::new();
    for (variant, mode) in variants {
        let (state, _, factor) = linxfer_state(lp, &target, args.p, mode)?;
        let expectation = simulator::expectation(&state, target.table())?;
        let samples: Option<SampleSet> = match args.shots {
            0 => None,
            shots => Some(simulator::sample(&state, shots, args.sample_seed, target.table())?),
        };
        if let Some(s) = &samples {
            write_text(
                &args.out.join("samples").join(format!("{}__{variant}.csv", loaded.stem)),
                &s.to_csv(),
            )?;
        }
        let e_ref = reference.energy;
        rows.push(VariantRow {
            target: loaded.stem.clone(),
            instance_seed: loaded.seed,
            variant,
            normalization: mode,
            factor,
            e_ref,
            e_ref_method: reference.method,
            expectation,
            ratio: expectation / e_ref,
            sample_mean: samples.as_ref().map(|s| s.mean_energy),
            sample_std: samples.as_ref().map(SampleSet::energy_std),
            sample_best: samples.as_ref().map(|s| s.best_energy),
            best_ratio: samples.as_ref().map(|s| s.best_energy / e_ref),
        });
    }
    Ok(rows)
}

fn summary_csv(rows: &[VariantRow]) -> String {
    let mut out = String::from(
        "target,variant,factor,e_ref,e_ref_method,expectation,ratio,sample_mean,sample_std,sample_best,best_ratio\n",
    );
    for r in rows {
        let method = match r.e_ref_method {
            Method::Exhaustive => "exhaustive",
            Method::Annealing => "annealing",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{method},{},{},{},{},{},{}",
            r.target,
            r.variant,
            r.factor,
            r.e_ref,
            r.expectation,
            r.ratio,
            opt(r.sample_mean),
            opt(r.sample_std),
            opt(r.sample_best),
            opt(r.best_ratio),
        );
    }
    out
}
