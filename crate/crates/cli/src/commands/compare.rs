use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use linxfer::strategies::{
    linxfer_apply, run_fourier, run_interp, run_standard, Reference, StrategyName, StrategyReport, Target,
    DEFAULT_BUDGET, DEFAULT_FOURIER_TERMS,
};
use linxfer::{AngleConvention, LinearParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::inputs::{parse_params, usage, ConventionArg, InstanceArgs, Loaded, ReferenceArgs};
use crate::output::{create_dir, emit, spread, write_json, write_text, write_with, Provenance};

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub instances: InstanceArgs,
    /// Circuit depths.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8])]
    pub p: Vec<usize>,
    /// Strategies: standard, interp, fourier, linxfer.
    #[arg(long, value_delimiter = ',', default_values_t = StrategyName::ALL)]
    pub strategies: Vec<StrategyName>,
    /// Objective evaluations per local optimization.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    #[arg(long, default_value_t = DEFAULT_FOURIER_TERMS)]
    pub fourier_terms: usize,
    /// Linear parameters transferred by linxfer: `reference`, `rough-guess` or a JSON file.
    #[arg(long, default_value = "reference")]
    pub params: String,
    #[arg(long, value_enum, default_value_t = ConventionArg::Gate)]
    pub convention: ConventionArg,
    #[command(flatten)]
    pub reference: ReferenceArgs,
    /// Instances processed in parallel.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value = "compare-out")]
    pub out: PathBuf,
}

/// One report file: the report plus what is needed to regenerate it.
#[derive(Serialize)]
struct ReportFile<'a> {
    #[serde(flatten)]
    provenance: Provenance<'a, CompareArgs>,
    instance_file: &'a str,
    instance_seed: Option<u64>,
    reference: Reference,
    report: &'a StrategyReport,
}

#[derive(Serialize)]
struct InstanceRecord {
    stem: String,
    label: String,
    instance_seed: Option<u64>,
    reference: Reference,
}

#[derive(Serialize)]
struct ConfigFile<'a> {
    #[serde(flatten)]
    provenance: Provenance<'a, CompareArgs>,
    instances: Vec<InstanceRecord>,
}

struct InstanceResult {
    record: InstanceRecord,
    reports: Vec<StrategyReport>,
}

pub fn run(args: &CompareArgs) -> Result<()> {
    if args.strategies.is_empty() {
        return Err(usage("--strategies must name at least one strategy"));
    }
    if args.p.is_empty() || args.p.contains(&0) {
        return Err(usage("--p must list positive depths"));
    }
    if has_duplicates(&args.p) || has_duplicates(&args.strategies) {
        return Err(usage("--p and --strategies must not repeat entries"));
    }
    if args.workers == 0 {
        return Err(usage("--workers must be positive"));
    }
    let lp = parse_params(&args.params)?;
    let loaded = args.instances.load()?;
    create_dir(&args.out)?;

    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.workers).build()?;
    let results: Vec<InstanceResult> = pool.install(|| {
        loaded
            .par_iter()
            .map(|l| run_instance(args, &lp, l))
            .collect::<Result<_>>()
    })?;

    let rows = aggregate(args, &results);
    write_text(&args.out.join("compare.csv"), &compare_csv(&rows))?;
    let table = pivot_csv(args, &rows);
    write_text(&args.out.join("table.csv"), &table)?;
    write_json(
        &args.out.join("config.json"),
        &ConfigFile {
            provenance: Provenance::new("compare", args),
            instances: results.into_iter().map(|r| r.record).collect(),
        },
    )?;
    emit(&table)
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items.iter().enumerate().any(|(i, a)| items[..i].contains(a))
}

fn run_instance(args: &CompareArgs, lp: &LinearParams, loaded: &Loaded) -> Result<InstanceResult> {
    let reference = args.reference.resolve(&loaded.instance)?;
    let target = Target::with_reference(loaded.instance.clone(), reference)?
        .with_convention(AngleConvention::from(args.convention));
    let mut reports = Vec::new();
    for &name in &args.strategies {
        for &p in &args.p {
            let report = match name {
                StrategyName::Standard => run_standard(&target, p, args.budget),
                StrategyName::Interp => run_interp(&target, p, args.budget),
                StrategyName::Fourier => run_fourier(&target, p, args.fourier_terms, args.budget),
                StrategyName::Linxfer => linxfer_apply(lp, &target, p, None),
            }
            .with_context(|| format!("{name} at p = {p} on {}", loaded.stem))?;
            let name = format!("{}__{}__p{p}", loaded.stem, report.name);
            write_json(
                &args.out.join("reports").join(format!("{name}.json")),
                &ReportFile {
                    provenance: Provenance::new("compare", args),
                    instance_file: &loaded.stem,
                    instance_seed: loaded.seed,
                    reference,
                    report: &report,
                },
            )?;
            if !report.traces.is_empty() {
                write_with(&args.out.join("traces").join(format!("{name}.jsonl")), |w| {
                    report.traces.iter().try_for_each(|t| t.write_jsonl(&mut *w))
                })?;
            }
            reports.push(report);
        }
    }
    Ok(InstanceResult {
        record: InstanceRecord {
            stem: loaded.stem.clone(),
            label: loaded.instance.label().to_string(),
            instance_seed: loaded.seed,
            reference,
        },
        reports,
    })
}

struct Row {
    method: StrategyName,
    p: usize,
    ratios: Vec<f64>,
    expectations: Vec<f64>,
    evals: Vec<usize>,
    seconds: Vec<f64>,
}

fn aggregate(args: &CompareArgs, results: &[InstanceResult]) -> Vec<Row> {
    let mut rows: BTreeMap<(usize, usize), Row> = BTreeMap::new();
    for report in results.iter().flat_map(|r| &r.reports) {
        let key = (
            args.strategies
                .iter()
                .position(|&s| s == report.name)
                .unwrap_or(usize::MAX),
            report.p,
        );
        let row = rows.entry(key).or_insert_with(|| Row {
            method: report.name,
            p: report.p,
            ratios: Vec::new(),
            expectations: Vec::new(),
            evals: Vec::new(),
            seconds: Vec::new(),
        });
        row.ratios.push(report.ratio.unwrap_or(f64::NAN));
        row.expectations.push(report.expectation);
        row.evals.push(report.eval_count);
        row.seconds.push(report.wall_seconds);
    }
    rows.into_values().collect()
}

fn compare_csv(rows: &[Row]) -> String {
    let mut out = String::from(
        "method,p,n_instances,mean_ratio,std_ratio,stderr_ratio,mean_expectation,mean_eval_count,total_eval_count,mean_wall_seconds\n",
    );
    for r in rows {
        let (mean, std, stderr) = spread(&r.ratios);
        let n = r.ratios.len();
        let total: usize = r.evals.iter().sum();
        let _ = writeln!(
            out,
            "{},{},{n},{mean},{std},{stderr},{},{},{total},{}",
            r.method,
            r.p,
            spread(&r.expectations).0,
            total as f64 / n as f64,
            spread(&r.seconds).0,
        );
    }
    out
}

/// Methods as rows, depths as columns, mean ratios as cells.
fn pivot_csv(args: &CompareArgs, rows: &[Row]) -> String {
    let mut out = String::from("method");
    for p in &args.p {
        let _ = write!(out, ",p={p}");
    }
    out.push('\n');
    for &name in &args.strategies {
        out.push_str(name.as_str());
        for &p in &args.p {
            let cell = rows.iter().find(|r| r.method == name && r.p == p);
            let _ = write!(
                out,
                ",{}",
                cell.map_or(String::new(), |r| format!("{:.4}", spread(&r.ratios).0))
            );
        }
        out.push('\n');
    }
    out
}
