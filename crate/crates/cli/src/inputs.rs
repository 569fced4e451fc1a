use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use linxfer::oracle::{self, AnnealingSchedule, GroundTruth, Method};
use linxfer::problems::{gen_maxcut, gen_random_ising, gen_sk};
use linxfer::strategies::Reference;
use linxfer::{AngleConvention, IsingInstance, LinearParams, NormalizationMode, Schedule};
use serde::Serialize;
use serde_json::Value;

/// Bad flag combinations detected after parsing; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    RandomIsing,
    Maxcut,
    Sk,
}

impl Kind {
    fn tag(self) -> &'static str {
        match self {
            Kind::RandomIsing => "random-ising",
            Kind::Maxcut => "maxcut",
            Kind::Sk => "sk",
        }
    }
}

/// Generator settings shared by `generate` and the `--kind` instance source.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GeneratorArgs {
    /// Number of qubits.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Edge density for random-ising and maxcut.
    #[arg(long, default_value_t = 0.6)]
    pub d: f64,
    /// SK couplings are drawn from N(0, variance_scale / n).
    #[arg(long, default_value_t = 1.0)]
    pub variance_scale: f64,
}

pub fn generate(kind: Kind, g: &GeneratorArgs, seed: u64) -> Result<IsingInstance> {
    Ok(match kind {
        Kind::RandomIsing => gen_random_ising(g.n, g.d, seed)?,
        Kind::Maxcut => gen_maxcut(g.n, g.d, seed)?,
        Kind::Sk => gen_sk(g.n, g.variance_scale / g.n as f64, seed)?,
    })
}

/// Instances come either from files or from a generator with consecutive
/// seeds `seed, seed+1, …`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct InstanceArgs {
    /// Instance JSON file; repeat for several.
    #[arg(long = "instance", num_args = 1..)]
    pub instances: Vec<PathBuf>,
    /// Generate instances of this kind instead of reading files.
    #[arg(long, value_enum, conflicts_with = "instances")]
    pub kind: Option<Kind>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Number of generated instances.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Seed of the first generated instance.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// An instance plus a file-name-safe stem and its generator seed, if any.
pub struct Loaded {
    pub stem: String,
    pub seed: Option<u64>,
    pub instance: IsingInstance,
}

impl InstanceArgs {
    pub fn load(&self) -> Result<Vec<Loaded>> {
        if !self.instances.is_empty() {
            return self
                .instances
                .iter()
                .map(|p| {
                    Ok(Loaded {
                        stem: stem_of(p),
                        seed: None,
                        instance: read_instance(p)?,
                    })
                })
                .collect();
        }
        let Some(kind) = self.kind else {
            return Err(usage("give --instance files or a generator --kind"));
        };
        if self.count == 0 {
            return Err(usage("--count must be positive"));
        }
        (0..self.count as u64)
            .map(|k| {
                let seed = self.seed + k;
                Ok(Loaded {
                    stem: format!("{}-n{}-s{seed}", kind.tag(), self.generator.n),
                    seed: Some(seed),
                    instance: generate(kind, &self.generator, seed)?,
                })
            })
            .collect()
    }

    pub fn load_one(&self) -> Result<Loaded> {
        let mut all = self.load()?;
        if all.len() != 1 {
            return Err(usage("this command takes exactly one instance"));
        }
        Ok(all.remove(0))
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into())
}

pub fn read_instance(path: &Path) -> Result<IsingInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    IsingInstance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `reference`, `rough-guess`, or a LinearParams JSON file.
pub fn parse_params(spec: &str) -> Result<LinearParams> {
    match spec {
        "reference" => Ok(LinearParams::REFERENCE),
        "rough-guess" => Ok(LinearParams::ROUGH_GUESS),
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let lp: LinearParams = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
            Ok(LinearParams::new(
                lp.gamma_slope,
                lp.gamma_intcp,
                lp.beta_slope,
                lp.beta_intcp,
            )?)
        }
    }
}

/// A schedule read from a schedule JSON, a StrategyReport JSON, or a
/// `compare` report file wrapping one. The angle convention is returned
/// when the file states it.
pub fn read_schedule(path: &Path) -> Result<(Schedule, Option<AngleConvention>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(report) = value.get_mut("report") {
        value = report.take();
    }
    let convention = match value.get("convention") {
        Some(c) => {
            Some(serde_json::from_value(c.clone()).with_context(|| format!("convention in {}", path.display()))?)
        }
        None => None,
    };
    let schedule = match value.get_mut("schedule") {
        Some(s) => s.take(),
        None => value,
    };
    let schedule = serde_json::from_value(schedule)
        .with_context(|| format!("{} holds no schedule with gammas and betas", path.display()))?;
    Ok((schedule, convention))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionArg {
    Gate,
    Hamiltonian,
}

impl From<ConventionArg> for AngleConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Gate => AngleConvention::Gate,
            ConventionArg::Hamiltonian => AngleConvention::Hamiltonian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormArg {
    None,
    SqrtEdges,
    FixedX,
}

/// How the reference energy is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceArg {
    /// Exhaustive search up to 24 qubits, annealing above.
    Auto,
    Exact,
    Annealing,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReferenceArgs {
    #[arg(long, value_enum, default_value_t = ReferenceArg::Auto)]
    pub reference: ReferenceArg,
    /// Use this reference energy instead of computing one.
    #[arg(long, allow_hyphen_values = true)]
    pub e_ref: Option<f64>,
    #[arg(long, default_value_t = AnnealingSchedule::default().sweeps)]
    pub sweeps: usize,
    #[arg(long, default_value_t = AnnealingSchedule::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub sa_seed: u64,
}

impl ReferenceArgs {
    pub fn resolve(&self, instance: &IsingInstance) -> Result<Reference> {
        if let Some(e) = self.e_ref {
            if !(e < 0.0 && e.is_finite()) {
                return Err(usage("--e-ref must be a negative number"));
            }
            return Ok(Reference {
                energy: e,
                method: Method::Annealing,
            });
        }
        let truth = self.ground_truth(instance)?;
        Ok(Reference {
            energy: truth.energy,
            method: truth.method,
        })
    }

    pub fn ground_truth(&self, instance: &IsingInstance) -> Result<GroundTruth> {
        let exact = match self.reference {
            ReferenceArg::Exact => true,
            ReferenceArg::Annealing => false,
            ReferenceArg::Auto => instance.n_qubits() <= oracle::DEFAULT_ENUMERATION_CAP,
        };
        Ok(if exact {
            oracle::brute_force_min(instance)?
        } else {
            oracle::simulated_annealing(instance, self.sweeps, self.restarts, self.sa_seed)?
        })
    }
}

pub fn normalization(arg: NormArg, x: Option<f64>) -> Result<Option<NormalizationMode>> {
    match (arg, x) {
        (NormArg::None, _) => Ok(None),
        (NormArg::SqrtEdges, _) => Ok(Some(NormalizationMode::SqrtEdges)),
        (NormArg::FixedX, Some(x)) => Ok(Some(NormalizationMode::FixedX { x })),
        (NormArg::FixedX, None) => Err(usage("--normalization fixed-x needs --x")),
    }
}

pub fn parse_pair(values: &[f64], flag: &str) -> Result<(f64, f64)> {
    match values {
        &[a, b] => Ok((a, b)),
        _ => Err(usage(format!("{flag} takes two comma-separated numbers"))),
    }
}
