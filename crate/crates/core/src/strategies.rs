//! End-to-end parameter-setting strategies.
//!
//! Each driver takes a [`Target`] (an instance, its cost table and an
//! optional reference energy) and returns a [`StrategyReport`] with the final
//! schedule, its exact expectation, the approximation ratio and the number of
//! objective evaluations spent finding it.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::optimize::{global_minimize, local_minimize_with, LocalOptions, ObjectiveTrace};
use crate::oracle::{self, Method};
use crate::problems::{normalization_factor, scale_instance, IsingInstance, NormalizationMode};
use crate::schedules::{
    fourier_to_schedule, interp_extend, linear_schedule, AngleConvention, FourierCoeffs, LinearParams, Schedule,
};
use crate::simulator::{evolve, qaoa_expectation, CostTable, StateVector};

pub const DEFAULT_BUDGET: usize = 1000;
pub const DEFAULT_FOURIER_TERMS: usize = 2;
pub const DEFAULT_TRIALS: usize = 1024;
pub const INITIAL_ANGLE: f64 = 0.1;
/// Local search starts with steps on the scale of the initial angles;
/// unit-radian first steps overshoot the landscape's features at these
/// instance sizes and strand the search on flat regions.
pub const LOCAL_OPTIONS: LocalOptions = LocalOptions {
    rho_begin: 0.1,
    rho_end: 1e-6,
};
/// Search box for each of the four linear parameters.
pub const DEFAULT_BOUNDS: [(f64, f64); 4] = [(-2.0, 2.0); 4];
/// Seed used when a target's reference energy has to come from annealing.
pub const REFERENCE_SEED: u64 = 0;
/// Strategies optimize gate angles unless told otherwise, so starting
/// points, step sizes and reference parameter sets share one unit.
pub const DEFAULT_CONVENTION: AngleConvention = AngleConvention::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    Standard,
    Interp,
    Fourier,
    Linxfer,
}

impl StrategyName {
    pub const ALL: [StrategyName; 4] = [
        StrategyName::Standard,
        StrategyName::Interp,
        StrategyName::Fourier,
        StrategyName::Linxfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::Standard => "standard",
            StrategyName::Interp => "interp",
            StrategyName::Fourier => "fourier",
            StrategyName::Linxfer => "linxfer",
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown strategy '{s}'")))
    }
}

/// Ground-state energy used as the denominator of approximation ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub energy: f64,
    pub method: Method,
}

/// An instance prepared for simulation, together with the angle
/// convention that schedules handed to it are expressed in.
#[derive(Debug, Clone)]
pub struct Target {
    instance: IsingInstance,
    table: CostTable,
    reference: Option<Reference>,
    convention: AngleConvention,
}

impl Target {
    /// Exact reference energy up to the enumeration cap, annealing beyond.
    pub fn new(instance: IsingInstance) -> Result<Self> {
        let truth = if instance.n_qubits() <= oracle::DEFAULT_ENUMERATION_CAP {
            oracle::brute_force_min(&instance)?
        } else {
            oracle::simulated_annealing_with(&instance, &Default::default(), REFERENCE_SEED)?
        };
        let reference = Reference {
            energy: truth.energy,
            method: truth.method,
        };
        Self::with_reference(instance, reference)
    }

    pub fn with_reference(instance: IsingInstance, reference: Reference) -> Result<Self> {
        if !reference.energy.is_finite() {
            return Err(invalid("reference energy must be finite"));
        }
        let table = CostTable::build(&instance)?;
        Ok(Target {
            instance,
            table,
            reference: Some(reference),
            convention: DEFAULT_CONVENTION,
        })
    }

    /// No reference energy: ratios are omitted and normalization is refused.
    pub fn unreferenced(instance: IsingInstance) -> Result<Self> {
        let table = CostTable::build(&instance)?;
        Ok(Target {
            instance,
            table,
            reference: None,
            convention: DEFAULT_CONVENTION,
        })
    }

    pub fn with_convention(mut self, convention: AngleConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn convention(&self) -> AngleConvention {
        self.convention
    }

    pub fn instance(&self) -> &IsingInstance {
        &self.instance
    }

    pub fn table(&self) -> &CostTable {
        &self.table
    }

    pub fn reference(&self) -> Option<Reference> {
        self.reference
    }

    pub fn expectation(&self, schedule: &Schedule) -> f64 {
        qaoa_expectation(&self.table, &self.convention.to_hamiltonian(schedule))
    }

    /// Final state for `schedule` given in this target's convention.
    pub fn evolve(&self, schedule: &Schedule) -> StateVector {
        evolve(&self.table, &self.convention.to_hamiltonian(schedule))
    }

    fn ratio(&self, expectation: f64) -> Option<f64> {
        self.reference.map(|r| expectation / r.energy)
    }

    fn flat_objective(&self) -> impl Fn(&[f64]) -> f64 + '_ {
        move |x| match Schedule::from_flat(x) {
            Ok(s) => self.expectation(&s),
            Err(_) => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyReport {
    pub name: StrategyName,
    pub instance: String,
    pub p: usize,
    /// Units of `schedule`, `fourier` and `linear`.
    pub convention: AngleConvention,
    pub schedule: Schedule,
    pub expectation: f64,
    /// `expectation / e_ref`; absent when the target has no reference.
    pub ratio: Option<f64>,
    pub e_ref: Option<f64>,
    /// Objective evaluations spent optimizing, summed over levels.
    pub eval_count: usize,
    /// Dimension of the last optimization problem solved.
    pub tunable_params: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourier: Option<FourierCoeffs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization_factor: Option<f64>,
    pub wall_seconds: f64,
    /// One trace per optimization call, in order.
    #[serde(skip)]
    pub traces: Vec<ObjectiveTrace>,
}

impl StrategyReport {
    fn new(name: StrategyName, target: &Target, schedule: Schedule, expectation: f64) -> Self {
        StrategyReport {
            name,
            instance: target.instance.label().to_string(),
            p: schedule.p(),
            convention: target.convention,
            ratio: target.ratio(expectation),
            e_ref: target.reference.map(|r| r.energy),
            schedule,
            expectation,
            eval_count: 0,
            tunable_params: 0,
            fourier: None,
            linear: None,
            normalization: None,
            normalization_factor: None,
            wall_seconds: 0.0,
            traces: Vec::new(),
        }
    }

    fn with_traces(mut self, traces: Vec<ObjectiveTrace>) -> Self {
        self.eval_count = traces.iter().map(|t| t.eval_count).sum();
        self.tunable_params = traces.last().map_or(0, |t| t.best_params.len());
        self.traces = traces;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn check_p(p: usize) -> Result<()> {
    if p == 0 {
        return Err(invalid("p must be at least 1"));
    }
    Ok(())
}

fn best_of(trace: &ObjectiveTrace) -> Result<&[f64]> {
    if trace.best_params.is_empty() {
        return Err(invalid("optimizer produced no finite evaluation"));
    }
    Ok(&trace.best_params)
}

/// Optimizes all `2p` angles from the uniform start `γ = β = 0.1`.
pub fn run_standard(target: &Target, p: usize, budget: usize) -> Result<StrategyReport> {
    check_p(p)?;
    let clock = Instant::now();
    let trace = local_minimize_with(
        target.flat_objective(),
        &vec![INITIAL_ANGLE; 2 * p],
        budget,
        &LOCAL_OPTIONS,
    )?;
    let schedule = Schedule::from_flat(best_of(&trace)?)?;
    let value = target.expectation(&schedule);
    let mut report = StrategyReport::new(StrategyName::Standard, target, schedule, value).with_traces(vec![trace]);
    report.wall_seconds = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Layer-by-layer optimization, interpolating the optimum at depth `i`
/// into the starting point at depth `i + 1`.
///
/// The interpolation also runs after the last level and the result is
/// truncated to `p` layers, so the returned schedule is the interpolated
/// one rather than the raw depth-`p` optimum.
pub fn run_interp(target: &Target, p: usize, budget_per_level: usize) -> Result<StrategyReport> {
    check_p(p)?;
    let clock = Instant::now();
    let mut gammas = vec![INITIAL_ANGLE];
    let mut betas = vec![INITIAL_ANGLE];
    let mut traces = Vec::with_capacity(p);
    for _ in 1..=p {
        let x0: Vec<f64> = gammas.iter().chain(&betas).copied().collect();
        let trace = local_minimize_with(target.flat_objective(), &x0, budget_per_level, &LOCAL_OPTIONS)?;
        let best = best_of(&trace)?;
        let (g, b) = best.split_at(gammas.len());
        gammas = interp_extend(g)?;
        betas = interp_extend(b)?;
        traces.push(trace);
    }
    gammas.truncate(p);
    betas.truncate(p);
    let schedule = Schedule::new(gammas, betas)?;
    let value = target.expectation(&schedule);
    let mut report = StrategyReport::new(StrategyName::Interp, target, schedule, value).with_traces(traces);
    report.wall_seconds = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Grows `k` sine/cosine coefficients one at a time, each level starting
/// from the previous optimum with a zero appended.
pub fn run_fourier(target: &Target, p: usize, k: usize, budget_per_level: usize) -> Result<StrategyReport> {
    check_p(p)?;
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let clock = Instant::now();
    let mut u: Vec<f64> = Vec::with_capacity(k);
    let mut v: Vec<f64> = Vec::with_capacity(k);
    let mut traces = Vec::with_capacity(k);
    for _ in 1..=k {
        u.push(0.0);
        v.push(0.0);
        let m = u.len();
        let x0: Vec<f64> = u.iter().chain(&v).copied().collect();
        let objective = |x: &[f64]| {
            let fc = FourierCoeffs {
                u: x[..m].to_vec(),
                v: x[m..].to_vec(),
            };
            match fourier_to_schedule(&fc, p) {
                Ok(s) => target.expectation(&s),
                Err(_) => f64::NAN,
            }
        };
        let trace = local_minimize_with(objective, &x0, budget_per_level, &LOCAL_OPTIONS)?;
        let best = best_of(&trace)?;
        u = best[..m].to_vec();
        v = best[m..].to_vec();
        traces.push(trace);
    }
    let coeffs = FourierCoeffs::new(u, v)?;
    let schedule = fourier_to_schedule(&coeffs, p)?;
    let value = target.expectation(&schedule);
    let mut report = StrategyReport::new(StrategyName::Fourier, target, schedule, value).with_traces(traces);
    report.fourier = Some(coeffs);
    report.wall_seconds = clock.elapsed().as_secs_f64();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Training {
    pub params: LinearParams,
    pub value: f64,
    pub trace: ObjectiveTrace,
}

/// Fits the four linear parameters on `target` inside [`DEFAULT_BOUNDS`].
pub fn linxfer_train(target: &Target, p: usize, trials: usize, seed: u64) -> Result<Training> {
    linxfer_train_in(target, p, trials, seed, &DEFAULT_BOUNDS)
}

pub fn linxfer_train_in(
    target: &Target,
    p: usize,
    trials: usize,
    seed: u64,
    bounds: &[(f64, f64); 4],
) -> Result<Training> {
    check_p(p)?;
    let objective = |x: &[f64]| match LinearParams::from_slice(x).and_then(|lp| linear_schedule(&lp, p)) {
        Ok(s) => target.expectation(&s),
        Err(_) => f64::NAN,
    };
    let trace = global_minimize(objective, bounds, trials, seed)?;
    let params = LinearParams::from_slice(best_of(&trace)?)?;
    Ok(Training {
        params,
        value: trace.best_value,
        trace,
    })
}

/// State prepared by the linear schedule, on the normalized instance when
/// `normalize` is set. Returns the state and the factor divided out of the
/// couplings (1 without normalization). Basis-state energies of the
/// original instance are the de-normalized energies.
pub fn linxfer_state(
    lp: &LinearParams,
    target: &Target,
    p: usize,
    normalize: Option<NormalizationMode>,
) -> Result<(StateVector, Schedule, f64)> {
    check_p(p)?;
    let schedule = linear_schedule(lp, p)?;
    match normalize {
        None => Ok((target.evolve(&schedule), schedule, 1.0)),
        Some(mode) => {
            let e_ref = target.reference.ok_or(Error::MissingReference)?.energy;
            let factor = normalization_factor(&target.instance, mode, e_ref)?;
            let scaled = scale_instance(&target.instance, 1.0 / factor)?;
            let table = CostTable::build(&scaled)?;
            let state = evolve(&table, &target.convention.to_hamiltonian(&schedule));
            Ok((state, schedule, factor))
        }
    }
}

/// Applies pre-trained linear parameters with no per-instance optimization.
pub fn linxfer_apply(
    lp: &LinearParams,
    target: &Target,
    p: usize,
    normalize: Option<NormalizationMode>,
) -> Result<StrategyReport> {
    let clock = Instant::now();
    let (state, schedule, factor) = linxfer_state(lp, target, p, normalize)?;
    let value = crate::simulator::expectation(&state, &target.table)?;
    let mut report = StrategyReport::new(StrategyName::Linxfer, target, schedule, value);
    report.tunable_params = 4;
    report.linear = Some(*lp);
    if let Some(mode) = normalize {
        report.normalization = Some(mode);
        report.normalization_factor = Some(factor);
    }
    report.wall_seconds = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Dispatches by name with default budgets; `linxfer` applies `lp`
/// unnormalized.
pub fn run_named(
    name: StrategyName,
    target: &Target,
    p: usize,
    budget: usize,
    lp: &LinearParams,
) -> Result<StrategyReport> {
    match name {
        StrategyName::Standard => run_standard(target, p, budget),
        StrategyName::Interp => run_interp(target, p, budget),
        StrategyName::Fourier => run_fourier(target, p, DEFAULT_FOURIER_TERMS, budget),
        StrategyName::Linxfer => linxfer_apply(lp, target, p, None),
    }
}
