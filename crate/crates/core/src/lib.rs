//! Linearized QAOA parameter transfer.
//!
//! QAOA angle schedules are constrained to linear functions of the layer
//! index, `γ_l = γ_slope · l/p + γ_intcp` and likewise for `β`, so a whole
//! depth-`p` schedule is described by four numbers. Those four numbers are
//! trained once on a reference instance and then applied to new instances
//! without any per-instance optimization, optionally after rescaling the
//! target's couplings so its energy scale matches the source's.
//!
//! The crate contains everything needed to compare that transfer against
//! standard QAOA optimization and the INTERP/FOURIER layer-by-layer
//! heuristics:
//!
//! - [`problems`]: random Ising, MaxCut and SK instances, energies, scaling;
//! - [`oracle`]: exhaustive and simulated-annealing ground-state energies;
//! - [`schedules`]: linear, INTERP and FOURIER schedule transforms;
//! - [`simulator`]: exact state-vector QAOA with a diagonal cost table;
//! - [`optimize`]: COBYLA-style local search and a TPE global sampler;
//! - [`strategies`]: the four parameter-setting strategies end to end;
//! - [`landscape`]: reduced-parameter grid scans and scaling studies.

pub mod error;
pub mod landscape;
pub mod optimize;
pub mod oracle;
pub mod problems;
pub mod rng;
pub mod schedules;
pub mod simulator;
pub mod strategies;

pub use error::{Error, Result};
pub use problems::{IsingInstance, NormalizationMode, SpinConfig};
pub use schedules::{AngleConvention, FourierCoeffs, LinearFit, LinearParams, Schedule};
pub use simulator::{CostTable, SampleSet, StateVector};
