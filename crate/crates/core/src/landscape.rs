//! Expectation landscapes over one plane of the linear parameters.
//!
//! The γ-plane varies `(γ_slope, γ_intcp)` with `(β_slope, β_intcp)` held
//! fixed; the β-plane does the opposite.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::problems::{normalization_factor, scale_instance, NormalizationMode};
use crate::schedules::{linear_schedule, AngleConvention, LinearParams};
use crate::strategies::Target;

pub const DEFAULT_RANGE: (f64, f64) = (-2.0, 2.0);
pub const DEFAULT_RESOLUTION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plane {
    GammaPlane,
    BetaPlane,
}

impl Plane {
    /// The off-plane pair of [`LinearParams::REFERENCE`].
    pub fn default_fixed(self) -> (f64, f64) {
        let r = LinearParams::REFERENCE;
        match self {
            Plane::GammaPlane => (r.beta_slope, r.beta_intcp),
            Plane::BetaPlane => (r.gamma_slope, r.gamma_intcp),
        }
    }

    /// Combines an in-plane point with the fixed pair.
    pub fn params(self, slope: f64, intcp: f64, fixed: (f64, f64)) -> LinearParams {
        match self {
            Plane::GammaPlane => LinearParams {
                gamma_slope: slope,
                gamma_intcp: intcp,
                beta_slope: fixed.0,
                beta_intcp: fixed.1,
            },
            Plane::BetaPlane => LinearParams {
                gamma_slope: fixed.0,
                gamma_intcp: fixed.1,
                beta_slope: slope,
                beta_intcp: intcp,
            },
        }
    }
}

/// Axes and resolution of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub plane: Plane,
    pub fixed_other: (f64, f64),
    pub slope_range: (f64, f64),
    pub intcp_range: (f64, f64),
    pub resolution: usize,
}

impl ScanConfig {
    pub fn new(plane: Plane) -> Self {
        ScanConfig {
            plane,
            fixed_other: plane.default_fixed(),
            slope_range: DEFAULT_RANGE,
            intcp_range: DEFAULT_RANGE,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

/// Normalization applied to the scanned instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppliedNormalization {
    pub mode: NormalizationMode,
    pub e_ref: f64,
    /// Couplings were divided by this.
    pub factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestPoint {
    pub slope: f64,
    pub intcp: f64,
    pub value: f64,
}

impl BestPoint {
    pub fn norm(&self) -> f64 {
        self.slope.hypot(self.intcp)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    pub plane: Plane,
    pub fixed_other: (f64, f64),
    pub p: usize,
    pub convention: AngleConvention,
    pub instance: String,
    pub normalization: Option<AppliedNormalization>,
    pub slope_axis: Vec<f64>,
    pub intcp_axis: Vec<f64>,
    /// Row-major: `values[i * intcp_axis.len() + j]` is at
    /// `(slope_axis[i], intcp_axis[j])`.
    pub values: Vec<f64>,
}

/// Everything about a grid except its values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMetadata {
    pub plane: Plane,
    pub fixed_other: (f64, f64),
    pub p: usize,
    pub convention: AngleConvention,
    pub instance: String,
    pub normalization: Option<AppliedNormalization>,
    pub slope_range: (f64, f64),
    pub intcp_range: (f64, f64),
    pub shape: (usize, usize),
    pub best: BestPoint,
}

impl LandscapeGrid {
    pub fn shape(&self) -> (usize, usize) {
        (self.slope_axis.len(), self.intcp_axis.len())
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.intcp_axis.len() + j]
    }

    pub fn params_at(&self, i: usize, j: usize) -> LinearParams {
        self.plane
            .params(self.slope_axis[i], self.intcp_axis[j], self.fixed_other)
    }

    /// Largest spacing between neighbouring grid points along either axis.
    pub fn cell_size(&self) -> (f64, f64) {
        (spacing(&self.slope_axis), spacing(&self.intcp_axis))
    }

    /// Header `slope,intcp,value`, one row per cell, slope-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slope,intcp,value\n");
        for (i, s) in self.slope_axis.iter().enumerate() {
            for (j, c) in self.intcp_axis.iter().enumerate() {
                let _ = writeln!(out, "{s},{c},{}", self.value(i, j));
            }
        }
        out
    }

    pub fn metadata(&self) -> GridMetadata {
        GridMetadata {
            plane: self.plane,
            fixed_other: self.fixed_other,
            p: self.p,
            convention: self.convention,
            instance: self.instance.clone(),
            normalization: self.normalization,
            slope_range: (self.slope_axis[0], *self.slope_axis.last().unwrap()),
            intcp_range: (self.intcp_axis[0], *self.intcp_axis.last().unwrap()),
            shape: self.shape(),
            best: best_point(self),
        }
    }
}

fn spacing(axis: &[f64]) -> f64 {
    axis.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive. A single point
/// requires `lo == hi`.
pub fn axis(range: (f64, f64), n: usize) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(invalid(format!("invalid axis range [{lo}, {hi}]")));
    }
    match n {
        0 => Err(invalid("resolution must be positive")),
        1 if lo == hi => Ok(vec![lo]),
        1 => Err(invalid("a one-point axis needs a degenerate range")),
        _ => Ok((0..n)
            .map(|k| {
                if k + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect()),
    }
}

/// Exact expectation at every grid point of `config`'s plane.
pub fn scan_plane(target: &Target, p: usize, config: &ScanConfig) -> Result<LandscapeGrid> {
    let slope_axis = axis(config.slope_range, config.resolution)?;
    let intcp_axis = axis(config.intcp_range, config.resolution)?;
    if !(config.fixed_other.0.is_finite() && config.fixed_other.1.is_finite()) {
        return Err(invalid("fixed parameters must be finite"));
    }
    let mut values = Vec::with_capacity(slope_axis.len() * intcp_axis.len());
    for &s in &slope_axis {
        for &c in &intcp_axis {
            let lp = config.plane.params(s, c, config.fixed_other);
            values.push(target.expectation(&linear_schedule(&lp, p)?));
        }
    }
    Ok(LandscapeGrid {
        plane: config.plane,
        fixed_other: config.fixed_other,
        p,
        convention: target.convention(),
        instance: target.instance().label().to_string(),
        normalization: None,
        slope_axis,
        intcp_axis,
        values,
    })
}

/// Scans the instance with couplings divided by its normalization factor.
/// Values are in the normalized instance's units.
pub fn scan_normalized(
    target: &Target,
    p: usize,
    config: &ScanConfig,
    mode: NormalizationMode,
    e_ref: f64,
) -> Result<LandscapeGrid> {
    let factor = normalization_factor(target.instance(), mode, e_ref)?;
    let scaled = scale_instance(target.instance(), 1.0 / factor)?;
    let scaled_target = Target::unreferenced(scaled)?.with_convention(target.convention());
    let mut grid = scan_plane(&scaled_target, p, config)?;
    grid.normalization = Some(AppliedNormalization { mode, e_ref, factor });
    Ok(grid)
}

/// Lowest cell; equal values go to the smallest `(slope, intcp)`.
pub fn best_point(grid: &LandscapeGrid) -> BestPoint {
    let mut best: Option<BestPoint> = None;
    for (i, &slope) in grid.slope_axis.iter().enumerate() {
        for (j, &intcp) in grid.intcp_axis.iter().enumerate() {
            let cand = BestPoint {
                slope,
                intcp,
                value: grid.value(i, j),
            };
            let better = match best {
                None => true,
                Some(b) => cand
                    .value
                    .total_cmp(&b.value)
                    .then(cand.slope.total_cmp(&b.slope))
                    .then(cand.intcp.total_cmp(&b.intcp))
                    .is_lt(),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    best.expect("grid axes are never empty")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub x: f64,
    pub best: BestPoint,
    pub grid: LandscapeGrid,
}

/// For each `X`, normalizes by `|e_ref|/X`, scans and records the best point.
pub fn scaling_study(
    target: &Target,
    p: usize,
    xs: &[f64],
    e_ref: f64,
    config: &ScanConfig,
) -> Result<Vec<ScalingRow>> {
    if xs.is_empty() {
        return Err(invalid("scaling study needs at least one X"));
    }
    xs.iter()
        .map(|&x| {
            let grid = scan_normalized(target, p, config, NormalizationMode::FixedX { x }, e_ref)?;
            Ok(ScalingRow {
                x,
                best: best_point(&grid),
                grid,
            })
        })
        .collect()
}
