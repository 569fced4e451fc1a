//! Angle schedules and the reduced parameterizations that generate them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Slopes and intercepts of the linear schedule
/// `γ_l = γ_slope · l/p + γ_intcp`, `β_l = β_slope · l/p + β_intcp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub gamma_slope: f64,
    pub gamma_intcp: f64,
    pub beta_slope: f64,
    pub beta_intcp: f64,
}

impl LinearParams {
    /// Parameters trained on a 16-qubit, density-0.6 random Ising instance
    /// at `p = 8`; the default transfer source.
    pub const REFERENCE: LinearParams = LinearParams {
        gamma_slope: -0.376,
        gamma_intcp: -0.165,
        beta_slope: -0.881,
        beta_intcp: 0.913,
    };

    /// Untrained unit guess `γ_l = −l/p − 1`, `β_l = −l/p + 1`.
    pub const ROUGH_GUESS: LinearParams = LinearParams {
        gamma_slope: -1.0,
        gamma_intcp: -1.0,
        beta_slope: -1.0,
        beta_intcp: 1.0,
    };

    pub fn new(gamma_slope: f64, gamma_intcp: f64, beta_slope: f64, beta_intcp: f64) -> Result<Self> {
        let lp = LinearParams {
            gamma_slope,
            gamma_intcp,
            beta_slope,
            beta_intcp,
        };
        if !lp.to_array().iter().all(|v| v.is_finite()) {
            return Err(invalid("linear parameters must be finite"));
        }
        Ok(lp)
    }

    /// Order: `[γ_slope, γ_intcp, β_slope, β_intcp]`.
    pub fn to_array(self) -> [f64; 4] {
        [self.gamma_slope, self.gamma_intcp, self.beta_slope, self.beta_intcp]
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match v {
            &[a, b, c, d] => LinearParams::new(a, b, c, d),
            _ => Err(invalid(format!("expected 4 linear parameters, got {}", v.len()))),
        }
    }
}

/// Per-layer angles `(γ_0..γ_{p−1}, β_0..β_{p−1})` in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct Schedule {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSchedule {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl TryFrom<RawSchedule> for Schedule {
    type Error = crate::error::Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        Schedule::new(raw.gammas, raw.betas)
    }
}

impl Schedule {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(crate::error::Error::LengthMismatch {
                expected: gammas.len(),
                got: betas.len(),
            });
        }
        if gammas.is_empty() {
            return Err(invalid("schedule needs at least one layer"));
        }
        if !gammas.iter().chain(&betas).all(|v| v.is_finite()) {
            return Err(invalid("schedule angles must be finite"));
        }
        Ok(Schedule { gammas, betas })
    }

    /// Zero-layer schedule; evolving it leaves `|+⟩^⊗n` untouched.
    pub fn empty() -> Self {
        Schedule {
            gammas: Vec::new(),
            betas: Vec::new(),
        }
    }

    /// Builds from the interleaving used by optimizers: first `p` entries
    /// are `γ`, last `p` are `β`.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(invalid("flat schedule must have even length"));
        }
        let (g, b) = flat.split_at(flat.len() / 2);
        Schedule::new(g.to_vec(), b.to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn layers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.gammas.iter().copied().zip(self.betas.iter().copied())
    }

    pub fn map_gammas(&self, f: impl Fn(f64) -> f64) -> Self {
        Schedule {
            gammas: self.gammas.iter().map(|&g| f(g)).collect(),
            betas: self.betas.clone(),
        }
    }

    /// Multiplies every `γ` by `gamma_factor` and every `β` by `beta_factor`.
    pub fn scaled(&self, gamma_factor: f64, beta_factor: f64) -> Self {
        Schedule {
            gammas: self.gammas.iter().map(|&g| g * gamma_factor).collect(),
            betas: self.betas.iter().map(|&b| b * beta_factor).collect(),
        }
    }
}

/// How schedule angles enter the circuit.
///
/// The simulator always applies `e^{−iγC}` then `e^{−iβX}`. Parameters
/// expressed as rotation-gate angles (`RZZ`/`RX` style, where a gate with
/// angle `θ` is `e^{−iθP/2}`) are half as effective per radian; the
/// reference parameter sets, [`LinearParams::REFERENCE`] and
/// [`LinearParams::ROUGH_GUESS`], are gate angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleConvention {
    /// `e^{−iγC}` and `e^{−iβX}`.
    Hamiltonian,
    /// `e^{−iγC/2}` and `RX(β) = e^{−iβX/2}`.
    Gate,
}

impl AngleConvention {
    /// Factor taking angles in this convention to Hamiltonian angles.
    pub fn scale(self) -> f64 {
        match self {
            AngleConvention::Hamiltonian => 1.0,
            AngleConvention::Gate => 0.5,
        }
    }

    /// The schedule the simulator should apply.
    pub fn to_hamiltonian(self, schedule: &Schedule) -> Schedule {
        match self {
            AngleConvention::Hamiltonian => schedule.clone(),
            AngleConvention::Gate => schedule.scaled(0.5, 0.5),
        }
    }

    pub fn from_hamiltonian(self, schedule: &Schedule) -> Schedule {
        match self {
            AngleConvention::Hamiltonian => schedule.clone(),
            AngleConvention::Gate => schedule.scaled(2.0, 2.0),
        }
    }
}

/// Sine/cosine coefficients of a FOURIER schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoeffs {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FourierCoeffs {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(crate::error::Error::LengthMismatch {
                expected: u.len(),
                got: v.len(),
            });
        }
        if u.is_empty() {
            return Err(invalid("need at least one Fourier term"));
        }
        Ok(FourierCoeffs { u, v })
    }

    pub fn k(&self) -> usize {
        self.u.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_schedule(lp: &LinearParams, p: usize) -> Result<Schedule> {
    if p == 0 {
        return Err(invalid("p must be at least 1"));
    }
    let pf = p as f64;
    let gammas = (0..p)
        .map(|l| lp.gamma_slope * (l as f64 / pf) + lp.gamma_intcp)
        .collect();
    let betas = (0..p)
        .map(|l| lp.beta_slope * (l as f64 / pf) + lp.beta_intcp)
        .collect();
    Schedule::new(gammas, betas)
}

/// Extends a depth-`p−1` angle vector to depth `p`.
///
/// Pads with zeros on both sides, then for `i = 1..=p` takes
/// `r·tmp[i−1] + (1−r)·tmp[i]` with `r = (i−1)/p`. The last entry
/// interpolates toward the trailing zero pad.
pub fn interp_extend(params: &[f64]) -> Result<Vec<f64>> {
    if params.is_empty() {
        return Err(invalid("interp_extend needs a nonempty vector"));
    }
    let p = params.len() + 1;
    let mut tmp = Vec::with_capacity(p + 1);
    tmp.push(0.0);
    tmp.extend_from_slice(params);
    tmp.push(0.0);
    Ok((1..=p)
        .map(|i| {
            let r = (i - 1) as f64 / p as f64;
            r * tmp[i - 1] + (1.0 - r) * tmp[i]
        })
        .collect())
}

/// `γ_i = Σ_j u_{j−1} sin((j−½)(i−½)π/p)`, `β_i = Σ_j v_{j−1} cos(…)` for
/// `i = 1..=p`, stored at layer `i − 1`.
pub fn fourier_to_schedule(fc: &FourierCoeffs, p: usize) -> Result<Schedule> {
    if p == 0 {
        return Err(invalid("p must be at least 1"));
    }
    if fc.u.is_empty() || fc.u.len() != fc.v.len() {
        return Err(invalid("Fourier coefficient vectors must be nonempty and equal length"));
    }
    let pf = p as f64;
    let mut gammas = Vec::with_capacity(p);
    let mut betas = Vec::with_capacity(p);
    for i in 1..=p {
        let mut g = 0.0;
        let mut b = 0.0;
        for (j, (&u, &v)) in (1..).zip(fc.u.iter().zip(&fc.v)) {
            let phase = (j as f64 - 0.5) * (i as f64 - 0.5) * PI / pf;
            g += u * phase.sin();
            b += v * phase.cos();
        }
        gammas.push(g);
        betas.push(b);
    }
    Schedule::new(gammas, betas)
}

/// Least-squares line through `(l/p, values[l])`. A zero-variance input
/// fits exactly with slope 0 and `R² = 1`.
pub fn fit_linear(values: &[f64], p: usize) -> Result<LinearFit> {
    if p < 2 {
        return Err(invalid("fit_linear needs p >= 2"));
    }
    if values.len() != p {
        return Err(crate::error::Error::LengthMismatch {
            expected: p,
            got: values.len(),
        });
    }
    let xs: Vec<f64> = (0..p).map(|l| l as f64 / p as f64).collect();
    let n = p as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = values.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(values).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = values.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    if syy == 0.0 {
        return Ok(LinearFit {
            slope: 0.0,
            intercept: my,
            r_squared: 1.0,
        });
    }
    let ss_res: f64 = xs
        .iter()
        .zip(values)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let r_squared = (1.0 - ss_res / syy).clamp(0.0, 1.0);
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}
