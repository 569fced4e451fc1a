//! COBYLA restricted to unconstrained problems.
//!
//! Keeps a simplex of `n + 1` points with the best one in pole position,
//! fits the linear interpolant through them, and steps to the trust-region
//! boundary along the model's descent direction. Simplex geometry is
//! repaired when edges grow too long or the simplex flattens, and the
//! radius `rho` halves whenever progress at the current radius stalls,
//! down to `rho_end`. Follows Powell's reference algorithm with no
//! constraint functions, so the merit penalty is identically zero.

use crate::error::{invalid, Result};

use super::{ObjectiveTrace, Recorder, Termination};

const ALPHA: f64 = 0.25;
const BETA: f64 = 2.1;
const GAMMA: f64 = 0.5;
const DELTA: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOptions {
    /// Initial trust-region radius (and initial simplex edge length).
    pub rho_begin: f64,
    /// Final radius; reaching it ends the run.
    pub rho_end: f64,
}

impl Default for LocalOptions {
    fn default() -> Self {
        LocalOptions {
            rho_begin: 1.0,
            rho_end: 1e-6,
        }
    }
}

pub fn local_minimize<F>(objective: F, x0: &[f64], budget: usize) -> Result<ObjectiveTrace>
where
    F: FnMut(&[f64]) -> f64,
{
    local_minimize_with(objective, x0, budget, &LocalOptions::default())
}

pub fn local_minimize_with<F>(objective: F, x0: &[f64], budget: usize, opts: &LocalOptions) -> Result<ObjectiveTrace>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 {
        return Err(invalid("local_minimize needs at least one variable"));
    }
    if !x0.iter().all(|v| v.is_finite()) {
        return Err(invalid("starting point must be finite"));
    }
    if budget < n + 2 {
        return Err(invalid(format!("budget {budget} is below dim + 2 = {}", n + 2)));
    }
    if !(opts.rho_begin > 0.0 && opts.rho_end > 0.0 && opts.rho_end <= opts.rho_begin) {
        return Err(invalid("need rho_begin >= rho_end > 0"));
    }
    let mut rec = Recorder::new(objective, budget);
    let termination = run(&mut rec, x0, opts);
    Ok(rec.finish(termination))
}

/// Simplex state: vertex `j < n` sits at `pole + sim[·][j]`; `simi` is the
/// inverse of the `n × n` displacement matrix.
struct Simplex {
    n: usize,
    pole: Vec<f64>,
    sim: Vec<Vec<f64>>,
    simi: Vec<Vec<f64>>,
    fvals: Vec<f64>,
}

impl Simplex {
    fn move_pole_to(&mut self, nbest: usize) {
        let n = self.n;
        self.fvals.swap(nbest, n);
        for i in 0..n {
            let temp = self.sim[i][nbest];
            self.sim[i][nbest] = 0.0;
            self.pole[i] += temp;
            let mut tempa = 0.0;
            for k in 0..n {
                self.sim[i][k] -= temp;
                tempa -= self.simi[k][i];
            }
            self.simi[nbest][i] = tempa;
        }
    }

    /// Replaces vertex `j` by `pole + dx` and updates the inverse.
    fn replace_vertex(&mut self, j: usize, dx: &[f64], f: f64) {
        let n = self.n;
        let mut temp = 0.0;
        for (i, &d) in dx.iter().enumerate().take(n) {
            self.sim[i][j] = d;
            temp += self.simi[j][i] * d;
        }
        for i in 0..n {
            self.simi[j][i] /= temp;
        }
        for k in 0..n {
            if k != j {
                let t: f64 = (0..n).map(|i| self.simi[k][i] * dx[i]).sum();
                for i in 0..n {
                    self.simi[k][i] -= t * self.simi[j][i];
                }
            }
        }
        self.fvals[j] = f;
    }

    fn inverse_error(&self) -> f64 {
        let n = self.n;
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut t = if i == j { -1.0 } else { 0.0 };
                for k in 0..n {
                    t += self.simi[i][k] * self.sim[k][j];
                }
                err = err.max(t.abs());
            }
        }
        err
    }
}

fn run<F: FnMut(&[f64]) -> f64>(rec: &mut Recorder<F>, x0: &[f64], opts: &LocalOptions) -> Termination {
    let n = x0.len();
    let mut rho = opts.rho_begin;
    let mut s = Simplex {
        n,
        pole: x0.to_vec(),
        sim: vec![vec![0.0; n]; n],
        simi: vec![vec![0.0; n]; n],
        fvals: vec![0.0; n + 1],
    };
    for i in 0..n {
        s.sim[i][i] = rho;
        s.simi[i][i] = 1.0 / rho;
    }

    // initial simplex: pole, then one step of rho along each axis
    let Some(f0) = rec.eval(&s.pole) else {
        return Termination::BudgetExhausted;
    };
    s.fvals[n] = f0;
    for j in 0..n {
        let mut x = s.pole.clone();
        x[j] += rho;
        let Some(f) = rec.eval(&x) else {
            return Termination::BudgetExhausted;
        };
        s.fvals[j] = f;
        if f < s.fvals[n] {
            s.pole[j] = x[j];
            s.fvals[j] = s.fvals[n];
            s.fvals[n] = f;
            for k in 0..=j {
                s.sim[j][k] = -rho;
                let t: f64 = (k..=j).map(|i| -s.simi[i][k]).sum();
                s.simi[j][k] = t;
            }
        }
    }

    let mut skip_geometry = true;
    let mut vsig = vec![0.0; n];
    let mut veta = vec![0.0; n];
    loop {
        // best vertex into pole position
        let mut nbest = n;
        let mut fmin = s.fvals[n];
        for j in 0..n {
            if s.fvals[j] < fmin {
                nbest = j;
                fmin = s.fvals[j];
            }
        }
        if nbest < n {
            s.move_pole_to(nbest);
        }
        if s.inverse_error() > 0.1 {
            return Termination::RoundingLimited;
        }

        // gradient of the linear interpolant
        let grad: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| (s.fvals[j] - s.fvals[n]) * s.simi[j][i]).sum())
            .collect();

        let parsig = ALPHA * rho;
        let pareta = BETA * rho;
        let mut acceptable = true;
        for j in 0..n {
            let wsig: f64 = s.simi[j].iter().map(|v| v * v).sum();
            let weta: f64 = (0..n).map(|i| s.sim[i][j] * s.sim[i][j]).sum();
            vsig[j] = 1.0 / wsig.sqrt();
            veta[j] = weta.sqrt();
            if vsig[j] < parsig || veta[j] > pareta {
                acceptable = false;
            }
        }

        if !skip_geometry && !acceptable {
            // drop the vertex that hurts the geometry most
            let mut jdrop = None;
            let mut worst = pareta;
            for (j, &v) in veta.iter().enumerate().take(n) {
                if v > worst {
                    jdrop = Some(j);
                    worst = v;
                }
            }
            let jdrop = jdrop.unwrap_or_else(|| {
                let mut jd = 0;
                let mut smallest = worst;
                for (j, &v) in vsig.iter().enumerate().take(n) {
                    if v < smallest {
                        jd = j;
                        smallest = v;
                    }
                }
                jd
            });
            let scale = GAMMA * rho * vsig[jdrop];
            let mut dx: Vec<f64> = s.simi[jdrop].iter().map(|v| scale * v).collect();
            let slope: f64 = grad.iter().zip(&dx).map(|(g, d)| g * d).sum();
            if slope > 0.0 {
                dx.iter_mut().for_each(|d| *d = -*d);
            }
            let x: Vec<f64> = s.pole.iter().zip(&dx).map(|(p, d)| p + d).collect();
            let Some(f) = rec.eval(&x) else {
                return Termination::BudgetExhausted;
            };
            s.replace_vertex(jdrop, &dx, f);
            skip_geometry = true;
            continue;
        }

        // trust-region step on the linear model
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm > 0.0 {
            let dx: Vec<f64> = grad.iter().map(|g| -rho * g / gnorm).collect();
            let predicted = rho * gnorm;
            let x: Vec<f64> = s.pole.iter().zip(&dx).map(|(p, d)| p + d).collect();
            let Some(f) = rec.eval(&x) else {
                return Termination::BudgetExhausted;
            };
            let actual = s.fvals[n] - f;

            let mut ratio = if actual <= 0.0 { 1.0 } else { 0.0 };
            let mut jdrop = None;
            let mut sigbar = vec![0.0; n];
            for j in 0..n {
                let t = s.simi[j].iter().zip(&dx).map(|(a, d)| a * d).sum::<f64>().abs();
                if t > ratio {
                    jdrop = Some(j);
                    ratio = t;
                }
                sigbar[j] = t * vsig[j];
            }
            let mut edgmax = DELTA * rho;
            let mut far = None;
            for j in 0..n {
                if sigbar[j] >= parsig || sigbar[j] >= vsig[j] {
                    let t = if actual > 0.0 {
                        (0..n).map(|i| (dx[i] - s.sim[i][j]).powi(2)).sum::<f64>().sqrt()
                    } else {
                        veta[j]
                    };
                    if t > edgmax {
                        far = Some(j);
                        edgmax = t;
                    }
                }
            }
            if far.is_some() {
                jdrop = far;
            }
            if let Some(jd) = jdrop {
                s.replace_vertex(jd, &dx, f);
                if actual > 0.0 && actual >= 0.1 * predicted {
                    skip_geometry = true;
                    continue;
                }
            }
        }

        if !acceptable {
            skip_geometry = false;
            continue;
        }
        if rho > opts.rho_end {
            rho *= 0.5;
            if rho <= 1.5 * opts.rho_end {
                rho = opts.rho_end;
            }
            skip_geometry = true;
            continue;
        }
        return Termination::Converged;
    }
}
