//! Tree-structured Parzen estimator over a box.
//!
//! The first trials come from a randomly shifted Halton sequence. After
//! that, observations are split into the best `γ(n) = min(⌈n/10⌉, 25)` and
//! the rest; each dimension gets a truncated-Gaussian Parzen mixture for
//! both groups, and the next point maximizes `l(x)/g(x)` over candidates
//! drawn from the "good" mixture, independently per dimension.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;

use crate::error::{invalid, Result};
use crate::rng::{self, StreamRng};

use super::{ObjectiveTrace, Recorder, Termination};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalOptions {
    /// Startup trials are `max(min_startup, startup_fraction · trials)`.
    pub startup_fraction: f64,
    pub min_startup: usize,
    pub candidates: usize,
    pub prior_weight: f64,
}

impl Default for GlobalOptions {
    fn default() -> Self {
        GlobalOptions {
            startup_fraction: 0.1,
            min_startup: 16,
            candidates: 24,
            prior_weight: 1.0,
        }
    }
}

pub fn global_minimize<F>(objective: F, bounds: &[(f64, f64)], trials: usize, seed: u64) -> Result<ObjectiveTrace>
where
    F: FnMut(&[f64]) -> f64,
{
    global_minimize_with(objective, bounds, trials, seed, &GlobalOptions::default())
}

pub fn global_minimize_with<F>(
    objective: F,
    bounds: &[(f64, f64)],
    trials: usize,
    seed: u64,
    opts: &GlobalOptions,
) -> Result<ObjectiveTrace>
where
    F: FnMut(&[f64]) -> f64,
{
    if bounds.is_empty() {
        return Err(invalid("global_minimize needs at least one dimension"));
    }
    for &(lo, hi) in bounds {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("invalid bounds [{lo}, {hi}]")));
        }
    }
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    if opts.candidates == 0 {
        return Err(invalid("need at least one candidate per step"));
    }

    let dim = bounds.len();
    let startup = ((opts.startup_fraction * trials as f64).ceil() as usize).max(opts.min_startup);
    let mut rng = rng::seeded(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let bases = first_primes(dim);

    let mut rec = Recorder::new(objective, trials);
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(trials);
    let mut ys: Vec<f64> = Vec::with_capacity(trials);
    for t in 0..trials {
        let x: Vec<f64> = if t < startup {
            (0..dim)
                .map(|d| {
                    let u = (radical_inverse(t as u64 + 1, bases[d]) + shift[d]).fract();
                    let (lo, hi) = bounds[d];
                    lo + u * (hi - lo)
                })
                .collect()
        } else {
            suggest(&xs, &ys, bounds, opts, &mut rng)
        };
        let Some(y) = rec.eval(&x) else { break };
        xs.push(x);
        ys.push(y);
    }
    Ok(rec.finish(Termination::BudgetExhausted))
}

fn first_primes(k: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(k);
    let mut c = 2u64;
    while primes.len() < k {
        if primes.iter().all(|&p| !c.is_multiple_of(p)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn n_below(n: usize) -> usize {
    ((n as f64 / 10.0).ceil() as usize).clamp(1, 25)
}

fn suggest(xs: &[Vec<f64>], ys: &[f64], bounds: &[(f64, f64)], opts: &GlobalOptions, rng: &mut StreamRng) -> Vec<f64> {
    let mut order: Vec<usize> = (0..ys.len()).collect();
    order.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]).then(a.cmp(&b)));
    let split = n_below(ys.len());
    let (below, above) = order.split_at(split);

    bounds
        .iter()
        .enumerate()
        .map(|(d, &(lo, hi))| {
            let good = Parzen::fit(below.iter().map(|&i| xs[i][d]), lo, hi, opts.prior_weight);
            let bad = Parzen::fit(above.iter().map(|&i| xs[i][d]), lo, hi, opts.prior_weight);
            let mut best = f64::NAN;
            let mut best_score = f64::NEG_INFINITY;
            for _ in 0..opts.candidates {
                let c = good.sample(rng);
                let score = good.log_pdf(c) - bad.log_pdf(c);
                if score > best_score {
                    best_score = score;
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Equal-weight mixture of Gaussians truncated to `[lo, hi]`, plus a wide
/// prior component centred in the box.
struct Parzen {
    lo: f64,
    hi: f64,
    mus: Vec<f64>,
    sigmas: Vec<f64>,
    weights: Vec<f64>,
    /// Mass of each component inside the box.
    mass: Vec<f64>,
}

impl Parzen {
    fn fit(points: impl Iterator<Item = f64>, lo: f64, hi: f64, prior_weight: f64) -> Self {
        let width = hi - lo;
        // (centre, weight, is_prior)
        let mut comps: Vec<(f64, f64, bool)> = points.map(|x| (x, 1.0, false)).collect();
        comps.push(((lo + hi) / 2.0, prior_weight, true));
        comps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let k = comps.len();

        // bandwidth: distance to the farther neighbour, clipped
        let min_sigma = width / (1.0 + k as f64).min(100.0);
        let mut mus = Vec::with_capacity(k);
        let mut sigmas = Vec::with_capacity(k);
        let mut weights = Vec::with_capacity(k);
        for (idx, &(mu, w, is_prior)) in comps.iter().enumerate() {
            let left = if idx == 0 { lo } else { comps[idx - 1].0 };
            let right = if idx + 1 == k { hi } else { comps[idx + 1].0 };
            let mut sigma = (mu - left).max(right - mu);
            if is_prior {
                sigma = width;
            }
            mus.push(mu);
            sigmas.push(sigma.clamp(min_sigma, width));
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mass = mus
            .iter()
            .zip(&sigmas)
            .map(|(&m, &s)| (normal_cdf((hi - m) / s) - normal_cdf((lo - m) / s)).max(1e-300))
            .collect();
        Parzen {
            lo,
            hi,
            mus,
            sigmas,
            weights,
            mass,
        }
    }

    fn sample(&self, rng: &mut StreamRng) -> f64 {
        let u = rng.random::<f64>();
        let mut acc = 0.0;
        let mut k = self.weights.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                k = i;
                break;
            }
        }
        let (mu, sigma) = (self.mus[k], self.sigmas[k]);
        for _ in 0..64 {
            let x = mu + sigma * standard_normal(rng);
            if x >= self.lo && x <= self.hi {
                return x;
            }
        }
        mu.clamp(self.lo, self.hi)
    }

    fn log_pdf(&self, x: f64) -> f64 {
        let mut p = 0.0;
        for i in 0..self.mus.len() {
            let z = (x - self.mus[i]) / self.sigmas[i];
            p += self.weights[i] * (-0.5 * z * z).exp() / (self.sigmas[i] * (2.0 * PI).sqrt() * self.mass[i]);
        }
        p.max(f64::MIN_POSITIVE).ln()
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / SQRT_2))
}

/// Box-Muller; one draw per call keeps the stream easy to reason about.
fn standard_normal(rng: &mut StreamRng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn random_search(trials: usize, seed: u64) -> f64 {
        let mut rng = rng::substream(seed, 99);
        (0..trials)
            .map(|_| sphere(&(0..4).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<f64>>()))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn halton_points_are_low_discrepancy() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn sphere_4d_beats_random_search() {
        let bounds = [(-2.0, 2.0); 4];
        let mut wins = 0;
        for seed in 0..10 {
            let t = global_minimize(sphere, &bounds, 1024, seed).unwrap();
            assert_eq!(t.eval_count, 1024);
            assert!(t.best_value <= 0.05, "seed {seed}: best {}", t.best_value);
            if t.best_value < random_search(1024, seed) {
                wins += 1;
            }
        }
        assert!(wins >= 9, "beat random search in {wins}/10 seeds");
    }

    #[test]
    fn single_trial() {
        let t = global_minimize(sphere, &[(-1.0, 1.0); 2], 1, 5).unwrap();
        assert_eq!(t.eval_count, 1);
        assert_eq!(t.best_params, t.evaluations[0].params);
        assert_eq!(t.best_value, t.evaluations[0].value);
    }

    #[test]
    fn deterministic_and_in_bounds() {
        let bounds = [(-1.0, 3.0), (0.5, 0.75), (-10.0, -9.0)];
        let f = |x: &[f64]| (x[0] - 2.9).powi(2) + x[1] + (x[2] + 9.5).abs();
        let a = global_minimize(f, &bounds, 200, 11).unwrap();
        let b = global_minimize(f, &bounds, 200, 11).unwrap();
        assert_eq!(a, b);
        for e in &a.evaluations {
            for (v, &(lo, hi)) in e.params.iter().zip(&bounds) {
                assert!(*v >= lo && *v <= hi);
            }
        }
        assert!(a.evaluations.iter().any(|e| e.value == a.best_value));
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(global_minimize(sphere, &[(1.0, 1.0)], 10, 0).is_err());
        assert!(global_minimize(sphere, &[(2.0, 1.0)], 10, 0).is_err());
        assert!(global_minimize(sphere, &[], 10, 0).is_err());
        assert!(global_minimize(sphere, &[(0.0, 1.0)], 0, 0).is_err());
    }
}
