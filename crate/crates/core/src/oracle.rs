//! Reference ground-state energies: exhaustive enumeration for small
//! instances and simulated annealing for everything else.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::problems::{energy, IsingInstance, SpinConfig};
use crate::rng;

pub const DEFAULT_ENUMERATION_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    Annealing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub energy: f64,
    pub config: SpinConfig,
    pub method: Method,
    /// Number of minimizing configurations; only known for exhaustive search.
    pub degeneracy: Option<u64>,
}

impl Serialize for GroundTruth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            energy: f64,
            config: String,
            method: &'a Method,
            #[serde(skip_serializing_if = "Option::is_none")]
            degeneracy: Option<u64>,
        }
        Wire {
            energy: self.energy,
            config: self.config.to_bitstring(),
            method: &self.method,
            degeneracy: self.degeneracy,
        }
        .serialize(s)
    }
}

/// Sort key that orders basis indices like their bitstrings (qubit 0 is the
/// most significant character).
fn lex_key(z: u64, n: usize) -> u64 {
    z.reverse_bits() >> (64 - n)
}

fn tie_tolerance(instance: &IsingInstance) -> f64 {
    let scale: f64 = instance.edges().iter().map(|e| e.coupling.abs()).sum();
    1e-9 * scale.max(1.0)
}

/// Exhaustive minimum with the default 24-qubit cap.
pub fn brute_force_min(instance: &IsingInstance) -> Result<GroundTruth> {
    brute_force_min_capped(instance, DEFAULT_ENUMERATION_CAP)
}

/// Exhaustive minimum over all `2^n` configurations.
///
/// Walks a Gray code over the first `n − 1` spins with the last spin held
/// up; the other half of the space is covered by global-flip symmetry. Ties
/// go to the lexicographically smallest bitstring, and `degeneracy` counts
/// every minimizing configuration (both members of each flip pair).
pub fn brute_force_min_capped(instance: &IsingInstance, cap: usize) -> Result<GroundTruth> {
    let n = instance.n_qubits();
    if n > cap || n > 62 {
        return Err(Error::TooManyQubits { n, cap });
    }
    let adj = instance.adjacency();
    let mut spins = vec![1.0f64; n];
    let mut field: Vec<f64> = adj.iter().map(|row| row.iter().map(|&(_, j)| j).sum()).collect();
    let mut current = instance.energy_of_bits(0);
    let mut z = 0u64;
    let tol = tie_tolerance(instance);
    let full_mask = (1u64 << n) - 1;

    let mut best = current;
    let mut count = 1u64;
    let mut best_key = lex_key(0, n).min(lex_key(full_mask, n));

    for step in 1u64..(1 << (n - 1)) {
        let k = step.trailing_zeros() as usize;
        current -= 2.0 * spins[k] * field[k];
        spins[k] = -spins[k];
        for &(nb, j) in &adj[k] {
            field[nb] += 2.0 * j * spins[k];
        }
        z ^= 1 << k;

        let key = lex_key(z, n).min(lex_key(!z & full_mask, n));
        if current < best - tol {
            best = current;
            count = 1;
            best_key = key;
        } else if (current - best).abs() <= tol {
            count += 1;
            best_key = best_key.min(key);
        }
    }

    let config = SpinConfig::from_bits(lex_key(best_key, n), n);
    let exact = energy(instance, &config)?;
    Ok(GroundTruth {
        energy: exact,
        config,
        method: Method::Exhaustive,
        degeneracy: Some(2 * count),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealingSchedule {
    pub sweeps: usize,
    pub restarts: usize,
    /// Start and end temperatures in units of the mean `|J|`.
    pub t_hot: f64,
    pub t_cold: f64,
}

impl Default for AnnealingSchedule {
    fn default() -> Self {
        AnnealingSchedule {
            sweeps: 1000,
            restarts: 16,
            t_hot: 2.0,
            t_cold: 0.01,
        }
    }
}

/// Simulated annealing with the default temperature ladder.
pub fn simulated_annealing(instance: &IsingInstance, sweeps: usize, restarts: usize, seed: u64) -> Result<GroundTruth> {
    let schedule = AnnealingSchedule {
        sweeps,
        restarts,
        ..AnnealingSchedule::default()
    };
    simulated_annealing_with(instance, &schedule, seed)
}

/// Single-spin-flip Metropolis annealing, geometric cooling from `t_hot` to
/// `t_cold` (both scaled by the mean `|J|`, so annealing `c·I` visits the
/// same configurations as annealing `I`). Restart `r` draws from ChaCha
/// stream `r` of `seed`, so adding restarts never changes earlier ones.
pub fn simulated_annealing_with(
    instance: &IsingInstance,
    schedule: &AnnealingSchedule,
    seed: u64,
) -> Result<GroundTruth> {
    if schedule.sweeps == 0 || schedule.restarts == 0 {
        return Err(crate::error::invalid("sweeps and restarts must be positive"));
    }
    if !(schedule.t_hot >= schedule.t_cold && schedule.t_cold > 0.0) {
        return Err(crate::error::invalid("need t_hot >= t_cold > 0"));
    }
    let n = instance.n_qubits();
    let adj = instance.adjacency();
    let mean_abs = instance.edges().iter().map(|e| e.coupling.abs()).sum::<f64>() / instance.n_edges() as f64;
    let t_hot = schedule.t_hot * mean_abs;
    let t_cold = schedule.t_cold * mean_abs;
    let ratio = if schedule.sweeps > 1 {
        (t_cold / t_hot).powf(1.0 / (schedule.sweeps - 1) as f64)
    } else {
        1.0
    };

    let mut best: Option<(f64, SpinConfig)> = None;
    for restart in 0..schedule.restarts {
        let mut rng = rng::substream(seed, restart as u64);
        let mut spins: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let mut field: Vec<f64> = adj
            .iter()
            .map(|row| row.iter().map(|&(nb, j)| j * spins[nb]).sum())
            .collect();
        let mut current = instance.offset()
            + instance
                .edges()
                .iter()
                .map(|e| e.coupling * spins[e.i] * spins[e.j])
                .sum::<f64>();
        let mut run_best = current;
        let mut run_best_spins = spins.clone();

        let mut temperature = t_hot;
        for _ in 0..schedule.sweeps {
            for k in 0..n {
                let delta = -2.0 * spins[k] * field[k];
                if delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp() {
                    spins[k] = -spins[k];
                    current += delta;
                    for &(nb, j) in &adj[k] {
                        field[nb] += 2.0 * j * spins[k];
                    }
                    if current < run_best {
                        run_best = current;
                        run_best_spins.copy_from_slice(&spins);
                    }
                }
            }
            temperature *= ratio;
        }

        let config = SpinConfig::new(run_best_spins.iter().map(|&s| s as i8).collect())?;
        let exact = energy(instance, &config)?;
        best = Some(match best {
            None => (exact, config),
            Some((e, c)) => match merge_order(exact, &config, e, &c) {
                Ordering::Less => (exact, config),
                _ => (e, c),
            },
        });
    }

    let (energy, config) = best.expect("at least one restart");
    Ok(GroundTruth {
        energy,
        config,
        method: Method::Annealing,
        degeneracy: None,
    })
}

/// Lower energy first, then lexicographically smaller bitstring.
fn merge_order(e1: f64, c1: &SpinConfig, e2: f64, c2: &SpinConfig) -> Ordering {
    e1.total_cmp(&e2)
        .then_with(|| c1.to_bitstring().cmp(&c2.to_bitstring()))
}
