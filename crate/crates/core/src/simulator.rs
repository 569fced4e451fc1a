//! Exact state-vector QAOA for diagonal cost Hamiltonians.
//!
//! Conventions:
//! - amplitudes are indexed by basis integer with qubit 0 as the least
//!   significant bit; bitstrings print qubit 0 leftmost;
//! - the phase layer `e^{−iγC}` acts before the mixer layer in each layer;
//! - the mixer is `e^{−iβX}` on every qubit, i.e. an `RX(2β)` gate. The
//!   kernel is `[[cos β, −i sin β], [−i sin β, cos β]]`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{bitstring, IsingInstance};
use crate::rng;
use crate::schedules::Schedule;

pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Tables with at most this many distinct energies get a per-level phase
/// lookup instead of one `sin_cos` per basis state.
const MAX_LEVELS: usize = 1 << 12;

/// Energies of every basis state.
#[derive(Debug, Clone)]
pub struct CostTable {
    n_qubits: usize,
    values: Vec<f64>,
    levels: Option<Levels>,
}

#[derive(Debug, Clone)]
struct Levels {
    distinct: Vec<f64>,
    index: Vec<u32>,
}

impl CostTable {
    pub fn build(instance: &IsingInstance) -> Result<Self> {
        Self::build_capped(instance, DEFAULT_QUBIT_CAP)
    }

    /// Accumulates edge by edge in instance order, so every entry is
    /// bit-identical to `energy_of_bits`.
    pub fn build_capped(instance: &IsingInstance, cap: usize) -> Result<Self> {
        let n = instance.n_qubits();
        if n > cap || n > 40 {
            return Err(Error::TooManyQubits { n, cap });
        }
        let mut values = vec![instance.offset(); 1 << n];
        for e in instance.edges() {
            let (i, j, c) = (e.i, e.j, e.coupling);
            for (z, v) in values.iter_mut().enumerate() {
                *v += if ((z >> i) ^ (z >> j)) & 1 == 0 { c } else { -c };
            }
        }
        Ok(Self::from_values(n, values))
    }

    fn from_values(n_qubits: usize, values: Vec<f64>) -> Self {
        let levels = Self::find_levels(&values);
        CostTable {
            n_qubits,
            values,
            levels,
        }
    }

    fn find_levels(values: &[f64]) -> Option<Levels> {
        let mut distinct: Vec<f64> = Vec::new();
        for &v in values {
            if let Err(pos) = distinct.binary_search_by(|d| d.total_cmp(&v)) {
                if distinct.len() == MAX_LEVELS {
                    return None;
                }
                distinct.insert(pos, v);
            }
        }
        let index = values
            .iter()
            .map(|v| distinct.binary_search_by(|d| d.total_cmp(v)).unwrap_or_default() as u32)
            .collect();
        Some(Levels { distinct, index })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn apply_phase(&self, amps: &mut [Complex64], gamma: f64) {
        match &self.levels {
            Some(levels) => {
                let phases: Vec<Complex64> = levels
                    .distinct
                    .iter()
                    .map(|&v| Complex64::from_polar(1.0, -gamma * v))
                    .collect();
                for (a, &k) in amps.iter_mut().zip(&levels.index) {
                    *a *= phases[k as usize];
                }
            }
            None => {
                for (a, &v) in amps.iter_mut().zip(&self.values) {
                    *a *= Complex64::from_polar(1.0, -gamma * v);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|+⟩^⊗n`.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        StateVector {
            n_qubits,
            amps: vec![a; dim],
        }
    }

    pub fn basis(n_qubits: usize, z: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[z] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() || amps.len() < 2 {
            return Err(crate::error::invalid("amplitude count must be a power of two >= 2"));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `e^{−iβX}` on every qubit.
    fn apply_mixer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let rotate = |a: &mut Complex64, b: &mut Complex64| {
            let (x, y) = (*a, *b);
            // c·x − i s·y and −i s·x + c·y
            *a = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
            *b = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
        };
        for pair in self.amps.chunks_exact_mut(2) {
            let [a, b] = pair else { unreachable!() };
            rotate(a, b);
        }
        for q in 1..self.n_qubits {
            let stride = 1usize << q;
            for block in self.amps.chunks_exact_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    rotate(a, b);
                }
            }
        }
    }
}

/// Applies the layers of `schedule` to `|+⟩^⊗n`.
pub fn evolve(table: &CostTable, schedule: &Schedule) -> StateVector {
    let mut state = StateVector::uniform(table.n_qubits);
    for (gamma, beta) in schedule.layers() {
        table.apply_phase(&mut state.amps, gamma);
        state.apply_mixer(beta);
    }
    state
}

/// `Σ_z |a_z|² C(z)`.
pub fn expectation(state: &StateVector, table: &CostTable) -> Result<f64> {
    if state.amps.len() != table.values.len() {
        return Err(Error::LengthMismatch {
            expected: table.values.len(),
            got: state.amps.len(),
        });
    }
    Ok(state
        .amps
        .iter()
        .zip(&table.values)
        .map(|(a, v)| a.norm_sqr() * v)
        .sum())
}

/// Exact `⟨γ,β|C|γ,β⟩`.
pub fn qaoa_expectation(table: &CostTable, schedule: &Schedule) -> f64 {
    let state = evolve(table, schedule);
    state
        .amps
        .iter()
        .zip(&table.values)
        .map(|(a, v)| a.norm_sqr() * v)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub bitstring: String,
    pub count: u64,
    pub energy: f64,
}

/// Measurement outcomes aggregated by bitstring, sorted by bitstring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub shots: u64,
    pub records: Vec<SampleRecord>,
    pub mean_energy: f64,
    pub best_energy: f64,
}

impl SampleSet {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count,energy\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.bitstring, r.count, r.energy));
        }
        out
    }

    /// Sample standard deviation of the per-shot energies.
    pub fn energy_std(&self) -> f64 {
        if self.shots < 2 {
            return 0.0;
        }
        let ss: f64 = self
            .records
            .iter()
            .map(|r| r.count as f64 * (r.energy - self.mean_energy).powi(2))
            .sum();
        (ss / (self.shots - 1) as f64).sqrt()
    }
}

/// Draws `shots` basis states from the Born distribution of `state` and
/// labels them with energies from `table`. The table may belong to a
/// different (e.g. un-normalized) instance of the same size.
pub fn sample(state: &StateVector, shots: u64, seed: u64, table: &CostTable) -> Result<SampleSet> {
    if shots == 0 {
        return Err(crate::error::invalid("shots must be positive"));
    }
    if state.amps.len() != table.values.len() {
        return Err(Error::LengthMismatch {
            expected: table.values.len(),
            got: state.amps.len(),
        });
    }
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(norm));
    }
    let mut cumulative = Vec::with_capacity(state.amps.len());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let mut rng = rng::seeded(seed);
    let mut counts = std::collections::BTreeMap::<usize, u64>::new();
    for _ in 0..shots {
        let u = rng.random::<f64>() * acc;
        let z = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
        *counts.entry(z).or_default() += 1;
    }

    let n = state.n_qubits;
    let mut records: Vec<SampleRecord> = counts
        .into_iter()
        .map(|(z, count)| SampleRecord {
            bitstring: bitstring(z as u64, n),
            count,
            energy: table.values[z],
        })
        .collect();
    records.sort_by(|a, b| a.bitstring.cmp(&b.bitstring));
    let mean_energy = records.iter().map(|r| r.count as f64 * r.energy).sum::<f64>() / shots as f64;
    let best_energy = records.iter().map(|r| r.energy).fold(f64::INFINITY, f64::min);
    Ok(SampleSet {
        shots,
        records,
        mean_energy,
        best_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_maxcut, gen_random_ising, gen_sk, Edge};
    use std::f64::consts::PI;

    fn single_edge() -> IsingInstance {
        IsingInstance::new(
            2,
            vec![Edge {
                i: 0,
                j: 1,
                coupling: 1.0,
            }],
            0.0,
            "edge",
        )
        .unwrap()
    }

    fn sched(g: &[f64], b: &[f64]) -> Schedule {
        Schedule::new(g.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn cost_table_examples() {
        let t = CostTable::build(&single_edge()).unwrap();
        assert_eq!(t.values(), &[1.0, -1.0, -1.0, 1.0]);

        let tri = CostTable::build(&gen_maxcut(3, 1.0, 0).unwrap()).unwrap();
        assert_eq!(tri.min(), -2.0);

        let inst = gen_sk(6, 1.0, 3).unwrap();
        let t = CostTable::build(&inst).unwrap();
        let sum: f64 = inst.offset() + inst.edges().iter().map(|e| e.coupling).sum::<f64>();
        assert!((t.values()[0] - sum).abs() < 1e-12);
        for z in 0..64 {
            assert_eq!(t.values()[z].to_bits(), inst.energy_of_bits(z as u64).to_bits());
        }
        assert!(CostTable::build_capped(&inst, 5).is_err());
    }

    #[test]
    fn level_lookup_matches_direct_phases() {
        let inst = gen_random_ising(8, 0.6, 2).unwrap();
        let t = CostTable::build(&inst).unwrap();
        assert!(t.levels.is_some());
        let mut direct = t.clone();
        direct.levels = None;
        let s = sched(&[0.3, -0.7], &[0.2, 0.9]);
        let a = qaoa_expectation(&t, &s);
        let b = qaoa_expectation(&direct, &s);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn empty_schedule_gives_offset() {
        let inst = gen_maxcut(5, 0.7, 1).unwrap();
        let t = CostTable::build(&inst).unwrap();
        let state = evolve(&t, &Schedule::empty());
        assert!((expectation(&state, &t).unwrap() - inst.offset()).abs() < 1e-12);
    }

    #[test]
    fn single_edge_closed_form() {
        let t = CostTable::build(&single_edge()).unwrap();
        let state = evolve(&t, &sched(&[-PI / 4.0], &[PI / 8.0]));
        assert!((expectation(&state, &t).unwrap() + 1.0).abs() < 1e-10);
        for &(g, b) in &[(0.3, 0.1), (-1.2, 0.7), (2.0, -0.4)] {
            let e = qaoa_expectation(&t, &sched(&[g], &[b]));
            assert!((e - (4.0 * b).sin() * (2.0 * g).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_gamma_leaves_offset() {
        let inst = gen_maxcut(6, 0.5, 9).unwrap();
        let t = CostTable::build(&inst).unwrap();
        let e = qaoa_expectation(&t, &sched(&[0.0], &[1.234]));
        assert!((e - inst.offset()).abs() < 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let t = CostTable::build(&single_edge()).unwrap();
        assert!(expectation(&StateVector::uniform(2), &t).unwrap().abs() < 1e-15);
        assert_eq!(expectation(&StateVector::basis(2, 0b10), &t).unwrap(), -1.0);
        assert!(expectation(&StateVector::uniform(3), &t).is_err());
    }

    #[test]
    fn norm_is_preserved() {
        let inst = gen_random_ising(12, 0.5, 4).unwrap();
        let t = CostTable::build(&inst).unwrap();
        let g: Vec<f64> = (0..16).map(|l| 0.1 * l as f64 - 0.9).collect();
        let b: Vec<f64> = (0..16).map(|l| 0.8 - 0.05 * l as f64).collect();
        let state = evolve(&t, &sched(&g, &b));
        assert!((state.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sampling_a_basis_state() {
        let t = CostTable::build(&single_edge()).unwrap();
        // basis index 0b10 has qubit 1 set: bitstring "01"
        let ss = sample(&StateVector::basis(2, 0b10), 100, 1, &t).unwrap();
        assert_eq!(ss.records.len(), 1);
        assert_eq!(ss.records[0].bitstring, "01");
        assert_eq!(ss.records[0].count, 100);
        assert_eq!(ss.mean_energy, -1.0);
        assert_eq!(ss.best_energy, -1.0);
        assert_eq!(ss.to_csv(), "bitstring,count,energy\n01,100,-1\n");
    }

    #[test]
    fn uniform_sampling_frequencies() {
        let t = CostTable::build(&single_edge()).unwrap();
        let shots = 100_000u64;
        let ss = sample(&StateVector::uniform(2), shots, 42, &t).unwrap();
        assert_eq!(ss.records.len(), 4);
        let sigma = (shots as f64 * 0.25 * 0.75).sqrt();
        for r in &ss.records {
            assert!((r.count as f64 - 0.25 * shots as f64).abs() < 4.0 * sigma);
        }
        assert_eq!(ss.records.iter().map(|r| r.count).sum::<u64>(), shots);
        assert_eq!(sample(&StateVector::uniform(2), shots, 42, &t).unwrap(), ss);
    }

    #[test]
    fn sampling_rejects_bad_input() {
        let t = CostTable::build(&single_edge()).unwrap();
        let amps = vec![Complex64::new(1.0, 0.0); 4];
        let bad = StateVector::from_amplitudes(amps).unwrap();
        assert!(matches!(sample(&bad, 10, 0, &t), Err(Error::NotNormalized(_))));
        assert!(sample(&StateVector::uniform(2), 0, 0, &t).is_err());
    }
}
