//! Reference simulator built from dense `2^n × 2^n` matrices and general
//! matrix exponentials; shares no code with the fast engine.

#![allow(dead_code)]

use linxfer::problems::Edge;
use linxfer::{IsingInstance, Schedule};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn spin(z: usize, q: usize) -> f64 {
    if (z >> q) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn cost_matrix(instance: &IsingInstance) -> DMatrix<Complex64> {
    let dim = 1usize << instance.n_qubits();
    DMatrix::from_fn(dim, dim, |r, c| {
        if r != c {
            return Complex64::new(0.0, 0.0);
        }
        let e: f64 = instance
            .edges()
            .iter()
            .map(|Edge { i, j, coupling }| coupling * spin(r, *i) * spin(r, *j))
            .sum();
        Complex64::new(e + instance.offset(), 0.0)
    })
}

/// `Σ_q X_q`.
pub fn mixer_matrix(n: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    DMatrix::from_fn(dim, dim, |r, c| {
        let flips = r ^ c;
        if flips != 0 && flips.is_power_of_two() {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn expm_times(h: &DMatrix<Complex64>, angle: f64) -> DMatrix<Complex64> {
    (h * Complex64::new(0.0, -angle)).exp()
}

/// `⟨ψ|C|ψ⟩` with `|ψ⟩ = Π_l e^{−iβ_l B} e^{−iγ_l C} |+⟩^n`.
pub fn dense_expectation(instance: &IsingInstance, schedule: &Schedule) -> f64 {
    let n = instance.n_qubits();
    let dim = 1usize << n;
    let c = cost_matrix(instance);
    let b = mixer_matrix(n);
    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let mut psi = DVector::from_element(dim, amp);
    for (gamma, beta) in schedule.layers() {
        psi = expm_times(&c, gamma) * psi;
        psi = expm_times(&b, beta) * psi;
    }
    (psi.adjoint() * &c * &psi)[(0, 0)].re
}
