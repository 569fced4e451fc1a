mod common;

use common::dense_expectation;
use linxfer::problems::{gen_maxcut, gen_random_ising, gen_sk};
use linxfer::simulator::qaoa_expectation;
use linxfer::{CostTable, IsingInstance, Schedule};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fast(instance: &IsingInstance, schedule: &Schedule) -> f64 {
    qaoa_expectation(&CostTable::build(instance).unwrap(), schedule)
}

#[test]
fn single_edge_matches_closed_form() {
    // One layer on one edge: J·sin(4β)·sin(2γJ).
    let inst = gen_random_ising(2, 1.0, 0).unwrap();
    let j = inst.edges()[0].coupling;
    for (g, b) in [(0.3, 0.2), (-0.7, 1.1), (1.4, -0.35)] {
        let s = Schedule::new(vec![g], vec![b]).unwrap();
        let want = j * (4.0f64 * b).sin() * (2.0f64 * g * j).sin();
        assert!((dense_expectation(&inst, &s) - want).abs() < 1e-12);
        assert!((fast(&inst, &s) - want).abs() < 1e-12);
    }
}

#[test]
fn fifty_random_cases_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..50u64 {
        let n = rng.random_range(2..=6);
        let inst = match case % 3 {
            0 => gen_random_ising(n, 0.7, case).unwrap(),
            1 => gen_maxcut(n, 0.8, case).unwrap(),
            _ => gen_sk(n, 1.0, case).unwrap(),
        };
        let p = rng.random_range(1..=3);
        let gammas = (0..p).map(|_| rng.random_range(-3.0..3.0)).collect();
        let betas = (0..p).map(|_| rng.random_range(-3.0..3.0)).collect();
        let s = Schedule::new(gammas, betas).unwrap();
        let (a, b) = (fast(&inst, &s), dense_expectation(&inst, &s));
        assert!((a - b).abs() < 1e-9, "case {case}: n={n} p={p} fast={a} dense={b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn agreement_on_arbitrary_schedules(
        seed in 0u64..1000,
        n in 2usize..=5,
        layers in proptest::collection::vec((-4.0f64..4.0, -4.0f64..4.0), 1..=3),
    ) {
        let inst = gen_sk(n, 2.0, seed).unwrap();
        let (g, b): (Vec<f64>, Vec<f64>) = layers.into_iter().unzip();
        let s = Schedule::new(g, b).unwrap();
        prop_assert!((fast(&inst, &s) - dense_expectation(&inst, &s)).abs() < 1e-9);
    }
}
