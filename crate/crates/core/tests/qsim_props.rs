mod common;

use covertnet::qsim::{Basis, DenseState, Gate, Pauli, StabilizerTableau};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 8;

#[derive(Debug, Clone)]
enum Op {
    Gate(Gate, Vec<usize>),
    Measure(usize, Basis),
}

fn op() -> impl Strategy<Value = Op> {
    let one = (prop::sample::select(vec![Gate::X, Gate::Y, Gate::Z, Gate::H, Gate::S, Gate::Sdg]), 0..N)
        .prop_map(|(g, q)| Op::Gate(g, vec![q]));
    let two = (prop::sample::select(vec![Gate::CZ, Gate::CNOT]), 0..N, 1..N)
        .prop_map(|(g, a, d)| Op::Gate(g, vec![a, (a + d) % N]));
    let basis = prop_oneof![
        prop::sample::select(vec![Pauli::X, Pauli::Y, Pauli::Z]).prop_map(Basis::Pauli),
        (0..4i32).prop_map(|k| Basis::Equatorial(k as f64 * std::f64::consts::FRAC_PI_2)),
    ];
    let measure = (0..N, basis).prop_map(|(q, b)| Op::Measure(q, b));
    prop_oneof![4 => one, 4 => two, 1 => measure]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Same seed, same circuit: identical outcomes and final states up to phase.
    #[test]
    fn tableau_matches_dense(ops in prop::collection::vec(op(), 1..60), seed in any::<u64>()) {
        let mut dense = DenseState::zero(N).unwrap();
        let mut tab = StabilizerTableau::zero(N);
        let mut rd = ChaCha8Rng::seed_from_u64(seed);
        let mut rt = ChaCha8Rng::seed_from_u64(seed);
        for op in &ops {
            match op {
                Op::Gate(g, t) => {
                    dense.apply_gate(*g, t).unwrap();
                    tab.apply_gate(*g, t).unwrap();
                }
                Op::Measure(q, b) => {
                    let a = dense.measure(*q, *b, &mut rd).unwrap();
                    let c = tab.measure(*q, *b, &mut rt).unwrap();
                    prop_assert_eq!(a.outcome, c.outcome);
                    prop_assert_eq!(a.was_random, c.was_random);
                }
            }
        }
        let overlap = common::overlap(&dense, &tab.to_dense().unwrap());
        prop_assert!((overlap - 1.0).abs() < 1e-9, "overlap {}", overlap);
    }

    #[test]
    fn repeated_measurement_is_idempotent(ops in prop::collection::vec(op(), 0..30), q in 0..N, seed in any::<u64>()) {
        let mut s = DenseState::zero(N).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for op in &ops {
            if let Op::Gate(g, t) = op {
                s.apply_gate(*g, t).unwrap();
            }
        }
        let basis = Basis::Equatorial(seed as f64 * 1e-3);
        let first = s.measure(q, basis, &mut rng).unwrap();
        let second = s.measure(q, basis, &mut rng).unwrap();
        prop_assert_eq!(first.outcome, second.outcome);
        prop_assert!(!second.was_random);
    }

    #[test]
    fn ccz_symmetric_under_permutation(ops in prop::collection::vec(op(), 0..20), perm in Just([0usize, 1, 2]).prop_shuffle()) {
        let mut base = DenseState::plus(4).unwrap();
        for op in &ops {
            if let Op::Gate(g, t) = op {
                if t.iter().all(|&q| q < 4) {
                    base.apply_gate(*g, t).unwrap();
                }
            }
        }
        let mut a = base.clone();
        a.apply_gate(Gate::CCZ, &[0, 1, 2]).unwrap();
        let mut b = base;
        b.apply_gate(Gate::CCZ, &perm).unwrap();
        prop_assert_eq!(a.amplitudes(), b.amplitudes());
    }
}

#[test]
fn cz_from_cnot_and_hadamards() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let input = common::random_qubit(&mut rng).tensor(&common::random_qubit(&mut rng)).unwrap();
        let mut a = input.clone();
        a.apply_gate(Gate::CZ, &[0, 1]).unwrap();
        let mut b = input;
        b.apply_gate(Gate::H, &[1]).unwrap();
        b.apply_gate(Gate::CNOT, &[0, 1]).unwrap();
        b.apply_gate(Gate::H, &[1]).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
