//! Property tests for the crate-wide invariants: norm preservation,
//! gate-composition identities, anti-control equality, the dense-kernel
//! brute-force oracle, Gray-path validity, decomposition bounds, and the
//! QASM round trip.

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use otoc_core::compiler::{gray_path, reconstruct_factors, two_level_decompose};
use otoc_core::linalg::{max_abs_diff, random_unitary, CMatrix};
use otoc_core::qasm::{emit_qasm, parse_qasm, random_subset_circuit};
use otoc_core::{GateMatrix, StateVector};

fn random_state(n_qubits: usize, seed: u64) -> StateVector {
    // A seeded random 1-qubit unitary on each qubit of |0...0⟩, then one
    // entangling pass, gives a generic normalized state.
    let mut s = StateVector::zero(n_qubits).unwrap();
    for q in 0..n_qubits {
        let u = GateMatrix::new(random_unitary(2, seed.wrapping_add(q as u64))).unwrap();
        s.apply_1q(&u, q).unwrap();
    }
    for q in 1..n_qubits {
        s.apply_controlled(&GateMatrix::new(random_unitary(2, seed ^ q as u64)).unwrap(), q - 1, q, false)
            .unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_preserved_under_random_gate_sequences(
        seed in 0u64..10_000,
        n_qubits in 1usize..=5,
        n_gates in 0usize..=100,
    ) {
        let mut s = StateVector::zero(n_qubits).unwrap();
        for k in 0..n_gates {
            let gate_seed = seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
            let q = (gate_seed % n_qubits as u64) as usize;
            let u = GateMatrix::new(random_unitary(2, gate_seed)).unwrap();
            if n_qubits > 1 && gate_seed % 3 == 0 {
                let c = (q + 1) % n_qubits;
                s.apply_controlled(&u, c, q, gate_seed % 2 == 0).unwrap();
            } else {
                s.apply_1q(&u, q).unwrap();
            }
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unitary_then_adjoint_restores_state(
        seed in 0u64..10_000,
        n_qubits in 1usize..=4,
    ) {
        let mut s = random_state(n_qubits, seed);
        let before = s.clone();
        let u = GateMatrix::new(random_unitary(2, seed ^ 0xABCD)).unwrap();
        let q = (seed % n_qubits as u64) as usize;
        s.apply_1q(&u, q).unwrap();
        s.apply_1q(&u.adjoint(), q).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn anti_control_equals_x_conjugated_control(
        seed in 0u64..10_000,
        n_qubits in 2usize..=4,
    ) {
        let control = (seed % n_qubits as u64) as usize;
        let target = (control + 1) % n_qubits;
        let u = GateMatrix::new(random_unitary(2, seed)).unwrap();

        let mut a = random_state(n_qubits, seed ^ 7);
        let mut b = a.clone();
        a.apply_controlled(&u, control, target, true).unwrap();

        let pauli_x = otoc_core::gates::x();
        b.apply_1q(&pauli_x, control).unwrap();
        b.apply_controlled(&u, control, target, false).unwrap();
        b.apply_1q(&pauli_x, control).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn dense_two_qubit_gate_matches_full_matrix_product(
        seed in 0u64..5_000,
        n_qubits in 2usize..=4,
    ) {
        let q0 = (seed % n_qubits as u64) as usize;
        let q1 = (q0 + 1 + (seed / 7 % (n_qubits as u64 - 1)) as usize) % n_qubits;
        prop_assume!(q0 != q1);
        let u = random_unitary(4, seed);
        let gate = GateMatrix::new(u.clone()).unwrap();

        let s = random_state(n_qubits, seed ^ 0x55);
        let mut via_kernel = s.clone();
        via_kernel.apply_dense(&gate, &[q0, q1]).unwrap();

        // Brute-force oracle: build the full 2^n x 2^n embedding and
        // multiply the amplitude vector.
        let dim = 1usize << n_qubits;
        let mut full = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let col_sub = ((col >> q0) & 1) | (((col >> q1) & 1) << 1);
            let rest = col & !(1 << q0) & !(1 << q1);
            for row_sub in 0..4usize {
                let row = rest | ((row_sub & 1) << q0) | (((row_sub >> 1) & 1) << q1);
                full[(row, col)] += u[(row_sub, col_sub)];
            }
        }
        let amps = DVector::from_column_slice(s.amplitudes());
        let want = &full * &amps;
        for (a, b) in via_kernel.amplitudes().iter().zip(want.iter()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn gray_paths_are_valid(
        i in 0usize..64,
        j in 0usize..64,
        n_bits in 1usize..=6,
    ) {
        let dim = 1usize << n_bits;
        prop_assume!(i < dim && j < dim && i != j);
        let path = gray_path(i, j, n_bits).unwrap();
        prop_assert_eq!(*path.states.first().unwrap(), i);
        prop_assert_eq!(*path.states.last().unwrap(), j);
        prop_assert_eq!(path.states.len(), (i ^ j).count_ones() as usize + 1);
        for pair in path.states.windows(2) {
            prop_assert_eq!((pair[0] ^ pair[1]).count_ones(), 1);
        }
    }

    #[test]
    fn decomposition_bound_and_reconstruction(
        seed in 0u64..5_000,
        n_qubits in 1usize..=3,
    ) {
        let dim = 1usize << n_qubits;
        let u = random_unitary(dim, seed);
        let factors = two_level_decompose(&GateMatrix::new(u.clone()).unwrap());
        prop_assert!(factors.len() <= dim * (dim - 1) / 2);
        let rebuilt = reconstruct_factors(dim, &factors);
        prop_assert!(max_abs_diff(&rebuilt, &u) < 1e-9);
    }

    #[test]
    fn qasm_roundtrip_is_op_identical(
        seed in 0u64..10_000,
        n_qubits in 1usize..=4,
        n_ops in 0usize..=60,
    ) {
        let c = random_subset_circuit(n_qubits, n_ops, seed);
        let text = emit_qasm(&c).unwrap();
        let parsed = parse_qasm(&text).unwrap();
        prop_assert_eq!(parsed, c);
    }
}
