//! Dense complex statevector and gate-application kernels.
//!
//! Qubit ordering is little-endian throughout the crate: qubit 0 is the
//! least-significant bit of the basis index, so |01⟩ (qubit 1 = 0,
//! qubit 0 = 1) lives at index 1. The interferometric ancilla is allocated
//! as the highest-index qubit so system indices stay stable when it is
//! added.
//!
//! Operations mutate in place and return `&mut Self` for chaining; the
//! observable contract is value semantics (clone before applying when the
//! original is still needed). Distinct `StateVector`s may be evolved on
//! different threads with no shared state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::GateMatrix;
use crate::linalg::ZERO;

pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0⟩ on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Size(format!(
                "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Build from explicit amplitudes; the length must be a power of two and
    /// the norm must be 1 within 1e-6.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > (1 << MAX_QUBITS) {
            return Err(Error::Size(format!(
                "amplitude count must be a power of two in 2..=2^{MAX_QUBITS}, got {len}"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-6 {
            return Err(Error::Argument(format!(
                "state must be normalized, got ||psi||^2 = {norm_sqr}"
            )));
        }
        Ok(Self { n_qubits, amps })
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

    pub fn probability(&self, basis_index: usize) -> f64 {
        self.amps[basis_index].norm_sqr()
    }

    /// Probability that `qubit` reads 1 in the computational basis.
    pub fn probability_of_one(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::Index(format!(
                "qubit {qubit} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Apply a 2x2 unitary to `target`: the state becomes
    /// (I ⊗ ... ⊗ u ⊗ ... ⊗ I)|ψ⟩ in little-endian ordering.
    pub fn apply_1q(&mut self, u: &GateMatrix, target: usize) -> Result<&mut Self> {
        if u.dim() != 2 {
            return Err(Error::Size(format!(
                "apply_1q needs a 2x2 gate, got {}x{}",
                u.dim(),
                u.dim()
            )));
        }
        self.check_qubit(target)?;
        let (u00, u01, u10, u11) = (u.entry(0, 0), u.entry(0, 1), u.entry(1, 0), u.entry(1, 1));
        let step = 1usize << target;
        for base in (0..self.amps.len()).step_by(2 * step) {
            for offset in 0..step {
                let i0 = base + offset;
                let i1 = i0 | step;
                let a = self.amps[i0];
                let b = self.amps[i1];
                self.amps[i0] = u00 * a + u01 * b;
                self.amps[i1] = u10 * a + u11 * b;
            }
        }
        Ok(self)
    }

    /// Apply a 2x2 unitary to `target` within the subspace where `control`
    /// is |1⟩ (or |0⟩ when `control_on_zero`).
    pub fn apply_controlled(
        &mut self,
        u: &GateMatrix,
        control: usize,
        target: usize,
        control_on_zero: bool,
    ) -> Result<&mut Self> {
        if u.dim() != 2 {
            return Err(Error::Size(format!(
                "apply_controlled needs a 2x2 gate, got {}x{}",
                u.dim(),
                u.dim()
            )));
        }
        self.check_qubit(target)?;
        self.check_qubit(control)?;
        if control == target {
            return Err(Error::Index(format!(
                "control and target must differ, both are {control}"
            )));
        }
        let (u00, u01, u10, u11) = (u.entry(0, 0), u.entry(0, 1), u.entry(1, 0), u.entry(1, 1));
        let tmask = 1usize << target;
        let cmask = 1usize << control;
        let active = if control_on_zero { 0 } else { cmask };
        for i0 in 0..self.amps.len() {
            if i0 & tmask != 0 || i0 & cmask != active {
                continue;
            }
            let i1 = i0 | tmask;
            let a = self.amps[i0];
            let b = self.amps[i1];
            self.amps[i0] = u00 * a + u01 * b;
            self.amps[i1] = u10 * a + u11 * b;
        }
        Ok(self)
    }

    /// Apply a 2^k x 2^k unitary on the listed qubits' joint subspace.
    /// `qubits[0]` is the least-significant bit of the gate's index.
    pub fn apply_dense(&mut self, u: &GateMatrix, qubits: &[usize]) -> Result<&mut Self> {
        let k = qubits.len();
        if u.dim() != (1 << k) {
            return Err(Error::Size(format!(
                "gate of dimension {} does not act on {} qubits",
                u.dim(),
                k
            )));
        }
        if k > self.n_qubits {
            return Err(Error::Size(format!(
                "gate spans {k} qubits but the state has only {}",
                self.n_qubits
            )));
        }
        for (pos, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..pos].contains(&q) {
                return Err(Error::Index(format!("duplicate qubit index {q}")));
            }
        }
        let gate_dim = 1usize << k;
        let outer_mask: usize = {
            let mut m = (1usize << self.n_qubits) - 1;
            for &q in qubits {
                m &= !(1usize << q);
            }
            m
        };
        let m = u.matrix();
        let mut scratch = vec![ZERO; gate_dim];
        // Iterate over every assignment of the non-gate qubits.
        let mut base = 0usize;
        loop {
            // Gather, multiply, scatter the 2^k-dimensional slice.
            for sub in 0..gate_dim {
                let mut idx = base;
                for (pos, &q) in qubits.iter().enumerate() {
                    if sub >> pos & 1 == 1 {
                        idx |= 1 << q;
                    }
                }
                scratch[sub] = self.amps[idx];
            }
            for row in 0..gate_dim {
                let mut acc = ZERO;
                for (col, s) in scratch.iter().enumerate() {
                    acc += m[(row, col)] * s;
                }
                let mut idx = base;
                for (pos, &q) in qubits.iter().enumerate() {
                    if row >> pos & 1 == 1 {
                        idx |= 1 << q;
                    }
                }
                self.amps[idx] = acc;
            }
            // Next subset of the outer mask (standard bit trick).
            if base == outer_mask {
                break;
            }
            base = (base.wrapping_sub(outer_mask)) & outer_mask;
        }
        Ok(self)
    }

    /// ⟨ψ|X_qubit|ψ⟩, a real number in [-1, 1].
    pub fn expectation_x(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let mut acc = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == 0 {
                // conj(a_i) a_{i|mask} + conj(a_{i|mask}) a_i = 2 Re(...)
                acc += 2.0 * (a.conj() * self.amps[i | mask]).re;
            }
        }
        Ok(acc)
    }

    /// ⟨self|other⟩.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Size(format!(
                "inner product of {}- and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Extend the register with one fresh |0⟩ qubit at the highest index.
    pub fn with_ancilla(&self) -> Result<StateVector> {
        if self.n_qubits + 1 > MAX_QUBITS {
            return Err(Error::Size(format!(
                "cannot grow beyond {MAX_QUBITS} qubits"
            )));
        }
        let mut amps = vec![ZERO; self.amps.len() * 2];
        amps[..self.amps.len()].copy_from_slice(&self.amps);
        Ok(StateVector {
            n_qubits: self.n_qubits + 1,
            amps,
        })
    }
}
