//! Gate-level circuits over the closed op set {X, H, CNOT, U1, U3, CU1, CU3,
//! CPHASE} plus anti-controlled variants, and the statevector interpreter.
//!
//! `Barrier` and `Measure` exist so parsed QASM documents round-trip; the
//! interpreter treats barriers as no-ops and refuses measures (sampling is
//! the noise module's job).

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{self, sqrt_2x2_unitary, zy_params, GateMatrix};
use crate::linalg::CMatrix;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpKind {
    X,
    H,
    Cnot,
    U1,
    U3,
    Cu1,
    Cu3,
    Cphase,
    Barrier,
    Measure,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            OpKind::X => "x",
            OpKind::H => "h",
            OpKind::Cnot => "cx",
            OpKind::U1 => "u1",
            OpKind::U3 => "u3",
            OpKind::Cu1 => "cu1",
            OpKind::Cu3 => "cu3",
            OpKind::Cphase => "cphase",
            OpKind::Barrier => "barrier",
            OpKind::Measure => "measure",
        };
        f.write_str(name)
    }
}

impl OpKind {
    pub fn n_params(&self) -> usize {
        match self {
            OpKind::U1 | OpKind::Cu1 | OpKind::Cphase => 1,
            OpKind::U3 | OpKind::Cu3 => 3,
            _ => 0,
        }
    }

    pub fn has_control(&self) -> bool {
        matches!(
            self,
            OpKind::Cnot | OpKind::Cu1 | OpKind::Cu3 | OpKind::Cphase
        )
    }
}

/// One gate application. For `Measure`, `targets` is `[qubit, classical_bit]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Op {
    pub kind: OpKind,
    pub params: Vec<f64>,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
    /// Anti-control wrapper: the op fires when the control reads |0⟩.
    pub control_on_zero: bool,
}

impl Op {
    fn gate(kind: OpKind, params: Vec<f64>, controls: Vec<usize>, targets: Vec<usize>) -> Op {
        Op {
            kind,
            params,
            controls,
            targets,
            control_on_zero: false,
        }
    }

    pub fn x(q: usize) -> Op {
        Op::gate(OpKind::X, vec![], vec![], vec![q])
    }

    pub fn h(q: usize) -> Op {
        Op::gate(OpKind::H, vec![], vec![], vec![q])
    }

    pub fn cnot(control: usize, target: usize) -> Op {
        Op::gate(OpKind::Cnot, vec![], vec![control], vec![target])
    }

    pub fn u1(lambda: f64, q: usize) -> Op {
        Op::gate(OpKind::U1, vec![lambda], vec![], vec![q])
    }

    pub fn u3(theta: f64, phi: f64, lambda: f64, q: usize) -> Op {
        Op::gate(OpKind::U3, vec![theta, phi, lambda], vec![], vec![q])
    }

    pub fn cu1(lambda: f64, control: usize, target: usize) -> Op {
        Op::gate(OpKind::Cu1, vec![lambda], vec![control], vec![target])
    }

    pub fn cu3(theta: f64, phi: f64, lambda: f64, control: usize, target: usize) -> Op {
        Op::gate(
            OpKind::Cu3,
            vec![theta, phi, lambda],
            vec![control],
            vec![target],
        )
    }

    pub fn cphase(lambda: f64, control: usize, target: usize) -> Op {
        Op::gate(OpKind::Cphase, vec![lambda], vec![control], vec![target])
    }

    pub fn barrier(qubits: Vec<usize>) -> Op {
        Op::gate(OpKind::Barrier, vec![], vec![], qubits)
    }

    pub fn measure(qubit: usize, cbit: usize) -> Op {
        Op::gate(OpKind::Measure, vec![], vec![], vec![qubit, cbit])
    }

    /// Anti-control variant: fires when the control reads |0⟩.
    pub fn anti(mut self) -> Op {
        self.control_on_zero = true;
        self
    }

    /// The 2x2 matrix a single-target gate applies (controlled or not).
    pub(crate) fn target_matrix(&self) -> Option<GateMatrix> {
        match self.kind {
            OpKind::X | OpKind::Cnot => Some(gates::x()),
            OpKind::H => Some(gates::h()),
            OpKind::U1 | OpKind::Cu1 | OpKind::Cphase => Some(gates::u1(self.params[0])),
            OpKind::U3 | OpKind::Cu3 => {
                Some(gates::u3(self.params[0], self.params[1], self.params[2]))
            }
            OpKind::Barrier | OpKind::Measure => None,
        }
    }
}

/// Ordered list of gate applications on a fixed-width register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Validate and append an op.
    pub fn push(&mut self, op: Op) -> Result<()> {
        if op.params.len() != op.kind.n_params() {
            return Err(Error::Argument(format!(
                "{} takes {} parameter(s), got {}",
                op.kind,
                op.kind.n_params(),
                op.params.len()
            )));
        }
        if op.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Argument(format!("{} has a non-finite angle", op.kind)));
        }
        let want_controls = usize::from(op.kind.has_control());
        if op.controls.len() != want_controls {
            return Err(Error::Argument(format!(
                "{} takes {} control(s), got {}",
                op.kind,
                want_controls,
                op.controls.len()
            )));
        }
        if op.control_on_zero && !op.kind.has_control() {
            return Err(Error::Argument(format!(
                "{} has no control to anti-wrap",
                op.kind
            )));
        }
        let want_targets = match op.kind {
            OpKind::Barrier => op.targets.len().max(1),
            OpKind::Measure => 2,
            _ => 1,
        };
        if op.targets.len() != want_targets || op.targets.is_empty() {
            return Err(Error::Argument(format!(
                "{} has a malformed target list {:?}",
                op.kind, op.targets
            )));
        }
        for &q in op.controls.iter().chain(op.targets.iter()) {
            if q >= self.n_qubits {
                return Err(Error::Index(format!(
                    "qubit {q} out of range for a {}-qubit circuit",
                    self.n_qubits
                )));
            }
        }
        for &c in &op.controls {
            if op.targets.contains(&c) {
                return Err(Error::Index(format!(
                    "control {c} collides with the target list"
                )));
            }
        }
        if op.kind == OpKind::Barrier {
            let mut seen = op.targets.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != op.targets.len() {
                return Err(Error::Index("duplicate qubit in barrier".into()));
            }
        }
        self.ops.push(op);
        Ok(())
    }

    pub fn push_all(&mut self, ops: impl IntoIterator<Item = Op>) -> Result<()> {
        for op in ops {
            self.push(op)?;
        }
        Ok(())
    }

    /// Append another circuit's ops; the other circuit may act on a prefix
    /// of this register.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::Size(format!(
                "cannot append a {}-qubit circuit to a {}-qubit one",
                other.n_qubits, self.n_qubits
            )));
        }
        self.push_all(other.ops.iter().cloned())
    }

    /// Run the circuit on a state. Barriers are no-ops; measures are
    /// rejected (sampling lives in the noise module).
    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Size(format!(
                "{}-qubit circuit applied to a {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        for op in &self.ops {
            apply_op(op, state)?;
        }
        Ok(())
    }

    /// Reconstruct the circuit's full 2^n x 2^n matrix by applying it to
    /// every basis state.
    pub fn unitary(&self) -> Result<CMatrix> {
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[col] = Complex64::new(1.0, 0.0);
            let mut state = StateVector::from_amplitudes(amps)?;
            self.apply_to(&mut state)?;
            for (row, a) in state.amplitudes().iter().enumerate() {
                m[(row, col)] = *a;
            }
        }
        Ok(m)
    }
}

pub(crate) fn apply_op(op: &Op, state: &mut StateVector) -> Result<()> {
    match op.kind {
        OpKind::Barrier => Ok(()),
        OpKind::Measure => Err(Error::Capability(
            "measure is not a statevector operation; use the noise module's samplers".into(),
        )),
        _ => {
            let u = op.target_matrix().expect("gate op has a matrix");
            if op.kind.has_control() {
                state.apply_controlled(&u, op.controls[0], op.targets[0], op.control_on_zero)?;
            } else {
                state.apply_1q(&u, op.targets[0])?;
            }
            Ok(())
        }
    }
}

/// Ops applying an arbitrary 2x2 unitary on `target` under one control,
/// exactly (the unitary's global phase is pushed onto the control as U1).
pub fn controlled_1q_ops(u: &CMatrix, control: usize, target: usize) -> Vec<Op> {
    let (delta, p) = zy_params(u);
    let mut ops = vec![Op::cu3(p.theta, p.phi, p.lambda, control, target)];
    if delta.abs() > 0.0 {
        ops.push(Op::u1(delta, control));
    }
    ops
}

/// Ops applying an arbitrary 2x2 unitary on `target` under two controls,
/// exactly, using the square-root construction
/// `CU(c2,S) CX(c1,c2) CU(c2,S†) CX(c1,c2) CU(c1,S)` with `S² = u`.
pub fn doubly_controlled_1q_ops(u: &CMatrix, c1: usize, c2: usize, target: usize) -> Vec<Op> {
    let s = sqrt_2x2_unitary(u);
    let s_dag = s.adjoint();
    let mut ops = controlled_1q_ops(&s, c2, target);
    ops.push(Op::cnot(c1, c2));
    ops.extend(controlled_1q_ops(&s_dag, c2, target));
    ops.push(Op::cnot(c1, c2));
    ops.extend(controlled_1q_ops(&s, c1, target));
    ops
}

/// Ops applying a 2x2 unitary under any number of controls; recursive
/// square-root construction (gate count grows exponentially in the control
/// count, which is fine for the register sizes this crate targets).
pub fn multi_controlled_1q_ops(u: &CMatrix, controls: &[usize], target: usize) -> Vec<Op> {
    match controls {
        [] => {
            let (delta, p) = zy_params(u);
            // An uncontrolled gate cannot express δ; callers that care about
            // global phase track it separately (see compile_unitary).
            let _ = delta;
            vec![Op::u3(p.theta, p.phi, p.lambda, target)]
        }
        [c] => controlled_1q_ops(u, *c, target),
        [c1, c2] => doubly_controlled_1q_ops(u, *c1, *c2, target),
        [rest @ .., last] => {
            let s = sqrt_2x2_unitary(u);
            let s_dag = s.adjoint();
            let mut ops = controlled_1q_ops(&s, *last, target);
            ops.extend(multi_controlled_x_ops(rest, *last));
            ops.extend(controlled_1q_ops(&s_dag, *last, target));
            ops.extend(multi_controlled_x_ops(rest, *last));
            ops.extend(multi_controlled_1q_ops(&s, rest, target));
            ops
        }
    }
}

/// X on `target` under any number of controls.
pub fn multi_controlled_x_ops(controls: &[usize], target: usize) -> Vec<Op> {
    match controls {
        [] => vec![Op::x(target)],
        [c] => vec![Op::cnot(*c, target)],
        _ => multi_controlled_1q_ops(gates::x().matrix(), controls, target),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist_up_to_phase, identity, max_abs_diff, random_unitary};
    use std::f64::consts::PI;

    fn op_unitary(n_qubits: usize, ops: Vec<Op>) -> CMatrix {
        let mut c = Circuit::new(n_qubits);
        c.push_all(ops).unwrap();
        c.unitary().unwrap()
    }

    #[test]
    fn push_validates() {
        let mut c = Circuit::new(2);
        assert!(c.push(Op::x(0)).is_ok());
        assert!(matches!(c.push(Op::x(2)), Err(Error::Index(_))));
        assert!(matches!(c.push(Op::cnot(1, 1)), Err(Error::Index(_))));
        assert!(matches!(
            c.push(Op::u1(f64::INFINITY, 0)),
            Err(Error::Argument(_))
        ));
        assert!(matches!(c.push(Op::x(0).anti()), Err(Error::Argument(_))));
    }

    #[test]
    fn circuit_unitary_of_cnot() {
        let m = op_unitary(2, vec![Op::cnot(1, 0)]);
        assert!(max_abs_diff(&m, gates::cnot().matrix()) < 1e-14);
    }

    #[test]
    fn anti_control_equals_x_conjugation() {
        // anti-CNOT == X(control) CNOT X(control)
        let anti = op_unitary(2, vec![Op::cnot(1, 0).anti()]);
        let conj = op_unitary(2, vec![Op::x(1), Op::cnot(1, 0), Op::x(1)]);
        assert!(max_abs_diff(&anti, &conj) < 1e-14);
    }

    #[test]
    fn cphase_matches_cu1() {
        let a = op_unitary(2, vec![Op::cphase(0.9, 0, 1)]);
        let b = op_unitary(2, vec![Op::cu1(0.9, 0, 1)]);
        assert!(max_abs_diff(&a, &b) < 1e-15);
    }

    #[test]
    fn controlled_1q_ops_exact_including_phase() {
        for seed in 0..10 {
            let u = random_unitary(2, 300 + seed);
            let got = op_unitary(2, controlled_1q_ops(&u, 1, 0));
            let mut want = identity(4);
            for r in 0..2 {
                for c in 0..2 {
                    want[(2 + r, 2 + c)] = u[(r, c)];
                }
            }
            // Exact, not just projective: phases matter under a control.
            assert!(max_abs_diff(&got, &want) < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn doubly_controlled_ops_exact() {
        for seed in 0..6 {
            let u = random_unitary(2, 400 + seed);
            let got = op_unitary(3, doubly_controlled_1q_ops(&u, 2, 1, 0));
            let mut want = identity(8);
            for r in 0..2 {
                for c in 0..2 {
                    want[(6 + r, 6 + c)] = u[(r, c)];
                }
            }
            assert!(max_abs_diff(&got, &want) < 1e-10, "seed {seed}");
        }
        // Toffoli special case.
        let got = op_unitary(3, multi_controlled_x_ops(&[2, 1], 0));
        let mut want = identity(8);
        want[(6, 6)] = Complex64::new(0.0, 0.0);
        want[(7, 7)] = Complex64::new(0.0, 0.0);
        want[(6, 7)] = Complex64::new(1.0, 0.0);
        want[(7, 6)] = Complex64::new(1.0, 0.0);
        assert!(max_abs_diff(&got, &want) < 1e-10);
    }

    #[test]
    fn triply_controlled_ops_exact() {
        let u = random_unitary(2, 555);
        let got = op_unitary(4, multi_controlled_1q_ops(&u, &[3, 2, 1], 0));
        let mut want = identity(16);
        for r in 0..2 {
            for c in 0..2 {
                want[(14 + r, 14 + c)] = u[(r, c)];
            }
        }
        assert!(max_abs_diff(&got, &want) < 1e-9);
    }

    #[test]
    fn uncontrolled_lowering_is_projective() {
        let u = random_unitary(2, 777);
        let got = op_unitary(1, multi_controlled_1q_ops(&u, &[], 0));
        assert!(dist_up_to_phase(&got, &u) < 1e-10);
    }

    #[test]
    fn controlled_h_via_cu3() {
        let got = op_unitary(2, vec![Op::cu3(PI / 2.0, 0.0, PI, 1, 0)]);
        let want = gates::controlled(&gates::h()).unwrap();
        assert!(max_abs_diff(&got, want.matrix()) < 1e-12);
    }

    #[test]
    fn measure_rejected_by_interpreter() {
        let mut c = Circuit::new(1);
        c.push(Op::measure(0, 0)).unwrap();
        let mut s = StateVector::zero(1).unwrap();
        assert!(matches!(c.apply_to(&mut s), Err(Error::Capability(_))));
    }

    #[test]
    fn barrier_is_noop() {
        let mut c = Circuit::new(2);
        c.push(Op::h(0)).unwrap();
        c.push(Op::barrier(vec![0, 1])).unwrap();
        c.push(Op::h(0)).unwrap();
        assert!(max_abs_diff(&c.unitary().unwrap(), &identity(4)) < 1e-12);
    }
}
