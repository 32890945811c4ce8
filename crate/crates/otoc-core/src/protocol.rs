//! The ancilla-controlled interferometric circuit: prepares the branch
//! state (V W_t |ψ⟩)|0⟩_c + (W_t V |ψ⟩)|1⟩_c (normalized) so the ancilla's
//! X expectation equals Re[F].
//!
//! Schedule: H on the control, controlled-V on the |1⟩ branch, W_t applied
//! unconditionally, anti-controlled-V on the |0⟩ branch. Only V ever runs
//! under a control, so controlled time evolution is never needed. Compiled
//! circuits applied under the control get their reported global phase
//! compensated with U1 on the control, because a controlled application
//! promotes global phase to relative phase.
//!
//! The control qubit is the highest index (system qubits keep indices
//! 0..n-1). Backward evolution U(-t) is exact in simulation; no dissipative
//! asymmetry is modeled between forward and backward evolution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{doubly_controlled_1q_ops, Circuit, Op, OpKind};
use crate::compiler::{compile_unitary, CompiledUnitary};
use crate::error::{Error, Result};
use crate::gates::GateMatrix;
use crate::hamiltonian::{
    build_hamiltonian, exact_evolution, trotterized_evolution, HamiltonianSpec, TrotterPlan,
};
use crate::linalg::CMatrix;
use crate::state::StateVector;

pub const DEFAULT_BUTTERFLY_PHASE: f64 = std::f64::consts::FRAC_PI_4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMode {
    /// U(t) from the eigendecomposition oracle, compiled to gates.
    ExactOracle,
    /// First-order Trotter circuit with the given step count.
    Trotter { steps: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// |00⟩: both atoms in the ground state.
    Product00,
    /// (|01⟩ + |10⟩)/√2 via X, H, CNOT under the Rydberg blockade.
    BellBlockade,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub hamiltonian: HamiltonianSpec,
    pub time: f64,
    pub evolution: EvolutionMode,
    pub initial_state: InitialState,
    /// φ in V = exp(-i φ S_Z); the paper sets φ = π/4 and V = W.
    pub butterfly_phase: f64,
}

impl ProtocolConfig {
    pub fn new(hamiltonian: HamiltonianSpec, time: f64) -> Result<Self> {
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::Argument(format!(
                "protocol time must be finite and >= 0, got {time}"
            )));
        }
        Ok(Self {
            hamiltonian,
            time,
            evolution: EvolutionMode::ExactOracle,
            initial_state: InitialState::Product00,
            butterfly_phase: DEFAULT_BUTTERFLY_PHASE,
        })
    }

    /// Defaults at t = 0: exact oracle, product state, φ = π/4.
    pub fn paper_default() -> Self {
        Self::new(HamiltonianSpec::paper_default(), 0.0).expect("defaults are valid")
    }

    pub fn at_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn with_evolution(mut self, evolution: EvolutionMode) -> Self {
        self.evolution = evolution;
        self
    }

    pub fn with_initial_state(mut self, initial_state: InitialState) -> Self {
        self.initial_state = initial_state;
        self
    }

    pub fn with_butterfly_phase(mut self, phase: f64) -> Self {
        self.butterfly_phase = phase;
        self
    }

    pub fn n_system(&self) -> usize {
        self.hamiltonian.n_spins()
    }

    /// Index of the interferometric ancilla.
    pub fn control_qubit(&self) -> usize {
        self.n_system()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Err(Error::Argument(format!(
                "protocol time must be finite and >= 0, got {}",
                self.time
            )));
        }
        if let EvolutionMode::Trotter { steps } = self.evolution {
            if steps == 0 {
                return Err(Error::Argument("trotter steps must be >= 1".into()));
            }
        }
        if !self.butterfly_phase.is_finite() {
            return Err(Error::Argument("butterfly phase must be finite".into()));
        }
        if self.initial_state == InitialState::BellBlockade && self.n_system() != 2 {
            return Err(Error::Capability(
                "the blockade Bell preparation is defined for 2 system qubits".into(),
            ));
        }
        Ok(())
    }
}

/// Gate sequence preparing the chosen initial state from |0...0⟩.
///
/// The blockade Bell pair follows the paper's recipe: X on qubit 0, H on
/// qubit 1, then CNOT with qubit 1 as control and qubit 0 as target,
/// landing on (|01⟩ + |10⟩)/√2 with zero |11⟩ population.
pub fn prepare_circuit(kind: InitialState, n_system: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n_system);
    match kind {
        InitialState::Product00 => {}
        InitialState::BellBlockade => {
            if n_system != 2 {
                return Err(Error::Capability(
                    "the blockade Bell preparation is defined for 2 system qubits".into(),
                ));
            }
            c.push(Op::x(0))?;
            c.push(Op::h(1))?;
            c.push(Op::cnot(1, 0))?;
        }
    }
    Ok(c)
}

pub fn prepare_initial(kind: InitialState, n_system: usize) -> Result<StateVector> {
    let mut state = StateVector::zero(n_system)?;
    prepare_circuit(kind, n_system)?.apply_to(&mut state)?;
    Ok(state)
}

/// The butterfly operator V = exp(-i·phase·S_Z) with S_Z = Σᵢ σzⁱ:
/// diagonal with entry exp(-i·phase·(n - 2·popcount)) on each basis state.
pub fn butterfly_operator(phase: f64, n_spins: usize) -> GateMatrix {
    let dim = 1usize << n_spins;
    let mut m = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        let sz = n_spins as i32 - 2 * (b.count_ones() as i32);
        m[(b, b)] = Complex64::from_polar(1.0, -phase * f64::from(sz));
    }
    GateMatrix::new(m).expect("diagonal phases are unitary")
}

/// Lift every op of a system circuit under one extra (positive) control,
/// staying inside the closed gate set.
pub fn controlled_circuit_ops(inner: &Circuit, control: usize) -> Result<Vec<Op>> {
    let mut ops = Vec::new();
    for op in inner.ops() {
        match op.kind {
            OpKind::X => ops.push(Op::cnot(control, op.targets[0])),
            OpKind::H => ops.push(Op::cu3(
                std::f64::consts::FRAC_PI_2,
                0.0,
                std::f64::consts::PI,
                control,
                op.targets[0],
            )),
            OpKind::U1 => ops.push(Op::cu1(op.params[0], control, op.targets[0])),
            OpKind::U3 => ops.push(Op::cu3(
                op.params[0],
                op.params[1],
                op.params[2],
                control,
                op.targets[0],
            )),
            OpKind::Cnot | OpKind::Cu1 | OpKind::Cu3 | OpKind::Cphase => {
                let u = op.target_matrix().expect("controlled gate has a matrix");
                let inner_ctrl = op.controls[0];
                // An anti-controlled inner op fires on |0⟩: conjugate that
                // qubit with X so the doubly-controlled core sees |1⟩.
                if op.control_on_zero {
                    ops.push(Op::x(inner_ctrl));
                }
                ops.extend(doubly_controlled_1q_ops(
                    u.matrix(),
                    control,
                    inner_ctrl,
                    op.targets[0],
                ));
                if op.control_on_zero {
                    ops.push(Op::x(inner_ctrl));
                }
            }
            OpKind::Barrier => ops.push(op.clone()),
            OpKind::Measure => {
                return Err(Error::Capability(
                    "cannot apply a measurement under a control".into(),
                ))
            }
        }
    }
    Ok(ops)
}

/// Controlled (or anti-controlled) application of a compiled unitary with
/// its global phase compensated on the control, so the branch receives the
/// target unitary exactly.
fn compensated_controlled_ops(
    compiled: &CompiledUnitary,
    control: usize,
    control_on_zero: bool,
) -> Result<Vec<Op>> {
    let mut ops = Vec::new();
    if control_on_zero {
        ops.push(Op::x(control));
    }
    ops.extend(controlled_circuit_ops(&compiled.circuit, control)?);
    // circuit ≈ e^{iα}·target: undo α on the active branch.
    if compiled.global_phase.abs() > 1e-15 {
        ops.push(Op::u1(-compiled.global_phase, control));
    }
    if control_on_zero {
        ops.push(Op::x(control));
    }
    Ok(ops)
}

/// The W_t = U(-t)·W·U(t) segment, applied unconditionally to the system.
fn heisenberg_ops(cfg: &ProtocolConfig, w: &GateMatrix) -> Result<Circuit> {
    let n = cfg.n_system();
    let mut seg = Circuit::new(n);
    let compiled_w = compile_unitary(w, n)?;
    match cfg.evolution {
        EvolutionMode::ExactOracle => {
            let h = build_hamiltonian(&cfg.hamiltonian);
            let fwd = compile_unitary(&exact_evolution(&h, cfg.time)?, n)?;
            let bwd = compile_unitary(&exact_evolution(&h, -cfg.time)?, n)?;
            seg.append(&fwd.circuit)?;
            seg.append(&compiled_w.circuit)?;
            seg.append(&bwd.circuit)?;
        }
        EvolutionMode::Trotter { steps } => {
            let fwd = trotterized_evolution(&cfg.hamiltonian, &TrotterPlan::new(cfg.time, steps)?)?;
            let bwd =
                trotterized_evolution(&cfg.hamiltonian, &TrotterPlan::new(-cfg.time, steps)?)?;
            seg.append(&fwd)?;
            seg.append(&compiled_w.circuit)?;
            seg.append(&bwd)?;
        }
    }
    Ok(seg)
}

/// Build the interferometric circuit for distinct V and W. The circuit
/// acts on n_system + 1 qubits and expects |ψ_s⟩ ⊗ |0⟩_c as input.
pub fn build_protocol_circuit_with(
    cfg: &ProtocolConfig,
    v: &GateMatrix,
    w: &GateMatrix,
) -> Result<Circuit> {
    cfg.validate()?;
    let n = cfg.n_system();
    let control = cfg.control_qubit();
    let compiled_v = compile_unitary(v, n)?;

    let mut circuit = Circuit::new(n + 1);
    circuit.push(Op::h(control))?;
    circuit.push_all(compensated_controlled_ops(&compiled_v, control, false)?)?;
    circuit.append(&heisenberg_ops(cfg, w)?)?;
    circuit.push_all(compensated_controlled_ops(&compiled_v, control, true)?)?;
    Ok(circuit)
}

/// The paper's circuit: V = W = exp(-i φ S_Z).
pub fn build_protocol_circuit(cfg: &ProtocolConfig) -> Result<Circuit> {
    let v = butterfly_operator(cfg.butterfly_phase, cfg.n_system());
    build_protocol_circuit_with(cfg, &v, &v)
}

/// The joint system+control state after the protocol circuit; Eq.-4-shaped
/// by construction.
#[derive(Debug, Clone)]
pub struct BranchState {
    joint: StateVector,
    control: usize,
}

impl BranchState {
    pub fn joint(&self) -> &StateVector {
        &self.joint
    }

    pub fn control_index(&self) -> usize {
        self.control
    }

    /// Unnormalized system amplitudes on the branch where the control reads
    /// `bit` (each branch carries norm 1/√2).
    pub fn project_control(&self, bit: u8) -> Vec<Complex64> {
        let mask = 1usize << self.control;
        self.joint
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| ((i & mask != 0) as u8) == bit)
            .map(|(_, a)| *a)
            .collect()
    }

    /// ⟨X⟩ of the control qubit = Re[F], clamped to [-1, 1] to keep
    /// rounding at the last bit from leaking out of the physical range.
    pub fn control_expectation_x(&self) -> f64 {
        self.joint
            .expectation_x(self.control)
            .expect("control index is valid")
            .clamp(-1.0, 1.0)
    }
}

/// Run the protocol circuit on the configured initial state.
pub fn branch_state(cfg: &ProtocolConfig) -> Result<BranchState> {
    let circuit = build_protocol_circuit(cfg)?;
    let mut joint = prepare_initial(cfg.initial_state, cfg.n_system())?.with_ancilla()?;
    circuit.apply_to(&mut joint)?;
    Ok(BranchState {
        joint,
        control: cfg.control_qubit(),
    })
}

/// Simulate the circuit exactly and return ⟨X⟩ of the control ∈ [-1, 1].
pub fn run_protocol(cfg: &ProtocolConfig) -> Result<f64> {
    Ok(branch_state(cfg)?.control_expectation_x())
}
