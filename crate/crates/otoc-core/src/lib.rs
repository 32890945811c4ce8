//! Statevector simulation of the interferometric protocol for measuring
//! out-of-time-ordered correlators (OTOCs) in a two-spin Ising model for
//! Rydberg atoms.
//!
//! The pieces, bottom to top:
//!
//! * [`state`] — dense complex statevector with bitmask gate kernels;
//! * [`gates`] — the X/H/CNOT/U1/U3 gate set and controlled wrappers;
//! * [`circuit`] — the closed op set, interpreter and matrix reconstruction;
//! * [`hamiltonian`] — the Rydberg–Ising Hamiltonian, the eigendecomposition
//!   evolution oracle, and first-order Trotter circuits;
//! * [`compiler`] — two-level decomposition routed by Gray codes into
//!   CNOT + single-qubit gates;
//! * [`protocol`] — the ancilla-controlled interferometric circuit whose
//!   control-qubit ⟨X⟩ equals Re[F];
//! * [`otoc`] — exact OTOC analysis, the commutator identity, scrambling
//!   time, and time sweeps;
//! * [`noise`] — shot sampling plus readout and depolarizing channels from
//!   the ibmqx4 device table;
//! * [`qasm`] — OpenQASM 2.0 emission and subset parsing;
//! * [`config`] — the flat key-value run configuration.
//!
//! Conventions: little-endian qubit ordering (qubit 0 is the least
//! significant basis-index bit); the interferometric ancilla is the
//! highest-index qubit; ħΩ = 1 and V₁₂ = 1 by default so the sweep axis
//! V₁₂·t equals t.

pub mod circuit;
pub mod compiler;
pub mod config;
pub mod error;
pub mod gates;
pub mod hamiltonian;
pub mod linalg;
pub mod noise;
pub mod otoc;
pub mod protocol;
pub mod qasm;
pub mod state;

pub use circuit::{Circuit, Op, OpKind};
pub use compiler::{
    compile_two_level, compile_unitary, gray_path, two_level_decompose, CompiledUnitary,
    GrayPath, TwoLevelFactor,
};
pub use config::{parse_config, Config};
pub use error::{Error, Result};
pub use gates::{controlled, GateMatrix, GateParams};
pub use hamiltonian::{
    build_hamiltonian, exact_evolution, trotter_step_circuit, trotterized_evolution,
    HamiltonianSpec, InteractionForm, TrotterPlan,
};
pub use noise::{
    apply_readout_error, run_protocol_noisy, sample_shots, table1_noise_model,
    MeasurementBasis, NoiseModel, ShotCounts,
};
pub use otoc::{
    commutator_magnitude, otoc_exact, otoc_exact_overlap, scrambling_time, sweep, sweep_to_csv,
    OtocPoint, OtocSweep, Provenance,
};
pub use protocol::{
    build_protocol_circuit, butterfly_operator, prepare_circuit, prepare_initial, run_protocol,
    BranchState, EvolutionMode, InitialState, ProtocolConfig,
};
pub use qasm::{emit_qasm, lower_for_emission, parse_qasm, QasmDocument};
pub use state::StateVector;
