//! The Ising model for Rydberg atoms: Hamiltonian construction, the exact
//! time-evolution oracle, and first-order Trotter circuits.
//!
//! Units: ħΩ = 1 defines the energy scale, and the default coupling is
//! V₁₂ = 1 so the sweep axis V₁₂·t equals t directly. The van der Waals
//! form V_ij = C/R_ij is background only; this type stores coupling values
//! directly and nothing consumes C or R_ij.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Op};
use crate::error::{Error, Result};
use crate::gates::GateMatrix;
use crate::linalg::{c64, embed_1q, hermiticity_deviation, CMatrix, ONE, ZERO};

pub const HERMITICITY_TOL: f64 = 1e-10;

/// Which two-body interaction enters the Hamiltonian.
///
/// `PauliZz` is the form the paper's gate circuits realize
/// (V₁₂ σz¹σz²); `NumberOperator` is the abstract n̂ᵢn̂ⱼ form. The two
/// differ only by terms diagonal in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionForm {
    NumberOperator,
    PauliZz,
}

/// Parameters of H = ħΩ Σᵢ σxⁱ + Σ_{i<j} V_ij (interaction term).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    n_spins: usize,
    omega: f64,
    /// Symmetric coupling matrix with zero diagonal, entries >= 0
    /// (repulsive van der Waals).
    v_couplings: DMatrix<f64>,
    interaction_form: InteractionForm,
}

impl HamiltonianSpec {
    pub fn new(
        omega: f64,
        v_couplings: DMatrix<f64>,
        interaction_form: InteractionForm,
    ) -> Result<Self> {
        let n_spins = v_couplings.nrows();
        if n_spins == 0 || v_couplings.ncols() != n_spins {
            return Err(Error::Size(format!(
                "coupling matrix must be square and non-empty, got {}x{}",
                v_couplings.nrows(),
                v_couplings.ncols()
            )));
        }
        if !omega.is_finite() {
            return Err(Error::Argument("omega must be finite".into()));
        }
        for i in 0..n_spins {
            if v_couplings[(i, i)] != 0.0 {
                return Err(Error::Argument(format!(
                    "coupling diagonal must be zero, V[{i}][{i}] = {}",
                    v_couplings[(i, i)]
                )));
            }
            for j in 0..n_spins {
                let v = v_couplings[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Argument(format!(
                        "couplings must be finite and >= 0, V[{i}][{j}] = {v}"
                    )));
                }
                if (v - v_couplings[(j, i)]).abs() > 0.0 {
                    return Err(Error::Argument("coupling matrix must be symmetric".into()));
                }
            }
        }
        Ok(Self {
            n_spins,
            omega,
            v_couplings,
            interaction_form,
        })
    }

    /// The paper's system: two spins with a single coupling V₁₂.
    pub fn two_spin(omega: f64, v12: f64, interaction_form: InteractionForm) -> Result<Self> {
        let mut v = DMatrix::zeros(2, 2);
        v[(0, 1)] = v12;
        v[(1, 0)] = v12;
        Self::new(omega, v, interaction_form)
    }

    /// Defaults used throughout: ħΩ = 1, V₁₂ = 1, the σzσz form.
    pub fn paper_default() -> Self {
        Self::two_spin(1.0, 1.0, InteractionForm::PauliZz).expect("defaults are valid")
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.v_couplings[(i, j)]
    }

    pub fn interaction_form(&self) -> InteractionForm {
        self.interaction_form
    }

    /// Coupled pairs (i < j) with nonzero V_ij, in lexicographic order.
    pub fn coupled_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.n_spins {
            for j in (i + 1)..self.n_spins {
                if self.v_couplings[(i, j)] != 0.0 {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }
}

fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Rydberg number operator n̂ = (I - σz)/2 = diag(0, 1); |1⟩ is the excited
/// (Rydberg) state.
fn number_op() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE])
}

/// Dense 2^n x 2^n Hamiltonian matrix for the spec. Hermitian by
/// construction (all terms are real symmetric or diagonal).
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> CMatrix {
    let n = spec.n_spins;
    let dim = 1usize << n;
    let mut h = CMatrix::zeros(dim, dim);
    let sx = sigma_x();
    for q in 0..n {
        h += embed_1q(&sx, q, n) * c64(spec.omega, 0.0);
    }
    let pair_op = match spec.interaction_form {
        InteractionForm::PauliZz => sigma_z(),
        InteractionForm::NumberOperator => number_op(),
    };
    for (i, j) in spec.coupled_pairs() {
        let term = embed_1q(&pair_op, i, n) * embed_1q(&pair_op, j, n);
        h += term * c64(spec.v_couplings[(i, j)], 0.0);
    }
    h
}

/// exp(-i h t) via Hermitian eigendecomposition. This is the project's
/// reference oracle: U(0) = I and U(-t) = U(t)† hold to machine precision.
pub fn exact_evolution(h: &CMatrix, t: f64) -> Result<GateMatrix> {
    let deviation = hermiticity_deviation(h);
    if deviation > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: HERMITICITY_TOL,
        });
    }
    let eig = SymmetricEigen::new(h.clone());
    let dim = h.nrows();
    let mut u = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let phase = Complex64::from_polar(1.0, -eig.eigenvalues[k] * t);
        let col = eig.eigenvectors.column(k);
        for r in 0..dim {
            for c in 0..dim {
                u[(r, c)] += phase * col[r] * col[c].conj();
            }
        }
    }
    GateMatrix::new(u)
}

/// One named exponential factor of the Trotter product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermLabel {
    /// e^{-i Ω σxⁱ dt} on spin i.
    TransverseX(usize),
    /// e^{-i V_ij (interaction) dt} on the pair (i, j).
    Coupling(usize, usize),
}

/// Fixed term ordering: H₁ (σx on spin 0), H₂ (σx on spin 1), ..., then
/// coupling terms in lexicographic pair order. The transverse terms commute
/// with each other so only the coupling placement matters; the order is
/// fixed for reproducibility.
pub fn default_term_order(spec: &HamiltonianSpec) -> Vec<TermLabel> {
    let mut order: Vec<TermLabel> = (0..spec.n_spins).map(TermLabel::TransverseX).collect();
    order.extend(
        spec.coupled_pairs()
            .into_iter()
            .map(|(i, j)| TermLabel::Coupling(i, j)),
    );
    order
}

/// First-order Trotter plan: `steps` repetitions of the term product over
/// `total_time`. An empty `term_order` means the default ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub total_time: f64,
    pub steps: u32,
    #[serde(default)]
    pub term_order: Vec<TermLabel>,
}

impl TrotterPlan {
    pub fn new(total_time: f64, steps: u32) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Argument("steps must be >= 1".into()));
        }
        if !total_time.is_finite() {
            return Err(Error::Argument("total_time must be finite".into()));
        }
        Ok(Self {
            total_time,
            steps,
            term_order: Vec::new(),
        })
    }
}

fn push_term(circuit: &mut Circuit, spec: &HamiltonianSpec, term: TermLabel, dt: f64) -> Result<()> {
    match term {
        TermLabel::TransverseX(q) => {
            if q >= spec.n_spins {
                return Err(Error::Index(format!("spin {q} out of range")));
            }
            // e^{-i Ω dt σx} = Rx(2 Ω dt) = u3(2Ωdt, -π/2, π/2), exactly.
            circuit.push(Op::u3(
                2.0 * spec.omega * dt,
                -std::f64::consts::FRAC_PI_2,
                std::f64::consts::FRAC_PI_2,
                q,
            ))
        }
        TermLabel::Coupling(i, j) => {
            if i >= spec.n_spins || j >= spec.n_spins || i == j {
                return Err(Error::Index(format!("bad coupling pair ({i}, {j})")));
            }
            let v = spec.v_couplings[(i, j)];
            match spec.interaction_form {
                InteractionForm::PauliZz => {
                    // CNOT · U1(2 V dt) · CNOT = e^{+iVdt} e^{-i V dt σzσz}:
                    // exact up to a global phase, which cancels inside
                    // W_t = U(-t) W U(t) and is phase-aligned in matrix tests.
                    circuit.push(Op::cnot(i, j))?;
                    circuit.push(Op::u1(2.0 * v * dt, j))?;
                    circuit.push(Op::cnot(i, j))
                }
                InteractionForm::NumberOperator => {
                    // e^{-i V dt n̂n̂} = diag(1,1,1,e^{-iVdt}): one controlled
                    // phase, exact including global phase.
                    circuit.push(Op::cu1(-v * dt, i, j))
                }
            }
        }
    }
}

/// Circuit for one Trotter step e^{-iH₁dt}·e^{-iH₂dt}·... in the default
/// term order. Supported for any spin count via repeated pairwise terms;
/// the paper's system needs n = 2.
pub fn trotter_step_circuit(spec: &HamiltonianSpec, dt: f64) -> Result<Circuit> {
    trotter_step_with_order(spec, dt, &default_term_order(spec))
}

fn trotter_step_with_order(
    spec: &HamiltonianSpec,
    dt: f64,
    order: &[TermLabel],
) -> Result<Circuit> {
    if !dt.is_finite() {
        return Err(Error::Argument("dt must be finite".into()));
    }
    if spec.n_spins > crate::state::MAX_QUBITS {
        return Err(Error::Capability(format!(
            "gate-level path supports at most {} spins",
            crate::state::MAX_QUBITS
        )));
    }
    let mut circuit = Circuit::new(spec.n_spins);
    for &term in order {
        push_term(&mut circuit, spec, term, dt)?;
    }
    Ok(circuit)
}

/// `plan.steps` copies of the single-step circuit at dt = total_time/steps.
/// First-order accurate: halving the step size roughly halves the
/// operator-norm error against the exact oracle.
pub fn trotterized_evolution(spec: &HamiltonianSpec, plan: &TrotterPlan) -> Result<Circuit> {
    if plan.steps == 0 {
        return Err(Error::Argument("steps must be >= 1".into()));
    }
    let order = if plan.term_order.is_empty() {
        default_term_order(spec)
    } else {
        plan.term_order.clone()
    };
    let dt = plan.total_time / f64::from(plan.steps);
    let step = trotter_step_with_order(spec, dt, &order)?;
    let mut circuit = Circuit::new(spec.n_spins);
    for _ in 0..plan.steps {
        circuit.append(&step)?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist_up_to_phase, identity, kron, max_abs_diff};

    fn two_spin_default() -> HamiltonianSpec {
        HamiltonianSpec::paper_default()
    }

    #[test]
    fn spec_validation() {
        assert!(HamiltonianSpec::two_spin(1.0, 1.0, InteractionForm::PauliZz).is_ok());
        assert!(HamiltonianSpec::two_spin(1.0, -0.5, InteractionForm::PauliZz).is_err());
        let mut bad = DMatrix::zeros(2, 2);
        bad[(0, 1)] = 1.0; // asymmetric
        assert!(HamiltonianSpec::new(1.0, bad, InteractionForm::PauliZz).is_err());
        let mut bad_diag = DMatrix::zeros(2, 2);
        bad_diag[(0, 0)] = 1.0;
        assert!(HamiltonianSpec::new(1.0, bad_diag, InteractionForm::PauliZz).is_err());
    }

    #[test]
    fn single_spin_limit_is_sigma_x() {
        let spec =
            HamiltonianSpec::new(1.0, DMatrix::zeros(1, 1), InteractionForm::PauliZz).unwrap();
        let h = build_hamiltonian(&spec);
        assert!(max_abs_diff(&h, &sigma_x()) < 1e-15);
        let eig = SymmetricEigen::new(h);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_zz_is_diagonal() {
        let spec = HamiltonianSpec::two_spin(0.0, 1.0, InteractionForm::PauliZz).unwrap();
        let h = build_hamiltonian(&spec);
        let want = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            ONE, -ONE, -ONE, ONE,
        ]));
        assert!(max_abs_diff(&h, &want) < 1e-15);
    }

    #[test]
    fn default_two_spin_spectrum() {
        // Characteristic polynomial of the explicit 4x4 gives
        // (λ²-1)(λ²-5) = 0, so the spectrum is {-√5, -1, 1, √5}.
        let h = build_hamiltonian(&two_spin_default());
        assert!(hermiticity_deviation(&h) < 1e-12);
        let eig = SymmetricEigen::new(h);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        let want = [-(5f64.sqrt()), -1.0, 1.0, 5f64.sqrt()];
        for (got, want) in vals.iter().zip(want.iter()) {
            assert!((got - want).abs() < 1e-10, "{vals:?}");
        }
    }

    #[test]
    fn interaction_forms_differ_by_diagonal() {
        let zz = build_hamiltonian(&two_spin_default());
        let nn = build_hamiltonian(
            &HamiltonianSpec::two_spin(1.0, 1.0, InteractionForm::NumberOperator).unwrap(),
        );
        let diff = zz - nn;
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    assert!(diff[(r, c)].norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn exact_evolution_at_zero_is_identity() {
        let h = build_hamiltonian(&two_spin_default());
        let u = exact_evolution(&h, 0.0).unwrap();
        assert!(max_abs_diff(u.matrix(), &identity(4)) < 1e-12);
    }

    #[test]
    fn exact_evolution_of_transverse_term_matches_closed_form() {
        // h = σx on qubit 0 alone: U(t) = I ⊗ [[cos t, -i sin t], [-i sin t, cos t]].
        let h = embed_1q(&sigma_x(), 0, 2);
        let t = 0.7;
        let u = exact_evolution(&h, t).unwrap();
        let rx = CMatrix::from_row_slice(
            2,
            2,
            &[
                c64(t.cos(), 0.0),
                c64(0.0, -t.sin()),
                c64(0.0, -t.sin()),
                c64(t.cos(), 0.0),
            ],
        );
        let want = kron(&identity(2), &rx);
        assert!(max_abs_diff(u.matrix(), &want) < 1e-12);
    }

    #[test]
    fn exact_evolution_group_property() {
        let h = build_hamiltonian(&two_spin_default());
        let u1 = exact_evolution(&h, 1.0).unwrap();
        let uh = exact_evolution(&h, 0.5).unwrap();
        assert!(max_abs_diff(&(uh.matrix() * uh.matrix()), u1.matrix()) < 1e-10);
        let um = exact_evolution(&h, -1.0).unwrap();
        assert!(max_abs_diff(um.matrix(), &u1.adjoint().matrix().clone_owned()) < 1e-10);
    }

    #[test]
    fn exact_evolution_rejects_non_hermitian() {
        let mut h = build_hamiltonian(&two_spin_default());
        h[(0, 1)] += c64(0.0, 0.5);
        assert!(matches!(
            exact_evolution(&h, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn trotter_step_at_zero_dt_is_identity() {
        let c = trotter_step_circuit(&two_spin_default(), 0.0).unwrap();
        let m = c.unitary().unwrap();
        assert!(dist_up_to_phase(&m, &identity(4)) < 1e-12);
    }

    #[test]
    fn zz_factor_alone_reconstructs_hand_diagonal() {
        // The H₃ factor: diag(e^{-iVdt}, e^{iVdt}, e^{iVdt}, e^{-iVdt}).
        let spec = two_spin_default();
        let dt = 0.31;
        let mut c = Circuit::new(2);
        push_term(&mut c, &spec, TermLabel::Coupling(0, 1), dt).unwrap();
        let m = c.unitary().unwrap();
        let e = |s: f64| Complex64::from_polar(1.0, s);
        let want = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            e(-dt),
            e(dt),
            e(dt),
            e(-dt),
        ]));
        assert!(dist_up_to_phase(&m, &want) < 1e-12);
    }

    #[test]
    fn number_form_coupling_is_exact_diagonal() {
        let spec = HamiltonianSpec::two_spin(1.0, 1.0, InteractionForm::NumberOperator).unwrap();
        let dt = 0.4;
        let mut c = Circuit::new(2);
        push_term(&mut c, &spec, TermLabel::Coupling(0, 1), dt).unwrap();
        let m = c.unitary().unwrap();
        let mut want = identity(4);
        want[(3, 3)] = Complex64::from_polar(1.0, -dt);
        // CU1 realization carries no global-phase discrepancy.
        assert!(max_abs_diff(&m, &want) < 1e-14);
    }

    #[test]
    fn single_step_error_is_second_order_in_dt() {
        let spec = two_spin_default();
        let h = build_hamiltonian(&spec);
        let dt = 0.1;
        let step = trotter_step_circuit(&spec, dt).unwrap().unitary().unwrap();
        let exact = exact_evolution(&h, dt).unwrap();
        // Error bound C·dt² with C near the commutator scale; measured
        // against the scipy oracle: 9.92e-3 at dt = 0.1, so C ≈ 1.
        let err = dist_up_to_phase(&step, exact.matrix());
        assert!(err < 4.0 * dt * dt, "err = {err}");
        assert!(err > 0.1 * dt * dt, "suspiciously small err = {err}");
    }

    #[test]
    fn halving_steps_halves_error() {
        let spec = two_spin_default();
        let h = build_hamiltonian(&spec);
        let exact = exact_evolution(&h, 1.0).unwrap();
        let err = |steps: u32| {
            let plan = TrotterPlan::new(1.0, steps).unwrap();
            let m = trotterized_evolution(&spec, &plan)
                .unwrap()
                .unitary()
                .unwrap();
            dist_up_to_phase(&m, exact.matrix())
        };
        let ratio = err(40) / err(80);
        assert!((1.6..=2.4).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn long_time_many_steps_tracks_oracle() {
        let spec = two_spin_default();
        let h = build_hamiltonian(&spec);
        let plan = TrotterPlan::new(2.0, 200).unwrap();
        let m = trotterized_evolution(&spec, &plan)
            .unwrap()
            .unitary()
            .unwrap();
        let exact = exact_evolution(&h, 2.0).unwrap();
        assert!(dist_up_to_phase(&m, exact.matrix()) < 5e-2);
    }

    #[test]
    fn zero_time_single_step_is_identity_circuit() {
        let spec = two_spin_default();
        let plan = TrotterPlan::new(0.0, 1).unwrap();
        let m = trotterized_evolution(&spec, &plan)
            .unwrap()
            .unitary()
            .unwrap();
        assert!(dist_up_to_phase(&m, &identity(4)) < 1e-12);
    }

    #[test]
    fn three_spin_chain_builds_and_is_hermitian() {
        let mut v = DMatrix::zeros(3, 3);
        v[(0, 1)] = 1.0;
        v[(1, 0)] = 1.0;
        v[(1, 2)] = 0.5;
        v[(2, 1)] = 0.5;
        let spec = HamiltonianSpec::new(1.0, v, InteractionForm::PauliZz).unwrap();
        let h = build_hamiltonian(&spec);
        assert!(hermiticity_deviation(&h) < 1e-12);
        let plan = TrotterPlan::new(0.5, 50).unwrap();
        let m = trotterized_evolution(&spec, &plan)
            .unwrap()
            .unitary()
            .unwrap();
        let exact = exact_evolution(&h, 0.5).unwrap();
        assert!(dist_up_to_phase(&m, exact.matrix()) < 2e-2);
    }
}
