//! Decomposition of arbitrary unitaries into two-level factors routed by
//! Gray codes into CNOT + single-qubit gates.
//!
//! `two_level_decompose` reduces the matrix to the identity with Givens-like
//! rotations; `compile_two_level` routes each factor's basis pair together
//! through a Gray-code path of controlled X flips, applies one controlled
//! core gate, and unroutes. `compile_unitary` concatenates the compiled
//! factors and reports the residual global phase, which callers must
//! compensate on the control qubit when the circuit runs under a control
//! (a controlled application promotes global phase to relative phase).

use num_complex::Complex64;

use crate::circuit::{controlled_1q_ops, multi_controlled_1q_ops, multi_controlled_x_ops, Circuit, Op};
use crate::error::{Error, Result};
use crate::gates::GateMatrix;
use crate::linalg::{alignment_phase, identity, max_abs_diff, CMatrix, ZERO};

/// Entries below this magnitude are treated as already eliminated.
const SKIP_EPS: f64 = 1e-13;

/// A unitary acting non-trivially only on basis states `i` and `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelFactor {
    dim: usize,
    i: usize,
    j: usize,
    block: CMatrix,
}

impl TwoLevelFactor {
    pub fn new(dim: usize, i: usize, j: usize, block: CMatrix) -> Result<Self> {
        if !(i < j && j < dim) {
            return Err(Error::Index(format!(
                "need i < j < dim, got i={i}, j={j}, dim={dim}"
            )));
        }
        if block.shape() != (2, 2) {
            return Err(Error::Size("two-level block must be 2x2".into()));
        }
        let dev = crate::linalg::unitarity_deviation(&block);
        if dev > 1e-10 {
            return Err(Error::NotUnitary {
                deviation: dev,
                tolerance: 1e-10,
            });
        }
        Ok(Self { dim, i, j, block })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn block(&self) -> &CMatrix {
        &self.block
    }

    /// Full dim x dim embedding of the factor.
    pub fn embed(&self) -> CMatrix {
        let mut m = identity(self.dim);
        m[(self.i, self.i)] = self.block[(0, 0)];
        m[(self.i, self.j)] = self.block[(0, 1)];
        m[(self.j, self.i)] = self.block[(1, 0)];
        m[(self.j, self.j)] = self.block[(1, 1)];
        m
    }
}

/// Left-multiply `m` by the two-level embedding of `t` at rows (i, j).
fn left_apply(m: &mut CMatrix, i: usize, j: usize, t: &CMatrix) {
    let cols = m.ncols();
    for c in 0..cols {
        let a = m[(i, c)];
        let b = m[(j, c)];
        m[(i, c)] = t[(0, 0)] * a + t[(0, 1)] * b;
        m[(j, c)] = t[(1, 0)] * a + t[(1, 1)] * b;
    }
}

/// Factor `u` into at most dim(dim-1)/2 two-level unitaries whose in-order
/// product reconstructs `u`.
///
/// Column sweep: rotations zero each sub-diagonal entry, turning the working
/// matrix block-diagonal one column at a time; the trailing 2x2 block is
/// emitted as a single factor. Near-identity factors are skipped, so the
/// identity input yields an empty list.
pub fn two_level_decompose(u: &GateMatrix) -> Vec<TwoLevelFactor> {
    let dim = u.dim();
    let mut m = u.matrix().clone();
    let mut factors: Vec<TwoLevelFactor> = Vec::new();

    // Invariant: u = factors[0] · ... · factors[k-1] · m.
    for col in 0..dim.saturating_sub(2) {
        for row in (col + 1)..dim {
            if m[(row, col)].norm() <= SKIP_EPS {
                continue;
            }
            let a = m[(col, col)];
            let b = m[(row, col)];
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let t = CMatrix::from_row_slice(
                2,
                2,
                &[a.conj() / n, b.conj() / n, b / n, -a / n],
            );
            left_apply(&mut m, col, row, &t);
            factors.push(
                TwoLevelFactor::new(dim, col, row, t.adjoint())
                    .expect("rotation block is unitary"),
            );
        }
        // A column that needed no rotations may leave a phase on the
        // diagonal; absorb it with a one-index phase factor.
        let d = m[(col, col)];
        if (d - Complex64::new(1.0, 0.0)).norm() > SKIP_EPS {
            let t = CMatrix::from_row_slice(
                2,
                2,
                &[d.conj(), ZERO, ZERO, Complex64::new(1.0, 0.0)],
            );
            left_apply(&mut m, col, col + 1, &t);
            factors.push(
                TwoLevelFactor::new(dim, col, col + 1, t.adjoint())
                    .expect("phase block is unitary"),
            );
        }
    }

    // Trailing 2x2 block (the whole matrix when dim = 2).
    let (i, j) = (dim - 2, dim - 1);
    let block = CMatrix::from_row_slice(
        2,
        2,
        &[m[(i, i)], m[(i, j)], m[(j, i)], m[(j, j)]],
    );
    if max_abs_diff(&block, &identity(2)) > SKIP_EPS {
        factors.push(TwoLevelFactor::new(dim, i, j, block).expect("trailing block is unitary"));
    }
    factors
}

/// In-order product of the factors' embeddings (the reconstruction oracle's
/// counterpart inside the library).
pub fn reconstruct_factors(dim: usize, factors: &[TwoLevelFactor]) -> CMatrix {
    let mut acc = identity(dim);
    for f in factors {
        acc *= f.embed();
    }
    acc
}

/// A sequence of basis states from `i` to `j` whose neighbors differ in
/// exactly one bit. Flip order: lowest-index differing bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayPath {
    pub states: Vec<usize>,
    pub n_bits: usize,
}

impl GrayPath {
    /// Render each state as a bit string, highest bit first.
    pub fn bit_strings(&self) -> Vec<String> {
        self.states
            .iter()
            .map(|s| {
                (0..self.n_bits)
                    .rev()
                    .map(|b| if s >> b & 1 == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }
}

pub fn gray_path(i: usize, j: usize, n_bits: usize) -> Result<GrayPath> {
    if i == j {
        return Err(Error::Argument(format!("gray path endpoints equal: {i}")));
    }
    let dim = 1usize << n_bits;
    if i >= dim || j >= dim {
        return Err(Error::Index(format!(
            "endpoints ({i}, {j}) out of range for {n_bits} bits"
        )));
    }
    let mut states = vec![i];
    let mut cur = i;
    while cur != j {
        let bit = (cur ^ j).trailing_zeros();
        cur ^= 1usize << bit;
        states.push(cur);
    }
    Ok(GrayPath { states, n_bits })
}

/// X on `target` conditioned on every (qubit, required-value) pair.
/// Value-0 conditions use the native anti-control for a single control and
/// X conjugation otherwise.
fn pattern_controlled_x(conds: &[(usize, bool)], target: usize) -> Vec<Op> {
    match conds {
        [] => vec![Op::x(target)],
        [(q, val)] => {
            let op = Op::cnot(*q, target);
            vec![if *val { op } else { op.anti() }]
        }
        _ => {
            let zeros: Vec<usize> = conds.iter().filter(|(_, v)| !v).map(|(q, _)| *q).collect();
            let idx: Vec<usize> = conds.iter().map(|(q, _)| *q).collect();
            let mut ops: Vec<Op> = zeros.iter().map(|&q| Op::x(q)).collect();
            ops.extend(multi_controlled_x_ops(&idx, target));
            ops.extend(zeros.iter().rev().map(|&q| Op::x(q)));
            ops
        }
    }
}

/// Arbitrary 2x2 unitary on `target` under the same condition pattern.
fn pattern_controlled_u(u: &CMatrix, conds: &[(usize, bool)], target: usize) -> Vec<Op> {
    if max_abs_diff(u, crate::gates::x().matrix()) < SKIP_EPS {
        return pattern_controlled_x(conds, target);
    }
    match conds {
        [(q, true)] => controlled_1q_ops(u, *q, target),
        _ => {
            let zeros: Vec<usize> = conds.iter().filter(|(_, v)| !v).map(|(q, _)| *q).collect();
            let idx: Vec<usize> = conds.iter().map(|(q, _)| *q).collect();
            let mut ops: Vec<Op> = zeros.iter().map(|&q| Op::x(q)).collect();
            ops.extend(multi_controlled_1q_ops(u, &idx, target));
            ops.extend(zeros.iter().rev().map(|&q| Op::x(q)));
            ops
        }
    }
}

/// Compile one two-level factor: Gray-code routing flips bring the pair to
/// Hamming distance 1, one controlled core gate applies the block, and the
/// routing unwinds in reverse (mirrored around the core).
pub fn compile_two_level(factor: &TwoLevelFactor, n_qubits: usize) -> Result<Circuit> {
    if factor.dim != 1usize << n_qubits {
        return Err(Error::Size(format!(
            "factor dimension {} does not match {n_qubits} qubits",
            factor.dim
        )));
    }
    let mut circuit = Circuit::new(n_qubits);
    if max_abs_diff(&factor.block, &identity(2)) <= SKIP_EPS {
        return Ok(circuit);
    }
    let path = gray_path(factor.i, factor.j, n_qubits)?.states;
    let hops = path.len() - 1;

    let conds_for = |from: usize, flip_bit: usize| -> Vec<(usize, bool)> {
        (0..n_qubits)
            .filter(|&q| q != flip_bit)
            .map(|q| (q, from >> q & 1 == 1))
            .collect()
    };

    // Route |i⟩ to the neighbor of |j⟩.
    let mut routing: Vec<Vec<Op>> = Vec::new();
    for k in 0..hops - 1 {
        let flip_bit = (path[k] ^ path[k + 1]).trailing_zeros() as usize;
        routing.push(pattern_controlled_x(&conds_for(path[k], flip_bit), flip_bit));
    }
    for step in &routing {
        circuit.push_all(step.iter().cloned())?;
    }

    // Core gate on the final differing bit. The amplitude that started at
    // |i⟩ now sits at path[hops-1]; express the block in the (bit=0, bit=1)
    // basis of the flipped qubit.
    let p = path[hops - 1];
    let flip_bit = (p ^ factor.j).trailing_zeros() as usize;
    let b = &factor.block;
    let core = if p >> flip_bit & 1 == 0 {
        b.clone()
    } else {
        CMatrix::from_row_slice(
            2,
            2,
            &[b[(1, 1)], b[(1, 0)], b[(0, 1)], b[(0, 0)]],
        )
    };
    circuit.push_all(pattern_controlled_u(&core, &conds_for(p, flip_bit), flip_bit))?;

    // Unroute: the same self-inverse steps in reverse order.
    for step in routing.iter().rev() {
        circuit.push_all(step.iter().cloned())?;
    }
    Ok(circuit)
}

/// A compiled circuit together with its residual global phase:
/// `circuit.unitary() ≈ e^{i·global_phase} · u`.
#[derive(Debug, Clone)]
pub struct CompiledUnitary {
    pub circuit: Circuit,
    pub global_phase: f64,
}

/// Compile an arbitrary unitary into the closed gate set by concatenating
/// its compiled two-level factors (rightmost factor first, since it acts
/// first on the state).
pub fn compile_unitary(u: &GateMatrix, n_qubits: usize) -> Result<CompiledUnitary> {
    if u.dim() != 1usize << n_qubits {
        return Err(Error::Size(format!(
            "unitary of dimension {} does not act on {n_qubits} qubits",
            u.dim()
        )));
    }
    let factors = two_level_decompose(u);
    let mut circuit = Circuit::new(n_qubits);
    for f in factors.iter().rev() {
        circuit.append(&compile_two_level(f, n_qubits)?)?;
    }
    let reconstructed = circuit.unitary()?;
    let global_phase = alignment_phase(&reconstructed, u.matrix());
    Ok(CompiledUnitary {
        circuit,
        global_phase,
    })
}
