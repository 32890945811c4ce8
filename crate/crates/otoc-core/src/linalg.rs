//! Dense complex-matrix helpers shared by the Hamiltonian, compiler and
//! analysis modules.
//!
//! Everything here operates on `nalgebra::DMatrix<Complex64>`. Matrices are
//! small (2^n x 2^n with n <= ~5), so clarity wins over cleverness.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Kronecker product with the high-order factor first: `kron(a, b)` indexes
/// basis states as `i_a * dim_b + i_b`. Under the crate's little-endian
/// convention an operator on qubit 1 tensored with one on qubit 0 is
/// `kron(op_q1, op_q0)`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Embed a single-qubit operator on `qubit` of an `n`-qubit register.
pub fn embed_1q(op: &CMatrix, qubit: usize, n_qubits: usize) -> CMatrix {
    let mut m = CMatrix::identity(1, 1);
    for q in (0..n_qubits).rev() {
        let factor = if q == qubit { op.clone() } else { identity(2) };
        m = kron(&m, &factor);
    }
    m
}

/// Largest elementwise magnitude of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff on mismatched shapes");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// max |U†U - I|.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let dim = m.nrows();
    max_abs_diff(&(m.adjoint() * m), &identity(dim))
}

/// max |H - H†|.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint().clone_owned())
}

/// Global phase `alpha` such that `a ≈ e^{i alpha} b`, chosen to minimize the
/// Frobenius distance (alignment on `arg tr(b† a)`). Returns 0 when the trace
/// vanishes (orthogonal matrices have no preferred alignment).
pub fn alignment_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let tr: Complex64 = b
        .iter()
        .zip(a.iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    if tr.norm() < 1e-300 {
        0.0
    } else {
        tr.arg()
    }
}

/// Max-norm distance between `a` and `b` after optimal global-phase
/// alignment. Used wherever the contract is "equal up to global phase".
pub fn dist_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let alpha = alignment_phase(a, b);
    let phase = Complex64::from_polar(1.0, alpha);
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// Haar-ish random unitary from the QR decomposition of a seeded complex
/// Gaussian matrix. Deterministic for a given `(dim, seed)`.
pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = move || {
        // Box-Muller; avoids pulling in rand_distr for one distribution.
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let g = CMatrix::from_fn(dim, dim, |_, _| c64(normal(), normal()));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    // Fix column phases so the distribution is Haar (diag(R) made positive).
    for j in 0..dim {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}
