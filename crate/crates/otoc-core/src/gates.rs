//! The concrete gate set used by the protocol circuits: X, H, CNOT, U1, U3
//! and single-controlled wrappers.
//!
//! U1/U3 follow the IBM dialect targeted by the QASM emitter:
//!
//! ```text
//! u1(λ) = diag(1, e^{iλ})
//! u3(θ,φ,λ) = [[cos(θ/2),          -e^{iλ} sin(θ/2)],
//!              [e^{iφ} sin(θ/2),  e^{i(φ+λ)} cos(θ/2)]]
//! ```
//!
//! Constructors are phase-canonical (entry [0,0] real non-negative where
//! possible); comparisons elsewhere use projective equality unless phases
//! matter (controlled gates).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{c64, identity, unitarity_deviation, CMatrix, ONE, ZERO};
use num_complex::Complex64;

/// Unitarity tolerance for gate construction and application.
pub const UNITARITY_TOL: f64 = 1e-10;

/// A validated unitary matrix of power-of-two dimension.
///
/// Construction checks `max |U†U - I| <= 1e-10`, so code holding a
/// `GateMatrix` may assume unitarity.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    matrix: CMatrix,
}

impl GateMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Size(format!(
                "gate matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dim = matrix.nrows();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Size(format!(
                "gate dimension must be a power of two, got {dim}"
            )));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary {
                deviation,
                tolerance: UNITARITY_TOL,
            });
        }
        Ok(Self { matrix })
    }

    pub fn from_rows_2x2(rows: [[Complex64; 2]; 2]) -> Result<Self> {
        Self::new(CMatrix::from_row_slice(
            2,
            2,
            &[rows[0][0], rows[0][1], rows[1][0], rows[1][1]],
        ))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn adjoint(&self) -> GateMatrix {
        GateMatrix {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }
}

/// Pauli-X.
pub fn x() -> GateMatrix {
    GateMatrix::from_rows_2x2([[ZERO, ONE], [ONE, ZERO]]).expect("X is unitary")
}

/// Hadamard.
pub fn h() -> GateMatrix {
    let s = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    GateMatrix::from_rows_2x2([[s, s], [s, -s]]).expect("H is unitary")
}

/// CNOT with the control on the high bit of the 4x4 index: |c t⟩ -> |c, t^c⟩.
pub fn cnot() -> GateMatrix {
    controlled(&x()).expect("CNOT is unitary")
}

/// Phase gate diag(1, e^{iλ}).
pub fn u1(lambda: f64) -> GateMatrix {
    GateMatrix::from_rows_2x2([[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, lambda)]])
        .expect("U1 is unitary")
}

/// General single-qubit rotation in the IBM u3 convention.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> GateMatrix {
    let (sin, cos) = (theta / 2.0).sin_cos();
    GateMatrix::from_rows_2x2([
        [c64(cos, 0.0), -Complex64::from_polar(sin, lambda)],
        [
            Complex64::from_polar(sin, phi),
            Complex64::from_polar(cos, phi + lambda),
        ],
    ])
    .expect("U3 is unitary")
}

/// Controlled version of a 2x2 unitary: block-diagonal [I, u] with the
/// control on the high bit.
pub fn controlled(u: &GateMatrix) -> Result<GateMatrix> {
    if u.dim() != 2 {
        return Err(Error::Size(format!(
            "controlled() takes a 2x2 gate, got {}x{}",
            u.dim(),
            u.dim()
        )));
    }
    let mut m = identity(4);
    for r in 0..2 {
        for c in 0..2 {
            m[(2 + r, 2 + c)] = u.entry(r, c);
        }
    }
    GateMatrix::new(m)
}

/// Angle triple for a u3 rotation, reducible modulo 2π for canonical
/// comparison of circuits that encode the same rotation differently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl GateParams {
    pub fn new(theta: f64, phi: f64, lambda: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite() && lambda.is_finite()) {
            return Err(Error::Argument("gate angles must be finite".into()));
        }
        Ok(Self { theta, phi, lambda })
    }

    /// Each angle folded into [0, 2π).
    pub fn canonical(&self) -> GateParams {
        let fold = |a: f64| a.rem_euclid(2.0 * PI);
        GateParams {
            theta: fold(self.theta),
            phi: fold(self.phi),
            lambda: fold(self.lambda),
        }
    }
}

/// Decompose an arbitrary 2x2 unitary as `e^{iδ} · u3(θ, φ, λ)`.
///
/// Needed to express controlled versions of compiled gates exactly: under a
/// control the phase δ becomes relative and must be applied as U1(δ) on the
/// control qubit.
pub fn zy_params(u: &CMatrix) -> (f64, GateParams) {
    assert_eq!(u.shape(), (2, 2), "zy_params takes a 2x2 matrix");
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let theta = 2.0 * u10.norm().atan2(u00.norm());
    let (delta, phi, lambda);
    if u00.norm() < 1e-12 {
        // θ = π: u = e^{iδ} [[0, -e^{iλ}], [e^{iφ}, 0]]; fix λ = 0.
        lambda = 0.0;
        delta = (-u01).arg();
        phi = u10.arg() - delta;
    } else if u10.norm() < 1e-12 {
        // θ = 0: diagonal; fix λ = 0.
        lambda = 0.0;
        delta = u00.arg();
        phi = u11.arg() - delta;
    } else {
        delta = u00.arg();
        phi = u10.arg() - delta;
        lambda = (-u01).arg() - delta;
    }
    (delta, GateParams { theta, phi, lambda })
}

/// Principal square root of a 2x2 unitary via eigendecomposition:
/// `S S = u` with S unitary. Used by the doubly-controlled construction.
pub fn sqrt_2x2_unitary(u: &CMatrix) -> CMatrix {
    assert_eq!(u.shape(), (2, 2));
    // Eigenvalues of a 2x2 matrix from trace/determinant.
    let tr = u[(0, 0)] + u[(1, 1)];
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if (l1 - l2).norm() < 1e-12 {
        // u = λI (unitary with a double eigenvalue is a scalar matrix).
        let s = l1.sqrt();
        return CMatrix::from_row_slice(2, 2, &[s, ZERO, ZERO, s]);
    }
    // Eigenvector for λ: columns of (u - λ2 I) span the λ1 eigenspace.
    let eigvec = |l: Complex64| {
        let a = u[(0, 0)] - l;
        let b = u[(0, 1)];
        let c = u[(1, 0)];
        let d = u[(1, 1)] - l;
        // Pick the larger row of (u - λI) for stability; its kernel vector.
        let (vx, vy) = if a.norm() + b.norm() >= c.norm() + d.norm() {
            (-b, a)
        } else {
            (-d, c)
        };
        let n = (vx.norm_sqr() + vy.norm_sqr()).sqrt();
        (vx / n, vy / n)
    };
    let (v1x, v1y) = eigvec(l1);
    let (v2x, v2y) = eigvec(l2);
    let (s1, s2) = (l1.sqrt(), l2.sqrt());
    // S = s1 v1 v1† + s2 v2 v2† (unitary u has orthogonal eigenvectors).
    CMatrix::from_row_slice(
        2,
        2,
        &[
            s1 * v1x * v1x.conj() + s2 * v2x * v2x.conj(),
            s1 * v1x * v1y.conj() + s2 * v2x * v2y.conj(),
            s1 * v1y * v1x.conj() + s2 * v2y * v2x.conj(),
            s1 * v1y * v1y.conj() + s2 * v2y * v2y.conj(),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist_up_to_phase, max_abs_diff, random_unitary};

    const TOL: f64 = 1e-12;

    #[test]
    fn u1_special_values() {
        assert!(max_abs_diff(u1(0.0).matrix(), &identity(2)) < TOL);
        // λ = π is Z.
        let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        assert!(max_abs_diff(u1(PI).matrix(), &z) < TOL);
        // λ = π/2 is S.
        let s = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c64(0.0, 1.0)]);
        assert!(max_abs_diff(u1(PI / 2.0).matrix(), &s) < TOL);
    }

    #[test]
    fn u3_special_values() {
        assert!(max_abs_diff(u3(0.0, 0.0, 0.0).matrix(), &identity(2)) < TOL);
        assert!(max_abs_diff(u3(PI, 0.0, PI).matrix(), x().matrix()) < TOL);
        assert!(max_abs_diff(u3(PI / 2.0, 0.0, PI).matrix(), h().matrix()) < TOL);
    }

    #[test]
    fn u3_with_zero_theta_is_u1_of_phi_plus_lambda() {
        for (phi, lambda) in [(0.3, 1.1), (2.0, -0.7), (0.0, 0.0)] {
            let a = u3(0.0, phi, lambda);
            let b = u1(phi + lambda);
            // Exact equality here, which implies projective equality.
            assert!(dist_up_to_phase(a.matrix(), b.matrix()) < TOL);
            assert!(max_abs_diff(a.matrix(), b.matrix()) < TOL);
        }
    }

    #[test]
    fn involutions() {
        assert!(max_abs_diff(&(x().matrix() * x().matrix()), &identity(2)) < TOL);
        assert!(max_abs_diff(&(h().matrix() * h().matrix()), &identity(2)) < TOL);
        assert!(max_abs_diff(&(cnot().matrix() * cnot().matrix()), &identity(4)) < TOL);
    }

    #[test]
    fn constructors_pass_strict_unitarity() {
        for g in [x(), h(), cnot(), u1(0.37), u3(1.1, -0.3, 2.9)] {
            assert!(unitarity_deviation(g.matrix()) < 1e-12);
        }
    }

    #[test]
    fn controlled_of_x_is_cnot() {
        let cx = controlled(&x()).unwrap();
        let expected = CMatrix::from_row_slice(
            4,
            4,
            &[
                ONE, ZERO, ZERO, ZERO, //
                ZERO, ONE, ZERO, ZERO, //
                ZERO, ZERO, ZERO, ONE, //
                ZERO, ZERO, ONE, ZERO,
            ],
        );
        assert!(max_abs_diff(cx.matrix(), &expected) < TOL);
    }

    #[test]
    fn controlled_of_identity_and_phase() {
        let id = GateMatrix::new(identity(2)).unwrap();
        assert!(max_abs_diff(controlled(&id).unwrap().matrix(), &identity(4)) < TOL);
        let alpha = 0.83;
        let cu1 = controlled(&u1(alpha)).unwrap();
        let mut expected = identity(4);
        expected[(3, 3)] = Complex64::from_polar(1.0, alpha);
        assert!(max_abs_diff(cu1.matrix(), &expected) < TOL);
    }

    #[test]
    fn non_unitary_rejected() {
        let bad = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            GateMatrix::new(bad),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn zy_params_roundtrip() {
        for seed in 0..20 {
            let u = random_unitary(2, seed);
            let (delta, p) = zy_params(&u);
            let rebuilt =
                u3(p.theta, p.phi, p.lambda).matrix() * Complex64::from_polar(1.0, delta);
            assert!(max_abs_diff(&rebuilt, &u) < 1e-10, "seed {seed}");
        }
        // Degenerate corners: diagonal and anti-diagonal inputs.
        for u in [
            u1(1.3).matrix().clone(),
            x().matrix().clone(),
            x().matrix() * Complex64::from_polar(1.0, 0.4),
        ] {
            let (delta, p) = zy_params(&u);
            let rebuilt =
                u3(p.theta, p.phi, p.lambda).matrix() * Complex64::from_polar(1.0, delta);
            assert!(max_abs_diff(&rebuilt, &u) < 1e-10);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        for seed in 0..20 {
            let u = random_unitary(2, 100 + seed);
            let s = sqrt_2x2_unitary(&u);
            assert!(unitarity_deviation(&s) < 1e-10, "seed {seed}");
            assert!(max_abs_diff(&(&s * &s), &u) < 1e-10, "seed {seed}");
        }
        let s = sqrt_2x2_unitary(x().matrix());
        assert!(max_abs_diff(&(&s * &s), x().matrix()) < 1e-12);
    }

    #[test]
    fn gate_params_canonicalize() {
        let p = GateParams::new(-0.5, 7.0, 2.0 * PI).unwrap();
        let c = p.canonical();
        assert!((c.theta - (2.0 * PI - 0.5)).abs() < TOL);
        assert!((c.phi - (7.0 - 2.0 * PI)).abs() < TOL);
        assert!(c.lambda.abs() < TOL);
        assert!(GateParams::new(f64::NAN, 0.0, 0.0).is_err());
    }
}
