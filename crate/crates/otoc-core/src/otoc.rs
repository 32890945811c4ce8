//! Exact OTOC computation, the commutator identity, scrambling time, and
//! time sweeps for both initial states.
//!
//! `otoc_exact` (dense operator product) and `otoc_exact_overlap`
//! (two-statevector overlap) are independent routes to
//! F(t) = ⟨W_t† V† W_t V⟩ and stay separate so they can cross-check each
//! other; tests and the acceptance suite compare them across whole sweeps.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::GateMatrix;
use crate::hamiltonian::{build_hamiltonian, exact_evolution, HamiltonianSpec};
use crate::noise::{run_protocol_noisy, NoiseModel};
use crate::protocol::{
    butterfly_operator, prepare_initial, run_protocol, EvolutionMode, ProtocolConfig,
};
use crate::state::StateVector;

/// W_t = U(-t)·W·U(t) as a dense matrix from the eigendecomposition oracle.
pub fn heisenberg_operator(
    spec: &HamiltonianSpec,
    w: &GateMatrix,
    t: f64,
) -> Result<crate::linalg::CMatrix> {
    let h = build_hamiltonian(spec);
    let u_fwd = exact_evolution(&h, t)?;
    let u_bwd = exact_evolution(&h, -t)?;
    Ok(u_bwd.matrix() * w.matrix() * u_fwd.matrix())
}

/// F(t) by the full dense operator product ⟨ψ| W_t† V† W_t V |ψ⟩.
pub fn otoc_exact(
    spec: &HamiltonianSpec,
    v: &GateMatrix,
    w: &GateMatrix,
    psi: &StateVector,
    t: f64,
) -> Result<Complex64> {
    let dim = 1usize << spec.n_spins();
    if v.dim() != dim || w.dim() != dim || psi.amplitudes().len() != dim {
        return Err(Error::Size(format!(
            "operator/state dimensions must all be {dim}"
        )));
    }
    let w_t = heisenberg_operator(spec, w, t)?;
    let m = w_t.adjoint() * v.adjoint().matrix() * &w_t * v.matrix();
    let amps = nalgebra::DVector::from_column_slice(psi.amplitudes());
    Ok((amps.adjoint() * m * amps)[(0, 0)])
}

/// F(t) by the two-statevector overlap ⟨V W_t ψ | W_t V ψ⟩, applying the
/// operators to states instead of multiplying matrices.
pub fn otoc_exact_overlap(
    spec: &HamiltonianSpec,
    v: &GateMatrix,
    w: &GateMatrix,
    psi: &StateVector,
    t: f64,
) -> Result<Complex64> {
    let n = spec.n_spins();
    let dim = 1usize << n;
    if v.dim() != dim || w.dim() != dim || psi.amplitudes().len() != dim {
        return Err(Error::Size(format!(
            "operator/state dimensions must all be {dim}"
        )));
    }
    let w_t = GateMatrix::new(heisenberg_operator(spec, w, t)?)?;
    let qubits: Vec<usize> = (0..n).collect();

    let mut left = psi.clone();
    left.apply_dense(&w_t, &qubits)?;
    left.apply_dense(v, &qubits)?;

    let mut right = psi.clone();
    right.apply_dense(v, &qubits)?;
    right.apply_dense(&w_t, &qubits)?;

    left.inner_product(&right)
}

/// ⟨|[W_t, V]|²⟩ = 2(1 - Re[F]), Eq.-2's right-hand side.
pub fn commutator_magnitude(re_f: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&re_f) {
        return Err(Error::Argument(format!(
            "Re[F] must lie in [-1, 1], got {re_f}"
        )));
    }
    Ok(2.0 * (1.0 - re_f))
}

/// Scrambling time t* = δt · log₂(N): the time for information in one spin
/// to spread over N spins under pairwise operations at interval δt.
/// Callers guarantee n_spins >= 1 and delta_t > 0.
pub fn scrambling_time(n_spins: usize, delta_t: f64) -> f64 {
    debug_assert!(n_spins >= 1 && delta_t > 0.0);
    delta_t * (n_spins as f64).log2()
}

/// Where a sweep's Re[F] column came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    /// Dense-algebra oracle only.
    Oracle,
    /// Interferometric circuit with oracle-compiled U(t).
    ProtocolExact,
    /// Interferometric circuit with the Trotterized U(t)
    /// (step count from the config's evolution mode).
    ProtocolTrotter,
    /// Shot-sampled protocol with depolarizing + readout noise.
    ProtocolNoisy { noise: NoiseModel, shots: u64 },
}

/// One sweep sample. `re_f` is the per-provenance protocol value;
/// `re_f_oracle`/`im_f_oracle` carry the exact F (the imaginary part is
/// oracle-only output, beyond the paper's measured protocol).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtocPoint {
    pub t: f64,
    pub re_f: f64,
    pub re_f_oracle: f64,
    pub im_f_oracle: f64,
    pub commutator_sq: f64,
}

impl OtocPoint {
    pub fn f_exact(&self) -> Complex64 {
        Complex64::new(self.re_f_oracle, self.im_f_oracle)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtocSweep {
    pub config: ProtocolConfig,
    pub provenance: Provenance,
    pub points: Vec<OtocPoint>,
    /// Empirical dominant period of Re[F] (autocorrelation peak), reported
    /// without any asserted value; None when the sweep is too short or flat.
    pub dominant_period: Option<f64>,
}

fn point_at(cfg: &ProtocolConfig, provenance: &Provenance, t: f64) -> Result<OtocPoint> {
    let cfg_t = cfg.clone().at_time(t);
    let v = butterfly_operator(cfg.butterfly_phase, cfg.n_system());
    let psi = prepare_initial(cfg.initial_state, cfg.n_system())?;
    let f = otoc_exact(&cfg_t.hamiltonian, &v, &v, &psi, t)?;
    let re_f = match provenance {
        Provenance::Oracle => f.re.clamp(-1.0, 1.0),
        Provenance::ProtocolExact => {
            run_protocol(&cfg_t.with_evolution(EvolutionMode::ExactOracle))?
        }
        Provenance::ProtocolTrotter => match cfg.evolution {
            EvolutionMode::Trotter { .. } => run_protocol(&cfg_t)?,
            EvolutionMode::ExactOracle => {
                return Err(Error::Argument(
                    "protocol_trotter provenance needs a trotter evolution mode in the config"
                        .into(),
                ))
            }
        },
        Provenance::ProtocolNoisy { noise, shots } => run_protocol_noisy(&cfg_t, noise, *shots)?,
    };
    Ok(OtocPoint {
        t,
        re_f,
        re_f_oracle: f.re,
        im_f_oracle: f.im,
        commutator_sq: commutator_magnitude(re_f)?,
    })
}

/// Evaluate Re[F] on a uniform grid over [0, t_max]. Points are computed in
/// parallel; output ordering is by t regardless of scheduling.
pub fn sweep(
    cfg: &ProtocolConfig,
    t_max: f64,
    n_points: usize,
    provenance: Provenance,
) -> Result<OtocSweep> {
    if n_points < 2 {
        return Err(Error::Argument(format!(
            "a sweep needs at least 2 points, got {n_points}"
        )));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::Argument(format!(
            "t_max must be positive and finite, got {t_max}"
        )));
    }
    cfg.validate()?;
    let times: Vec<f64> = (0..n_points)
        .map(|k| t_max * k as f64 / (n_points - 1) as f64)
        .collect();
    let points: Result<Vec<OtocPoint>> = times
        .par_iter()
        .map(|&t| point_at(cfg, &provenance, t))
        .collect();
    let points = points?;
    let dominant_period = dominant_period(&points);
    Ok(OtocSweep {
        config: cfg.clone(),
        provenance,
        points,
        dominant_period,
    })
}

/// Autocorrelation-peak estimate of the dominant period of Re[F].
fn dominant_period(points: &[OtocPoint]) -> Option<f64> {
    let n = points.len();
    if n < 8 {
        return None;
    }
    let dt = points[1].t - points[0].t;
    let mean = points.iter().map(|p| p.re_f).sum::<f64>() / n as f64;
    let centered: Vec<f64> = points.iter().map(|p| p.re_f - mean).collect();
    let var: f64 = centered.iter().map(|x| x * x).sum();
    if var < 1e-12 {
        return None;
    }
    let ac = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / var
    };
    // First local maximum of the autocorrelation after its first dip.
    let acs: Vec<f64> = (0..n / 2).map(ac).collect();
    let mut lag = 1;
    while lag < acs.len() && acs[lag] < acs[lag - 1] {
        lag += 1;
    }
    let peak = (lag..acs.len().saturating_sub(1))
        .find(|&k| acs[k] >= acs[k - 1] && acs[k] >= acs[k + 1])?;
    Some(peak as f64 * dt)
}

/// CSV rendering with the fixed header
/// `t,re_f,re_f_oracle,im_f_oracle,commutator_sq`, `.` decimals and LF line
/// endings. Floats are printed with 17 significant digits so re-parsing is
/// exact and identical runs are byte-identical.
pub fn sweep_to_csv(sweep: &OtocSweep) -> String {
    let mut out = String::from("t,re_f,re_f_oracle,im_f_oracle,commutator_sq\n");
    for p in &sweep.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(p.t),
            fmt_f64(p.re_f),
            fmt_f64(p.re_f_oracle),
            fmt_f64(p.im_f_oracle),
            fmt_f64(p.commutator_sq)
        ));
    }
    out
}

/// 17-significant-digit decimal rendering (round-trips every f64).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
