//! Hardware-noise emulation: shot-based sampling plus readout and
//! depolarizing error channels parameterized from the ibmqx4 device table.
//!
//! The channel choice is stochastic Pauli insertion after each gate plus
//! classical readout bit flips; trajectories keep the statevector core as
//! the only simulation engine, with variance handled by shot count.
//! Trajectories derive independent RNGs from (master seed, trajectory
//! index), so parallel execution reproduces the sequential result exactly.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{apply_op, Circuit, OpKind};
use crate::error::{Error, Result};
use crate::gates;
use crate::protocol::{build_protocol_circuit, prepare_circuit, ProtocolConfig};
use crate::state::StateVector;

/// Raw device parameters of the five-qubit ibmqx4 chip, stored exactly as
/// published: frequency (GHz), relaxation time T1 (µs), coherence time T2
/// (µs), gate error (GE) and readout error (RE). GE/RE carry no printed
/// scale; see the scale constants below for the interpretation used here.
/// T1/T2 are documentation only: converting them into amplitude/phase
/// damping would need gate timing data the paper does not provide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ibmqx4Parameters {
    pub frequency_ghz: [f64; 5],
    pub t1_us: [f64; 5],
    pub t2_us: [f64; 5],
    pub gate_error: [f64; 5],
    pub readout_error: [f64; 5],
}

/// Readout errors are "of the order 10⁻²": RE values read as percentages.
pub const READOUT_ERROR_SCALE: f64 = 1e-2;
/// Multi-qubit gate errors are "of the order 10⁻²".
pub const GATE_ERROR_SCALE_2Q: f64 = 1e-2;
/// Single-qubit gate errors are "of the order 10⁻³".
pub const GATE_ERROR_SCALE_1Q: f64 = 1e-3;

pub fn ibmqx4_parameters() -> Ibmqx4Parameters {
    Ibmqx4Parameters {
        frequency_ghz: [5.24, 5.31, 5.35, 5.41, 5.19],
        t1_us: [48.80, 49.60, 48.00, 35.60, 55.20],
        t2_us: [14.70, 55.00, 32.60, 23.60, 31.90],
        gate_error: [0.86, 1.29, 1.20, 3.78, 1.03],
        readout_error: [7.00, 5.80, 8.60, 3.70, 5.80],
    }
}

impl Ibmqx4Parameters {
    /// Per-qubit readout flip probability (RE x 10⁻²).
    pub fn readout_error_prob(&self, qubit: usize) -> f64 {
        self.readout_error[qubit] * READOUT_ERROR_SCALE
    }

    /// Per-qubit gate error on the multi-qubit scale (GE x 10⁻²).
    pub fn gate_error_prob(&self, qubit: usize) -> f64 {
        self.gate_error[qubit] * GATE_ERROR_SCALE_2Q
    }

    pub fn mean_gate_error(&self) -> f64 {
        self.gate_error.iter().sum::<f64>() / self.gate_error.len() as f64
    }
}

/// Per-qubit readout flip probabilities plus depolarizing rates for one-
/// and two-qubit gates, and the master RNG seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub readout_error: Vec<f64>,
    pub depol_1q: f64,
    pub depol_2q: f64,
    pub rng_seed: u64,
}

impl NoiseModel {
    pub fn new(readout_error: Vec<f64>, depol_1q: f64, depol_2q: f64, rng_seed: u64) -> Result<Self> {
        for (q, &p) in readout_error.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Argument(format!(
                    "readout probability for qubit {q} must be in [0, 1], got {p}"
                )));
            }
        }
        for (name, p) in [("depol_1q", depol_1q), ("depol_2q", depol_2q)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Argument(format!(
                    "{name} must be in [0, 1], got {p}"
                )));
            }
        }
        Ok(Self {
            readout_error,
            depol_1q,
            depol_2q,
            rng_seed,
        })
    }

    pub fn noiseless(rng_seed: u64) -> Self {
        Self {
            readout_error: Vec::new(),
            depol_1q: 0.0,
            depol_2q: 0.0,
            rng_seed,
        }
    }

    pub fn with_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }

    /// Readout flip probability for a qubit; zero beyond the stored list.
    pub fn readout_for(&self, qubit: usize) -> f64 {
        self.readout_error.get(qubit).copied().unwrap_or(0.0)
    }
}

/// The noise model derived from the device table: per-qubit readout flips
/// at RE x 10⁻², depolarizing after each 1-qubit gate at the table's mean
/// GE x 10⁻³ and after each 2-qubit gate at mean GE x 10⁻² (the two scales
/// the Methods text states for the two gate classes).
pub fn table1_noise_model() -> NoiseModel {
    let table = ibmqx4_parameters();
    let readout = (0..5).map(|q| table.readout_error_prob(q)).collect();
    NoiseModel::new(
        readout,
        table.mean_gate_error() * GATE_ERROR_SCALE_1Q,
        table.mean_gate_error() * GATE_ERROR_SCALE_2Q,
        0,
    )
    .expect("table probabilities are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementBasis {
    X,
}

/// Measured bitstring histogram; counts always sum to the shot total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotCounts {
    counts: BTreeMap<String, u64>,
    shots: u64,
}

impl ShotCounts {
    pub fn from_counts(counts: BTreeMap<String, u64>) -> Self {
        let shots = counts.values().sum();
        Self { counts, shots }
    }

    fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut counts = BTreeMap::new();
        let mut shots = 0;
        for b in bits {
            *counts.entry(if b { "1" } else { "0" }.to_string()).or_insert(0) += 1;
            shots += 1;
        }
        Self { counts, shots }
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.shots
    }

    pub fn count_of(&self, bitstring: &str) -> u64 {
        self.counts.get(bitstring).copied().unwrap_or(0)
    }

    /// (n₀ - n₁)/N for single-bit records: the ±1-eigenvalue estimator
    /// (outcome 0 is the +1 eigenstate after the basis rotation).
    pub fn expectation_pm(&self) -> Result<f64> {
        if self.shots == 0 {
            return Err(Error::Argument("no shots recorded".into()));
        }
        if self.counts.keys().any(|k| k.len() != 1) {
            return Err(Error::Argument(
                "expectation_pm needs single-bit records".into(),
            ));
        }
        let n0 = self.count_of("0") as f64;
        let n1 = self.count_of("1") as f64;
        Ok((n0 - n1) / self.shots as f64)
    }
}

/// SplitMix64 seed derivation: trajectory k owns an independent RNG stream.
fn split_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sample `shots` measurement outcomes of one qubit in the X basis:
/// H is applied to a copy of the state, then the qubit's computational
/// outcome is drawn from |amplitudes|². Deterministic for a given seed.
pub fn sample_shots(
    state: &StateVector,
    qubit: usize,
    basis: MeasurementBasis,
    shots: u64,
    seed: u64,
) -> Result<ShotCounts> {
    if shots == 0 {
        return Err(Error::Argument("shots must be >= 1".into()));
    }
    let MeasurementBasis::X = basis;
    let mut rotated = state.clone();
    rotated.apply_1q(&gates::h(), qubit)?;
    let p1 = rotated.probability_of_one(qubit)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(ShotCounts::from_bits(
        (0..shots).map(|_| rng.gen::<f64>() < p1),
    ))
}

/// Flip every recorded bit independently with probability `flip_prob`;
/// the shot total is preserved.
pub fn apply_readout_error(counts: &ShotCounts, flip_prob: f64, seed: u64) -> Result<ShotCounts> {
    if !(0.0..=1.0).contains(&flip_prob) {
        return Err(Error::Argument(format!(
            "flip probability must be in [0, 1], got {flip_prob}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: BTreeMap<String, u64> = BTreeMap::new();
    for (bits, &n) in counts.counts() {
        for _ in 0..n {
            let flipped: String = bits
                .chars()
                .map(|c| {
                    if rng.gen::<f64>() < flip_prob {
                        if c == '0' {
                            '1'
                        } else {
                            '0'
                        }
                    } else {
                        c
                    }
                })
                .collect();
            *out.entry(flipped).or_insert(0) += 1;
        }
    }
    Ok(ShotCounts::from_counts(out))
}

fn apply_random_pauli(state: &mut StateVector, qubit: usize, which: u8) -> Result<()> {
    use std::f64::consts::{FRAC_PI_2, PI};
    match which {
        0 => state.apply_1q(&gates::x(), qubit)?,
        1 => state.apply_1q(&gates::u3(PI, FRAC_PI_2, FRAC_PI_2), qubit)?, // Y
        _ => state.apply_1q(&gates::u1(PI), qubit)?, // Z
    };
    Ok(())
}

/// Simulate the full protocol (state preparation + interferometric
/// circuit) with stochastic Pauli insertion after each gate, sample the
/// control in the X basis, push the record through the readout channel and
/// return the ⟨X⟩ estimate.
pub fn run_protocol_noisy(cfg: &ProtocolConfig, noise: &NoiseModel, shots: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::Argument("shots must be >= 1".into()));
    }
    cfg.validate()?;
    let n = cfg.n_system();
    let control = cfg.control_qubit();
    let mut circuit = Circuit::new(n + 1);
    circuit.append(&prepare_circuit(cfg.initial_state, n)?)?;
    circuit.append(&build_protocol_circuit(cfg)?)?;

    let outcomes: Result<Vec<bool>> = (0..shots)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(split_seed(noise.rng_seed, k));
            let mut state = StateVector::zero(n + 1)?;
            for op in circuit.ops() {
                apply_op(op, &mut state)?;
                match op.kind {
                    OpKind::Barrier | OpKind::Measure => {}
                    kind if kind.has_control() => {
                        if noise.depol_2q > 0.0 && rng.gen::<f64>() < noise.depol_2q {
                            // One of the 15 non-identity two-qubit Paulis.
                            let pair = rng.gen_range(1..16u8);
                            let (a, b) = (pair >> 2, pair & 3);
                            if a > 0 {
                                apply_random_pauli(&mut state, op.controls[0], a - 1)?;
                            }
                            if b > 0 {
                                apply_random_pauli(&mut state, op.targets[0], b - 1)?;
                            }
                        }
                    }
                    _ => {
                        if noise.depol_1q > 0.0 && rng.gen::<f64>() < noise.depol_1q {
                            let which = rng.gen_range(0..3u8);
                            apply_random_pauli(&mut state, op.targets[0], which)?;
                        }
                    }
                }
            }
            state.apply_1q(&gates::h(), control)?;
            let p1 = state.probability_of_one(control)?;
            Ok(rng.gen::<f64>() < p1)
        })
        .collect();

    let counts = ShotCounts::from_bits(outcomes?);
    let readout_seed = split_seed(noise.rng_seed, u64::MAX);
    let counts = apply_readout_error(&counts, noise.readout_for(control), readout_seed)?;
    counts.expectation_pm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::InitialState;

    #[test]
    fn raw_table_values_as_published() {
        let t = ibmqx4_parameters();
        assert_eq!(t.gate_error[3], 3.78);
        assert_eq!(t.readout_error[0], 7.00);
        assert_eq!(t.t1_us[4], 55.20);
        assert_eq!(t.frequency_ghz[2], 5.35);
    }

    #[test]
    fn scale_interpretation_matches_methods_orders() {
        let t = ibmqx4_parameters();
        let readout: Vec<f64> = (0..5).map(|q| t.readout_error_prob(q)).collect();
        for (got, want) in readout.iter().zip([0.070, 0.058, 0.086, 0.037, 0.058]) {
            assert!((got - want).abs() < 1e-12);
        }
        let gate: Vec<f64> = (0..5).map(|q| t.gate_error_prob(q)).collect();
        for (got, want) in gate.iter().zip([0.0086, 0.0129, 0.0120, 0.0378, 0.0103]) {
            assert!((got - want).abs() < 1e-12);
        }
        // Everything interpreted lands in [0, 0.1].
        let m = table1_noise_model();
        for p in m
            .readout_error
            .iter()
            .chain([m.depol_1q, m.depol_2q].iter())
        {
            assert!((0.0..=0.1).contains(p), "{p}");
        }
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::new(vec![0.5], 0.0, 0.0, 0).is_ok());
        assert!(NoiseModel::new(vec![1.5], 0.0, 0.0, 0).is_err());
        assert!(NoiseModel::new(vec![], -0.1, 0.0, 0).is_err());
    }

    #[test]
    fn sampling_an_x_eigenstate_is_deterministic() {
        let mut plus = StateVector::zero(1).unwrap();
        plus.apply_1q(&gates::h(), 0).unwrap();
        let counts = sample_shots(&plus, 0, MeasurementBasis::X, 500, 3).unwrap();
        assert_eq!(counts.count_of("0"), 500);
        assert_eq!(counts.total(), 500);
        assert!((counts.expectation_pm().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampling_concentrates_around_the_mean() {
        // |0⟩ has ⟨X⟩ = 0; at 10⁵ shots the estimate sits within 4/√shots.
        let zero = StateVector::zero(1).unwrap();
        let shots = 100_000;
        let counts = sample_shots(&zero, 0, MeasurementBasis::X, shots, 11).unwrap();
        let est = counts.expectation_pm().unwrap();
        assert!(est.abs() < 4.0 / (shots as f64).sqrt(), "{est}");
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply_1q(&gates::u3(0.9, 0.2, 0.1), 1).unwrap();
        let a = sample_shots(&s, 1, MeasurementBasis::X, 1000, 42).unwrap();
        let b = sample_shots(&s, 1, MeasurementBasis::X, 1000, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_shots(&s, 1, MeasurementBasis::X, 1000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn estimator_is_unbiased_across_seeds() {
        // Mean over 50 seeds at 10⁴ shots within 3 standard errors of the
        // exact ⟨X⟩ (= 0 for |0⟩, sigma = 1/√shots per seed).
        let zero = StateVector::zero(1).unwrap();
        let shots = 10_000u64;
        let mean: f64 = (0..50)
            .map(|seed| {
                sample_shots(&zero, 0, MeasurementBasis::X, shots, seed)
                    .unwrap()
                    .expectation_pm()
                    .unwrap()
            })
            .sum::<f64>()
            / 50.0;
        let se = (1.0 / (shots as f64).sqrt()) / 50f64.sqrt();
        assert!(mean.abs() < 3.0 * se, "mean = {mean}, 3se = {}", 3.0 * se);
    }

    #[test]
    fn readout_error_edge_probabilities() {
        let mut counts = BTreeMap::new();
        counts.insert("0".to_string(), 700u64);
        counts.insert("1".to_string(), 300u64);
        let counts = ShotCounts::from_counts(counts);
        let same = apply_readout_error(&counts, 0.0, 5).unwrap();
        assert_eq!(same, counts);
        let flipped = apply_readout_error(&counts, 1.0, 5).unwrap();
        assert_eq!(flipped.count_of("0"), 300);
        assert_eq!(flipped.count_of("1"), 700);
        assert_eq!(flipped.total(), 1000);
        assert!(apply_readout_error(&counts, 1.2, 5).is_err());
    }

    #[test]
    fn readout_error_binomial_fraction() {
        let mut counts = BTreeMap::new();
        counts.insert("0".to_string(), 100_000u64);
        let counts = ShotCounts::from_counts(counts);
        let p = 0.07;
        let noisy = apply_readout_error(&counts, p, 9).unwrap();
        let frac = noisy.count_of("1") as f64 / 100_000.0;
        let sigma = (p * (1.0 - p) / 100_000.0).sqrt();
        assert!((frac - p).abs() < 3.0 * sigma, "frac = {frac}");
    }

    #[test]
    fn zero_noise_shot_run_converges_to_noiseless() {
        let cfg = ProtocolConfig::paper_default().at_time(1.0);
        let exact = crate::protocol::run_protocol(&cfg).unwrap();
        let shots = 8192;
        let est = run_protocol_noisy(&cfg, &NoiseModel::noiseless(7), shots).unwrap();
        assert!(
            (est - exact).abs() < 4.0 / (shots as f64).sqrt(),
            "est = {est}, exact = {exact}"
        );
    }

    #[test]
    fn noisy_runs_are_seed_deterministic() {
        let cfg = ProtocolConfig::paper_default().at_time(0.8);
        let noise = table1_noise_model().with_seed(123);
        let a = run_protocol_noisy(&cfg, &noise, 512).unwrap();
        let b = run_protocol_noisy(&cfg, &noise, 512).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn full_depolarizing_flattens_toward_zero() {
        let cfg = ProtocolConfig::paper_default().at_time(0.0);
        let noise = NoiseModel::new(vec![0.0; 3], 1.0, 1.0, 5).unwrap();
        let shots = 4096;
        let est = run_protocol_noisy(&cfg, &noise, shots).unwrap();
        assert!(est.abs() < 6.0 / (shots as f64).sqrt(), "est = {est}");
    }

    #[test]
    fn table1_noise_reduces_t0_contrast() {
        // At t = 0 the noiseless value is exactly 1; readout flips alone
        // pull the estimate down to about 1 - 2p.
        let cfg = ProtocolConfig::paper_default()
            .with_initial_state(InitialState::BellBlockade);
        let noise = table1_noise_model().with_seed(11);
        let est = run_protocol_noisy(&cfg, &noise, 4096).unwrap();
        assert!(est < 0.95, "est = {est}");
        assert!(est > 0.5, "est = {est}");
    }
}
