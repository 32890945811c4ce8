//! Flat key-value run configuration (TOML): Hamiltonian parameters at the
//! top level, noise parameters in an optional `[noise]` section.
//!
//! ```toml
//! n_spins = 2
//! omega = 1.0
//! v12 = 1.0
//! interaction_form = "zz"   # or "number"
//!
//! [noise]
//! readout_error = [0.070, 0.058, 0.086]
//! depol_1q = 0.001632
//! depol_2q = 0.01632
//! seed = 7
//! ```
//!
//! Every key is optional; omitted Hamiltonian keys fall back to the
//! defaults ħΩ = 1, V₁₂ = 1, two spins, σzσz form. `v12` couples the spin
//! pair (0, 1); larger registers leave other pairs uncoupled.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianSpec, InteractionForm};
use crate::noise::NoiseModel;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub hamiltonian: HamiltonianSpec,
    pub noise: Option<NoiseModel>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n_spins: Option<usize>,
    omega: Option<f64>,
    v12: Option<f64>,
    interaction_form: Option<String>,
    noise: Option<RawNoise>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    #[serde(default)]
    readout_error: Vec<f64>,
    #[serde(default)]
    depol_1q: f64,
    #[serde(default)]
    depol_2q: f64,
    #[serde(default)]
    seed: u64,
}

pub fn interaction_form_from_str(s: &str) -> Result<InteractionForm> {
    match s {
        "zz" => Ok(InteractionForm::PauliZz),
        "number" => Ok(InteractionForm::NumberOperator),
        other => Err(Error::Config(format!(
            "interaction_form must be \"zz\" or \"number\", got \"{other}\""
        ))),
    }
}

pub fn parse_config(text: &str) -> Result<Config> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let n_spins = raw.n_spins.unwrap_or(2);
    if n_spins == 0 {
        return Err(Error::Config("n_spins must be >= 1".into()));
    }
    let omega = raw.omega.unwrap_or(1.0);
    let v12 = raw.v12.unwrap_or(1.0);
    let form = match raw.interaction_form.as_deref() {
        Some(s) => interaction_form_from_str(s)?,
        None => InteractionForm::PauliZz,
    };
    let mut couplings = nalgebra::DMatrix::zeros(n_spins, n_spins);
    if n_spins >= 2 {
        couplings[(0, 1)] = v12;
        couplings[(1, 0)] = v12;
    }
    let hamiltonian = HamiltonianSpec::new(omega, couplings, form)?;
    let noise = raw
        .noise
        .map(|n| NoiseModel::new(n.readout_error, n.depol_1q, n.depol_2q, n.seed))
        .transpose()?;
    Ok(Config { hamiltonian, noise })
}
