pub mod sweep;
pub mod threshold;
pub mod transfer;
pub mod validate;

use num_complex::Complex64;
use pst_core::{AliceSettings, BboCoupling, QubitSpec};

use crate::config::Engine;
use crate::error::{CliError, Result};

/// Protocol settings for `qubit` under the merged engine configuration.
pub(crate) fn preset(qubit: &QubitSpec, engine: &Engine) -> pst_core::Result<AliceSettings> {
    let coupling = BboCoupling::new(engine.g)?;
    AliceSettings::protocol_preset(qubit, Complex64::new(engine.alpha, 0.0), coupling)?.with_nmax(engine.nmax)
}

pub(crate) fn qubit(theta_deg: f64, phi_deg: f64) -> Result<QubitSpec> {
    QubitSpec::from_degrees(theta_deg, phi_deg).map_err(|e| CliError::usage(e.to_string()))
}
