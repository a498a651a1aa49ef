//! Protected transfer of a single-photon polarization qubit through noisy
//! paths, using cascaded down-conversion crystals as an approximate quantum
//! adder.
//!
//! The crate is organized bottom-up:
//!
//! * [`fock`]: four-mode Fock states, ladder operators, the perturbative
//!   crystal operator and waveplates. Amplitudes are generic so the same code
//!   runs on plain complex numbers or on power series in the coupling `g`
//!   ([`series`]).
//! * [`oracle`]: exact evolution with a quantized pump, for cross-checks.
//! * [`density`] and [`channels`]: per-path qutrit densities and the
//!   depolarizing / dephasing channels with their Choi and Kraus forms.
//! * [`protocol`]: Alice's encoding, transmission and Bob's correction.
//! * [`analytic`]: closed-form success probabilities.
//! * [`distill`]: the distilled-teleportation baseline and the advantage
//!   threshold.
//!
//! ```
//! use num_complex::Complex64;
//! use pst_core::{simulate_transfer, BboCoupling, ChannelKind, ChannelParams, QubitSpec};
//!
//! let qubit = QubitSpec::from_degrees(45.0, 0.0)?;
//! let coupling = BboCoupling::new(1e-3)?;
//! let channel = ChannelParams::depolarizing(1.0)?;
//! let outcome = simulate_transfer(&qubit, Complex64::new(1.0, 0.0), coupling, &channel, ChannelKind::Depolarizing)?;
//! assert!((outcome.success_probability - 0.5).abs() < 1e-9);
//! # Ok::<(), pst_core::Error>(())
//! ```

pub mod analytic;
pub mod channels;
pub mod density;
pub mod distill;
pub mod error;
pub mod fock;
pub mod oracle;
pub mod protocol;
pub mod roots;
pub mod series;

pub use crate::analytic::{p_direct_dephasing, p_pst_analytic, p_pst_dephasing, p_straight_analytic};
pub use crate::channels::{ChannelKind, ChannelParams, ChannelSpec};
pub use crate::density::{GradedDensity, JointPathDensity, QutritDensity};
pub use crate::distill::{advantage_threshold, advantage_threshold_with_tolerance, compare, match_resources, theta_window, ComparisonPoint, DistillationModel};
pub use crate::error::{Error, Result};
pub use crate::fock::{
    BboCoupling, ModeLabel, OccupationVector, Path, Polarization, PolarizationRotation, PumpField, PureFockState,
    SeriesFockState,
};
pub use crate::protocol::{
    adder_output, prepare_s1, simulate_direct, simulate_transfer, simulate_with_settings, AliceSettings, QubitSpec,
    TransferOutcome,
};
pub use crate::series::{Amplitude, CouplingSeries};
