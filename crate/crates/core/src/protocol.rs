//! Alice's adder-based encoding, transmission through the path channels, and
//! Bob's projective correction followed by a third crystal.
//!
//! The pipeline runs on [`SeriesFockState`]s so that every quantity is known
//! order by order in `g`. Post-selected quantities start at `O(g^2)`; the
//! success probability is the ratio of those leading coefficients and does
//! not depend on the numeric value of `g`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{apply_per_path_matrix, kraus_operators, ChannelKind, ChannelParams};
use crate::density::{clip_psd, reduce_series_to_path_qutrits, reduce_to_path_qutrits, GradedDensity, JointPathDensity, Mat9};
use crate::error::{check_unit_interval, Error, Result};
use crate::fock::{
    check_regime, BboCoupling, OccupationVector, Path, PolarizationRotation, PumpField, PureFockState, SeriesFockState,
    DEFAULT_NMAX,
};
use crate::series::{Amplitude, CouplingSeries};

const ANGLE_SLACK: f64 = 1e-12;
/// Adder outputs with squared norm below this (relative to the pump) are
/// round-off from an exact cancellation.
const DEGENERATE_NORM_SQR: f64 = 1e-24;

/// Polarization qubit `e^{i phi_q} cos(theta) |H> + sin(theta) |V>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitSpec {
    theta: f64,
    phi_q: f64,
}

impl QubitSpec {
    /// Angles in radians; `theta` in `[0, pi/2]`.
    pub fn new(theta: f64, phi_q: f64) -> Result<Self> {
        if !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                reason: "must lie in [0, 90] degrees",
            });
        }
        if !phi_q.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi_q",
                value: phi_q,
                reason: "must be finite",
            });
        }
        Ok(Self {
            theta: theta.clamp(0.0, FRAC_PI_2),
            phi_q: phi_q.rem_euclid(2.0 * PI),
        })
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi_q(&self) -> f64 {
        self.phi_q
    }

    pub fn a1(&self) -> Complex64 {
        Complex64::from_polar(self.theta.cos(), self.phi_q)
    }

    /// Real and non-negative.
    pub fn a2(&self) -> f64 {
        self.theta.sin()
    }

    pub fn ket(&self) -> [Complex64; 2] {
        [self.a1(), Complex64::new(self.a2(), 0.0)]
    }

    /// `<psi| rho |psi>` for a 2x2 density over `(|H>, |V>)`.
    pub fn fidelity(&self, rho: &Matrix2<Complex64>) -> f64 {
        let psi = self.ket();
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                total += psi[i].conj() * rho[(i, j)] * psi[j];
            }
        }
        total.re
    }
}

/// Alice's optics between the two crystals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AliceSettings {
    /// Pump polarization after the half-wave plate, `b1|H> + b2|V>`.
    pub b1: f64,
    pub b2: f64,
    /// Attenuator factor on the pump amplitude.
    pub attenuation: f64,
    /// Retarder phase between pump and photons.
    pub phi_ret: f64,
    /// Initial pump amplitude.
    pub alpha: Complex64,
    pub coupling: BboCoupling,
    /// Per-mode photon-number truncation of the engine.
    pub nmax: u8,
}

impl AliceSettings {
    pub fn new(b1: f64, b2: f64, attenuation: f64, phi_ret: f64, alpha: Complex64, coupling: BboCoupling) -> Result<Self> {
        let settings = Self {
            b1,
            b2,
            attenuation,
            phi_ret,
            alpha,
            coupling,
            nmax: DEFAULT_NMAX,
        };
        settings.validate()?;
        Ok(settings)
    }

    /// `b1 = 1`, attenuation `a2`, retarder `pi`: cancels the `|V>` part of
    /// the first crystal's pair so only `a1 |H>` survives in path 1.
    pub fn protocol_preset(qubit: &QubitSpec, alpha: Complex64, coupling: BboCoupling) -> Result<Self> {
        Self::new(1.0, 0.0, qubit.a2(), PI, alpha, coupling)
    }

    /// Same settings with a different photon-number truncation (at least 2,
    /// so that leakage out of the one-photon sector stays visible).
    pub fn with_nmax(self, nmax: u8) -> Result<Self> {
        let settings = Self { nmax, ..self };
        settings.validate()?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nmax < 2 {
            return Err(Error::InvalidParameter {
                name: "nmax",
                value: f64::from(self.nmax),
                reason: "must be at least 2",
            });
        }
        let norm = self.b1 * self.b1 + self.b2 * self.b2;
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "b1^2 + b2^2",
                value: norm,
                reason: "pump polarization must be normalized",
            });
        }
        check_unit_interval("attenuation", self.attenuation)?;
        check_regime(self.coupling.g(), self.alpha)
    }

    pub fn is_protocol_preset(&self, qubit: &QubitSpec) -> bool {
        (self.b1 - 1.0).abs() <= 1e-12
            && (self.attenuation - qubit.a2()).abs() <= 1e-12
            && (self.phi_ret.rem_euclid(2.0 * PI) - PI).abs() <= 1e-12
    }

    /// Pump reaching the second crystal.
    pub fn second_pump(&self) -> PumpField {
        PumpField::horizontal(self.alpha)
            .through_waveplate(self.b1, self.b2)
            .attenuated(self.attenuation)
            .retarded(self.phi_ret)
    }

    /// Mixing parameter `f = e^{i phi} A b1`.
    pub fn mixing(&self) -> Complex64 {
        Complex64::from_polar(self.attenuation * self.b1, self.phi_ret)
    }
}

/// Closed form of the generalized adder: `R (|psi_A> + f |V>)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdderSpec {
    pub f: Complex64,
    /// Normalization `(|a1|^2 + |a2 + f|^2)^{-1/2}`.
    pub r: f64,
}

impl AdderSpec {
    pub fn new(qubit: &QubitSpec, settings: &AliceSettings) -> Result<Self> {
        let f = settings.mixing();
        let norm_sqr = qubit.a1().norm_sqr() + (qubit.a2() + f).norm_sqr();
        if norm_sqr < DEGENERATE_NORM_SQR {
            return Err(Error::DegenerateOutput);
        }
        Ok(Self { f, r: norm_sqr.powf(-0.5) })
    }

    pub fn output(&self, qubit: &QubitSpec) -> [Complex64; 2] {
        [qubit.a1() * self.r, (qubit.a2() + self.f) * self.r]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdderOutput {
    /// Normalized polarization of the path-1 photon over `(|H>, |V>)`.
    pub qubit: [Complex64; 2],
    /// Leading-order probability of a pair after the second crystal.
    pub pair_probability: f64,
}

/// State after the second crystal, with the total weight removed by
/// truncations and by dropping multi-photon-per-path terms.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedState {
    pub state: SeriesFockState,
    pub leakage: f64,
}

const PATH1_H_PATH2_V: OccupationVector = OccupationVector::new(1, 0, 0, 1);
const PATH1_V_PATH2_V: OccupationVector = OccupationVector::new(0, 1, 0, 1);

/// First crystal, path-1 waveplates, pump optics, second crystal.
fn encode(qubit: &QubitSpec, settings: &AliceSettings) -> Result<EncodedState> {
    settings.validate()?;
    let g = settings.coupling.g();
    let pump = PumpField::horizontal(settings.alpha);
    let vacuum = SeriesFockState::vacuum(settings.nmax, pump);

    let first = vacuum.bbo_apply_perturbative(&settings.coupling, pump.amp_h)?;
    let rotation = PolarizationRotation::from_v_image(qubit.a1(), qubit.a2())?;
    let rotated = first.state.rotate_polarization(Path::One, &rotation);

    let second_pump = settings.second_pump();
    let rotated_loss = rotated.loss_at(g);
    let second = rotated
        .state
        .with_pump(second_pump)
        .bbo_apply_perturbative(&settings.coupling, second_pump.amp_h)?;
    let kept = second.state.retain_single_photon_paths();

    let leakage = first.loss_at(g) + rotated_loss + second.loss_at(g) + kept.loss_at(g);
    Ok(EncodedState {
        state: kept.state,
        leakage,
    })
}

/// Polarization of the detected path-1 photon after the second crystal,
/// read off the engine's first-order pair amplitudes.
pub fn adder_output(qubit: &QubitSpec, settings: &AliceSettings) -> Result<AdderOutput> {
    let encoded = encode(qubit, settings)?;
    let h = encoded.state.amplitude(&PATH1_H_PATH2_V).coefficient(1);
    let v = encoded.state.amplitude(&PATH1_V_PATH2_V).coefficient(1);
    let weight = h.norm_sqr() + v.norm_sqr();
    if settings.alpha.norm_sqr() == 0.0 {
        return Err(Error::DegenerateOutput);
    }
    // Both carry the common factor i alpha.
    let common = Complex64::new(0.0, 1.0) * settings.alpha;
    let (h, v) = (h / common, v / common);
    let norm_sqr = h.norm_sqr() + v.norm_sqr();
    if norm_sqr < DEGENERATE_NORM_SQR {
        return Err(Error::DegenerateOutput);
    }
    let norm = norm_sqr.sqrt();
    let g = settings.coupling.g();
    Ok(AdderOutput {
        qubit: [h / norm, v / norm],
        pair_probability: g * g * weight,
    })
}

/// Alice's encoded state `|S1>` for the protocol preset.
pub fn prepare_s1(qubit: &QubitSpec, settings: &AliceSettings) -> Result<EncodedState> {
    if !settings.is_protocol_preset(qubit) {
        return Err(Error::InvalidParameter {
            name: "attenuation",
            value: settings.attenuation,
            reason: "state transfer requires b1 = 1, attenuation = a2, retarder = pi",
        });
    }
    encode(qubit, settings)
}

/// Initial pump amplitude that leaves `target_alpha2` on the pump after the
/// second crystal (`alpha2 = -a2 alpha` under the preset).
pub fn alpha2_regulation(qubit: &QubitSpec, target_alpha2: Complex64, coupling: &BboCoupling) -> Result<Complex64> {
    if qubit.a2() == 0.0 {
        return Err(Error::DegenerateInput("a2 = 0 leaves the post-crystal pump at zero"));
    }
    let alpha = -target_alpha2 / qubit.a2();
    check_regime(coupling.g(), alpha)?;
    Ok(alpha)
}

/// Sends a plain state through the path channels.
pub fn transmit(state: &PureFockState, channel: &ChannelParams, kind: ChannelKind) -> Result<JointPathDensity> {
    channel.validate()?;
    let (ch1, ch2) = channel.specs(kind);
    let joint = reduce_to_path_qutrits(state)?;
    crate::channels::apply_per_path(&joint, &ch1, &ch2)
}

/// Order-resolved version of [`transmit`].
pub fn transmit_graded(state: &SeriesFockState, channel: &ChannelParams, kind: ChannelKind, g: f64) -> Result<GradedDensity> {
    channel.validate()?;
    let (ch1, ch2) = channel.specs(kind);
    let graded = reduce_series_to_path_qutrits(state, g)?;
    let orders = graded
        .orders()
        .iter()
        .map(|m| apply_per_path_matrix(m, &ch1, &ch2))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradedDensity::new(orders))
}

/// Pump amplitude Bob feeds the third crystal.
///
/// The agreed post-crystal amplitude `alpha2` is attenuated by the expected
/// amplitude loss of the channel and polarizers (`1 - p/2` per depolarized
/// path pair, none for dephasing) and phase-shifted by `pi`, the same
/// retarder setting Alice uses, so the regenerated `|V>` pair adds `+a2`.
pub fn bob_pump(alpha2: Complex64, channel: &ChannelParams, kind: ChannelKind) -> Complex64 {
    let attenuation = match kind {
        ChannelKind::Depolarizing => ((1.0 - channel.p / 2.0) * (1.0 - channel.path2_depolarization() / 2.0)).sqrt(),
        ChannelKind::Dephasing => 1.0,
    };
    -alpha2 * attenuation
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    /// Weight removed by truncation before transmission, at the numeric `g`.
    pub leakage: f64,
    /// Power of `g` at which the post-selected block first appears.
    pub leading_order: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferOutcome {
    /// Path-1 polarization density over `(|H>, |V>)`.
    #[serde(skip)]
    pub output_qubit_density: Matrix2<Complex64>,
    pub success_probability: f64,
    pub postselect_probability: f64,
    pub diagnostics: Diagnostics,
}

/// Joint indices of `|H>_1 |V>_2` and `|V>_1 |V>_2`.
const POSTSELECTED: [usize; 2] = [5, 8];

/// Polarizer projection: path 1 keeps `{|0>, |H>}`, path 2 keeps `{|0>, |V>}`.
fn polarizer_projection(m: &Mat9) -> Mat9 {
    let keep = |idx: usize| {
        let (l1, l2) = (idx / 3, idx % 3);
        l1 != 2 && l2 != 1
    };
    Mat9::from_fn(|r, c| if keep(r) && keep(c) { m[(r, c)] } else { Complex64::new(0.0, 0.0) })
}

/// Projects, runs the third crystal (`1 + i g alpha3 a1V^dag a2V^dag`, density
/// form) and post-selects one photon per path with path 2 vertical.
pub fn bob_reconstruct(
    joint: &GradedDensity,
    channel: &ChannelParams,
    kind: ChannelKind,
    coupling: &BboCoupling,
    alpha2: Complex64,
    qubit: &QubitSpec,
) -> Result<TransferOutcome> {
    let alpha3 = bob_pump(alpha2, channel, kind);
    check_regime(coupling.g(), alpha3)?;

    let projected = joint.map(polarizer_projection);
    // Inside the qutrit space the pair creator only maps |0,0> to |V,V>.
    let mut creator = Mat9::zeros();
    creator[(8, 0)] = Complex64::new(0.0, 1.0) * alpha3;

    let degree = projected.degree();
    let orders: Vec<Mat9> = (0..=degree)
        .map(|n| {
            let mut m = projected.order(n);
            if n >= 1 {
                let prev = projected.order(n - 1);
                m += creator * prev + prev * creator.adjoint();
            }
            if n >= 2 {
                m += creator * projected.order(n - 2) * creator.adjoint();
            }
            m
        })
        .collect();

    let blocks: Vec<Matrix2<Complex64>> = orders
        .iter()
        .map(|m| Matrix2::from_fn(|r, c| m[(POSTSELECTED[r], POSTSELECTED[c])]))
        .collect();

    let scale = orders[0].trace().re.abs().max(1.0);
    let leading_order = blocks
        .iter()
        .position(|b| b.trace().re > 1e-14 * scale)
        .ok_or(Error::DegenerateOutcome)?;
    let lead = blocks[leading_order];
    let rho = clip_psd(&lead.unscale(lead.trace().re));

    let g = coupling.g();
    let postselect_probability = blocks
        .iter()
        .rev()
        .fold(0.0, |acc, b| acc * g + b.trace().re);

    Ok(TransferOutcome {
        output_qubit_density: rho,
        success_probability: qubit.fidelity(&rho),
        postselect_probability,
        diagnostics: Diagnostics {
            leakage: 0.0,
            leading_order,
        },
    })
}

/// Full protocol for `qubit` with initial pump amplitude `alpha`.
pub fn simulate_transfer(
    qubit: &QubitSpec,
    alpha: Complex64,
    coupling: BboCoupling,
    channel: &ChannelParams,
    kind: ChannelKind,
) -> Result<TransferOutcome> {
    let settings = AliceSettings::protocol_preset(qubit, alpha, coupling)?;
    simulate_with_settings(qubit, &settings, channel, kind)
}

/// Full protocol for explicit (preset) settings, e.g. a non-default `nmax`.
pub fn simulate_with_settings(
    qubit: &QubitSpec,
    settings: &AliceSettings,
    channel: &ChannelParams,
    kind: ChannelKind,
) -> Result<TransferOutcome> {
    let encoded = prepare_s1(qubit, settings)?;
    let g = settings.coupling.g();
    let joint = transmit_graded(&encoded.state, channel, kind, g)?;
    let alpha2 = settings.second_pump().amp_h;
    let mut outcome = bob_reconstruct(&joint, channel, kind, &settings.coupling, alpha2, qubit)?;
    outcome.diagnostics.leakage = encoded.leakage;
    Ok(outcome)
}

/// Sends the polarization qubit as a single photon on path 1 through the
/// path-1 channel, with no encoding.
pub fn simulate_direct(qubit: &QubitSpec, channel: &ChannelParams, kind: ChannelKind) -> Result<TransferOutcome> {
    channel.validate()?;
    let (spec, _) = channel.specs(kind);
    let psi = [Complex64::new(0.0, 0.0), qubit.a1(), Complex64::new(qubit.a2(), 0.0)];
    let rho = nalgebra::Matrix3::from_fn(|i, j| psi[i] * psi[j].conj());
    let out = kraus_operators(&spec)?
        .iter()
        .fold(nalgebra::Matrix3::zeros(), |acc, k| acc + k * rho * k.adjoint());
    let block = Matrix2::from_fn(|r, c| out[(r + 1, c + 1)]);
    let arrived = block.trace().re;
    let rho = clip_psd(&block.unscale(arrived));
    Ok(TransferOutcome {
        output_qubit_density: rho,
        success_probability: qubit.fidelity(&rho),
        postselect_probability: arrived,
        diagnostics: Diagnostics::default(),
    })
}

/// Amplitude of `|S1>` on the vacuum, as a series in `g`.
pub fn s1_vacuum_amplitude(encoded: &EncodedState) -> CouplingSeries {
    encoded.state.amplitude(&OccupationVector::VACUUM)
}

/// Amplitude of `|S1>` on `|H>_1 |V>_2`, as a series in `g`.
pub fn s1_pair_amplitude(encoded: &EncodedState) -> CouplingSeries {
    encoded.state.amplitude(&PATH1_H_PATH2_V)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{p_direct_dephasing, p_pst_analytic, p_pst_dephasing, p_straight_analytic};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn coupling() -> BboCoupling {
        BboCoupling::new(1e-3).unwrap()
    }

    fn depolarizing(p: f64) -> ChannelParams {
        ChannelParams::depolarizing(p).unwrap()
    }

    #[test]
    fn qubit_parametrization() {
        let q = QubitSpec::from_degrees(30.0, 90.0).unwrap();
        assert!((q.a1() - c(0.0, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        assert!((q.a2() - 0.5).abs() < 1e-15);
        assert!((q.a1().norm_sqr() + q.a2() * q.a2() - 1.0).abs() < 1e-12);
        assert!(QubitSpec::from_degrees(91.0, 0.0).is_err());
    }

    #[test]
    fn adder_without_attenuation_is_transparent() {
        let q = QubitSpec::from_degrees(30.0, 45.0).unwrap();
        let s = AliceSettings::new(1.0, 0.0, 0.0, 0.0, c(1.0, 0.0), coupling()).unwrap();
        let out = adder_output(&q, &s).unwrap();
        let ket = q.ket();
        assert!((out.qubit[0] - ket[0]).norm() < 1e-12);
        assert!((out.qubit[1] - ket[1]).norm() < 1e-12);
        assert!((out.pair_probability - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn adder_preset_gives_horizontal() {
        for theta in [0.0, 20.0, 45.0, 89.0] {
            let q = QubitSpec::from_degrees(theta, 0.0).unwrap();
            let s = AliceSettings::protocol_preset(&q, c(1.0, 0.0), coupling()).unwrap();
            let out = adder_output(&q, &s).unwrap();
            assert!((out.qubit[0].norm() - 1.0).abs() < 1e-12, "theta {theta}");
            assert!(out.qubit[1].norm() < 1e-12);
        }
    }

    #[test]
    fn adder_equal_superposition() {
        let q = QubitSpec::from_degrees(0.0, 0.0).unwrap();
        let s = AliceSettings::new(1.0, 0.0, 1.0, 0.0, c(1.0, 0.0), coupling()).unwrap();
        let out = adder_output(&q, &s).unwrap();
        let r = 0.5f64.sqrt();
        assert!((out.qubit[0] - c(r, 0.0)).norm() < 1e-12);
        assert!((out.qubit[1] - c(r, 0.0)).norm() < 1e-12);
        assert!((out.pair_probability - 2e-6).abs() < 1e-18);

        let closed = AdderSpec::new(&q, &s).unwrap().output(&q);
        assert!((closed[0] - out.qubit[0]).norm() < 1e-12);
        assert!((closed[1] - out.qubit[1]).norm() < 1e-12);
    }

    #[test]
    fn adder_degenerate_output() {
        let q = QubitSpec::from_degrees(90.0, 0.0).unwrap();
        let s = AliceSettings::protocol_preset(&q, c(1.0, 0.0), coupling()).unwrap();
        assert_eq!(adder_output(&q, &s).unwrap_err(), Error::DegenerateOutput);
        assert_eq!(AdderSpec::new(&q, &s).unwrap_err(), Error::DegenerateOutput);
    }

    #[test]
    fn s1_amplitudes() {
        let g = 1e-3;
        for (theta, pair, pump) in [(90.0, 0.0, -1.0), (0.0, 1.0, 0.0), (45.0, 0.5f64.sqrt(), -(0.5f64.sqrt()))] {
            let q = QubitSpec::from_degrees(theta, 0.0).unwrap();
            let s = AliceSettings::protocol_preset(&q, c(1.0, 0.0), coupling()).unwrap();
            let enc = prepare_s1(&q, &s).unwrap();
            let amp = s1_pair_amplitude(&enc).eval(g);
            assert!((amp - c(0.0, g * pair)).norm() < 1e-8, "theta {theta}: {amp}");
            assert!((enc.state.pump().amp_h - c(pump, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn s1_vacuum_matches_closed_form_to_second_order() {
        let q = QubitSpec::from_degrees(35.0, 0.0).unwrap();
        let alpha = c(0.7, 0.4);
        let s = AliceSettings::protocol_preset(&q, alpha, coupling()).unwrap();
        let enc = prepare_s1(&q, &s).unwrap();
        let vac = s1_vacuum_amplitude(&enc);
        let a2 = q.a2();
        let n = alpha.norm_sqr();
        // (1 + g^2 a2^2 n / 2)(1 - g^2 n / 2) = 1 + g^2 n (a2^2 - 1) / 2 + O(g^4)
        assert!((vac.coefficient(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(vac.coefficient(1).norm() < 1e-15);
        assert!((vac.coefficient(2) - c(n * (a2 * a2 - 1.0) / 2.0, 0.0)).norm() < 1e-14);
        // Only |H>_1 |V>_2 survives at first order.
        let vv = enc.state.amplitude(&PATH1_V_PATH2_V);
        assert!(vv.coefficient(1).norm() < 1e-15);
    }

    #[test]
    fn s1_requires_preset() {
        let q = QubitSpec::from_degrees(30.0, 0.0).unwrap();
        let s = AliceSettings::new(1.0, 0.0, 0.0, 0.0, c(1.0, 0.0), coupling()).unwrap();
        assert!(prepare_s1(&q, &s).is_err());
    }

    #[test]
    fn alpha2_regulation_examples() {
        let k = coupling();
        let q = QubitSpec::from_degrees(30.0, 0.0).unwrap();
        assert!((alpha2_regulation(&q, c(-0.5, 0.0), &k).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(alpha2_regulation(&q, c(0.0, 0.0), &k).unwrap().norm(), 0.0);
        let q90 = QubitSpec::from_degrees(90.0, 0.0).unwrap();
        assert_eq!(alpha2_regulation(&q90, c(0.3, 0.1), &k).unwrap(), c(-0.3, -0.1));
        let q0 = QubitSpec::from_degrees(0.0, 0.0).unwrap();
        assert!(matches!(alpha2_regulation(&q0, c(0.3, 0.0), &k), Err(Error::DegenerateInput(_))));
    }

    fn s1_numeric(theta: f64) -> PureFockState {
        let q = QubitSpec::from_degrees(theta, 0.0).unwrap();
        let s = AliceSettings::protocol_preset(&q, c(1.0, 0.0), coupling()).unwrap();
        prepare_s1(&q, &s).unwrap().state.evaluate(1e-3)
    }

    #[test]
    fn transmit_identity_channel() {
        let state = s1_numeric(45.0);
        let out = transmit(&state, &depolarizing(0.0), ChannelKind::Depolarizing).unwrap();
        let pure = reduce_to_path_qutrits(&state).unwrap();
        assert!(crate::density::complex_abs_max(&(out.matrix() - pure.matrix())) < 1e-15);
    }

    #[test]
    fn transmit_full_dephasing_kills_coherence() {
        let state = s1_numeric(45.0);
        let pure = reduce_to_path_qutrits(&state).unwrap();
        let out = transmit(&state, &ChannelParams::dephasing(1.0, 1.0).unwrap(), ChannelKind::Dephasing).unwrap();
        assert_eq!(out.element((1, 2), (0, 0)).norm(), 0.0);
        for i in 0..9 {
            assert!((out.matrix()[(i, i)] - pure.matrix()[(i, i)]).norm() < 1e-15);
        }
    }

    #[test]
    fn transmit_half_depolarization() {
        let state = s1_numeric(45.0);
        let pure = reduce_to_path_qutrits(&state).unwrap();
        let out = transmit(&state, &depolarizing(0.5), ChannelKind::Depolarizing).unwrap();
        let pair = out.element((1, 2), (1, 2)).re / pure.element((1, 2), (1, 2)).re;
        let coh = out.element((1, 2), (0, 0)).norm() / pure.element((1, 2), (0, 0)).norm();
        assert!((pair - 0.5625).abs() < 1e-12);
        assert!((coh - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_examples() {
        let k = coupling();
        let cases = [(45.0, 0.0, 1.0), (45.0, 1.0, 0.5), (45.0, 0.5, 5.0 / 6.0)];
        for (theta, p, expected) in cases {
            let q = QubitSpec::from_degrees(theta, 0.0).unwrap();
            let out = simulate_transfer(&q, c(1.0, 0.0), k, &depolarizing(p), ChannelKind::Depolarizing).unwrap();
            assert!((out.success_probability - expected).abs() < 1e-12, "p {p}: {}", out.success_probability);
            assert_eq!(out.diagnostics.leading_order, 2);
            let check = q.fidelity(&out.output_qubit_density);
            assert!((check - out.success_probability).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_ninety_recovers_v() {
        let q = QubitSpec::from_degrees(90.0, 0.0).unwrap();
        for p in [0.0, 0.5, 1.0] {
            let out = simulate_transfer(&q, c(1.0, 0.0), coupling(), &depolarizing(p), ChannelKind::Depolarizing).unwrap();
            assert!((out.success_probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn larger_truncation_changes_nothing_at_leading_order() {
        let q = QubitSpec::from_degrees(30.0, 0.0).unwrap();
        let ch = depolarizing(0.4);
        let base = AliceSettings::protocol_preset(&q, c(1.0, 0.0), coupling()).unwrap();
        let wide = base.with_nmax(4).unwrap();
        let a = simulate_with_settings(&q, &base, &ch, ChannelKind::Depolarizing).unwrap();
        let b = simulate_with_settings(&q, &wide, &ch, ChannelKind::Depolarizing).unwrap();
        assert!((a.success_probability - b.success_probability).abs() < 1e-12);
        assert!(base.with_nmax(1).is_err());
    }

    #[test]
    fn zero_pump_is_degenerate() {
        let q = QubitSpec::from_degrees(30.0, 0.0).unwrap();
        let err = simulate_transfer(&q, c(0.0, 0.0), coupling(), &depolarizing(0.3), ChannelKind::Depolarizing).unwrap_err();
        assert_eq!(err, Error::DegenerateOutcome);
    }

    #[test]
    fn pipeline_matches_formulas_off_grid() {
        let k = coupling();
        for (theta, p) in [(12.5, 0.33), (61.0, 0.91), (77.7, 0.05)] {
            let q = QubitSpec::from_degrees(theta, 10.0).unwrap();
            let out = simulate_transfer(&q, c(0.4, -0.2), k, &depolarizing(p), ChannelKind::Depolarizing).unwrap();
            assert!((out.success_probability - p_pst_analytic(q.theta(), p)).abs() < 1e-12);
        }
        for (theta, b1, b2) in [(12.5, 0.33, 0.7), (45.0, 0.19, 0.0)] {
            let q = QubitSpec::from_degrees(theta, 0.0).unwrap();
            let ch = ChannelParams::dephasing(b1, b2).unwrap();
            let out = simulate_transfer(&q, c(1.0, 0.0), k, &ch, ChannelKind::Dephasing).unwrap();
            assert!((out.success_probability - p_pst_dephasing(q.theta(), b1, b2)).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_transmission() {
        let q = QubitSpec::from_degrees(45.0, 0.0).unwrap();
        let none = simulate_direct(&q, &depolarizing(0.0), ChannelKind::Depolarizing).unwrap();
        assert!((none.success_probability - 1.0).abs() < 1e-12);
        for theta in [0.0, 17.0, 45.0, 90.0] {
            let q = QubitSpec::from_degrees(theta, 33.0).unwrap();
            let out = simulate_direct(&q, &depolarizing(0.6), ChannelKind::Depolarizing).unwrap();
            assert!((out.success_probability - 0.7).abs() < 1e-12);
            assert!((out.success_probability - p_straight_analytic(0.6)).abs() < 1e-12);
        }
        let ch = ChannelParams::dephasing(0.5, 0.0).unwrap();
        let out = simulate_direct(&q, &ch, ChannelKind::Dephasing).unwrap();
        assert!((out.success_probability - 0.75).abs() < 1e-12);
        assert!((out.success_probability - p_direct_dephasing(q.theta(), 0.5)).abs() < 1e-12);
    }

    #[test]
    fn bob_pump_sign_and_attenuation() {
        let a = bob_pump(c(-0.5, 0.0), &depolarizing(0.5), ChannelKind::Depolarizing);
        assert!((a - c(0.375, 0.0)).norm() < 1e-15);
        let ch = ChannelParams::dephasing(0.3, 0.3).unwrap();
        assert_eq!(bob_pump(c(-0.5, 0.0), &ch, ChannelKind::Dephasing), c(0.5, 0.0));
    }
}
