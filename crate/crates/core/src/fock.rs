//! Bosonic states on the two single-photon paths.
//!
//! Four path modes exist: horizontal and vertical polarization on paths 1 and
//! 2. The pump (mode `0H`, plus an idle `0V`) is carried separately as a
//! classical coherent amplitude; [`crate::oracle`] is the only place where it
//! is quantized.
//!
//! States are sparse maps from [`OccupationVector`] to an [`Amplitude`], kept
//! in a `BTreeMap` so iteration and serialization order are fixed.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{Amplitude, CouplingSeries};

/// Default per-mode truncation for the path modes.
pub const DEFAULT_NMAX: u8 = 2;

/// Largest allowed `|g * alpha|` for any pump amplitude reaching a crystal.
pub const PUMP_REGIME_BOUND: f64 = 0.1;

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054_571_817e-34;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Path {
    One,
    Two,
}

impl Path {
    pub fn from_index(path: u8) -> Result<Self> {
        match path {
            1 => Ok(Path::One),
            2 => Ok(Path::Two),
            _ => Err(Error::InvalidParameter {
                name: "path",
                value: f64::from(path),
                reason: "paths are numbered 1 and 2",
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Polarization {
    H,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ModeLabel {
    pub path: Path,
    pub polarization: Polarization,
}

impl ModeLabel {
    /// The four path modes in storage order.
    pub const ALL: [ModeLabel; 4] = [
        ModeLabel::new(Path::One, Polarization::H),
        ModeLabel::new(Path::One, Polarization::V),
        ModeLabel::new(Path::Two, Polarization::H),
        ModeLabel::new(Path::Two, Polarization::V),
    ];

    pub const fn new(path: Path, polarization: Polarization) -> Self {
        Self { path, polarization }
    }

    fn index(self) -> usize {
        let p = match self.path {
            Path::One => 0,
            Path::Two => 2,
        };
        match self.polarization {
            Polarization::H => p,
            Polarization::V => p + 1,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = match self.path {
            Path::One => 1,
            Path::Two => 2,
        };
        write!(f, "{path}{:?}", self.polarization)
    }
}

/// Photon counts on `(1H, 1V, 2H, 2V)`.
///
/// Ordering is lexicographic over that fixed mode order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OccupationVector([u8; 4]);

impl OccupationVector {
    pub const VACUUM: Self = Self([0; 4]);

    pub const fn new(n1h: u8, n1v: u8, n2h: u8, n2v: u8) -> Self {
        Self([n1h, n1v, n2h, n2v])
    }

    pub fn counts(&self) -> [u8; 4] {
        self.0
    }

    pub fn count(&self, mode: ModeLabel) -> u8 {
        self.0[mode.index()]
    }

    pub fn with_count(mut self, mode: ModeLabel, n: u8) -> Self {
        self.0[mode.index()] = n;
        self
    }

    /// `(n_H, n_V)` on one path.
    pub fn path_counts(&self, path: Path) -> (u8, u8) {
        let h = self.count(ModeLabel::new(path, Polarization::H));
        let v = self.count(ModeLabel::new(path, Polarization::V));
        (h, v)
    }

    pub fn path_photons(&self, path: Path) -> u8 {
        let (h, v) = self.path_counts(path);
        h + v
    }

    pub fn max_count(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "|{a},{b};{c},{d}>")
    }
}

/// Classical coherent pump amplitudes on the horizontal and vertical pump
/// modes.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize)]
pub struct PumpField {
    pub amp_h: Complex64,
    pub amp_v: Complex64,
}

impl PumpField {
    pub fn horizontal(alpha: Complex64) -> Self {
        Self {
            amp_h: alpha,
            amp_v: Complex64::new(0.0, 0.0),
        }
    }

    /// Half-wave plate sending `|H>` to `b1|H> + b2|V>` (input assumed
    /// horizontal; any vertical part is discarded by the polarizing optics).
    pub fn through_waveplate(self, b1: f64, b2: f64) -> Self {
        Self {
            amp_h: self.amp_h * b1,
            amp_v: self.amp_h * b2,
        }
    }

    /// Amplitude attenuation by `factor`.
    pub fn attenuated(self, factor: f64) -> Self {
        Self {
            amp_h: self.amp_h * factor,
            amp_v: self.amp_v * factor,
        }
    }

    /// Relative phase `phi` between pump and photons.
    pub fn retarded(self, phi: f64) -> Self {
        let phase = Complex64::from_polar(1.0, phi);
        Self {
            amp_h: self.amp_h * phase,
            amp_v: self.amp_v * phase,
        }
    }

    pub fn check_regime(&self, coupling: &BboCoupling) -> Result<()> {
        check_regime(coupling.g(), self.amp_h)?;
        check_regime(coupling.g(), self.amp_v)
    }
}

pub(crate) fn check_regime(g: f64, amplitude: Complex64) -> Result<()> {
    let product = (g * amplitude).norm();
    if product <= PUMP_REGIME_BOUND {
        Ok(())
    } else {
        Err(Error::PumpRegime {
            product,
            bound: PUMP_REGIME_BOUND,
        })
    }
}

/// Dimensionless effective crystal coupling `g = -g' t / hbar`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BboCoupling {
    g: f64,
    physical: Option<(f64, f64)>,
}

impl BboCoupling {
    pub fn new(g: f64) -> Result<Self> {
        if g.is_finite() && g.abs() < 1.0 {
            Ok(Self { g, physical: None })
        } else {
            Err(Error::InvalidParameter {
                name: "g",
                value: g,
                reason: "coupling must be real with |g| < 1",
            })
        }
    }

    /// From the crystal constant `g_prime` (J) and interaction time `t` (s).
    pub fn from_physical(g_prime: f64, t: f64) -> Result<Self> {
        let mut coupling = Self::new(-g_prime * t / HBAR)?;
        coupling.physical = Some((g_prime, t));
        Ok(coupling)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// `(g', t)` when the coupling was built from physical constants.
    pub fn physical(&self) -> Option<(f64, f64)> {
        self.physical
    }
}

/// 2x2 unitary acting on `(|H>, |V>)` of one path; column `j` is the image
/// of basis state `j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationRotation {
    m: [[Complex64; 2]; 2],
}

impl PolarizationRotation {
    pub const UNITARY_TOLERANCE: f64 = 1e-12;

    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let mut deviation: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((dot - target).norm());
            }
        }
        if deviation <= Self::UNITARY_TOLERANCE {
            Ok(Self { m })
        } else {
            Err(Error::NonUnitary { deviation })
        }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m: [[one, zero], [zero, one]],
        }
    }

    /// `H <-> V`.
    pub fn swap() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m: [[zero, one], [one, zero]],
        }
    }

    /// Rotation taking `|V>` to `a1|H> + a2|V>` for real `a2`.
    pub fn from_v_image(a1: Complex64, a2: f64) -> Result<Self> {
        let a2 = Complex64::new(a2, 0.0);
        Self::new([[a2, a1], [-a1.conj(), a2]])
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }
}

/// Result of an operation that can push amplitude outside the truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncated<A: Amplitude> {
    pub state: FockState<A>,
    /// Component that fell outside the truncated space. What it measures is
    /// documented per operation.
    pub dropped: FockState<A>,
}

impl<A: Amplitude> Truncated<A> {
    pub fn loss_at(&self, g: f64) -> f64 {
        self.dropped.norm_sqr_at(g)
    }
}

impl Truncated<Complex64> {
    pub fn loss(&self) -> f64 {
        self.dropped.norm_sqr()
    }
}

/// Sparse state over the four path modes, plus the classical pump.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState<A: Amplitude> {
    nmax: u8,
    amplitudes: BTreeMap<OccupationVector, A>,
    pump: PumpField,
    normalized: bool,
}

pub type PureFockState = FockState<Complex64>;

/// State whose amplitudes are kept order by order in `g`.
pub type SeriesFockState = FockState<CouplingSeries>;

impl<A: Amplitude> FockState<A> {
    pub fn empty(nmax: u8, pump: PumpField) -> Self {
        Self {
            nmax,
            amplitudes: BTreeMap::new(),
            pump,
            normalized: false,
        }
    }

    pub fn vacuum(nmax: u8, pump: PumpField) -> Self {
        let mut state = Self::empty(nmax, pump);
        state.amplitudes.insert(OccupationVector::VACUUM, A::from_complex(Complex64::new(1.0, 0.0)));
        state.normalized = true;
        state
    }

    /// Builds a state from explicit terms; repeated keys accumulate.
    pub fn from_terms(
        nmax: u8,
        pump: PumpField,
        terms: impl IntoIterator<Item = (OccupationVector, A)>,
    ) -> Result<Self> {
        let mut state = Self::empty(nmax, pump);
        for (occ, amp) in terms {
            if occ.max_count() > nmax {
                return Err(Error::InvalidParameter {
                    name: "occupation",
                    value: f64::from(occ.max_count()),
                    reason: "count exceeds the truncation level",
                });
            }
            state.accumulate(occ, amp);
        }
        state.prune();
        Ok(state)
    }

    pub fn nmax(&self) -> u8 {
        self.nmax
    }

    pub fn pump(&self) -> PumpField {
        self.pump
    }

    pub fn with_pump(mut self, pump: PumpField) -> Self {
        self.pump = pump;
        self
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Records whether the caller intends this state to carry unit norm.
    pub fn with_normalized_flag(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    pub fn amplitude(&self, occ: &OccupationVector) -> A {
        self.amplitudes.get(occ).cloned().unwrap_or_else(A::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, &A)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr_at(&self, g: f64) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr_at(g)).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for amp in out.amplitudes.values_mut() {
            *amp = amp.clone() * factor;
        }
        out.prune();
        out
    }

    /// Amplitude-wise sum; the pump and truncation of `self` are kept.
    pub fn added(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (occ, amp) in &other.amplitudes {
            out.accumulate(*occ, amp.clone());
        }
        out.prune();
        out
    }

    fn accumulate(&mut self, occ: OccupationVector, amp: A) {
        *self.amplitudes.entry(occ).or_insert_with(A::zero) += amp;
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| !a.is_zero());
    }

    fn like(&self) -> Self {
        Self::empty(self.nmax, self.pump)
    }

    /// `a^dagger` on `mode`. Terms already at the truncation level are
    /// removed; `dropped` holds those input terms, so its squared norm is
    /// the input weight that could not be raised.
    pub fn apply_creation(&self, mode: ModeLabel) -> Truncated<A> {
        let mut state = self.like();
        let mut dropped = self.like();
        for (occ, amp) in &self.amplitudes {
            let n = occ.count(mode);
            if n >= self.nmax {
                dropped.accumulate(*occ, amp.clone());
            } else {
                let factor = Complex64::new(f64::from(n + 1).sqrt(), 0.0);
                state.accumulate(occ.with_count(mode, n + 1), amp.clone() * factor);
            }
        }
        state.prune();
        Truncated { state, dropped }
    }

    /// `a` on `mode`; vacuum terms of that mode vanish.
    pub fn apply_annihilation(&self, mode: ModeLabel) -> Self {
        let mut out = self.like();
        for (occ, amp) in &self.amplitudes {
            let n = occ.count(mode);
            if n > 0 {
                let factor = Complex64::new(f64::from(n).sqrt(), 0.0);
                out.accumulate(occ.with_count(mode, n - 1), amp.clone() * factor);
            }
        }
        out.prune();
        out
    }

    /// `alpha a1V^dag a2V^dag + conj(alpha) a1V a2V`, the crystal interaction
    /// with the pump replaced by its coherent amplitude. Returns the part kept
    /// inside the truncation and the part that left it.
    fn pair_operator(&self, alpha: Complex64) -> (Self, Self) {
        let v1 = ModeLabel::new(Path::One, Polarization::V);
        let v2 = ModeLabel::new(Path::Two, Polarization::V);
        let mut kept = self.like();
        let mut beyond = self.like();
        for (occ, amp) in &self.amplitudes {
            let (n1, n2) = (occ.count(v1), occ.count(v2));
            let up = occ.with_count(v1, n1 + 1).with_count(v2, n2 + 1);
            let factor = (f64::from(n1 + 1) * f64::from(n2 + 1)).sqrt();
            let term = amp.clone() * (alpha * factor);
            if n1 < self.nmax && n2 < self.nmax {
                kept.accumulate(up, term);
            } else {
                beyond.accumulate(up, term);
            }
            if n1 > 0 && n2 > 0 {
                let down = occ.with_count(v1, n1 - 1).with_count(v2, n2 - 1);
                let factor = (f64::from(n1) * f64::from(n2)).sqrt();
                kept.accumulate(down, amp.clone() * (alpha.conj() * factor));
            }
        }
        kept.prune();
        beyond.prune();
        (kept, beyond)
    }

    /// One down-conversion crystal pumped by `effective_pump` (the horizontal
    /// pump amplitude reaching it), expanded to second order in `g`:
    ///
    /// `M = 1 + i g X - (g^2 / 2) X^2`, `X = alpha a1V^dag a2V^dag + conj(alpha) a1V a2V`.
    ///
    /// `X` is the truncated operator, so `X^2` never passes through states
    /// above `nmax`. `dropped` holds the output component that `M` sends above
    /// the truncation. The pump is left unchanged.
    pub fn bbo_apply_perturbative(
        &self,
        coupling: &BboCoupling,
        effective_pump: Complex64,
    ) -> Result<Truncated<A>> {
        let g = coupling.g();
        check_regime(g, effective_pump)?;

        let (x1, beyond1) = self.pair_operator(effective_pump);
        let (x2, beyond2) = x1.pair_operator(effective_pump);

        let first = |s: &Self| s.coupled(g).scaled(I);
        let second = |s: &Self| s.coupled(g).coupled(g).scaled(Complex64::new(-0.5, 0.0));

        let state = self.added(&first(&x1)).added(&second(&x2));
        let dropped = first(&beyond1).added(&second(&beyond2));
        Ok(Truncated { state, dropped })
    }

    fn coupled(&self, g: f64) -> Self {
        let mut out = self.clone();
        for amp in out.amplitudes.values_mut() {
            *amp = amp.times_coupling(g);
        }
        out.prune();
        out
    }

    /// Applies `u` to the polarization of every photon on `path`.
    ///
    /// Each creation operator transforms as `a_j^dag -> sum_k u[k][j] a_k^dag`,
    /// so multi-photon terms are handled too. Output terms above `nmax` are
    /// returned in `dropped`.
    pub fn rotate_polarization(&self, path: Path, u: &PolarizationRotation) -> Truncated<A> {
        let h = ModeLabel::new(path, Polarization::H);
        let v = ModeLabel::new(path, Polarization::V);
        let m = u.matrix();
        let mut state = self.like();
        let mut dropped = self.like();
        for (occ, amp) in &self.amplitudes {
            let (nh, nv) = occ.path_counts(path);
            for (k, coeff) in rotated_coefficients(nh, nv, &m) {
                let total = nh + nv;
                let out = occ.with_count(h, k).with_count(v, total - k);
                let term = amp.clone() * coeff;
                if k > self.nmax || total - k > self.nmax {
                    dropped.accumulate(out, term);
                } else {
                    state.accumulate(out, term);
                }
            }
        }
        state.prune();
        dropped.prune();
        Truncated { state, dropped }
    }

    /// Keeps only terms with at most one photon per path.
    pub fn retain_single_photon_paths(&self) -> Truncated<A> {
        let mut state = self.like();
        let mut dropped = self.like();
        for (occ, amp) in &self.amplitudes {
            let target = if occ.path_photons(Path::One) <= 1 && occ.path_photons(Path::Two) <= 1 {
                &mut state
            } else {
                &mut dropped
            };
            target.amplitudes.insert(*occ, amp.clone());
        }
        state.normalized = false;
        Truncated { state, dropped }
    }
}

/// Coefficients `c_k` such that the rotated term is `sum_k c_k |k, n-k>` on
/// the path, `n = nh + nv`.
fn rotated_coefficients(nh: u8, nv: u8, m: &[[Complex64; 2]; 2]) -> Vec<(u8, Complex64)> {
    // (m00 aH + m10 aV)^nh (m01 aH + m11 aV)^nv as a polynomial in the number
    // of aH factors.
    let expand = |n: u8, x: Complex64, y: Complex64| -> Vec<Complex64> {
        (0..=n)
            .map(|i| x.powu(u32::from(i)) * y.powu(u32::from(n - i)) * binomial(n, i))
            .collect()
    };
    let ph = expand(nh, m[0][0], m[1][0]);
    let pv = expand(nv, m[0][1], m[1][1]);
    let total = nh + nv;
    let mut poly = vec![Complex64::new(0.0, 0.0); usize::from(total) + 1];
    for (i, a) in ph.iter().enumerate() {
        for (j, b) in pv.iter().enumerate() {
            poly[i + j] += a * b;
        }
    }
    let norm_in = (factorial(nh) * factorial(nv)).sqrt();
    poly.into_iter()
        .enumerate()
        .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
        .map(|(k, c)| {
            let k = k as u8;
            let norm_out = (factorial(k) * factorial(total - k)).sqrt();
            (k, c * (norm_out / norm_in))
        })
        .collect()
}

fn factorial(n: u8) -> f64 {
    (1..=u32::from(n)).map(f64::from).product()
}

fn binomial(n: u8, k: u8) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

impl PureFockState {
    pub fn norm_sqr(&self) -> f64 {
        self.norm_sqr_at(0.0)
    }

    /// Checks truncation and the `norm^2 <= 1 + 1e-12` bound.
    pub fn validate(&self) -> Result<()> {
        if let Some(occ) = self.amplitudes.keys().find(|o| o.max_count() > self.nmax) {
            return Err(Error::UnsupportedSubspace {
                offending: vec![*occ],
                discarded_weight: self.amplitude(occ).norm_sqr(),
            });
        }
        let norm = self.norm_sqr();
        if norm > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter {
                name: "norm_sqr",
                value: norm,
                reason: "state norm exceeds one",
            });
        }
        Ok(())
    }

    /// Deterministic JSON: occupation vectors in ascending order, each
    /// amplitude as `[re, im]`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&SerializedState::from(self)).expect("state serialization is infallible")
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .map(|(occ, a)| a.conj() * other.amplitude(occ))
            .sum()
    }
}

impl SeriesFockState {
    /// Plain state obtained by substituting the numeric coupling `g`.
    pub fn evaluate(&self, g: f64) -> PureFockState {
        let mut out = PureFockState::empty(self.nmax, self.pump);
        for (occ, amp) in &self.amplitudes {
            out.amplitudes.insert(*occ, amp.eval(g));
        }
        out.prune();
        out.normalized = self.normalized;
        out
    }
}

#[derive(Serialize)]
struct SerializedState {
    nmax: u8,
    normalized: bool,
    pump: SerializedPump,
    amplitudes: Vec<SerializedTerm>,
}

#[derive(Serialize)]
struct SerializedPump {
    h: [f64; 2],
    v: [f64; 2],
}

#[derive(Serialize)]
struct SerializedTerm {
    occupation: [u8; 4],
    amplitude: [f64; 2],
}

impl From<&PureFockState> for SerializedState {
    fn from(state: &PureFockState) -> Self {
        Self {
            nmax: state.nmax,
            normalized: state.normalized,
            pump: SerializedPump {
                h: [state.pump.amp_h.re, state.pump.amp_h.im],
                v: [state.pump.amp_v.re, state.pump.amp_v.im],
            },
            amplitudes: state
                .amplitudes
                .iter()
                .map(|(occ, a)| SerializedTerm {
                    occupation: occ.counts(),
                    amplitude: [a.re, a.im],
                })
                .collect(),
        }
    }
}
