//! Exact evolution under the crystal Hamiltonian with a quantized pump.
//!
//! `H = g' (a_0H a1V^dag a2V^dag + a_0H^dag a1V a2V)`, so with
//! `g = -g' t / hbar` the propagator is `exp(i g K)`,
//! `K = a_0H A^dag + a_0H^dag A`, `A = a1V a2V`. The pump is a coherent state
//! truncated at `pump_nmax` photons and renormalized. Only the subspace
//! reachable from the initial support is built, which is an invariant
//! subspace of the truncated `K`, so exponentiating it is exact.
//!
//! This module exists to cross-check [`FockState::bbo_apply_perturbative`].

use std::collections::{BTreeMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{BboCoupling, FockState, ModeLabel, OccupationVector, Path, Polarization, PumpField, PureFockState};

pub const DEFAULT_PUMP_NMAX: u8 = 8;

/// Largest Hilbert-space dimension the oracle will exponentiate densely.
pub const MAX_ORACLE_DIM: usize = 10_000;

type JointKey = (u8, OccupationVector);

/// Joint pump (x) path state on a reachable basis.
#[derive(Clone, Debug)]
pub struct OracleState {
    nmax: u8,
    pump_nmax: u8,
    alpha: Complex64,
    amplitudes: BTreeMap<JointKey, Complex64>,
}

/// Coherent-state amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)` for `n <= nmax`,
/// renormalized to unit norm.
pub fn truncated_coherent(alpha: Complex64, nmax: u8) -> Vec<Complex64> {
    let mut amps = Vec::with_capacity(usize::from(nmax) + 1);
    let mut term = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..=nmax {
        if n > 0 {
            term *= alpha / f64::from(n).sqrt();
        }
        amps.push(term);
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.into_iter().map(|a| a / norm).collect()
}

impl OracleState {
    /// `|alpha>_0H (x) paths`, taking `alpha` from the state's horizontal pump.
    pub fn from_paths(paths: &PureFockState, pump_nmax: u8) -> Self {
        let alpha = paths.pump().amp_h;
        let coherent = truncated_coherent(alpha, pump_nmax);
        let mut amplitudes = BTreeMap::new();
        for (n, c) in coherent.iter().enumerate() {
            for (occ, a) in paths.iter() {
                let amp = c * a;
                if amp != Complex64::new(0.0, 0.0) {
                    amplitudes.insert((n as u8, *occ), amp);
                }
            }
        }
        Self {
            nmax: paths.nmax(),
            pump_nmax,
            alpha,
            amplitudes,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn pump_mean_photons(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|((n, _), a)| f64::from(*n) * a.norm_sqr())
            .sum()
    }

    /// Path density with the pump traced out.
    pub fn trace_pump(&self) -> PathDensity {
        let basis: Vec<OccupationVector> = self
            .amplitudes
            .keys()
            .map(|(_, occ)| *occ)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let position: BTreeMap<OccupationVector, usize> = basis.iter().enumerate().map(|(i, o)| (*o, i)).collect();
        let mut by_pump: BTreeMap<u8, Vec<(usize, Complex64)>> = BTreeMap::new();
        for ((n, occ), a) in &self.amplitudes {
            by_pump.entry(*n).or_default().push((position[occ], *a));
        }
        let mut matrix = DMatrix::<Complex64>::zeros(basis.len(), basis.len());
        for terms in by_pump.values() {
            for (i, a) in terms {
                for (j, b) in terms {
                    matrix[(*i, *j)] += a * b.conj();
                }
            }
        }
        PathDensity { basis, matrix }
    }

    /// Path amplitudes `<alpha|_0H psi>` against the renormalized truncated
    /// coherent state the pump started in.
    pub fn project_onto_pump(&self) -> PureFockState {
        let coherent = truncated_coherent(self.alpha, self.pump_nmax);
        let mut terms: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        for ((n, occ), a) in &self.amplitudes {
            *terms.entry(*occ).or_default() += coherent[usize::from(*n)].conj() * a;
        }
        FockState::from_terms(self.nmax, PumpField::horizontal(self.alpha), terms)
            .expect("oracle basis respects the path truncation")
    }
}

/// Reduced density of the path modes on the occupations it touches.
#[derive(Clone, Debug, PartialEq)]
pub struct PathDensity {
    pub basis: Vec<OccupationVector>,
    pub matrix: DMatrix<Complex64>,
}

impl PathDensity {
    /// `<row| rho |col>`, zero for occupations outside the support.
    pub fn element(&self, row: &OccupationVector, col: &OccupationVector) -> Complex64 {
        match (self.basis.binary_search(row), self.basis.binary_search(col)) {
            (Ok(i), Ok(j)) => self.matrix[(i, j)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Largest entrywise deviation from the pure state `|psi><psi|`, over the
    /// union of both supports.
    pub fn max_deviation_from(&self, psi: &PureFockState) -> f64 {
        let mut support: std::collections::BTreeSet<OccupationVector> = self.basis.iter().copied().collect();
        support.extend(psi.iter().map(|(occ, _)| *occ));
        let mut worst = 0.0f64;
        for r in &support {
            for c in &support {
                let pure = psi.amplitude(r) * psi.amplitude(c).conj();
                worst = worst.max((self.element(r, c) - pure).norm());
            }
        }
        worst
    }
}

/// Applies `K` to a single basis state, returning the truncated image.
fn apply_k(key: JointKey, nmax: u8, pump_nmax: u8) -> Vec<(JointKey, f64)> {
    let v1 = ModeLabel::new(Path::One, Polarization::V);
    let v2 = ModeLabel::new(Path::Two, Polarization::V);
    let (n0, occ) = key;
    let (n1, n2) = (occ.count(v1), occ.count(v2));
    let mut out = Vec::with_capacity(2);
    if n0 > 0 && n1 < nmax && n2 < nmax {
        let factor = (f64::from(n0) * f64::from(n1 + 1) * f64::from(n2 + 1)).sqrt();
        out.push(((n0 - 1, occ.with_count(v1, n1 + 1).with_count(v2, n2 + 1)), factor));
    }
    if n0 < pump_nmax && n1 > 0 && n2 > 0 {
        let factor = (f64::from(n0 + 1) * f64::from(n1) * f64::from(n2)).sqrt();
        out.push(((n0 + 1, occ.with_count(v1, n1 - 1).with_count(v2, n2 - 1)), factor));
    }
    out
}

/// `exp(i g K)` applied to `initial`, by dense matrix exponential on the
/// reachable subspace.
pub fn exact_evolve_oracle(initial: &OracleState, coupling: &BboCoupling) -> Result<OracleState> {
    let (nmax, pump_nmax) = (initial.nmax, initial.pump_nmax);

    let mut index: BTreeMap<JointKey, usize> = BTreeMap::new();
    let mut queue: VecDeque<JointKey> = initial.amplitudes.keys().copied().collect();
    for key in &queue {
        let next = index.len();
        index.insert(*key, next);
    }
    let mut edges = Vec::new();
    while let Some(key) = queue.pop_front() {
        for (target, factor) in apply_k(key, nmax, pump_nmax) {
            if !index.contains_key(&target) {
                let next = index.len();
                if next >= MAX_ORACLE_DIM {
                    return Err(Error::DimensionOverflow {
                        dim: next + 1,
                        limit: MAX_ORACLE_DIM,
                    });
                }
                index.insert(target, next);
                queue.push_back(target);
            }
            edges.push((index[&target], index[&key], factor));
        }
    }

    let dim = index.len();
    let mut generator = DMatrix::<Complex64>::zeros(dim, dim);
    for (row, col, factor) in edges {
        generator[(row, col)] = Complex64::new(0.0, coupling.g() * factor);
    }
    let propagator = generator.exp();

    let mut psi = DVector::<Complex64>::zeros(dim);
    for (key, a) in &initial.amplitudes {
        psi[index[key]] = *a;
    }
    let evolved = propagator * psi;

    let amplitudes = index
        .into_iter()
        .map(|(key, i)| (key, evolved[i]))
        .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
        .collect();
    Ok(OracleState {
        amplitudes,
        ..initial.clone()
    })
}

/// Evolves the path state through one crystal with a quantized pump and
/// projects back onto the initial coherent pump.
pub fn oracle_bbo(paths: &PureFockState, coupling: &BboCoupling, pump_nmax: u8) -> Result<PureFockState> {
    let initial = OracleState::from_paths(paths, pump_nmax);
    Ok(exact_evolve_oracle(&initial, coupling)?.project_onto_pump())
}

/// Evolves the path state through one crystal with a quantized pump and
/// traces the pump out.
pub fn oracle_bbo_traced(paths: &PureFockState, coupling: &BboCoupling, pump_nmax: u8) -> Result<PathDensity> {
    let initial = OracleState::from_paths(paths, pump_nmax);
    Ok(exact_evolve_oracle(&initial, coupling)?.trace_pump())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn vacuum(alpha: Complex64) -> PureFockState {
        PureFockState::vacuum(2, PumpField::horizontal(alpha))
    }

    #[test]
    fn coherent_state_is_normalized() {
        let amps = truncated_coherent(c(1.0, 0.5), 8);
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_coupling_is_identity() {
        let coupling = BboCoupling::new(0.0).unwrap();
        let out = oracle_bbo(&vacuum(c(1.0, 0.0)), &coupling, 8).unwrap();
        assert!((out.amplitude(&OccupationVector::VACUUM) - c(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn pair_amplitude_matches_first_order() {
        let coupling = BboCoupling::new(1e-2).unwrap();
        let out = oracle_bbo(&vacuum(c(1.0, 0.0)), &coupling, 8).unwrap();
        let pair = out.amplitude(&OccupationVector::new(0, 1, 0, 1));
        assert!((pair - c(0.0, 1e-2)).norm() < 1e-5, "{pair}");
    }

    #[test]
    fn pump_is_nearly_undepleted() {
        let g = 1e-2;
        let coupling = BboCoupling::new(g).unwrap();
        let initial = OracleState::from_paths(&vacuum(c(1.0, 0.0)), 8);
        let evolved = exact_evolve_oracle(&initial, &coupling).unwrap();
        let shift = (evolved.pump_mean_photons() - initial.pump_mean_photons()).abs();
        // One pump photon is spent per pair, pair probability ~ g^2 |alpha|^2.
        assert!(shift <= 2.0 * g * g, "{shift}");
        assert!(shift > 0.1 * g * g);
        assert!((evolved.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_limit() {
        let coupling = BboCoupling::new(1e-3).unwrap();
        let paths = PureFockState::vacuum(255, PumpField::horizontal(c(1.0, 0.0)));
        let initial = OracleState::from_paths(&paths, 255);
        let err = exact_evolve_oracle(&initial, &coupling).unwrap_err();
        assert!(matches!(err, Error::DimensionOverflow { limit: MAX_ORACLE_DIM, .. }));
    }
}
