//! Path-qutrit density matrices.
//!
//! Each path is a three-level system `{|0>, |H>, |V>}` (index 0, 1, 2). The
//! joint two-path space is ordered `3 * path1 + path2`.

use nalgebra::{DMatrix, Matrix3, SMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockState, OccupationVector, Path, PureFockState, SeriesFockState};
use crate::series::Amplitude;

pub type Mat3 = Matrix3<Complex64>;
pub type Mat9 = SMatrix<Complex64, 9, 9>;

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Index of a path's qutrit level, or `None` for more than one photon.
pub fn qutrit_level(occ: &OccupationVector, path: Path) -> Option<usize> {
    match occ.path_counts(path) {
        (0, 0) => Some(0),
        (1, 0) => Some(1),
        (0, 1) => Some(2),
        _ => None,
    }
}

/// Joint index `3 * path1 + path2` of a one-photon-per-path occupation.
pub fn joint_index(occ: &OccupationVector) -> Option<usize> {
    Some(3 * qutrit_level(occ, Path::One)? + qutrit_level(occ, Path::Two)?)
}

fn hermitian_deviation<const N: usize>(m: &SMatrix<Complex64, N, N>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigen-decomposition of the Hermitian part, on a dynamic matrix so that it
/// works for any fixed size.
fn hermitian_eigen<const N: usize>(m: &SMatrix<Complex64, N, N>) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    let h = (m + m.adjoint()).unscale(2.0);
    SymmetricEigen::new(DMatrix::from_iterator(N, N, h.iter().copied()))
}

fn min_eigenvalue<const N: usize>(m: &SMatrix<Complex64, N, N>) -> f64 {
    hermitian_eigen(m).eigenvalues.min()
}

fn check_density<const N: usize>(m: &SMatrix<Complex64, N, N>) -> Result<()> {
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOLERANCE {
        return Err(Error::InvalidDensity(format!("not Hermitian (deviation {dev:.3e})")));
    }
    let tr = m.trace().re;
    if !(-TRACE_TOLERANCE..=1.0 + TRACE_TOLERANCE).contains(&tr) {
        return Err(Error::InvalidDensity(format!("trace {tr} outside [0, 1]")));
    }
    let min = min_eigenvalue(m);
    if min < -PSD_TOLERANCE {
        return Err(Error::InvalidDensity(format!("eigenvalue {min:.3e} is negative")));
    }
    Ok(())
}

/// Hermitian part with eigenvalues in `(-PSD_TOLERANCE, 0)` set to zero.
/// Larger negative eigenvalues are kept so that real violations stay visible.
pub fn clip_psd<const N: usize>(m: &SMatrix<Complex64, N, N>) -> SMatrix<Complex64, N, N> {
    let eig = hermitian_eigen(m);
    let clipped = eig.eigenvalues.map(|l| if l < 0.0 && l > -PSD_TOLERANCE { 0.0 } else { l });
    let diag = DMatrix::from_diagonal(&clipped.map(|l| Complex64::new(l, 0.0)));
    let out = &eig.eigenvectors * diag * eig.eigenvectors.adjoint();
    SMatrix::from_iterator(out.iter().copied())
}

/// Density matrix of one path in the `{|0>, |H>, |V>}` basis.
///
/// Entry names follow the usual layout: populations `a, b, c` and
/// coherences `x1 = <0|rho|H>`, `x2 = <0|rho|V>`, `x3 = <H|rho|V>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QutritDensity(Mat3);

impl QutritDensity {
    pub fn new(m: Mat3) -> Result<Self> {
        check_density(&m)?;
        Ok(Self(m))
    }

    pub fn from_entries(a: f64, b: f64, c: f64, x1: Complex64, x2: Complex64, x3: Complex64) -> Result<Self> {
        let r = |v: f64| Complex64::new(v, 0.0);
        Self::new(Mat3::new(
            r(a), x1, x2,
            x1.conj(), r(b), x3,
            x2.conj(), x3.conj(), r(c),
        ))
    }

    /// Pure state `|psi><psi|` for `psi = (vacuum, H, V)` amplitudes.
    pub fn pure(psi: [Complex64; 3]) -> Result<Self> {
        Self::new(Mat3::from_fn(|i, j| psi[i] * psi[j].conj()))
    }

    pub(crate) fn from_matrix_unchecked(m: Mat3) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn a(&self) -> f64 {
        self.0[(0, 0)].re
    }

    pub fn b(&self) -> f64 {
        self.0[(1, 1)].re
    }

    pub fn c(&self) -> f64 {
        self.0[(2, 2)].re
    }

    pub fn x1(&self) -> Complex64 {
        self.0[(0, 1)]
    }

    pub fn x2(&self) -> Complex64 {
        self.0[(0, 2)]
    }

    pub fn x3(&self) -> Complex64 {
        self.0[(1, 2)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }
}

/// Density matrix over path 1 (x) path 2 qutrits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointPathDensity(Mat9);

impl JointPathDensity {
    pub fn new(m: Mat9) -> Result<Self> {
        check_density(&m)?;
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: Mat9) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat9 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }

    /// Element `<i1 i2| rho |j1 j2>`.
    pub fn element(&self, row: (usize, usize), col: (usize, usize)) -> Complex64 {
        self.0[(3 * row.0 + row.1, 3 * col.0 + col.1)]
    }
}

/// Joint density expanded in powers of `g`: `rho = sum_n g^n orders[n]`.
///
/// Individual coefficient matrices are Hermitian but not densities.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedDensity {
    orders: Vec<Mat9>,
}

impl GradedDensity {
    pub fn new(orders: Vec<Mat9>) -> Self {
        Self { orders }
    }

    pub fn orders(&self) -> &[Mat9] {
        &self.orders
    }

    pub fn order(&self, n: usize) -> Mat9 {
        self.orders.get(n).copied().unwrap_or_else(Mat9::zeros)
    }

    pub fn degree(&self) -> usize {
        self.orders.len().saturating_sub(1)
    }

    pub fn map(&self, f: impl Fn(&Mat9) -> Mat9) -> Self {
        Self {
            orders: self.orders.iter().map(f).collect(),
        }
    }

    pub fn evaluate(&self, g: f64) -> Mat9 {
        self.orders
            .iter()
            .rev()
            .fold(Mat9::zeros(), |acc, m| acc.scale(g) + m)
    }
}

fn reduce_generic<A: Amplitude>(state: &FockState<A>, g: f64) -> Result<GradedDensity> {
    let offending: Vec<_> = state
        .iter()
        .filter(|(occ, _)| joint_index(occ).is_none())
        .collect();
    if !offending.is_empty() {
        let discarded_weight = offending.iter().map(|(_, a)| a.norm_sqr_at(g)).sum();
        return Err(Error::UnsupportedSubspace {
            offending: offending.into_iter().map(|(occ, _)| *occ).collect(),
            discarded_weight,
        });
    }

    let degree = A::max_order();
    let mut psi = vec![SMatrix::<Complex64, 9, 1>::zeros(); degree + 1];
    for (occ, amp) in state.iter() {
        let idx = joint_index(occ).expect("checked above");
        for (k, v) in psi.iter_mut().enumerate() {
            v[idx] = amp.coefficient(k);
        }
    }
    // Orders above `degree` would be incomplete, so they are not formed.
    let orders = (0..=degree)
        .map(|n| {
            (0..=n).fold(Mat9::zeros(), |acc, j| acc + psi[j] * psi[n - j].adjoint())
        })
        .collect();
    Ok(GradedDensity::new(orders))
}

/// `|psi><psi|` on the joint path-qutrit space.
///
/// Fails with the offending occupation vectors if any path holds more than one
/// photon.
pub fn reduce_to_path_qutrits(state: &PureFockState) -> Result<JointPathDensity> {
    let graded = reduce_generic(state, 0.0)?;
    Ok(JointPathDensity::from_matrix_unchecked(graded.order(0)))
}

/// Order-by-order version of [`reduce_to_path_qutrits`]. `g` only enters the
/// weight reported in an error.
pub fn reduce_series_to_path_qutrits(state: &SeriesFockState, g: f64) -> Result<GradedDensity> {
    reduce_generic(state, g)
}

#[cfg(test)]
pub(crate) fn complex_abs_max<const R: usize, const C: usize>(m: &SMatrix<Complex64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::PumpField;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_reduces_to_corner() {
        let vac = PureFockState::vacuum(2, PumpField::default());
        let rho = reduce_to_path_qutrits(&vac).unwrap();
        let mut expected = Mat9::zeros();
        expected[(0, 0)] = c(1.0, 0.0);
        assert_eq!(*rho.matrix(), expected);
    }

    #[test]
    fn outer_product_layout() {
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        // |H> on path 1, |V> on path 2: index 3 * 1 + 2 = 5.
        let state = PureFockState::from_terms(
            2,
            PumpField::default(),
            [(OccupationVector::VACUUM, a), (OccupationVector::new(1, 0, 0, 1), b)],
        )
        .unwrap();
        let rho = reduce_to_path_qutrits(&state).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], a * a.conj());
        assert_eq!(rho.matrix()[(0, 5)], a * b.conj());
        assert_eq!(rho.matrix()[(5, 0)], b * a.conj());
        assert_eq!(rho.matrix()[(5, 5)], b * b.conj());
        assert!((rho.trace() - state.norm_sqr()).abs() < 1e-12);
        assert_eq!(rho.element((1, 2), (0, 0)), b * a.conj());
    }

    #[test]
    fn two_photons_in_a_path_rejected() {
        let state = PureFockState::from_terms(
            2,
            PumpField::default(),
            [
                (OccupationVector::VACUUM, c(0.6, 0.0)),
                (OccupationVector::new(1, 1, 0, 0), c(0.8, 0.0)),
            ],
        )
        .unwrap();
        match reduce_to_path_qutrits(&state) {
            Err(Error::UnsupportedSubspace { offending, discarded_weight }) => {
                assert_eq!(offending, vec![OccupationVector::new(1, 1, 0, 0)]);
                assert!((discarded_weight - 0.64).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn qutrit_validation() {
        assert!(QutritDensity::from_entries(1.0, 0.0, 0.0, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_ok());
        // Coherence larger than the populations allow.
        assert!(QutritDensity::from_entries(0.5, 0.5, 0.0, c(0.9, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(QutritDensity::from_entries(1.0, 0.5, 0.0, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn clipping_removes_round_off_only() {
        let mut m = Mat3::zeros();
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(-1e-13, 0.0);
        let clipped = clip_psd(&m);
        assert!(clipped[(1, 1)].re >= 0.0);
        m[(1, 1)] = c(-1e-3, 0.0);
        assert!(clip_psd(&m)[(1, 1)].re < -9e-4);
    }
}
