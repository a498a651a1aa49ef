//! Amplitudes that are either plain complex numbers or truncated power series
//! in the crystal coupling `g`.
//!
//! The numeric form is what a single evaluation at a fixed `g` produces. The
//! series form keeps every power of `g` separate so leading-order quantities
//! (success probabilities are ratios of `O(g^2)` terms) can be read off
//! exactly instead of being polluted by `O(g^2)` relative corrections.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

/// Highest power of `g` retained in a [`CouplingSeries`] amplitude.
pub const SERIES_DEGREE: usize = 3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Scalar type stored in a Fock state.
pub trait Amplitude:
    Clone + Debug + PartialEq + Send + Sync + AddAssign + Mul<Complex64, Output = Self> + 'static
{
    fn zero() -> Self;

    fn from_complex(value: Complex64) -> Self;

    /// Multiplies by one power of the coupling `g`.
    fn times_coupling(&self, g: f64) -> Self;

    /// Squared modulus once the coupling takes the numeric value `g`.
    fn norm_sqr_at(&self, g: f64) -> f64;

    /// Coefficient of `g^order` (for numeric amplitudes only order 0 exists).
    fn coefficient(&self, order: usize) -> Complex64;

    /// Largest order for which [`Amplitude::coefficient`] can be non-zero.
    fn max_order() -> usize;

    fn is_zero(&self) -> bool;
}

impl Amplitude for Complex64 {
    fn zero() -> Self {
        ZERO
    }

    fn from_complex(value: Complex64) -> Self {
        value
    }

    fn times_coupling(&self, g: f64) -> Self {
        self * g
    }

    fn norm_sqr_at(&self, _g: f64) -> f64 {
        self.norm_sqr()
    }

    fn coefficient(&self, order: usize) -> Complex64 {
        if order == 0 {
            *self
        } else {
            ZERO
        }
    }

    fn max_order() -> usize {
        0
    }

    fn is_zero(&self) -> bool {
        *self == ZERO
    }
}

/// `sum_k c_k g^k` for `k <= SERIES_DEGREE`; higher powers are discarded.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CouplingSeries {
    coeffs: [Complex64; SERIES_DEGREE + 1],
}

impl CouplingSeries {
    pub fn constant(value: Complex64) -> Self {
        Self::monomial(value, 0)
    }

    /// `value * g^order`, or zero when `order` exceeds the retained degree.
    pub fn monomial(value: Complex64, order: usize) -> Self {
        let mut coeffs = [ZERO; SERIES_DEGREE + 1];
        if order <= SERIES_DEGREE {
            coeffs[order] = value;
        }
        Self { coeffs }
    }

    pub fn from_coefficients(coeffs: [Complex64; SERIES_DEGREE + 1]) -> Self {
        Self { coeffs }
    }

    pub fn coefficients(&self) -> &[Complex64; SERIES_DEGREE + 1] {
        &self.coeffs
    }

    /// Multiplies by `g^k`.
    pub fn shifted(&self, k: usize) -> Self {
        let mut coeffs = [ZERO; SERIES_DEGREE + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + k <= SERIES_DEGREE {
                coeffs[i + k] = *c;
            }
        }
        Self { coeffs }
    }

    pub fn eval(&self, g: f64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * g + c)
    }

    /// Lowest order with a non-zero coefficient.
    pub fn leading_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != ZERO)
    }
}

impl Add for CouplingSeries {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for CouplingSeries {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for CouplingSeries {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for CouplingSeries {
    type Output = Self;

    fn neg(self) -> Self {
        self * Complex64::new(-1.0, 0.0)
    }
}

impl Mul<Complex64> for CouplingSeries {
    type Output = Self;

    fn mul(mut self, rhs: Complex64) -> Self {
        for c in &mut self.coeffs {
            *c *= rhs;
        }
        self
    }
}

impl Mul for CouplingSeries {
    type Output = Self;

    /// Cauchy product, truncated at `SERIES_DEGREE`.
    fn mul(self, rhs: Self) -> Self {
        let mut coeffs = [ZERO; SERIES_DEGREE + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate().take(SERIES_DEGREE + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }
}

impl Amplitude for CouplingSeries {
    fn zero() -> Self {
        Self::default()
    }

    fn from_complex(value: Complex64) -> Self {
        Self::constant(value)
    }

    fn times_coupling(&self, _g: f64) -> Self {
        self.shifted(1)
    }

    fn norm_sqr_at(&self, g: f64) -> f64 {
        self.eval(g).norm_sqr()
    }

    fn coefficient(&self, order: usize) -> Complex64 {
        self.coeffs.get(order).copied().unwrap_or(ZERO)
    }

    fn max_order() -> usize {
        SERIES_DEGREE
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }
}
