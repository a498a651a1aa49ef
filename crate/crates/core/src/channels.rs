//! Decoherence maps on the path qutrits and their local action on the joint
//! two-path state.
//!
//! The vacuum level never changes population. Depolarization mixes the photon
//! polarization and damps vacuum coherences by `sqrt(1 - p)` and the `H/V`
//! coherence by `1 - p`; dephasing damps the same coherences by
//! `sqrt(1 - beta)` and `1 - beta` without touching populations.
//!
//! Only the matrix action of each map is given in closed form. Kraus operators
//! come from the eigendecomposition of the Choi matrix and are cached per
//! parameter value.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{JointPathDensity, Mat3, Mat9, QutritDensity, PSD_TOLERANCE, TRACE_TOLERANCE};
use crate::error::{check_non_negative, check_unit_interval, Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Choi eigenvalues below `-CP_TOLERANCE` reject a map.
pub const CP_TOLERANCE: f64 = 1e-12;

/// A single-qutrit channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChannelSpec {
    Identity,
    Depolarize(f64),
    Dephase(f64),
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelSpec::Identity => Ok(()),
            ChannelSpec::Depolarize(p) => check_unit_interval("p", p),
            ChannelSpec::Dephase(beta) => check_unit_interval("beta", beta),
        }
    }

    /// Closed-form action on an arbitrary 3x3 matrix (the map is linear, so
    /// this also defines it on non-Hermitian inputs).
    pub fn apply_matrix(&self, m: &Mat3) -> Mat3 {
        let (vac, qubit, flip) = match *self {
            ChannelSpec::Identity => (1.0, 1.0, 0.0),
            ChannelSpec::Depolarize(p) => ((1.0 - p).sqrt(), 1.0 - p, p),
            ChannelSpec::Dephase(beta) => ((1.0 - beta).sqrt(), 1.0 - beta, 0.0),
        };
        let mut out = *m;
        for k in 1..3 {
            out[(0, k)] *= vac;
            out[(k, 0)] *= vac;
        }
        out[(1, 2)] *= qubit;
        out[(2, 1)] *= qubit;
        let mix = (m[(1, 1)] + m[(2, 2)]) * (flip / 2.0);
        out[(1, 1)] = mix + m[(1, 1)] * (1.0 - flip);
        out[(2, 2)] = mix + m[(2, 2)] * (1.0 - flip);
        out
    }

    fn cache_key(&self) -> (u8, u64) {
        match *self {
            ChannelSpec::Identity => (0, 0),
            ChannelSpec::Depolarize(p) => (1, p.to_bits()),
            ChannelSpec::Dephase(b) => (2, b.to_bits()),
        }
    }
}

pub fn depolarize_qutrit(rho: &QutritDensity, p: f64) -> Result<QutritDensity> {
    let spec = ChannelSpec::Depolarize(p);
    spec.validate()?;
    Ok(QutritDensity::from_matrix_unchecked(spec.apply_matrix(rho.matrix())))
}

pub fn dephase_qutrit(rho: &QutritDensity, beta: f64) -> Result<QutritDensity> {
    let spec = ChannelSpec::Dephase(beta);
    spec.validate()?;
    Ok(QutritDensity::from_matrix_unchecked(spec.apply_matrix(rho.matrix())))
}

/// `p = 1 - exp(-gamma L / c)`.
pub fn p_from_distance(gamma: f64, distance: f64) -> Result<f64> {
    check_non_negative("gamma", gamma)?;
    check_non_negative("distance", distance)?;
    Ok(-(-gamma * distance / SPEED_OF_LIGHT).exp_m1())
}

/// `J = sum_ij |i><j| (x) Phi(|i><j|)`, row index `3 i + k`.
pub fn choi_matrix(spec: &ChannelSpec) -> Result<Mat9> {
    spec.validate()?;
    let mut choi = Mat9::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let mut unit = Mat3::zeros();
            unit[(i, j)] = Complex64::new(1.0, 0.0);
            let image = spec.apply_matrix(&unit);
            for k in 0..3 {
                for l in 0..3 {
                    choi[(3 * i + k, 3 * j + l)] = image[(k, l)];
                }
            }
        }
    }
    Ok(choi)
}

/// Kraus operators `K[k, i] = sqrt(lambda) v[3 i + k]` from the
/// eigendecomposition of a Choi matrix.
pub fn kraus_from_choi(choi: &Mat9) -> Result<Vec<Mat3>> {
    let hermitian = (choi + choi.adjoint()).unscale(2.0);
    let eig = SymmetricEigen::new(hermitian);
    let min = eig.eigenvalues.min();
    if min < -CP_TOLERANCE {
        return Err(Error::NotCompletelyPositive { min_eigenvalue: min });
    }
    let ops = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.0)
        .map(|(col, &l)| {
            let v = eig.eigenvectors.column(col);
            Mat3::from_fn(|k, i| v[3 * i + k] * l.sqrt())
        })
        .collect();
    Ok(ops)
}

/// Smallest eigenvalue of the Hermitian part of the Choi matrix.
pub fn choi_min_eigenvalue(spec: &ChannelSpec) -> Result<f64> {
    let choi = choi_matrix(spec)?;
    Ok(SymmetricEigen::new((choi + choi.adjoint()).unscale(2.0)).eigenvalues.min())
}

/// Largest entry of `sum_k K_k^dag K_k - I`; zero for a trace-preserving map.
pub fn kraus_completeness_deviation(spec: &ChannelSpec) -> Result<f64> {
    let ops = kraus_operators(spec)?;
    let sum = ops.iter().fold(Mat3::zeros(), |acc, k| acc + k.adjoint() * k) - Mat3::identity();
    Ok(sum.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

type KrausCache = RwLock<HashMap<(u8, u64), Arc<Vec<Mat3>>>>;

fn kraus_cache() -> &'static KrausCache {
    static CACHE: OnceLock<KrausCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cached Kraus decomposition of `spec`.
pub fn kraus_operators(spec: &ChannelSpec) -> Result<Arc<Vec<Mat3>>> {
    let key = spec.cache_key();
    if let Some(ops) = kraus_cache().read().expect("kraus cache poisoned").get(&key) {
        return Ok(Arc::clone(ops));
    }
    let ops = Arc::new(kraus_from_choi(&choi_matrix(spec)?)?);
    let mut cache = kraus_cache().write().expect("kraus cache poisoned");
    Ok(Arc::clone(cache.entry(key).or_insert(ops)))
}

fn kron(a: &Mat3, b: &Mat3) -> Mat9 {
    Mat9::from_fn(|r, c| a[(r / 3, c / 3)] * b[(r % 3, c % 3)])
}

/// `(ch1 (x) ch2)` on any 9x9 matrix. Linear, so it also acts on the
/// coefficient matrices of a graded density.
pub(crate) fn apply_per_path_matrix(m: &Mat9, ch1: &ChannelSpec, ch2: &ChannelSpec) -> Result<Mat9> {
    let id = Mat3::identity();
    let mut out = *m;
    for (ops, on_first) in [(kraus_operators(ch1)?, true), (kraus_operators(ch2)?, false)] {
        out = ops.iter().fold(Mat9::zeros(), |acc, k| {
            let lifted = if on_first { kron(k, &id) } else { kron(&id, k) };
            acc + lifted * out * lifted.adjoint()
        });
    }
    Ok(out)
}

/// Applies `ch1` to path 1 and `ch2` to path 2.
pub fn apply_per_path(joint: &JointPathDensity, ch1: &ChannelSpec, ch2: &ChannelSpec) -> Result<JointPathDensity> {
    let out = apply_per_path_matrix(joint.matrix(), ch1, ch2)?;
    let drift = (out.trace() - joint.matrix().trace()).norm();
    if drift > TRACE_TOLERANCE {
        return Err(Error::InvalidDensity(format!("trace drifted by {drift:.3e}")));
    }
    let out = JointPathDensity::from_matrix_unchecked(out);
    let min = out.min_eigenvalue();
    if min < -PSD_TOLERANCE {
        return Err(Error::InvalidDensity(format!("eigenvalue {min:.3e} after channel")));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Depolarizing,
    Dephasing,
}

/// Channel strengths for the two paths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Depolarization applied to both paths.
    pub p: f64,
    /// Experimental: separate depolarization for path 2. `None` means `p`.
    pub p2: Option<f64>,
    pub beta1: f64,
    pub beta2: f64,
}

impl ChannelParams {
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_unit_interval("p", p)?;
        Ok(Self {
            p,
            p2: None,
            beta1: 0.0,
            beta2: 0.0,
        })
    }

    /// Experimental asymmetric depolarization.
    pub fn depolarizing_asymmetric(p1: f64, p2: f64) -> Result<Self> {
        check_unit_interval("p2", p2)?;
        Ok(Self {
            p2: Some(p2),
            ..Self::depolarizing(p1)?
        })
    }

    pub fn from_distance(gamma: f64, distance: f64) -> Result<Self> {
        Self::depolarizing(p_from_distance(gamma, distance)?)
    }

    pub fn dephasing(beta1: f64, beta2: f64) -> Result<Self> {
        check_unit_interval("beta1", beta1)?;
        check_unit_interval("beta2", beta2)?;
        Ok(Self {
            p: 0.0,
            p2: None,
            beta1,
            beta2,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_interval("p", self.p)?;
        if let Some(p2) = self.p2 {
            check_unit_interval("p2", p2)?;
        }
        check_unit_interval("beta1", self.beta1)?;
        check_unit_interval("beta2", self.beta2)
    }

    pub fn path2_depolarization(&self) -> f64 {
        self.p2.unwrap_or(self.p)
    }

    /// Channel specs for paths 1 and 2.
    pub fn specs(&self, kind: ChannelKind) -> (ChannelSpec, ChannelSpec) {
        match kind {
            ChannelKind::Depolarizing => (
                ChannelSpec::Depolarize(self.p),
                ChannelSpec::Depolarize(self.path2_depolarization()),
            ),
            ChannelKind::Dephasing => (ChannelSpec::Dephase(self.beta1), ChannelSpec::Dephase(self.beta2)),
        }
    }
}
