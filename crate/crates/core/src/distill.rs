//! Lowest-order accounting for recurrence distillation of Werner pairs, and
//! the comparison against the encoded transfer at equal resources.
//!
//! A Werner pair sent through depolarizing paths has fidelity
//! `F0 = 1 - 3p/4`. Each distillation step consumes two pairs, fails with
//! probability `(2/3) sqrt(1 - F)` and on success leaves
//! `1 - F -> (2/3)(1 - F)`. The encoded transfer delivers `(1 - p/2)^2`
//! usable states per state sent, so distillation is run for the (continuous)
//! number of steps that gives the same yield.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::analytic::p_pst_analytic;
use crate::error::{check_non_negative, check_unit_interval, Error, Result};
use crate::roots::bisect;

/// Largest iteration count the matcher searches.
pub const K_MAX: f64 = 60.0;
/// Yield tolerance of the resource matcher.
pub const MATCH_TOLERANCE: f64 = 1e-10;
/// Tolerance on `p` for the advantage threshold.
pub const THRESHOLD_TOLERANCE: f64 = 1e-6;
/// Tolerance on window endpoints, in degrees.
pub const WINDOW_TOLERANCE_DEG: f64 = 1e-3;

const SQRT_TWO_THIRDS: f64 = 0.816_496_580_927_726;

pub fn initial_fidelity(p: f64) -> f64 {
    1.0 - 0.75 * p
}

/// `F_k = 1 - (2/3)^k (1 - F0)`.
pub fn fidelity_after_k(f0: f64, k: f64) -> f64 {
    1.0 - (2.0f64 / 3.0).powf(k) * (1.0 - f0)
}

/// Probability that a step starting from fidelity `f` fails.
pub fn step_failure_prob(f: f64) -> f64 {
    2.0 / 3.0 * (1.0 - f).sqrt()
}

/// Closed-form yield together with whether it had to be clamped at zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Yield {
    pub value: f64,
    pub clamped: bool,
}

/// `2^{-k} (1 - (2/3) / (1 - sqrt(2/3)) (1 - sqrt(2/3)^k) sqrt(1 - F0))`,
/// clamped at zero.
pub fn yield_closed_checked(k: f64, f0: f64) -> Yield {
    let bracket = 1.0 - 2.0 / 3.0 / (1.0 - SQRT_TWO_THIRDS) * (1.0 - SQRT_TWO_THIRDS.powf(k)) * (1.0 - f0).sqrt();
    let raw = 0.5f64.powf(k) * bracket;
    Yield {
        value: raw.max(0.0),
        clamped: raw < 0.0,
    }
}

pub fn yield_closed(k: f64, f0: f64) -> f64 {
    yield_closed_checked(k, f0).value
}

/// `2^{-k} prod_{j<k} (1 - (2/3) sqrt((2/3)^j (1 - F0)))`: each step fails
/// according to the fidelity it starts from.
pub fn yield_product(k: u32, f0: f64) -> f64 {
    (0..k).fold(1.0, |acc, j| {
        let f_j = fidelity_after_k(f0, f64::from(j));
        acc * 0.5 * (1.0 - step_failure_prob(f_j))
    })
}

/// Usable states per state sent for the encoded transfer, `(1 - p/2)^2`.
pub fn pst_resource_ratio(p: f64) -> f64 {
    let q = 1.0 - p / 2.0;
    q * q
}

/// Continuous iteration count at which distillation has the encoded
/// transfer's yield.
pub fn match_resources(p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    let f0 = initial_fidelity(p);
    let target = pst_resource_ratio(p);
    let mismatch = |k: f64| yield_closed(k, f0) - target;
    let at_lower = mismatch(0.0);
    if at_lower.abs() <= MATCH_TOLERANCE {
        return Ok(0.0);
    }
    let at_upper = mismatch(K_MAX);
    if at_lower.signum() == at_upper.signum() {
        return Err(Error::MatchingFailure {
            p,
            k_max: K_MAX,
            at_lower,
            at_upper,
        });
    }
    // Shrink the bracket in k until the yield is pinned to the tolerance.
    let (mut lo, mut hi) = (0.0, K_MAX);
    loop {
        let mid = 0.5 * (lo + hi);
        let m = mismatch(mid);
        if m.abs() <= MATCH_TOLERANCE || hi - lo <= f64::EPSILON * K_MAX {
            return Ok(mid);
        }
        if m > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Average teleportation fidelity through a Werner resource, `(2F + 1)/3`.
pub fn teleport_success(f: f64) -> f64 {
    (2.0 * f + 1.0) / 3.0
}

/// Werner-pair bookkeeping for a given initial fidelity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistillationModel {
    pub f0: f64,
    pub k: f64,
}

impl DistillationModel {
    pub fn new(f0: f64, k: f64) -> Result<Self> {
        if !(0.25..=1.0).contains(&f0) {
            return Err(Error::InvalidParameter {
                name: "F0",
                value: f0,
                reason: "Werner fidelity must lie in [0.25, 1]",
            });
        }
        check_non_negative("k", k)?;
        Ok(Self { f0, k })
    }

    /// Pairs from depolarizing strength `p`, distilled to the matched yield.
    pub fn matched(p: f64) -> Result<Self> {
        Self::new(initial_fidelity(p), match_resources(p)?)
    }

    pub fn fidelity(&self) -> f64 {
        fidelity_after_k(self.f0, self.k)
    }

    pub fn yield_closed(&self) -> Yield {
        yield_closed_checked(self.k, self.f0)
    }

    /// Product-form yield; requires an integer `k`.
    pub fn yield_integer(&self) -> Option<f64> {
        (self.k.fract() == 0.0 && self.k <= f64::from(u32::MAX)).then(|| yield_product(self.k as u32, self.f0))
    }

    /// Pairs left from `n` input pairs.
    pub fn expected_output(&self, n: f64) -> f64 {
        n * self.yield_closed().value
    }
}

/// Encoded transfer versus distilled teleportation at one `(theta, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparisonPoint {
    /// Radians.
    pub theta: f64,
    pub p: f64,
    pub p_pst: f64,
    pub p_teleport: f64,
    pub k_star: f64,
    pub yield_matched: f64,
    pub advantage: f64,
}

/// Teleportation success through distilled pairs at matched resources.
pub fn matched_teleport_success(p: f64) -> Result<(f64, DistillationModel)> {
    let model = DistillationModel::matched(p)?;
    Ok((teleport_success(model.fidelity()), model))
}

pub fn compare(theta: f64, p: f64) -> Result<ComparisonPoint> {
    let (p_teleport, model) = matched_teleport_success(p)?;
    let p_pst = p_pst_analytic(theta, p);
    Ok(ComparisonPoint {
        theta,
        p,
        p_pst,
        p_teleport,
        k_star: model.k,
        yield_matched: model.yield_closed().value,
        advantage: p_pst - p_teleport,
    })
}

/// `min_theta [P_pst(theta, p) - P_teleport(p)]`; the minimum sits at 45°.
fn worst_case_advantage(p: f64) -> Result<f64> {
    Ok(p_pst_analytic(FRAC_PI_4, p) - matched_teleport_success(p)?.0)
}

/// Coarse grid spacing in `p` used to bracket the first sign change.
const THRESHOLD_SCAN_STEP: f64 = 0.01;

/// Smallest `p` at which teleportation beats the encoded transfer for some
/// `theta`, to [`THRESHOLD_TOLERANCE`].
pub fn p_star() -> Result<f64> {
    p_star_with_tolerance(THRESHOLD_TOLERANCE)
}

/// [`p_star`] with an explicit tolerance in `p`. Both sides equal 1 at
/// `p = 0`, so the scan starts one step in, brackets the first sign change
/// and bisects it.
pub fn p_star_with_tolerance(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0 && tolerance < THRESHOLD_SCAN_STEP) {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            value: tolerance,
            reason: "must be positive and below the scan step 0.01",
        });
    }
    let steps = (1.0 / THRESHOLD_SCAN_STEP).round() as usize;
    let mut lower = THRESHOLD_SCAN_STEP;
    for i in 2..=steps {
        let upper = i as f64 * THRESHOLD_SCAN_STEP;
        if worst_case_advantage(upper)? < 0.0 {
            let mut failure = None;
            let root = bisect(
                |p| {
                    worst_case_advantage(p).unwrap_or_else(|e| {
                        failure.get_or_insert(e);
                        f64::NAN
                    })
                },
                lower,
                upper,
                tolerance,
            );
            return match failure {
                Some(e) => Err(e),
                None => root,
            };
        }
        lower = upper;
    }
    Err(Error::NoBracket {
        lower: THRESHOLD_SCAN_STEP,
        upper: 1.0,
    })
}

/// Closed interval of angles, in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub lower_deg: f64,
    pub upper_deg: f64,
}

impl Window {
    pub fn width(&self) -> f64 {
        self.upper_deg - self.lower_deg
    }

    pub fn contains(&self, theta_deg: f64) -> bool {
        (self.lower_deg..=self.upper_deg).contains(&theta_deg)
    }
}

/// Angles where teleportation wins at strength `p`; `None` when there are
/// none.
pub fn theta_window(p: f64) -> Result<Option<Window>> {
    let teleport = matched_teleport_success(p)?.0;
    let advantage = |deg: f64| p_pst_analytic(deg.to_radians(), p) - teleport;
    if advantage(45.0) >= 0.0 {
        return Ok(None);
    }
    let lower_deg = bisect(advantage, 0.0, 45.0, WINDOW_TOLERANCE_DEG)?;
    let upper_deg = bisect(advantage, 45.0, 90.0, WINDOW_TOLERANCE_DEG)?;
    Ok(Some(Window { lower_deg, upper_deg }))
}

/// Threshold and its window just above it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdvantageThreshold {
    pub p_star: f64,
    /// Window at `p_star` plus ten times the solver tolerance.
    pub window_above: Option<Window>,
    /// Union of the windows over `p in (p_star, 1]`; windows widen with `p`,
    /// so this is the window at `p = 1`.
    pub region: Option<Window>,
}

pub fn advantage_threshold() -> Result<AdvantageThreshold> {
    advantage_threshold_with_tolerance(THRESHOLD_TOLERANCE)
}

pub fn advantage_threshold_with_tolerance(tolerance: f64) -> Result<AdvantageThreshold> {
    let p_star = p_star_with_tolerance(tolerance)?;
    Ok(AdvantageThreshold {
        p_star,
        window_above: theta_window((p_star + 10.0 * tolerance).min(1.0))?,
        region: theta_window(1.0)?,
    })
}
