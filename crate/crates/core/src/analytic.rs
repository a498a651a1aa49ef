//! Closed-form success probabilities. Angles are in radians.

/// Encoded transfer through depolarizing paths of strength `p`:
/// `1 - (1/4) (p/2) / (1 - p/2) (1 - cos 4 theta)`.
pub fn p_pst_analytic(theta: f64, p: f64) -> f64 {
    let q = p / 2.0;
    1.0 - 0.25 * q / (1.0 - q) * (1.0 - (4.0 * theta).cos())
}

/// A single photon sent directly through a depolarizing path: `1 - p/2`.
pub fn p_straight_analytic(p: f64) -> f64 {
    1.0 - p / 2.0
}

/// Encoded transfer through dephasing paths:
/// `1 - (1/2) sin^2(2 theta) (1 - sqrt(1 - beta1) sqrt(1 - beta2))`.
pub fn p_pst_dephasing(theta: f64, beta1: f64, beta2: f64) -> f64 {
    // Equal dephasing on both paths acts like dephasing one path by that
    // amount; short-circuit so the two formulas agree bit for bit.
    let beta = if beta1 == beta2 {
        beta1
    } else {
        1.0 - (1.0 - beta1).sqrt() * (1.0 - beta2).sqrt()
    };
    p_direct_dephasing(theta, beta)
}

/// A single photon sent directly through a dephasing path:
/// `1 - (1/2) sin^2(2 theta) beta`.
pub fn p_direct_dephasing(theta: f64, beta: f64) -> f64 {
    let s = (2.0 * theta).sin();
    1.0 - 0.5 * s * s * beta
}
