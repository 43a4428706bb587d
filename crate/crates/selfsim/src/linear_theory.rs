//! Closed-form linear-stability references for a slightly perturbed expanding
//! circle, used to validate the nonlinear solver in the small-amplitude limit.

use crate::error::{Result, SelfsimError};

/// Flux constant at which a mode-k perturbation of the circle is exactly
/// self-similar at linear order: C = k(k²−1)/(k−2). Defined for k ≥ 3 (k = 2
/// is a pole, k = 1 a translation).
pub fn linear_flux_constant(k: u32) -> Result<f64> {
    if k < 3 {
        return Err(SelfsimError::Domain(format!(
            "linear flux constant needs k >= 3, got {k}"
        )));
    }
    let kf = k as f64;
    Ok(kf * (kf * kf - 1.0) / (kf - 2.0))
}

/// Empirical fit to the computed nonlinear flux constants across fold numbers:
/// C = k(k^1.939 − 1)/(k − 2), valid for k ≥ 4.
pub fn fitted_flux_constant(k: u32) -> Result<f64> {
    if k < 4 {
        return Err(SelfsimError::Domain(format!(
            "fitted flux constant needs k >= 4, got {k}"
        )));
    }
    let kf = k as f64;
    Ok(kf * (kf.powf(1.939) - 1.0) / (kf - 2.0))
}

/// Linear growth rate of the mode-k shape factor δ_k/R about an expanding
/// circle of radius R fed by flux J: (k−2)(J − C/R)/R². Zero exactly at the
/// self-similar threshold J = C/R and for the area-preserving mode k = 2.
pub fn shape_factor_growth_rate(k: u32, j: f64, c: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(SelfsimError::Domain(format!("radius must be > 0, got {r}")));
    }
    let kf = k as f64;
    Ok((kf - 2.0) * (j - c / r) / (r * r))
}

/// Exact solution R(t) = (r0³ + 3Ct)^{1/3} of the scale equation Ṙ·R² = C.
pub fn scale_evolution(r0: f64, c: f64, t: f64) -> Result<f64> {
    if !(r0 > 0.0) {
        return Err(SelfsimError::Domain(format!("r0 must be > 0, got {r0}")));
    }
    let radicand = r0.powi(3) + 3.0 * c * t;
    if !(radicand > 0.0) {
        return Err(SelfsimError::Domain(format!(
            "scale collapsed: r0³ + 3Ct = {radicand:.6e}"
        )));
    }
    Ok(radicand.cbrt())
}
