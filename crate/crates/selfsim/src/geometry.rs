//! Interface representation: truncated cosine series for the radius and the
//! sampled differential geometry the integral operators consume.

use crate::error::{Result, SelfsimError};
use crate::spectral;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Star-shaped interface r(α) = Σ_k coeffs[k]·cos kα.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierShape {
    pub coeffs: Vec<f64>,
}

impl FourierShape {
    /// Requires at least the constant mode; positivity of the radius is a
    /// property of the full sum and is checked when sampling.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(SelfsimError::InvalidShape("empty coefficient vector".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(SelfsimError::InvalidShape("non-finite coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    /// Circle of radius 1 represented with `n1` modes.
    pub fn unit_circle(n1: usize) -> Self {
        let mut coeffs = vec![0.0; n1.max(1)];
        coeffs[0] = 1.0;
        Self { coeffs }
    }

    /// r(α) = Σ δ_k cos kα.
    pub fn radius_at(&self, alpha: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (k as f64 * alpha).cos())
            .sum()
    }

    /// Every coefficient multiplied by β; scales the curve about the origin.
    pub fn rescale(&self, beta: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * beta).collect(),
        }
    }

    /// (mode, |coefficient|) pairs.
    pub fn spectrum(&self) -> Vec<(usize, f64)> {
        self.coeffs.iter().enumerate().map(|(k, c)| (k, c.abs())).collect()
    }

    /// Mode k ≥ 1 with the largest |δ_k|, or 0 (circle) when every such
    /// coefficient is below `threshold`.
    pub fn dominant_fold(&self, threshold: f64) -> usize {
        let mut best = 0usize;
        let mut best_mag = threshold;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            if c.abs() > best_mag {
                best = k;
                best_mag = c.abs();
            }
        }
        best
    }
}

/// Surface tension and mobility parameters. The two mobilities enter only
/// through `k_eff' = 2K₁K₂/(K₁+K₂) and the contrast `atwood' = (K₂−K₁)/(K₂+K₁).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub tau: f64,
    pub k_eff: f64,
    pub atwood: f64,
}

impl Default for PhysicalParams {
    /// One-phase limit (inviscid inner fluid): K₁ → ∞ with outer mobility
    /// K₂ = 1, giving k_eff = 2 and atwood = −1. With τ = 1 this makes the
    /// small-amplitude flux constant equal k(k²−1)/(k−2).
    fn default() -> Self {
        Self {
            tau: 1.0,
            k_eff: 2.0,
            atwood: -1.0,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(SelfsimError::Config(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(self.k_eff > 0.0) {
            return Err(SelfsimError::Config(format!("k_eff must be > 0, got {}", self.k_eff)));
        }
        if !(-1.0..=1.0).contains(&self.atwood) {
            return Err(SelfsimError::Config(format!(
                "atwood must lie in [-1, 1], got {}",
                self.atwood
            )));
        }
        Ok(())
    }

    /// From finite mobilities K₁ (inner) and K₂ (outer).
    pub fn from_mobilities(tau: f64, k1: f64, k2: f64) -> Result<Self> {
        if !(k1 > 0.0) || !(k2 > 0.0) {
            return Err(SelfsimError::Config(format!(
                "mobilities must be > 0, got k1={k1}, k2={k2}"
            )));
        }
        let p = Self {
            tau,
            k_eff: 2.0 * k1 * k2 / (k1 + k2),
            atwood: (k2 - k1) / (k2 + k1),
        };
        p.validate()?;
        Ok(p)
    }

    /// One-phase limit K₁ → ∞ at outer mobility `k2`.
    pub fn one_phase(tau: f64, k2: f64) -> Result<Self> {
        if !(k2 > 0.0) {
            return Err(SelfsimError::Config(format!("outer mobility must be > 0, got {k2}")));
        }
        let p = Self {
            tau,
            k_eff: 2.0 * k2,
            atwood: -1.0,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Nodal geometry of the curve at α_i = 2πi/N₂, with all α-derivatives taken
/// spectrally from the nodal positions. Counterclockwise orientation; the
/// normal points away from the enclosed region; the unit circle has κ = +1.
#[derive(Debug, Clone)]
pub struct SampledInterface {
    pub n2: usize,
    pub delta_alpha: f64,
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Radius |x_i| (equals r(α_i) for star-shaped curves).
    pub r: Vec<f64>,
    pub s_alpha: Vec<f64>,
    pub tx: Vec<f64>,
    pub ty: Vec<f64>,
    pub nx: Vec<f64>,
    pub ny: Vec<f64>,
    pub kappa: Vec<f64>,
    /// dκ/dα, from the polar closed form. κ(α) itself is not band-limited, so
    /// spectrally differentiating its nodal samples would carry the unresolved
    /// tail as error; the polar quotient built from r-derivatives (r is
    /// band-limited) is exact at the nodes.
    pub dkappa_dalpha: Vec<f64>,
    /// d(ln r)/dα = r′/r, exact at the nodes for the same reason.
    pub dlogr_dalpha: Vec<f64>,
    pub area: f64,
}

/// Sample the curve at `n2` uniform nodes. `n2` must be even and at least
/// twice the mode count so the series is fully resolved; the radius must be
/// strictly positive at every node.
pub fn sample_interface(shape: &FourierShape, n2: usize) -> Result<SampledInterface> {
    if n2 % 2 != 0 {
        return Err(SelfsimError::Config(format!("n2 must be even, got {n2}")));
    }
    if n2 < 2 * shape.coeffs.len() {
        return Err(SelfsimError::Config(format!(
            "n2 = {n2} does not resolve {} modes (need n2 >= {})",
            shape.coeffs.len(),
            2 * shape.coeffs.len()
        )));
    }
    let delta_alpha = 2.0 * PI / n2 as f64;
    let alpha: Vec<f64> = (0..n2).map(|i| delta_alpha * i as f64).collect();
    let r: Vec<f64> = alpha.iter().map(|&a| shape.radius_at(a)).collect();
    if let Some(i) = r.iter().position(|&ri| !(ri > 0.0)) {
        return Err(SelfsimError::InvalidShape(format!(
            "nonpositive radius r({:.6}) = {:.6e}",
            alpha[i], r[i]
        )));
    }
    let x: Vec<f64> = (0..n2).map(|i| r[i] * alpha[i].cos()).collect();
    let y: Vec<f64> = (0..n2).map(|i| r[i] * alpha[i].sin()).collect();

    let xa = spectral::derivative(&x, 1);
    let ya = spectral::derivative(&y, 1);
    let xaa = spectral::derivative(&x, 2);
    let yaa = spectral::derivative(&y, 2);
    let r1 = spectral::derivative(&r, 1);
    let r2 = spectral::derivative(&r, 2);
    let r3 = spectral::derivative(&r1, 2);

    let mut s_alpha = vec![0.0; n2];
    let mut tx = vec![0.0; n2];
    let mut ty = vec![0.0; n2];
    let mut nx = vec![0.0; n2];
    let mut ny = vec![0.0; n2];
    let mut kappa = vec![0.0; n2];
    let mut dkappa_dalpha = vec![0.0; n2];
    let mut dlogr_dalpha = vec![0.0; n2];
    let mut area = 0.0;
    for i in 0..n2 {
        let sa = xa[i].hypot(ya[i]);
        if !(sa > 0.0) {
            return Err(SelfsimError::InvalidShape(format!(
                "vanishing arclength element at α = {:.6}",
                alpha[i]
            )));
        }
        s_alpha[i] = sa;
        tx[i] = xa[i] / sa;
        ty[i] = ya[i] / sa;
        // Outward normal for a counterclockwise curve: tangent rotated by −π/2.
        nx[i] = ty[i];
        ny[i] = -tx[i];
        kappa[i] = (xa[i] * yaa[i] - ya[i] * xaa[i]) / (sa * sa * sa);
        // Polar curvature quotient κ = num/den with num = r² + 2r′² − r·r″ and
        // den = (r² + r′²)^{3/2}, differentiated once in α.
        let num = r[i] * r[i] + 2.0 * r1[i] * r1[i] - r[i] * r2[i];
        let den = sa * sa * sa;
        let num_p = 2.0 * r[i] * r1[i] + 3.0 * r1[i] * r2[i] - r[i] * r3[i];
        let den_p = 3.0 * sa * r1[i] * (r[i] + r2[i]);
        dkappa_dalpha[i] = (num_p * den - num * den_p) / (den * den);
        dlogr_dalpha[i] = r1[i] / r[i];
        area += x[i] * ya[i] - y[i] * xa[i];
    }
    area *= 0.5 * delta_alpha;

    Ok(SampledInterface {
        n2,
        delta_alpha,
        alpha,
        x,
        y,
        r,
        s_alpha,
        tx,
        ty,
        nx,
        ny,
        kappa,
        dkappa_dalpha,
        dlogr_dalpha,
        area,
    })
}

/// Area enclosed by the curve, ½∮(x dy − y dx).
pub fn enclosed_area(si: &SampledInterface) -> f64 {
    si.area
}

/// Radius of the circle with the same enclosed area.
pub fn effective_radius(area: f64) -> Result<f64> {
    if !(area > 0.0) {
        return Err(SelfsimError::InvalidShape(format!("nonpositive area {area:.6e}")));
    }
    Ok((area / PI).sqrt())
}

/// δ/R: maximum over nodes of | |x_i|/R_eff − 1 |.
pub fn shape_factor(si: &SampledInterface) -> Result<f64> {
    let reff = effective_radius(si.area)?;
    Ok(si
        .r
        .iter()
        .map(|&ri| (ri / reff - 1.0).abs())
        .fold(0.0, f64::max))
}
