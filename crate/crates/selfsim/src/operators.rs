//! The two nonlinear integral operators of the eigenproblem, the residual
//! f = M + C₀·G, and the flux-constant estimator.
//!
//! M[x](α_i) = τ·H[κ](α_i) is homogeneous of degree −2 in the shape;
//! G[x](α_i) = (1/K_eff)·[ (1 − Ã/(π|x_i|²))·x_i·n_i
//!                        + 2A·∮(1 − Ã/(π|x′|²))(x′·n′)·∂G/∂n(x_i) ds′
//!                        + 2A·(Ã/π)·H[ln|x′|](α_i) ]
//! is homogeneous of degree +1, with Ã the enclosed area and A the mobility
//! contrast. Both vanish identically on circles.

use crate::error::{Result, SelfsimError};
use crate::geometry::{sample_interface, FourierShape, PhysicalParams, SampledInterface};
use std::f64::consts::PI;

/// Surface-tension operator M = τ·H[κ].
pub fn op_m(si: &SampledInterface, params: &PhysicalParams) -> Vec<f64> {
    assemble(si, params).0
}

/// Flux operator G.
pub fn op_g(si: &SampledInterface, params: &PhysicalParams) -> Result<Vec<f64>> {
    check_off_origin(si)?;
    Ok(assemble(si, params).1)
}

/// Residual field f(α_i) = M(α_i) + c0·G(α_i), with the sampled geometry it
/// was evaluated on.
pub fn residual(
    shape: &FourierShape,
    c0: f64,
    params: &PhysicalParams,
    n2: usize,
) -> Result<(Vec<f64>, SampledInterface)> {
    let si = sample_interface(shape, n2)?;
    check_off_origin(&si)?;
    let (m, g) = assemble(&si, params);
    let f = m.iter().zip(&g).map(|(mi, gi)| mi + c0 * gi).collect();
    Ok((f, si))
}

fn check_off_origin(si: &SampledInterface) -> Result<()> {
    if let Some(i) = si.r.iter().position(|&ri| ri == 0.0) {
        return Err(SelfsimError::InvalidShape(format!(
            "node {i} sits at the origin"
        )));
    }
    Ok(())
}

/// One fused pass assembling both operator fields.
///
/// The two hypersingular integrals (densities κ and ln r) share the target
/// tangent and the pairwise differences with the adjoint-double-layer sum, so
/// all three accumulate inside a single O(n2²) loop; the alternate-point rule
/// applies to the odd-kernel terms while the smooth layer sums over all nodes.
fn assemble(si: &SampledInterface, params: &PhysicalParams) -> (Vec<f64>, Vec<f64>) {
    let n = si.n2;
    // Exact nodal α-derivatives of the two hypersingular densities (κ and
    // ln r), provided by the geometry via polar closed forms.
    let dkappa = &si.dkappa_dalpha;
    let dlogr = &si.dlogr_dalpha;
    let area_over_pi = si.area / PI;

    // w(α) = (1 − Ã/(π|x|²))·(x·n), the local normal-velocity density.
    let w: Vec<f64> = (0..n)
        .map(|j| {
            let r2 = si.r[j] * si.r[j];
            (1.0 - area_over_pi / r2) * (si.x[j] * si.nx[j] + si.y[j] * si.ny[j])
        })
        .collect();

    let mut m = vec![0.0; n];
    let mut g = vec![0.0; n];
    let two_a = 2.0 * params.atwood;
    for i in 0..n {
        let mut hyper_kappa = 0.0;
        let mut hyper_logr = 0.0;
        let mut dlp = w[i] * (si.kappa[i] / (4.0 * PI)) * si.s_alpha[i];
        for j in 0..n {
            if j == i {
                continue;
            }
            let dx = si.x[i] - si.x[j];
            let dy = si.y[i] - si.y[j];
            let r2 = dx * dx + dy * dy;
            let dot_n = (si.nx[i] * dx + si.ny[i] * dy) / (2.0 * PI * r2);
            dlp += w[j] * dot_n * si.s_alpha[j];
            if (j + n - i) % 2 == 1 {
                let dot_t = (si.tx[i] * dx + si.ty[i] * dy) / r2;
                hyper_kappa += dkappa[j] * dot_t;
                hyper_logr += dlogr[j] * dot_t;
            }
        }
        // Alternate-point rule carries 2Δα; the kernels carry their own 1/2π.
        let hk = 2.0 * si.delta_alpha * hyper_kappa / (2.0 * PI);
        let hl = 2.0 * si.delta_alpha * hyper_logr / (2.0 * PI);
        let term2 = si.delta_alpha * dlp;
        m[i] = params.tau * hk;
        g[i] = (w[i] + two_a * (term2 + area_over_pi * hl)) / params.k_eff;
    }
    (m, g)
}

/// Flux constant of a (near-)converged shape and its self-similarity spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxEstimate {
    /// Arclength-weighted least-squares fit of −M/G.
    pub c: f64,
    /// Weighted standard deviation of the pointwise ratio −M_i/G_i over nodes
    /// where |G| is appreciable, normalized by |c|; ≈0 for exact self-similarity.
    pub spread: f64,
}

/// c = −⟨M,G⟩/⟨G,G⟩ with the arclength-weighted inner product. Errors on a
/// circle, where G vanishes identically and C is arbitrary.
pub fn flux_constant(si: &SampledInterface, params: &PhysicalParams) -> Result<FluxEstimate> {
    check_off_origin(si)?;
    let (m, g) = assemble(si, params);
    let wsum: f64 = si.s_alpha.iter().sum();
    let gg: f64 = (0..si.n2).map(|i| si.s_alpha[i] * g[i] * g[i]).sum();
    let mm: f64 = (0..si.n2).map(|i| si.s_alpha[i] * m[i] * m[i]).sum();
    let rms_g = (gg / wsum).sqrt();
    let rms_m = (mm / wsum).sqrt();
    if rms_g <= 1e-9 * (1.0 + rms_m) {
        return Err(SelfsimError::DegenerateEigenvector);
    }
    let mg: f64 = (0..si.n2).map(|i| si.s_alpha[i] * m[i] * g[i]).sum();
    let c = -mg / gg;

    // Pointwise ratios are meaningful only where G carries signal.
    let gmax = g.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let floor = 1e-3 * gmax;
    let mut wtot = 0.0;
    let mut mean = 0.0;
    for i in 0..si.n2 {
        if g[i].abs() > floor {
            wtot += si.s_alpha[i];
            mean += si.s_alpha[i] * (-m[i] / g[i]);
        }
    }
    mean /= wtot;
    let mut var = 0.0;
    for i in 0..si.n2 {
        if g[i].abs() > floor {
            let d = -m[i] / g[i] - mean;
            var += si.s_alpha[i] * d * d;
        }
    }
    let spread = (var / wtot).sqrt() / c.abs().max(f64::MIN_POSITIVE);
    Ok(FluxEstimate { c, spread })
}
