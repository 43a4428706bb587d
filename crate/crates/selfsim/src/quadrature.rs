//! Singular boundary-integral quadrature on closed periodic curves.
//!
//! Three kernel classes appear, each with its own spectrally accurate rule:
//! smooth kernels (adjoint double layer) use the plain trapezoidal rule with
//! the analytic diagonal limit; the odd cotangent-type kernel of the reduced
//! hypersingular operator uses the alternate-point trapezoidal rule, which is
//! exact on band-limited densities; the logarithmic kernel of the single layer
//! is split into its periodic log part (diagonal in Fourier space) plus a
//! smooth remainder, because the alternate-point rule on a log kernel has only
//! O(1/N) accuracy.

use crate::error::{Result, SelfsimError};
use crate::geometry::SampledInterface;
use crate::spectral;
use std::f64::consts::PI;

/// Free-space Green's function (1/2π)·ln|x − xp|.
pub fn green(x: [f64; 2], xp: [f64; 2]) -> Result<f64> {
    let d = (x[0] - xp[0]).hypot(x[1] - xp[1]);
    if d == 0.0 {
        return Err(SelfsimError::SingularEvaluation);
    }
    Ok(d.ln() / (2.0 * PI))
}

/// Adjoint double-layer kernel ∂G/∂n at the target: off-diagonal
/// n_i·(x_i − x_j)/(2π|x_i − x_j|²); the diagonal is the smooth limit κ_i/(4π).
pub fn adjoint_dlp_kernel(si: &SampledInterface, i: usize, j: usize) -> f64 {
    if i == j {
        return si.kappa[i] / (4.0 * PI);
    }
    let dx = si.x[i] - si.x[j];
    let dy = si.y[i] - si.y[j];
    let r2 = dx * dx + dy * dy;
    (si.nx[i] * dx + si.ny[i] * dy) / (2.0 * PI * r2)
}

/// Alternate-point trapezoidal rule: 2Δα · Σ_{(j−i) odd} values_j.
///
/// Integrates periodic integrands that are smooth away from node i while
/// skipping the singular node; spectrally accurate for kernels with odd
/// (cotangent-type) singularities.
pub fn alt_trapezoid(values: &[f64], i: usize, delta_alpha: f64) -> Result<f64> {
    let n = values.len();
    if n % 2 != 0 {
        return Err(SelfsimError::Config(format!(
            "alternate-point rule needs an even node count, got {n}"
        )));
    }
    let mut sum = 0.0;
    let mut j = (i + 1) % n;
    for _ in 0..n / 2 {
        sum += values[j];
        j = (j + 2) % n;
    }
    Ok(2.0 * delta_alpha * sum)
}

/// Single-layer potential ∮ density(x′) G(x_i − x′) ds′ at every node, by
/// kernel splitting: the periodic log part is applied as a Fourier multiplier
/// and the smooth remainder (diagonal value ln s_α) by the trapezoidal rule.
pub fn single_layer(density: &[f64], si: &SampledInterface) -> Vec<f64> {
    let n = si.n2;
    let g: Vec<f64> = (0..n).map(|j| density[j] * si.s_alpha[j]).collect();
    let mut out = spectral::log_kernel_convolution(&g);
    // Smooth remainder ln|x_i − x_j| − ln(2 sin((α_i−α_j)/2)) → ln s_α on the
    // diagonal; plain trapezoid in α with the s_α weight already in g.
    for i in 0..n {
        let mut sum = 0.0;
        for (j, &gj) in g.iter().enumerate() {
            let k = if i == j {
                si.s_alpha[i].ln()
            } else {
                let d = (si.x[i] - si.x[j]).hypot(si.y[i] - si.y[j]);
                let p = 2.0 * (0.5 * (si.alpha[i] - si.alpha[j])).sin().abs();
                d.ln() - p.ln()
            };
            sum += k * gj;
        }
        out[i] += sum * si.delta_alpha / (2.0 * PI);
    }
    out
}

/// Single-layer potential at one node.
pub fn single_layer_at(density: &[f64], si: &SampledInterface, i: usize) -> f64 {
    single_layer(density, si)[i]
}

/// Hypersingular operator in reduced form at every node:
/// H[φ](x_i) = (1/2π) ∮ (dφ/ds)(x′) · t_i·(x_i − x′)/|x_i − x′|² ds′,
/// with dφ/ds computed spectrally and the tangent taken at the target. The
/// reduced kernel has an odd singularity, so the alternate-point rule applies.
pub fn hypersingular(density: &[f64], si: &SampledInterface) -> Vec<f64> {
    let n = si.n2;
    // (dφ/ds)·ds′ = (dφ/dα)·dα′: the arclength element cancels exactly.
    let dphi = spectral::derivative(density, 1);
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut sum = 0.0;
        let mut j = (i + 1) % n;
        for _ in 0..n / 2 {
            let dx = si.x[i] - si.x[j];
            let dy = si.y[i] - si.y[j];
            let r2 = dx * dx + dy * dy;
            sum += dphi[j] * (si.tx[i] * dx + si.ty[i] * dy) / r2;
            j = (j + 2) % n;
        }
        *o = 2.0 * si.delta_alpha * sum / (2.0 * PI);
    }
    out
}

/// Hypersingular operator at one node.
pub fn hypersingular_at(density: &[f64], si: &SampledInterface, i: usize) -> f64 {
    let n = si.n2;
    let dphi = spectral::derivative(density, 1);
    let mut sum = 0.0;
    let mut j = (i + 1) % n;
    for _ in 0..n / 2 {
        let dx = si.x[i] - si.x[j];
        let dy = si.y[i] - si.y[j];
        let r2 = dx * dx + dy * dy;
        sum += dphi[j] * (si.tx[i] * dx + si.ty[i] * dy) / r2;
        j = (j + 2) % n;
    }
    2.0 * si.delta_alpha * sum / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_interface, FourierShape};
    use std::f64::consts::E;

    fn circle(radius: f64, n2: usize) -> SampledInterface {
        sample_interface(&FourierShape::new(vec![radius]).unwrap(), n2).unwrap()
    }

    #[test]
    fn green_closed_forms() {
        assert_eq!(green([0.0, 0.0], [1.0, 0.0]).unwrap(), 0.0);
        assert!((green([0.0, 0.0], [E, 0.0]).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((green([0.0, 0.0], [2.0, 0.0]).unwrap() - 0.110_317_800_076_325_8).abs() < 1e-15);
        assert!(matches!(
            green([1.0, 2.0], [1.0, 2.0]),
            Err(SelfsimError::SingularEvaluation)
        ));
    }

    #[test]
    fn alt_trapezoid_exact_cases() {
        let n = 64;
        let da = 2.0 * PI / n as f64;
        let cosv: Vec<f64> = (0..n).map(|j| (da * j as f64).cos()).collect();
        assert!(alt_trapezoid(&cosv, 5, da).unwrap().abs() < 1e-13);
        let ones = vec![1.0; n];
        assert!((alt_trapezoid(&ones, 0, da).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!(alt_trapezoid(&ones[..63], 0, da).is_err());
    }

    #[test]
    fn alt_trapezoid_is_spectrally_accurate_on_smooth_integrands() {
        // ∮ e^{cos α} dα = 2π·I₀(1); the alternate-point rule sees every other
        // node, so its effective grid is N/2 and still converges spectrally.
        let exact = 7.954_926_521_012_846;
        let mut prev = f64::MAX;
        for n in [16usize, 32, 64] {
            let da = 2.0 * PI / n as f64;
            let vals: Vec<f64> = (0..n).map(|j| (da * j as f64).cos().exp()).collect();
            let err = (alt_trapezoid(&vals, 0, da).unwrap() - exact).abs();
            assert!(err < prev / 10.0 || err < 1e-13, "n={n}: {err:.3e} vs {prev:.3e}");
            prev = err;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn single_layer_circle_identities() {
        // Density 1 on a circle of radius R integrates to R ln R.
        for (radius, expect) in [(1.0, 0.0), (2.0, 2.0 * (2.0f64).ln()), (0.5, 0.5 * (0.5f64).ln())] {
            let si = circle(radius, 256);
            let out = single_layer(&vec![1.0; 256], &si);
            for v in &out {
                assert!((v - expect).abs() < 1e-12, "R={radius}");
            }
        }
    }

    #[test]
    fn single_layer_eigenrelations_on_unit_circle() {
        // S[cos kθ] = −cos kθ/(2k), S[sin kθ] = −sin kθ/(2k).
        let n = 256;
        let si = circle(1.0, n);
        for k in 1..=8usize {
            let kc = k as f64;
            let cosd: Vec<f64> = (0..n).map(|j| (kc * si.alpha[j]).cos()).collect();
            let sind: Vec<f64> = (0..n).map(|j| (kc * si.alpha[j]).sin()).collect();
            let sc = single_layer(&cosd, &si);
            let ss = single_layer(&sind, &si);
            for i in 0..n {
                assert!((sc[i] + cosd[i] / (2.0 * kc)).abs() < 1e-12, "cos k={k}");
                assert!((ss[i] + sind[i] / (2.0 * kc)).abs() < 1e-12, "sin k={k}");
            }
        }
    }

    #[test]
    fn hypersingular_eigenrelations_on_unit_circle() {
        // H[cos kθ] = (k/2)·cos kθ.
        let n = 256;
        let si = circle(1.0, n);
        for k in 1..=8usize {
            let kc = k as f64;
            let d: Vec<f64> = (0..n).map(|j| (kc * si.alpha[j]).cos()).collect();
            let h = hypersingular(&d, &si);
            for i in 0..n {
                assert!((h[i] - 0.5 * kc * d[i]).abs() < 1e-12, "k={k} node {i}");
            }
        }
        // Constant density: dφ/ds = 0.
        let h0 = hypersingular(&vec![4.2; n], &si);
        for v in h0 {
            assert!(v.abs() < 1e-13);
        }
    }

    #[test]
    fn hypersingular_converges_spectrally_on_full_spectrum_density() {
        // Density Σ_k 2·(1/2)^k cos kθ has H = Re[z/(1−z)²], z = e^{iθ}/2 —
        // not band-limited, so the error must decay spectrally with n2.
        let exact = |t: f64| {
            let z = rustfft::num_complex::Complex::new(0.5 * t.cos(), 0.5 * t.sin());
            (z / ((1.0 - z) * (1.0 - z))).re
        };
        let mut prev = f64::MAX;
        for n in [32usize, 64, 128] {
            let si = circle(1.0, n);
            let d: Vec<f64> = (0..n)
                .map(|j| {
                    let t = si.alpha[j];
                    (1..40).map(|k| 2.0 * 0.5f64.powi(k) * (k as f64 * t).cos()).sum()
                })
                .collect();
            let h = hypersingular(&d, &si);
            let err = (0..n)
                .map(|i| (h[i] - exact(si.alpha[i])).abs())
                .fold(0.0, f64::max);
            assert!(err < prev / 20.0 || err < 1e-11, "n={n}: {err:.3e}");
            prev = err;
        }
        assert!(prev < 1e-9);
    }

    #[test]
    fn adjoint_dlp_diagonal_and_gauss_identity() {
        let n = 512;
        let si = circle(1.0, n);
        assert!((adjoint_dlp_kernel(&si, 3, 3) - 1.0 / (4.0 * PI)).abs() < 1e-12);

        // Gauss identity on a noncircular star shape: with the normal taken at
        // the source, ∮ ∂G/∂n(x_j) ds_j = ±1/2 for any on-curve target.
        let s = FourierShape::new(vec![1.0, 0.0, 0.15, 0.0, 0.08]).unwrap();
        let si = sample_interface(&s, n).unwrap();
        for i in [0usize, 17, 300] {
            let mut sum = 0.0;
            for j in 0..n {
                let k = if i == j {
                    si.kappa[i] / (4.0 * PI)
                } else {
                    let dx = si.x[j] - si.x[i];
                    let dy = si.y[j] - si.y[i];
                    let r2 = dx * dx + dy * dy;
                    (si.nx[j] * dx + si.ny[j] * dy) / (2.0 * PI * r2)
                };
                sum += k * si.s_alpha[j] * si.delta_alpha;
            }
            assert!((sum.abs() - 0.5).abs() < 1e-8, "target {i}: {sum}");
        }
    }

    #[test]
    fn kernel_scales_inversely_with_shape_size() {
        let s = FourierShape::new(vec![1.0, 0.0, 0.1]).unwrap();
        let beta = 1.7;
        let a = sample_interface(&s, 64).unwrap();
        let b = sample_interface(&s.rescale(beta), 64).unwrap();
        for (i, j) in [(0usize, 5usize), (10, 40), (7, 7)] {
            let ka = adjoint_dlp_kernel(&a, i, j);
            let kb = adjoint_dlp_kernel(&b, i, j);
            assert!((kb - ka / beta).abs() < 1e-12 * ka.abs().max(1.0));
        }
    }
}
