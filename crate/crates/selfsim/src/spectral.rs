//! Fourier operations on real periodic nodal data over the uniform grid
//! α_i = 2πi/N.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    })
}

fn fft(vals: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = vals.iter().map(|&v| Complex::new(v, 0.0)).collect();
    plan(vals.len(), true).process(&mut buf);
    buf
}

/// Inverse transform of `buf`, returning the real part scaled by 1/N.
fn ifft_re(mut buf: Vec<Complex<f64>>) -> Vec<f64> {
    let n = buf.len();
    plan(n, false).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Signed integer frequency for bin m of an N-point transform.
fn freq(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Spectral d/dα or d²/dα² of periodic nodal values.
///
/// Exact (to roundoff) on data band-limited below the Nyquist mode. The first
/// derivative zeroes the Nyquist bin (its sine interpolant has zero slope at
/// the nodes); the second keeps the natural −(N/2)² factor, which is exact for
/// cosine data at the Nyquist mode.
///
/// Bins below the transform's roundoff floor (relative level N·ε) are zeroed
/// before the frequency multiplier: they carry no signal, and scaling them by
/// k would only amplify noise — on constant data this keeps the derivative
/// exactly zero instead of O(N²ε).
pub fn derivative(vals: &[f64], order: u32) -> Vec<f64> {
    assert!(order == 1 || order == 2, "only first and second derivatives");
    let n = vals.len();
    let mut buf = fft(vals);
    let floor = buf.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max).sqrt()
        * f64::EPSILON
        * n as f64;
    for (m, c) in buf.iter_mut().enumerate() {
        if c.norm_sqr() <= floor * floor {
            *c = Complex::new(0.0, 0.0);
            continue;
        }
        let k = freq(m, n) as f64;
        *c = match order {
            1 => {
                if n % 2 == 0 && m == n / 2 {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::new(0.0, k) * *c
                }
            }
            _ => Complex::new(-k * k, 0.0) * *c,
        };
    }
    ifft_re(buf)
}

/// First `n1` cosine coefficients of a nodal field: out[0] is the mean and
/// out[k] = (2/N) Σ_j vals_j cos(k α_j). Inverse of evaluating Σ c_k cos kα on
/// the grid when the field is an even, band-limited cosine series.
pub fn cosine_coefficients(vals: &[f64], n1: usize) -> Vec<f64> {
    let n = vals.len();
    assert!(n1 <= n / 2, "requested modes exceed grid resolution");
    let buf = fft(vals);
    let mut out = vec![0.0; n1];
    out[0] = buf[0].re / n as f64;
    for (k, o) in out.iter_mut().enumerate().skip(1) {
        *o = 2.0 * buf[k].re / n as f64;
    }
    out
}

/// Circular convolution with the periodic logarithmic kernel:
/// out(α_i) = (1/2π) ∮ ln(2 sin((α_i−α′)/2)) g(α′) dα′,
/// computed exactly in coefficient space (multiplier −1/(2|m|), zero mean).
///
/// This is the singular half of a kernel-split single-layer evaluation; the
/// remaining smooth factor ln|x−x′| − ln(2 sin((α−α′)/2)) integrates with the
/// plain trapezoidal rule, keeping the whole potential spectrally accurate.
pub fn log_kernel_convolution(g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let mut buf = fft(g);
    for (m, c) in buf.iter_mut().enumerate() {
        let k = freq(m, n).unsigned_abs() as f64;
        *c = if m == 0 {
            Complex::new(0.0, 0.0)
        } else {
            *c * Complex::new(-1.0 / (2.0 * k), 0.0)
        };
    }
    ifft_re(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
    }

    #[test]
    fn derivative_matches_analytic_on_band_limited_data() {
        let n = 64;
        let a = grid(n);
        let vals: Vec<f64> = a.iter().map(|&t| (3.0 * t).cos() + 0.5 * (5.0 * t).sin()).collect();
        let d1 = derivative(&vals, 1);
        let d2 = derivative(&vals, 2);
        for i in 0..n {
            let t = a[i];
            let e1 = -3.0 * (3.0 * t).sin() + 2.5 * (5.0 * t).cos();
            let e2 = -9.0 * (3.0 * t).cos() - 12.5 * (5.0 * t).sin();
            assert!((d1[i] - e1).abs() < 1e-12, "d1 node {i}");
            assert!((d2[i] - e2).abs() < 1e-11, "d2 node {i}");
        }
    }

    #[test]
    fn derivative_is_exact_near_nyquist() {
        // Highest resolvable cosine mode for first derivatives is N/2 − 1.
        let n = 32;
        let k = (n / 2 - 1) as f64;
        let a = grid(n);
        let vals: Vec<f64> = a.iter().map(|&t| (k * t).cos()).collect();
        let d1 = derivative(&vals, 1);
        for i in 0..n {
            assert!((d1[i] + k * (k * a[i]).sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn second_derivative_handles_nyquist_cosine() {
        // cos((N/2)α) is representable for even data; its second derivative is
        // −(N/2)² cos((N/2)α), which the natural multiplier reproduces.
        let n = 16;
        let k = (n / 2) as f64;
        let a = grid(n);
        let vals: Vec<f64> = a.iter().map(|&t| (k * t).cos()).collect();
        let d2 = derivative(&vals, 2);
        for i in 0..n {
            assert!((d2[i] + k * k * (k * a[i]).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn cosine_coefficients_invert_series_evaluation() {
        let n = 64;
        let coeffs = [1.0, 0.0, -0.3, 0.2, 0.0, 0.07];
        let a = grid(n);
        let vals: Vec<f64> = a
            .iter()
            .map(|&t| coeffs.iter().enumerate().map(|(k, c)| c * (k as f64 * t).cos()).sum())
            .collect();
        let got = cosine_coefficients(&vals, coeffs.len());
        for k in 0..coeffs.len() {
            assert!((got[k] - coeffs[k]).abs() < 1e-13, "mode {k}");
        }
    }

    #[test]
    fn log_kernel_is_diagonal_on_cosines() {
        // (1/2π)∮ ln(2sin((α−α′)/2)) cos(kα′) dα′ = −cos(kα)/(2k).
        let n = 128;
        let a = grid(n);
        for k in [1usize, 2, 5, 11] {
            let g: Vec<f64> = a.iter().map(|&t| (k as f64 * t).cos()).collect();
            let out = log_kernel_convolution(&g);
            for i in 0..n {
                let expect = -(k as f64 * a[i]).cos() / (2.0 * k as f64);
                assert!((out[i] - expect).abs() < 1e-13, "k={k} node {i}");
            }
        }
    }

    #[test]
    fn log_kernel_annihilates_constants() {
        let out = log_kernel_convolution(&vec![3.7; 64]);
        for v in out {
            assert!(v.abs() < 1e-14);
        }
    }
}
