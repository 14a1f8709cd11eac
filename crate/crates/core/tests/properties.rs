//! Qualitative behavior of the posterior across the parameter space:
//! concentration as |r| approaches 1, the width floor in large samples,
//! the OLS bracket, and the coverage trend when the orthogonal identifying
//! condition holds.

use eiv_core::posterior::{PosteriorModel, QuadSettings};
use eiv_core::simulate::{coverage_experiment, CoverageSetting};

fn small_grid() -> QuadSettings {
    QuadSettings {
        grid_points: 2001,
        ..QuadSettings::default()
    }
}

#[test]
fn mass_concentrates_near_unit_slope_as_r_approaches_one() {
    for sign in [1.0, -1.0] {
        let model = PosteriorModel::from_params(99.0, sign * 0.999, 1.0, small_grid()).unwrap();
        let center = sign;
        let mass = model.cdf(center + 0.2) - model.cdf(center - 0.2);
        assert!(
            mass >= 0.99,
            "mass near beta-tilde = {center}: {mass:.4} below 0.99"
        );
    }
}

#[test]
fn interval_width_does_not_shrink_to_zero_with_sample_size() {
    let narrow = PosteriorModel::from_params(99.0, 0.5, 1.0, small_grid()).unwrap();
    let wide = PosteriorModel::from_params(999.0, 0.5, 1.0, small_grid()).unwrap();
    let w99 = {
        let iv = narrow.shortest_interval(0.95).unwrap();
        iv.upper - iv.lower
    };
    let w999 = {
        let iv = wide.shortest_interval(0.95).unwrap();
        iv.upper - iv.lower
    };
    assert!(
        w999 >= 0.5 * w99,
        "width at nu = 999 ({w999:.4}) collapsed below half the width at nu = 99 ({w99:.4})"
    );
}

#[test]
fn posterior_mass_brackets_the_two_ols_slopes() {
    // The two OLS estimates are r l and l / r; at nu = 99, r = 0.9, l = 1
    // at least 90% of the mass lies within [0.5 r l, 2 l / r].
    let model = PosteriorModel::from_params(99.0, 0.9, 1.0, small_grid()).unwrap();
    let mass = model.cdf(2.0 / 0.9) - model.cdf(0.5 * 0.9);
    assert!(mass >= 0.90, "bracket mass {mass:.4}");
}

#[test]
fn interval_is_well_defined_when_the_width_scan_is_not_unimodal() {
    // Small n with weak correlation makes the posterior bimodal (modes at
    // theta = +-pi/4). The interval search must still return a valid
    // shortest single interval, flagging the scan outcome.
    let model = PosteriorModel::from_params(3.0, 0.1, 1.0, small_grid()).unwrap();
    let iv = model.shortest_interval(0.5).unwrap();
    assert!(iv.lower < iv.upper);
    let mass = model.cdf(iv.upper) - model.cdf(iv.lower);
    assert!((mass - 0.5).abs() < 1e-6, "interval mass {mass:.6}");
    // High-confidence unimodal case for contrast.
    let zellner = PosteriorModel::from_params(19.0, 0.909, 0.963, small_grid()).unwrap();
    let iv = zellner.shortest_interval(0.95).unwrap();
    assert!(iv.width_unimodal);
}

#[test]
fn bootstrap_coverage_approaches_nominal_when_errors_match() {
    // sigma1 = sigma2 is the identifying condition for orthogonal
    // regression; its bootstrap coverage should sit near the nominal level
    // and not degrade as n grows.
    let settings = [
        CoverageSetting { n: 20, sigma1: 0.2, sigma2: 0.2 },
        CoverageSetting { n: 100, sigma1: 0.2, sigma2: 0.2 },
    ];
    let report =
        coverage_experiment(&settings, 200, 199, 0.90, 7, QuadSettings::fast()).unwrap();
    let small_n = report.rows[0].or_pct;
    let large_n = report.rows[1].or_pct;
    assert!(
        large_n >= small_n - 5.0,
        "orthogonal coverage degraded with n: {small_n:.1}% -> {large_n:.1}%"
    );
    assert!(
        (large_n - 90.0).abs() <= 7.0,
        "orthogonal coverage at n = 100 is {large_n:.1}%, expected near 90%"
    );
}
