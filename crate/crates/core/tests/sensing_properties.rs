use fpw_core::plate::{reference_layers, reference_overrides, CompositePlate};
use fpw_core::sensing::{
    fit_density_sensitivity, invert_density_calibrated, predict_frequency,
    viscosity_coupling_report, CouplingVerdict, LiquidSample, DEFAULT_COUPLING_THRESHOLD,
};
use proptest::prelude::*;

const LAMBDA: f64 = 40e-6;

fn plate() -> CompositePlate {
    CompositePlate::new(reference_layers())
        .unwrap()
        .with_overrides(reference_overrides())
        .unwrap()
}

/// Points with at least two distinct densities.
fn points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((500.0..2000.0f64, 4e6..6e6f64), 2..10)
        .prop_filter("distinct densities", |p| {
            p.iter().any(|q| (q.0 - p[0].0).abs() > 1.0)
        })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #[test]
    fn frequency_offset_moves_only_the_intercept(pts in points(), offset in -1e6..1e6f64) {
        let base = fit_density_sensitivity(&pts).unwrap();
        let shifted: Vec<_> = pts.iter().map(|&(d, f)| (d, f + offset)).collect();
        let fit = fit_density_sensitivity(&shifted).unwrap();
        prop_assert!(close(fit.slope, base.slope, 1e-6) || (fit.slope - base.slope).abs() < 1e-9);
        prop_assert!((fit.intercept - (base.intercept + offset)).abs() < 1e-6 * base.intercept.abs().max(1.0) + 1e-3);
    }

    #[test]
    fn scaling_densities_scales_slope_inversely(pts in points(), c in 0.1..10.0f64) {
        let base = fit_density_sensitivity(&pts).unwrap();
        let scaled: Vec<_> = pts.iter().map(|&(d, f)| (c * d, f)).collect();
        let fit = fit_density_sensitivity(&scaled).unwrap();
        prop_assert!(close(fit.slope, base.slope / c, 1e-8) || (fit.slope * c - base.slope).abs() < 1e-9);
        prop_assert!(close(fit.r_squared, base.r_squared, 1e-9) || (fit.r_squared - base.r_squared).abs() < 1e-12);
    }

    #[test]
    fn inversion_undoes_the_fitted_line(slope in -2000.0..-100.0f64, intercept in 5e6..7e6f64, density in 100.0..3000.0f64) {
        let pts = [(700.0, slope * 700.0 + intercept), (1300.0, slope * 1300.0 + intercept)];
        let fit = fit_density_sensitivity(&pts).unwrap();
        let back = invert_density_calibrated(fit.frequency_at(density), &fit).unwrap();
        prop_assert!(close(back.density, density, 1e-12));
        if !(690.0..=1310.0).contains(&density) {
            prop_assert!(back.out_of_range);
        }
        if (710.0..=1290.0).contains(&density) {
            prop_assert!(!back.out_of_range);
        }
    }

    #[test]
    fn more_viscous_liquid_resonates_lower(rho in 500.0..2000.0f64, eta in 0.0..1.0f64, extra in 1e-4..1.0f64) {
        let thin = LiquidSample::new("thin", rho, eta).unwrap();
        let thick = LiquidSample::new("thick", rho, eta + extra).unwrap();
        prop_assert!(
            predict_frequency(&plate(), LAMBDA, Some(&thick)).unwrap()
                < predict_frequency(&plate(), LAMBDA, Some(&thin)).unwrap()
        );
    }

    #[test]
    fn coupling_verdict_is_monotone_in_viscosity(rho in 500.0..2000.0f64, eta in 0.0..1.0f64, extra in 0.0..1.0f64, threshold in 0.01..0.5f64) {
        let verdict = |v: f64| {
            let liquid = LiquidSample::new("x", rho, v).unwrap();
            viscosity_coupling_report(&liquid, &plate(), LAMBDA, threshold).unwrap()
        };
        let low = verdict(eta);
        let high = verdict(eta + extra);
        prop_assert!(high.viscous_fraction >= low.viscous_fraction);
        if low.verdict == CouplingVerdict::Coupled {
            prop_assert_eq!(high.verdict, CouplingVerdict::Coupled);
        }
    }
}

#[test]
fn two_points_interpolate_exactly() {
    let fit = fit_density_sensitivity(&[(800.0, 5.0e6), (1200.0, 4.6e6)]).unwrap();
    assert!((fit.slope + 1000.0).abs() < 1e-9);
    assert_eq!(fit.r_squared, 1.0);
}

#[test]
fn collinear_points_fit_perfectly() {
    let pts: Vec<_> = [600.0, 900.0, 1500.0]
        .iter()
        .map(|&d| (d, 6e6 - 850.0 * d))
        .collect();
    let fit = fit_density_sensitivity(&pts).unwrap();
    assert!((1.0 - fit.r_squared).abs() < 1e-12);
    for &(d, f) in &pts {
        let est = invert_density_calibrated(f, &fit).unwrap();
        assert!((est.density - d).abs() < 1e-9 * d);
        assert!(!est.out_of_range);
    }
}

#[test]
fn inviscid_liquid_has_zero_ratio() {
    let liquid = LiquidSample::new("oil", 900.0, 0.0).unwrap();
    let report =
        viscosity_coupling_report(&liquid, &plate(), LAMBDA, DEFAULT_COUPLING_THRESHOLD).unwrap();
    assert_eq!(report.ratio, 0.0);
    assert_eq!(report.verdict, CouplingVerdict::DensitySensingValid);
}

#[test]
fn denser_liquid_resonates_lower() {
    let water = predict_frequency(&plate(), LAMBDA, Some(&LiquidSample::water())).unwrap();
    let saline = predict_frequency(&plate(), LAMBDA, Some(&LiquidSample::saline())).unwrap();
    assert!(saline < water);
}
