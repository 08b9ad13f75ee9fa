use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use vortexwave::cli_io::{run_taylor_sweep, TaylorSweepConfig};
use vortexwave::taylor_sign::{
    a1_flat_closed_form, a1_pair_closed, a1_single_vortex_closed, a1_single_vortex_profile, Classification,
};
use vortexwave::VortexSet;

#[test]
fn single_vortex_examples() {
    let (a1, class) = a1_single_vortex_closed(1.0, -1.0).unwrap();
    assert!((a1 - (1.0 - 3.0 / (8.0 * PI * PI))).abs() < 1e-15);
    assert!((a1 - 0.962_004_6).abs() < 1e-6);
    assert_eq!(class, Classification::Strong);
    let (_, fail) = a1_single_vortex_closed(PI * 10f64.sqrt(), -1.0).unwrap();
    assert_eq!(fail, Classification::Failed);
    assert!(a1_single_vortex_closed(1.0, 0.5).is_err());
}

#[test]
fn single_vortex_profile_minimum_sits_above_the_vortex() {
    let (lambda, y) = (2.0, -1.5);
    let at = a1_single_vortex_profile(lambda, 0.0, y, 0.0);
    let (closed, _) = a1_single_vortex_closed(lambda, y).unwrap();
    assert!((at - closed).abs() < 1e-14);
    for a in [-3.0, -0.5, 0.2, 1.0, 4.0] {
        assert!(a1_single_vortex_profile(lambda, 0.0, y, a) >= at);
    }
}

#[test]
fn sweeps_bracket_the_thresholds() {
    let single = run_taylor_sweep(&TaylorSweepConfig::preset("single").unwrap()).unwrap();
    let (lo, hi) = single.bracket.unwrap();
    assert!(lo < 8.0 * PI * PI / 3.0 && 8.0 * PI * PI / 3.0 <= hi);
    assert_eq!(single.rows.len(), 100);
    let pair = run_taylor_sweep(&TaylorSweepConfig::preset("pair").unwrap()).unwrap();
    let (lo, hi) = pair.bracket.unwrap();
    assert!(lo < 16.0 * PI * PI && 16.0 * PI * PI <= hi);
    let empty = run_taylor_sweep(&TaylorSweepConfig::preset("empty").unwrap()).unwrap();
    assert!(empty.rows.is_empty() && empty.bracket.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_closed_form_matches_general_line_formula(x in 0.2..3.0f64, depth in 0.3..3.0f64, lambda in -5.0..-0.01f64) {
        let y = -depth;
        let v = VortexSet::new(vec![C64::new(-x, y), C64::new(x, y)], vec![lambda, -lambda]).unwrap();
        let zd = C64::new(0.0, lambda / (4.0 * PI * x));
        let general = a1_flat_closed_form(&v, &[zd, zd], 0.0);
        let closed = a1_pair_closed(lambda, x, y).unwrap();
        prop_assert!((general - closed).abs() < 1e-10 * (1.0 + closed.abs()), "{general} vs {closed}");
    }

    #[test]
    fn single_vortex_classification_flips_at_threshold(ratio in 0.0..60.0f64, depth in 0.2..4.0f64) {
        let threshold = 8.0 * PI * PI / 3.0;
        prop_assume!((ratio - threshold).abs() > 1e-6);
        let lambda = (ratio * depth.powi(3)).sqrt();
        let (a1, class) = a1_single_vortex_closed(lambda, -depth).unwrap();
        prop_assert!((a1 - (1.0 - ratio / threshold)).abs() < 1e-12);
        prop_assert_eq!(class == Classification::Strong, ratio < threshold);
    }
}
