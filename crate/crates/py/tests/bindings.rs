use std::f64::consts::PI;

use vortexwave_py::{a1_pair, a1_single_vortex, flat_hilbert, residue_integral, simulate, taylor_sweep};

#[test]
fn hilbert_of_cosine() {
    let n = 64;
    let xs: Vec<f64> = (0..n).map(|i| -PI + 2.0 * PI * i as f64 / n as f64).collect();
    let h = flat_hilbert(xs.iter().map(|x| (x.cos(), 0.0)).collect(), PI).unwrap();
    for ((re, im), x) in h.iter().zip(&xs) {
        assert!(re.abs() < 1e-12 && (im + x.sin()).abs() < 1e-12);
    }
}

#[test]
fn closed_forms_and_residue() {
    let (a1, label) = a1_single_vortex(1.0, -1.0).unwrap();
    assert!((a1 - (1.0 - 3.0 / (8.0 * PI * PI))).abs() < 1e-15);
    assert_eq!(label, "strong");
    assert!(a1_single_vortex(1.0, 1.0).is_err());
    assert!((a1_pair(-1.0, 1.0, -1.0).unwrap() - (1.0 - 1.0 / (16.0 * PI * PI))).abs() < 1e-12);
    let (re, im) = residue_integral(512, 16.0 * PI).unwrap();
    assert!((re - 2.0 * PI / 3.0).abs() < 1e-8 && im.abs() < 1e-8);
}

#[test]
fn sweep_and_runs() {
    let (rows, bracket) = taylor_sweep("single").unwrap();
    assert_eq!(rows.len(), 100);
    let (lo, hi) = bracket.unwrap();
    assert!(lo < 8.0 * PI * PI / 3.0 && 8.0 * PI * PI / 3.0 <= hi);
    assert!(taylor_sweep("nope").is_err());
    let (status, _, steps, min_e) = simulate("rest", Some(0.5)).unwrap();
    assert_eq!(status, "completed");
    assert!(steps > 0 && min_e >= 0.0);
    let (status, _, steps, _) = simulate("taylor-fail", None).unwrap();
    assert_eq!(status, "taylor_sign_failed");
    assert_eq!(steps, 0);
}
