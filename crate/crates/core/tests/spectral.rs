use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use vortexwave::singular_integrals::{cot_kernel, vortex_kernel, CurveOperators, CurveTrace};
use vortexwave::spectral_core::PeriodicGrid;

fn trig(grid: &PeriodicGrid, coeffs: &[(i32, f64, f64)]) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
    let l = grid.half_period();
    let mut f = vec![C64::new(0.0, 0.0); grid.n()];
    let mut df = f.clone();
    let mut hf = f.clone();
    for (i, &a) in grid.alphas().iter().enumerate() {
        for &(m, re, im) in coeffs {
            let k = PI * m as f64 / l;
            let c = C64::new(re, im);
            let e = C64::new(0.0, k * a).exp();
            f[i] += c * e;
            df[i] += c * C64::new(0.0, k) * e;
            hf[i] += -(m.signum() as f64) * c * e;
        }
    }
    (f, df, hf)
}

fn modes() -> impl Strategy<Value = Vec<(i32, f64, f64)>> {
    prop::collection::vec((-20i32..=20, -1.0..1.0f64, -1.0..1.0f64), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_and_hilbert_match_symbols(coeffs in modes()) {
        let grid = PeriodicGrid::new(64, 2.0 * PI).unwrap();
        let (f, df, hf) = trig(&grid, &coeffs);
        let d = grid.derivative(&f, 1);
        let h = grid.hilbert(&f);
        for i in 0..grid.n() {
            prop_assert!((d[i] - df[i]).norm() < 1e-10);
            prop_assert!((h[i] - hf[i]).norm() < 1e-11);
        }
    }

    #[test]
    fn hilbert_squares_to_identity_on_mean_free_data(coeffs in modes()) {
        let grid = PeriodicGrid::new(64, 3.0).unwrap();
        let coeffs: Vec<_> = coeffs.into_iter().filter(|c| c.0 != 0).collect();
        let (f, _, _) = trig(&grid, &coeffs);
        let hh = grid.hilbert(&grid.hilbert(&f));
        for i in 0..grid.n() {
            prop_assert!((hh[i] - f[i]).norm() < 1e-11);
        }
    }

    #[test]
    fn sobolev_zero_is_l2_and_norms_increase_with_s(coeffs in modes()) {
        let grid = PeriodicGrid::new(64, 2.0 * PI).unwrap();
        let (f, _, _) = trig(&grid, &coeffs);
        let h0 = grid.sobolev_norm(&f, 0.0);
        prop_assert!((h0 - grid.l2_norm(&f)).abs() <= 1e-10 * (1.0 + h0));
        prop_assert!(grid.sobolev_norm(&f, 1.0) >= h0 - 1e-12);
        prop_assert!(grid.sobolev_norm(&f, 2.0) >= grid.sobolev_norm(&f, 1.0) - 1e-12);
    }

    #[test]
    fn curve_hilbert_on_flat_line_is_the_fourier_hilbert(coeffs in modes()) {
        let grid = PeriodicGrid::new(128, 2.0 * PI).unwrap();
        let ops = CurveOperators::new(CurveTrace::flat(Arc::clone(&grid)));
        let coeffs: Vec<_> = coeffs.into_iter().filter(|c| c.0 != 0).collect();
        let (f, _, hf) = trig(&grid, &coeffs);
        let h = ops.hilbert(&f);
        for i in 0..grid.n() {
            prop_assert!((h[i] - hf[i]).norm() < 1e-8, "{} vs {}", h[i], hf[i]);
        }
    }

    #[test]
    fn dealias_is_idempotent(coeffs in prop::collection::vec((-32i32..32, -1.0..1.0f64, -1.0..1.0f64), 1..8)) {
        let grid = PeriodicGrid::new(64, 2.0 * PI).unwrap();
        let (f, _, _) = trig(&grid, &coeffs);
        let once = grid.dealias(&f);
        let twice = grid.dealias(&once);
        for i in 0..grid.n() {
            prop_assert!((once[i] - twice[i]).norm() < 1e-12);
        }
    }
}

fn bumpy(grid: &Arc<PeriodicGrid>, amp: f64) -> CurveTrace {
    let z = grid
        .alphas()
        .iter()
        .map(|&a| {
            let e = (-a * a / 2.0).exp();
            C64::new(a + amp * a * e, amp * e)
        })
        .collect();
    CurveTrace::new(Arc::clone(grid), z).unwrap()
}

#[test]
fn projection_keeps_fluid_holomorphic_traces_and_kills_air_ones() {
    let grid = PeriodicGrid::new(256, 4.0 * PI).unwrap();
    let l = grid.half_period();
    let ops = CurveOperators::new(bumpy(&grid, 0.05));
    let above = C64::new(0.3, 1.2);
    let below = C64::new(-0.4, -1.3);
    let fluid: Vec<C64> = ops.curve.z.iter().map(|&z| cot_kernel(z - above, l) - C64::new(0.0, PI / (2.0 * l))).collect();
    let air: Vec<C64> = ops.curve.z.iter().map(|&z| vortex_kernel(z - below, l)).collect();
    let pf = ops.holomorphic_projection(&fluid);
    let pa = ops.holomorphic_projection(&air);
    let ef = pf.iter().zip(&fluid).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let ea = pa.iter().map(|a| a.norm()).fold(0.0, f64::max);
    assert!(ef < 1e-8, "fluid trace moved by {ef:e}");
    assert!(ea < 1e-8, "air trace survived with {ea:e}");
}

#[test]
fn projection_is_idempotent_on_a_bumpy_curve() {
    let grid = PeriodicGrid::new(256, 4.0 * PI).unwrap();
    let ops = CurveOperators::new(bumpy(&grid, 0.05));
    let g: Vec<C64> = grid.alphas().iter().map(|&a| C64::new((-a * a / 3.0).exp() * a, 0.0)).collect();
    let p = ops.holomorphic_projection(&g);
    let pp = ops.holomorphic_projection(&p);
    let e = p.iter().zip(&pp).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(e < 1e-8, "P² - P = {e:e}");
}
