use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use vortexwave::evolution::{
    build_general_initial_data, build_initial_data, compatibility_residual, compute_a, compute_b, compute_dt_b, step, EvolutionConfig,
};
use vortexwave::spectral_core::PeriodicGrid;
use vortexwave::taylor_sign::a1_flat_closed_form;
use vortexwave::verify::small_symmetric_state;
use vortexwave::{SurfaceState, SymmetricPair, VortexSet};

fn pair_state(n: usize, eps: f64, pair: SymmetricPair) -> SurfaceState {
    small_symmetric_state(n, eps, pair.vortices()).unwrap()
}

#[test]
fn rest_state_is_a_fixed_point() {
    let grid = PeriodicGrid::new(64, 4.0 * PI).unwrap();
    let cfg = EvolutionConfig { dt: 0.05, ..EvolutionConfig::default() };
    let mut s = SurfaceState::rest(Arc::clone(&grid));
    for _ in 0..10 {
        s = step(&s, &cfg).unwrap();
    }
    let drift = s.displacement().iter().map(|d| d.norm()).fold(0.0, f64::max);
    let speed = s.u.iter().map(|u| u.norm()).fold(0.0, f64::max);
    assert!(drift < 1e-14 && speed < 1e-14);
}

#[test]
fn initial_data_satisfies_constraints_and_symmetry() {
    let s = pair_state(128, 0.01, SymmetricPair::new(0.4, -1.0, -0.5).unwrap());
    assert!(compatibility_residual(&s).unwrap() < 1e-8);
    assert!(s.symmetry_residual() < 1e-14);
}

#[test]
fn initial_data_rejects_broken_parity() {
    let grid = PeriodicGrid::new(64, 2.0 * PI).unwrap();
    let zeta0 = grid.alphas().iter().map(|&a| C64::new(a + 0.01 * (a / 2.0).cos(), 0.0)).collect();
    let g = vec![0.0; 64];
    assert!(build_initial_data(Arc::clone(&grid), zeta0, &g, VortexSet::empty()).is_err());
    let flat = grid.alphas().iter().map(|&a| C64::new(a, 0.0)).collect();
    let lopsided = VortexSet::new(vec![C64::new(-0.5, -1.0), C64::new(0.5, -1.0)], vec![1.0, 1.0]).unwrap();
    assert!(build_initial_data(grid, flat, &g, lopsided).is_err());
}

#[test]
fn b_is_odd_for_a_mirror_pair() {
    let s = pair_state(128, 0.01, SymmetricPair::new(0.4, -1.0, -0.5).unwrap());
    let b = compute_b(&s).unwrap();
    let grid = s.grid();
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..grid.n() {
        assert!((b[i] + b[grid.mirror_index(i)]).abs() <= 1e-10 * (1.0 + scale));
    }
}

#[test]
fn a_on_a_flat_surface_matches_the_line_formula_for_a_far_pair() {
    let l = 16.0 * PI;
    let pair = SymmetricPair::new(1.0, -1.0, -2.0).unwrap();
    let grid = PeriodicGrid::new(512, l).unwrap();
    let flat = grid.alphas().iter().map(|&a| C64::new(a, 0.0)).collect();
    let s = build_initial_data(Arc::clone(&grid), flat, &vec![0.0; 512], pair.vortices()).unwrap();
    let (a, _) = compute_a(&s, &EvolutionConfig::default()).unwrap();
    let zd = pair.free_velocity();
    let i0 = grid.n() / 2;
    let line = a1_flat_closed_form(&pair.vortices(), &[zd, zd], 0.0);
    assert!((a[i0] - line).abs() < 1e-2, "A(0) = {} vs line {}", a[i0], line);
}

#[test]
fn dt_b_matches_a_finite_difference_in_time() {
    let s = pair_state(128, 0.02, SymmetricPair::new(0.4, -1.0, -0.5).unwrap());
    let cfg = EvolutionConfig {
        dt: 1e-3,
        projection_cadence: 0,
        dealias: false,
        ..EvolutionConfig::default()
    };
    let h = 1e-3;
    let plus = vortexwave::evolution::rk4_raw(&s, &cfg, h).unwrap();
    let minus = vortexwave::evolution::rk4_raw(&s, &cfg, -h).unwrap();
    let (bp, bm) = (compute_b(&plus).unwrap(), compute_b(&minus).unwrap());
    let b = compute_b(&s).unwrap();
    let grid = s.grid();
    let b_alpha = grid.derivative_real(&b);
    let dtb = compute_dt_b(&s).unwrap();
    let scale = dtb.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-3);
    let mut worst = 0.0f64;
    for i in 0..grid.n() {
        let partial = (bp[i] - bm[i]) / (2.0 * h);
        worst = worst.max((partial + b[i] * b_alpha[i] - dtb[i]).abs());
    }
    assert!(worst / scale < 1e-5, "relative D_t b gap {:e}", worst / scale);
}

#[test]
fn single_vortex_b_on_a_flat_surface() {
    let l = 16.0 * PI;
    let grid = PeriodicGrid::new(512, l).unwrap();
    let flat = grid.alphas().iter().map(|&a| C64::new(a, 0.0)).collect();
    let v = VortexSet::new(vec![C64::new(0.0, -1.0)], vec![1.0]).unwrap();
    let s = build_general_initial_data(Arc::clone(&grid), flat, &vec![0.0; 512], v).unwrap();
    let b = compute_b(&s).unwrap();
    let c = PI / (2.0 * l);
    for (i, &a) in grid.alphas().iter().enumerate() {
        let w = C64::new(c * a, c);
        let periodic = (-C64::i() / PI * (c * w.cos() / w.sin() + C64::new(0.0, c))).re;
        assert!((b[i] - periodic).abs() < 1e-12);
    }
    let i0 = grid.n() / 2;
    assert!((b[i0] + 1.0 / PI).abs() < 0.011, "b(0) = {}", b[i0]);
}

#[test]
fn dt_b_is_odd_for_a_mirror_pair() {
    let s = pair_state(128, 0.01, SymmetricPair::new(0.4, -1.0, -0.5).unwrap());
    let d = compute_dt_b(&s).unwrap();
    let grid = s.grid();
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..grid.n() {
        assert!((d[i] + d[grid.mirror_index(i)]).abs() <= 1e-10 * (1.0 + scale));
    }
}
