//! Acceptance batteries shared by the `verify` command and the test suite.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli_io::{preset, run_simulation, RunSummary};
use crate::diagnostics::{
    cubic_residuals, energy_es, lagrangian_a_speed, loglog_slope, quasilinear_at, sup_deviation_from_one,
};
use crate::error::Result;
use crate::evolution::{build_initial_data, rk4_raw, step, EvolutionConfig, Frame, SurfaceState};
use crate::singular_integrals::{residue_pair_integral, vortex_kernel, CurveOperators, CurveTrace};
use crate::spectral_core::{GridFunction, PeriodicGrid};
use crate::taylor_sign::{
    a1_flat_closed_form, a1_flat_general, a1_flat_line_quadrature, a1_pair_closed,
    a1_single_vortex_closed, Classification, FlatVelocity, LINE_NODES,
};
use crate::vortex_dynamics::{SymmetricPair, VortexSet};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<28} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

pub const NAMES: [&str; 13] = [
    "residue oracle",
    "holomorphic projection",
    "single-vortex threshold",
    "pair threshold",
    "irrotational lower bound",
    "linear dispersion",
    "rk4 order",
    "scaling exponents",
    "key control",
    "bootstrap bounds",
    "symmetry preservation",
    "a_t consistency",
    "energy sanity",
];

pub const SELECTORS: [&str; 10] =
    ["quadrature", "taylor", "dispersion", "rk4", "scaling", "pair", "symmetry", "at", "energy", "all"];

pub fn selector_ids(selector: &str) -> Option<Vec<u8>> {
    Some(match selector {
        "quadrature" => vec![1, 2],
        "taylor" => vec![3, 4, 5],
        "dispersion" => vec![6],
        "rk4" => vec![7],
        "scaling" => vec![8],
        "pair" => vec![9, 10],
        "symmetry" => vec![11],
        "at" => vec![12],
        "energy" => vec![13],
        "all" => (1..=13).collect(),
        _ => return None,
    })
}

pub fn run_criterion(id: u8) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => residue_oracle(),
        2 => holomorphic_projection(),
        3 => single_vortex_threshold(),
        4 => pair_threshold(),
        5 => irrotational_lower_bound(),
        6 => linear_dispersion(),
        7 => rk4_order(),
        8 => scaling_exponents(),
        9 => key_control(),
        10 => bootstrap_bounds(),
        11 => symmetry_preservation(),
        12 => at_consistency(),
        13 => energy_sanity(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name: NAMES.get(id as usize - 1).copied().unwrap_or("unknown"),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

type Outcome = Result<(bool, String)>;

fn residue_oracle() -> Outcome {
    let grid = PeriodicGrid::new(512, 16.0 * PI)?;
    let v = residue_pair_integral(&grid, C64::new(0.0, -1.0), C64::new(0.0, -2.0));
    let err = (v - C64::new(2.0 * PI / 3.0, 0.0)).norm();
    Ok((err <= 1e-8, format!("|I - 2π/3| = {err:.2e}")))
}

fn holomorphic_projection() -> Outcome {
    let grid = PeriodicGrid::new(512, 16.0 * PI)?;
    let l = grid.half_period();
    let flat = CurveTrace::flat(Arc::clone(&grid));
    let bumpy = CurveTrace::new(
        Arc::clone(&grid),
        grid.alphas()
            .iter()
            .map(|&a| {
                let e = (-a * a / 4.0).exp();
                C64::new(a + 0.01 * a * e, 0.01 * e)
            })
            .collect(),
    )?;
    let mut worst: f64 = 0.0;
    for curve in [flat, bumpy] {
        let ops = CurveOperators::new(curve);
        for zj in [C64::new(0.0, -1.0), C64::new(0.7, -1.5), C64::new(-3.0, -2.0)] {
            let f: Vec<C64> = ops.curve.z.iter().map(|&z| vortex_kernel(z - zj, l)).collect();
            let r: Vec<C64> = ops.i_minus_h(&f).iter().zip(&f).map(|(a, b)| a - 2.0 * b).collect();
            worst = worst.max(grid.l2_norm(&r));
        }
    }
    Ok((worst <= 1e-6, format!("max ‖(I-𝔥)K - 2K‖₂ = {worst:.2e}")))
}

fn single_vortex_threshold() -> Outcome {
    let threshold = 8.0 * PI * PI / 3.0;
    let y = -1.0;
    let mut gap: f64 = 0.0;
    let mut formula_gap: f64 = 0.0;
    let mut flips_ok = true;
    for i in 0..100 {
        let ratio = 8.0 + 22.0 * i as f64 / 99.0;
        let lambda = ratio.sqrt();
        let (a1, class) = a1_single_vortex_closed(lambda, y)?;
        formula_gap = formula_gap.max((a1 - (1.0 - 3.0 * ratio / (8.0 * PI * PI))).abs());
        let v = VortexSet::new(vec![C64::new(0.0, y)], vec![lambda])?;
        let quad = a1_flat_line_quadrature(&v, &[C64::new(0.0, 0.0)], 0.0, LINE_NODES);
        gap = gap.max((quad - a1).abs());
        let expected = if ratio < threshold { Classification::Strong } else { Classification::Failed };
        flips_ok &= class == expected;
    }
    let at = a1_single_vortex_closed((threshold * y.abs().powi(3)).sqrt(), y)?;
    let degenerate = at.1 == Classification::Degenerate;
    let passed = gap <= 1e-6 && formula_gap <= 1e-12 && flips_ok && degenerate;
    Ok((
        passed,
        format!("path gap {gap:.2e}, formula gap {formula_gap:.1e}, flip at 8π²/3 {flips_ok}, degenerate at threshold {degenerate}"),
    ))
}

fn pair_threshold() -> Outcome {
    let (x, y) = (1.0, -1.0);
    let threshold = 16.0 * PI * PI;
    let mut gap: f64 = 0.0;
    let mut bracket = None;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..100 {
        let ratio = 100.0 + 100.0 * i as f64 / 99.0;
        let lambda = ratio.sqrt();
        let a1 = a1_pair_closed(lambda, x, y)?;
        let formula = 1.0 - ratio / (16.0 * PI * PI);
        let v = VortexSet::new(vec![C64::new(-x, y), C64::new(x, y)], vec![lambda, -lambda])?;
        let zd = C64::new(0.0, lambda / (4.0 * PI * x));
        let quad = a1_flat_line_quadrature(&v, &[zd, zd], 0.0, LINE_NODES);
        let closed = a1_flat_closed_form(&v, &[zd, zd], 0.0);
        gap = gap.max((quad - a1).abs()).max((closed - a1).abs()).max((formula - a1).abs());
        if let Some((r0, a0)) = prev {
            if a0 > 0.0 && a1 <= 0.0 {
                bracket = Some((r0, ratio));
            }
        }
        prev = Some((ratio, a1));
    }
    let brackets = bracket.map(|(a, b)| a < threshold && threshold <= b).unwrap_or(false);
    Ok((gap <= 1e-6 && brackets, format!("path gap {gap:.2e}, sign-change bracket {bracket:?} around 16π² = {threshold:.4}")))
}

fn irrotational_lower_bound() -> Outcome {
    let grid = PeriodicGrid::new(64, 4.0 * PI)?;
    let curve = CurveTrace::flat(Arc::clone(&grid));
    let mut rng = ChaCha8Rng::seed_from_u64(20240607);
    let cfg = EvolutionConfig::default();
    let mut min_a1 = f64::INFINITY;
    let mut path_gap: f64 = 0.0;
    for _ in 0..500 {
        let amp = 10f64.powf(rng.gen_range(-4.0..-1.5));
        let modes: Vec<(f64, C64)> = (1..=6)
            .map(|m| (m as f64 / 4.0, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp))
            .collect();
        let d: Vec<C64> = grid
            .alphas()
            .iter()
            .map(|&a| modes.iter().map(|(k, c)| c.conj() * (C64::i() * k * a).exp()).sum())
            .collect();
        let trace = GridFunction::new(Arc::clone(&grid), d.clone())?;
        let a1 = a1_flat_general(&curve, &FlatVelocity::Trace(trace), &VortexSet::empty(), &[])?;
        min_a1 = min_a1.min(a1.quadrature.infimum);
        let zeta = grid.alphas().iter().map(|&a| C64::new(a, 0.0)).collect();
        let state = SurfaceState::new(Arc::clone(&grid), 0.0, zeta, d, VortexSet::empty())?;
        let frame = Frame::new(&state, &cfg)?;
        let gap = frame.a.iter().zip(&a1.quadrature.samples).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        path_gap = path_gap.max(gap);
    }
    Ok((
        min_a1 >= 1.0 - 1e-6 && path_gap <= 1e-10,
        format!("min A₁ = {min_a1:.12}, max gap to evolution A = {path_gap:.1e}"),
    ))
}

/// Measured angular frequency of a small traveling wave of wavenumber `k`.
pub fn measured_frequency(k: f64, periods: f64) -> Result<f64> {
    let grid = PeriodicGrid::new(128, 4.0 * PI)?;
    let a = 1e-5;
    let omega = k.sqrt();
    let mode = |x: f64| a * (C64::i() * k * x).exp();
    let zeta = grid.alphas().iter().map(|&x| x + mode(x)).collect();
    let u = grid.alphas().iter().map(|&x| -C64::i() * omega * mode(x)).collect();
    let mut s = SurfaceState::new(Arc::clone(&grid), 0.0, zeta, u, VortexSet::empty())?;
    let cfg = EvolutionConfig { dt: 0.05, ..Default::default() };
    let steps = (periods * 2.0 * PI / omega / cfg.dt).round() as usize;
    let coefficient = |s: &SurfaceState| -> C64 {
        s.displacement()
            .iter()
            .zip(grid.alphas())
            .map(|(d, &x)| d * (-C64::i() * k * x).exp())
            .sum::<C64>()
            / grid.n() as f64
    };
    let mut phase = 0.0;
    let mut last = coefficient(&s).arg();
    for _ in 0..steps {
        s = step(&s, &cfg)?;
        let now = coefficient(&s).arg();
        let mut d = now - last;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        phase += d;
        last = now;
    }
    Ok(-phase / s.t)
}

fn linear_dispersion() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for k in [1.0f64, 2.0] {
        let w = measured_frequency(k, 10.0)?;
        let rel = (w - k.sqrt()).abs() / k.sqrt();
        worst = worst.max(rel);
        parts.push(format!("k={k}: ω={w:.8} (rel {rel:.1e})"));
    }
    Ok((worst <= 0.01, parts.join(", ")))
}

/// Small irrotational or vortex-carrying symmetric data of size `eps` on L = 2π.
pub fn small_symmetric_state(n: usize, eps: f64, vortices: VortexSet) -> Result<SurfaceState> {
    let grid = PeriodicGrid::new(n, 2.0 * PI)?;
    let zeta = grid
        .alphas()
        .iter()
        .map(|&x| C64::new(x + 0.5 * eps * x.sin(), eps * ((2.0 * x).cos() + 0.3 * x.cos())))
        .collect();
    let g: Vec<f64> = grid.alphas().iter().map(|&x| eps * (x.sin() + 0.5 * (3.0 * x).sin())).collect();
    build_initial_data(grid, zeta, &g, vortices)
}

fn state_distance(a: &SurfaceState, b: &SurfaceState) -> f64 {
    let mut d: f64 = 0.0;
    for (x, y) in a.zeta.iter().zip(&b.zeta).chain(a.u.iter().zip(&b.u)) {
        d = d.max((x - y).norm());
    }
    for (x, y) in a.vortices.positions.iter().zip(&b.vortices.positions) {
        d = d.max((x - y).norm());
    }
    d
}

fn rk4_order() -> Outcome {
    let pair = SymmetricPair::new(0.4, -1.0, -0.5)?.vortices();
    let s0 = small_symmetric_state(128, 0.05, pair)?;
    let cfg = EvolutionConfig { projection_cadence: 0, dealias: false, ..Default::default() };
    let t_end = 0.8;
    let run = |dt: f64| -> Result<SurfaceState> {
        let mut s = s0.clone();
        for _ in 0..(t_end / dt).round() as usize {
            s = rk4_raw(&s, &cfg, dt)?;
        }
        Ok(s)
    };
    let a = run(0.1)?;
    let b = run(0.05)?;
    let c = run(0.025)?;
    let e1 = state_distance(&a, &b);
    let e2 = state_distance(&b, &c);
    let ratio = e1 / e2;
    Ok(((12.0..=20.0).contains(&ratio), format!("error ratio {ratio:.2} (e(dt) = {e1:.2e}, e(dt/2) = {e2:.2e})")))
}

pub struct ScalingRow {
    pub eps: f64,
    pub a_minus_one: f64,
    pub b: f64,
    pub gc: f64,
    pub es_gap: f64,
}

pub fn scaling_rows() -> Result<Vec<ScalingRow>> {
    let cfg = EvolutionConfig { dt: 0.01, ..Default::default() };
    let mut rows = Vec::new();
    for eps in [1e-3, 5e-4, 2.5e-4] {
        let s = small_symmetric_state(256, eps, VortexSet::empty())?;
        let f = Frame::new(&s, &cfg)?;
        let es = energy_es(&s, &f, &cfg, 4, 1e-3)?;
        rows.push(ScalingRow {
            eps,
            a_minus_one: sup_deviation_from_one(&f.a),
            b: f.b.iter().map(|v| v.abs()).fold(0.0, f64::max),
            gc: cubic_residuals(&s, &f, 4).0,
            es_gap: (es.value - es.comparison).abs(),
        });
    }
    Ok(rows)
}

fn scaling_exponents() -> Outcome {
    let rows = scaling_rows()?;
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let slope = |f: &dyn Fn(&ScalingRow) -> f64| loglog_slope(&eps, &rows.iter().map(f).collect::<Vec<_>>());
    let (sa, sb, sg) = (slope(&|r| r.a_minus_one), slope(&|r| r.b), slope(&|r| r.gc));
    Ok((sa >= 1.8 && sb >= 1.8 && sg >= 2.7, format!("slopes ‖A-1‖∞ {sa:.3}, ‖b‖∞ {sb:.3}, ‖G_c‖_H4 {sg:.3}")))
}

static LONGTIME: OnceLock<std::result::Result<RunSummary, String>> = OnceLock::new();

/// The pair-longtime preset run, computed once per process.
pub fn longtime_run() -> std::result::Result<&'static RunSummary, String> {
    LONGTIME
        .get_or_init(|| {
            let c = preset("pair-longtime").map_err(|e| e.to_string())?;
            run_simulation(&c, None, None).map_err(|e| e.to_string())
        })
        .as_ref()
        .map_err(|e| e.clone())
}

fn monitor_detail(run: &RunSummary, names: &[&str]) -> (bool, String) {
    let Some(report) = run.longtime.as_ref() else {
        return (false, "no monitor report".into());
    };
    let mut ok = run.halt.is_none() && report.applicable;
    let mut parts = vec![format!("t = {:.1}, status {}", run.t, run.status)];
    for name in names {
        match report.monitor(name) {
            Some(m) => {
                ok &= m.passed;
                parts.push(format!(
                    "{name}: {} (worst slack {:.3e}{})",
                    if m.passed { "ok" } else { "violated" },
                    m.worst_slack,
                    m.first_violation.map(|t| format!(", first at t = {t:.1}")).unwrap_or_default()
                ));
            }
            None => ok = false,
        }
    }
    (ok, parts.join("; "))
}

fn key_control() -> Outcome {
    match longtime_run() {
        Ok(run) => {
            let (ok, mut detail) = monitor_detail(run, &["x_ratio", "descent", "d_I"]);
            let ok = ok && run.t >= 50.0 - 1e-9;
            let last = run.history.last();
            if let Some(r) = last {
                detail.push_str(&format!("; final x ratio {:.4}, d_I {:.3}", r.x_ratio.unwrap_or(f64::NAN), r.d_i.unwrap_or(f64::NAN)));
            }
            Ok((ok, detail))
        }
        Err(e) => Ok((false, e)),
    }
}

fn bootstrap_bounds() -> Outcome {
    match longtime_run() {
        Ok(run) => {
            let (ok, detail) = monitor_detail(run, &["bootstrap_zeta", "bootstrap_F", "bootstrap_DtF"]);
            let max = run.history.iter().fold((0.0f64, 0.0f64, 0.0f64), |m, r| {
                (m.0.max(r.sobolev_triple.0), m.1.max(r.sobolev_triple.1), m.2.max(r.sobolev_triple.2))
            });
            Ok((
                ok,
                format!(
                    "{detail}; initial triple ({:.2e}, {:.2e}, {:.2e}), max ({:.2e}, {:.2e}, {:.2e}) vs 5ε = 5e-3",
                    run.initial_triple.0, run.initial_triple.1, run.initial_triple.2, max.0, max.1, max.2
                ),
            ))
        }
        Err(e) => Ok((false, e)),
    }
}

fn symmetry_preservation() -> Outcome {
    let long = longtime_run().map_err(crate::error::WaveError::InvalidInput)?;
    let mut c = preset("pair-short").map_err(|e| crate::error::WaveError::InvalidInput(e.to_string()))?;
    c.output.diagnostics.energy_es = false;
    c.output.diagnostics.quasilinear = false;
    c.output.record_every = 1;
    let off = run_simulation(&c, None, None).map_err(|e| crate::error::WaveError::InvalidInput(e.to_string()))?;
    c.evolution.enforce_symmetry = true;
    let on = run_simulation(&c, None, None).map_err(|e| crate::error::WaveError::InvalidInput(e.to_string()))?;
    let off_max = long.max_symmetry_residual.max(off.max_symmetry_residual);
    let on_max = on.max_symmetry_residual;
    let ok = off.halt.is_none() && on.halt.is_none() && off_max <= 1e-9 && on_max <= 1e-12;
    Ok((ok, format!("enforcement off {off_max:.2e} (≤ 1e-9), on {on_max:.2e} (≤ 1e-12)")))
}

/// Relative sup error between quasilinear_at and a centered difference of a|z_α|.
pub fn at_fd_error(state: &SurfaceState, h: f64) -> Result<f64> {
    let cfg = EvolutionConfig { dt: h, ..Default::default() };
    let f = Frame::new(state, &cfg)?;
    let at = quasilinear_at(state, &f, &cfg)?;
    let plus = lagrangian_a_speed(&Frame::new(&rk4_raw(state, &cfg, h)?, &cfg)?);
    let minus = lagrangian_a_speed(&Frame::new(&rk4_raw(state, &cfg, -h)?, &cfg)?);
    let a0 = lagrangian_a_speed(&f);
    let grid = state.grid();
    let a0_alpha = grid.derivative_real(&a0);
    let za = &f.curve().z_alpha;
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..grid.n() {
        let fd = (plus[i] - minus[i]) / (2.0 * h) + f.b[i] * a0_alpha[i] - a0[i] * (f.u_alpha[i] / za[i]).re;
        err = err.max((at[i] - fd).abs());
        scale = scale.max(at[i].abs());
    }
    Ok(err / scale)
}

fn at_consistency() -> Outcome {
    let h = 0.0025;
    let pair = SymmetricPair::new(0.4, -1.0, -0.5)?.vortices();
    let with_pair = at_fd_error(&small_symmetric_state(256, 0.05, pair)?, h)?;
    let waves = at_fd_error(&small_symmetric_state(256, 0.05, VortexSet::empty())?, h)?;
    let worst = with_pair.max(waves);
    Ok((worst <= 1e-4, format!("relative error {with_pair:.2e} (pair), {waves:.2e} (waves only) at h = dt = {h}")))
}

fn energy_sanity() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in ["rest", "linear-wave", "pair-short", "single-vortex", "taylor-fail"] {
        let mut c = preset(name).map_err(|e| crate::error::WaveError::InvalidInput(e.to_string()))?;
        c.output.diagnostics.energy_es = false;
        c.output.diagnostics.quasilinear = false;
        let run = run_simulation(&c, None, None).map_err(|e| crate::error::WaveError::InvalidInput(e.to_string()))?;
        let accepted = run.steps > 0 || run.halt.is_none();
        if accepted {
            ok &= run.min_e_lagrangian >= 0.0;
            parts.push(format!("{name}: min E {:.2e}", run.min_e_lagrangian));
        } else {
            parts.push(format!("{name}: halted at screening ({})", run.status));
        }
    }
    match longtime_run() {
        Ok(run) => {
            ok &= run.min_e_lagrangian >= 0.0;
            parts.push(format!("pair-longtime: min E {:.2e}", run.min_e_lagrangian));
        }
        Err(e) => {
            ok = false;
            parts.push(e);
        }
    }
    let rows = scaling_rows()?;
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let slope = loglog_slope(&eps, &rows.iter().map(|r| r.es_gap).collect::<Vec<_>>());
    ok &= slope >= 2.7;
    parts.push(format!("𝓔_s gap slope {slope:.3}"));
    Ok((ok, parts.join("; ")))
}
