//! Energies, cubic residuals, the quasilinear a_t formula and long-time monitors.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::evolution::{rk4_raw, EvolutionConfig, Frame, SurfaceState};
use crate::singular_integrals::{csc2_kernel, cube_kernel, CurveOperators, SecondKind};
use crate::spectral_core::{sup_norm, PeriodicGrid};
use crate::vortex_dynamics::separations;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default Sobolev index for diagnostics.
pub const DEFAULT_S: u32 = 4;

fn conj(v: &[C64]) -> Vec<C64> {
    v.iter().map(|c| c.conj()).collect()
}

fn div(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x / y).collect()
}

fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// (‖ζ_α - 1‖_{H^s}, ‖𝔉‖_{H^{s+1/2}}, ‖D_t𝔉‖_{H^s}).
pub fn sobolev_triple(state: &SurfaceState, frame: &Frame, s: u32) -> (f64, f64, f64) {
    let grid = state.grid();
    let s = s as f64;
    let za1: Vec<C64> = frame.curve().z_alpha.iter().map(|z| z - 1.0).collect();
    (
        grid.sobolev_norm(&za1, s),
        grid.sobolev_norm(&frame.frak_f, s + 0.5),
        grid.sobolev_norm(&frame.dt_frak_f(state), s),
    )
}

/// Lagrangian energy Σ_k ∫ |z_α|^{1-2k}/(a|z_α|) |∂_α^k u_t|² + Re ∫ i ∂_α(D^k f) conj(D^k f).
pub fn energy_lagrangian(
    grid: &PeriodicGrid,
    u_t: &[C64],
    f: &[C64],
    z_alpha: &[C64],
    a_za: &[f64],
    s: u32,
    taylor_floor: f64,
) -> Result<f64> {
    let inf = a_za.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(inf > taylor_floor) {
        return Err(WaveError::TaylorFailed { margin: inf });
    }
    let speed: Vec<f64> = z_alpha.iter().map(|z| z.norm()).collect();
    let mut total = 0.0;
    let mut dk_ut = u_t.to_vec();
    let mut dk_f = f.to_vec();
    for k in 0..=s {
        let weights: Vec<C64> = (0..grid.n())
            .map(|i| C64::new(speed[i].powi(1 - 2 * k as i32) / a_za[i] * dk_ut[i].norm_sqr(), 0.0))
            .collect();
        total += grid.integrate(&weights).re;
        let df = grid.derivative(&dk_f, 1);
        let dirichlet: Vec<C64> = (0..grid.n()).map(|i| I * df[i] * dk_f[i].conj()).collect();
        let part = grid.integrate(&dirichlet).re;
        if part < -1e-10 * (1.0 + total.abs()) {
            return Err(WaveError::InvalidInput(format!("negative Dirichlet form {part}")));
        }
        total += part;
        dk_ut = grid.derivative(&dk_ut, 1);
        dk_f = div(&df, z_alpha);
    }
    Ok(total)
}

/// Lagrangian energy of a flattened-coordinate state, using the flattened
/// labels as the Lagrangian labels.
pub fn energy_lagrangian_state(state: &SurfaceState, frame: &Frame, s: u32) -> Result<f64> {
    let u_t = conj(&frame.w);
    let a_za: Vec<f64> = frame.w.iter().map(|w| (w + I).norm()).collect();
    energy_lagrangian(state.grid(), &u_t, &frame.frak_f, &frame.curve().z_alpha, &a_za, s, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEs {
    pub value: f64,
    pub comparison: f64,
}

struct ThetaSigma {
    theta: Vec<C64>,
    sigma: Vec<C64>,
    dt_theta: Vec<C64>,
}

fn theta_sigma(state: &SurfaceState) -> Result<(ThetaSigma, CurveOperators)> {
    let ops = CurveOperators::new(state.curve()?);
    let grid = state.grid();
    let diff: Vec<C64> = state.zeta.iter().map(|z| z - z.conj()).collect();
    let theta = ops.i_minus_h(&diff);
    let u_diff: Vec<C64> = state.u.iter().map(|u| u - u.conj()).collect();
    let diff_alpha = div(&grid.derivative(&diff, 1), &ops.curve.z_alpha);
    let dt_theta = sub(&ops.i_minus_h(&u_diff), &ops.commutator(&state.u, &diff_alpha));
    let sigma = ops.i_minus_h(&dt_theta);
    Ok((ThetaSigma { theta, sigma, dt_theta }, ops))
}

fn family(ops: &CurveOperators, base: &[C64], s: u32) -> Vec<Vec<C64>> {
    let grid = ops.grid();
    let mut out = Vec::with_capacity(s as usize + 1);
    let mut d = base.to_vec();
    for _ in 0..=s {
        out.push(ops.i_minus_h(&d));
        d = grid.derivative(&d, 1);
    }
    out
}

/// Wu-type energy 𝓔_s = Σ_k E_k^θ + E_k^σ, with material derivatives taken
/// by a fourth-order centered difference over raw RK4 substeps of size `h`.
pub fn energy_es(state: &SurfaceState, frame: &Frame, config: &EvolutionConfig, s: u32, h: f64) -> Result<EnergyEs> {
    if frame.a.iter().any(|&a| a <= 0.0) {
        return Err(WaveError::TaylorFailed { margin: frame.taylor_margin() });
    }
    let grid = state.grid();
    let n = grid.n();
    let (centre, ops) = theta_sigma(state)?;
    let theta_k = family(&ops, &centre.theta, s);
    let sigma_k = family(&ops, &centre.sigma, s);

    let mut shifted = Vec::with_capacity(4);
    for m in [-2.0, -1.0, 1.0, 2.0] {
        let st = rk4_raw(state, config, m * h)?;
        let (ts, ops_s) = theta_sigma(&st)?;
        shifted.push((family(&ops_s, &ts.theta, s), family(&ops_s, &ts.sigma, s), ts.sigma));
    }
    let fd = |pick: &dyn Fn(usize) -> C64, i: usize, alpha_deriv: C64| -> C64 {
        (pick(0) - 8.0 * pick(1) + 8.0 * pick(2) - pick(3)) / (12.0 * h) + frame.b[i] * alpha_deriv
    };

    let mut value = 0.0;
    for k in 0..=s as usize {
        for which in 0..2 {
            let base = if which == 0 { &theta_k[k] } else { &sigma_k[k] };
            let base_alpha = grid.derivative(base, 1);
            let dt: Vec<C64> = (0..n)
                .map(|i| {
                    let pick = |m: usize| if which == 0 { shifted[m].0[k][i] } else { shifted[m].1[k][i] };
                    fd(&pick, i, base_alpha[i])
                })
                .collect();
            let kinetic: Vec<C64> = (0..n).map(|i| C64::new(dt[i].norm_sqr() / frame.a[i], 0.0)).collect();
            let potential: Vec<C64> = (0..n).map(|i| I * base[i] * base_alpha[i].conj()).collect();
            value += grid.integrate(&kinetic).re + grid.integrate(&potential).re;
        }
    }

    let sigma_alpha = grid.derivative(&centre.sigma, 1);
    let dt_sigma: Vec<C64> = (0..n)
        .map(|i| {
            let pick = |m: usize| shifted[m].2[i];
            fd(&pick, i, sigma_alpha[i])
        })
        .collect();
    let half = |v: &[C64]| grid.half_derivative(v);
    let comparison = 4.0
        * (grid.derivative_sum_norm_sq(&centre.dt_theta, s)
            + grid.derivative_sum_norm_sq(&dt_sigma, s)
            + grid.derivative_sum_norm_sq(&half(&centre.theta), s)
            + grid.derivative_sum_norm_sq(&half(&centre.sigma), s));
    Ok(EnergyEs { value, comparison })
}

/// (‖G_c‖_{H^s}, ‖G_d‖_{H^s}).
pub fn cubic_residuals(state: &SurfaceState, frame: &Frame, s: u32) -> (f64, f64) {
    let (gc, gd) = cubic_terms(state, frame);
    let grid = state.grid();
    (grid.sobolev_norm(&gc, s as f64), grid.sobolev_norm(&gd, s as f64))
}

/// The fields G_c and G_d on the grid.
pub fn cubic_terms(state: &SurfaceState, frame: &Frame) -> (Vec<C64>, Vec<C64>) {
    let grid = state.grid();
    let ops = &frame.ops;
    let za = &ops.curve.z_alpha;
    let fbar = conj(&frame.frak_f);
    let fbar_alpha = conj(&frame.frak_f_alpha);
    let hp1 = ops.hilbert_pair(&fbar_alpha);
    let prod: Vec<C64> = fbar.iter().zip(&fbar_alpha).map(|(a, b)| a * b).collect();
    let hp2 = ops.hilbert_pair(&prod);
    let diff: Vec<C64> = state.zeta.iter().map(|z| z - z.conj()).collect();
    let diff_alpha = grid.derivative(&diff, 1);
    let sq = ops.squared_difference(&state.u, &diff_alpha);
    let gc: Vec<C64> = (0..grid.n()).map(|i| -2.0 * (fbar[i] * hp1[i] - hp2[i]) + sq[i]).collect();

    let qbar = conj(&frame.q);
    let qbar_alpha = grid.derivative(&qbar, 1);
    let t1 = ops.commutator(&qbar, &div(&fbar_alpha, za));
    let t2 = ops.commutator(&fbar, &div(&qbar_alpha, za));
    let t3 = ops.commutator(&qbar, &div(&qbar_alpha, za));
    let dq = frame.dt_q(state);
    let gd: Vec<C64> = (0..grid.n()).map(|i| -2.0 * (t1[i] + t2[i] + t3[i]) - 4.0 * dq[i]).collect();
    (gc, gd)
}

/// The two right-hand side channels g₁, g₂ of the a_t equation.
pub fn quasilinear_channels(state: &SurfaceState, frame: &Frame, accelerations: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let grid = state.grid();
    let n = grid.n();
    let ops = &frame.ops;
    let za = &ops.curve.z_alpha;
    let ubar_alpha = conj(&frame.u_alpha);
    let wbar_alpha = conj(&grid.derivative(&frame.w, 1));
    let c1 = ops.commutator(&frame.w, &div(&ubar_alpha, za));
    let c2 = ops.commutator(&state.u, &div(&wbar_alpha, za));
    let sq = ops.squared_difference(&state.u, &ubar_alpha);
    let g1: Vec<C64> = (0..n).map(|i| 2.0 * c1[i] + 2.0 * c2[i] - sq[i]).collect();

    let l = grid.half_period();
    let v = &state.vortices;
    let g2: Vec<C64> = (0..n)
        .map(|i| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..v.len() {
                let d = ops.curve.z[i] - v.positions[j];
                let rel = state.u[i] - frame.zdot[j];
                acc += v.strengths[j]
                    * (csc2_kernel(d, l) * (2.0 * frame.w[i] + I - accelerations[j])
                        - 2.0 * cube_kernel(d, l) * rel * rel);
            }
            I / PI * acc
        })
        .collect();
    (g1, g2)
}

/// a_t|z_α| from (I + 𝔎*) a_t|z_α| = Re{(iζ_α/|ζ_α|)(g₁ + g₂)}.
pub fn quasilinear_at(state: &SurfaceState, frame: &Frame, config: &EvolutionConfig) -> Result<Vec<f64>> {
    let acc = frame.accelerations(state, config)?;
    let (g1, g2) = quasilinear_channels(state, frame, &acc);
    let za = &frame.curve().z_alpha;
    let rhs: Vec<f64> = (0..za.len()).map(|i| (I * za[i] / za[i].norm() * (g1[i] + g2[i])).re).collect();
    frame.ops.second_kind(SecondKind::IPlusKStar)?.solve(&rhs)
}

/// 𝒜 = a|z_α| = |D_t²ζ + i|.
pub fn lagrangian_a_speed(frame: &Frame) -> Vec<f64> {
    frame.w.iter().map(|w| (w + I).norm()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub e_lagrangian: f64,
    pub e_s: Option<f64>,
    pub e_s_comparison: Option<f64>,
    pub sobolev_triple: (f64, f64, f64),
    pub d_i: Option<f64>,
    pub d_p: Option<f64>,
    pub x_ratio: Option<f64>,
    pub ydot: Option<f64>,
    pub taylor_margin: f64,
    pub chord_arc: (f64, f64),
    pub symmetry_residual: f64,
    pub cubic_residuals: (f64, f64),
    pub at_over_a_sup: Option<f64>,
}

impl DiagnosticsRecord {
    pub const CSV_COLUMNS: [&'static str; 12] = [
        "t", "E", "E_s", "d_I", "d_P", "x_ratio", "taylor_margin", "C1", "C2", "sym_residual", "Gc_norm", "Gd_norm",
    ];

    pub fn csv_row(&self) -> String {
        let v = [
            Some(self.t),
            Some(self.e_lagrangian),
            self.e_s,
            self.d_i,
            self.d_p,
            self.x_ratio,
            Some(self.taylor_margin),
            Some(self.chord_arc.0),
            Some(self.chord_arc.1),
            Some(self.symmetry_residual),
            Some(self.cubic_residuals.0),
            Some(self.cubic_residuals.1),
        ];
        v.iter()
            .map(|x| match x {
                Some(x) => format!("{x:e}"),
                None => "nan".to_string(),
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Options controlling which of the costlier diagnostics are computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsOptions {
    pub s: u32,
    pub energy_es: bool,
    pub fd_step: f64,
    pub quasilinear: bool,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        Self { s: DEFAULT_S, energy_es: true, fd_step: 1e-3, quasilinear: true }
    }
}

/// Assembles one diagnostics row; `x0` is the initial half-separation of a pair.
pub fn record(
    state: &SurfaceState,
    frame: &Frame,
    config: &EvolutionConfig,
    options: &DiagnosticsOptions,
    x0: Option<f64>,
) -> Result<DiagnosticsRecord> {
    let curve = frame.curve();
    let (d_i, d_p) = separations(curve, &state.vortices);
    let ca = curve.chord_arc();
    let es = if options.energy_es {
        Some(energy_es(state, frame, config, options.s, options.fd_step)?)
    } else {
        None
    };
    let at_over_a_sup = if options.quasilinear {
        let at = quasilinear_at(state, frame, config)?;
        let a = lagrangian_a_speed(frame);
        Some(at.iter().zip(&a).map(|(x, y)| (x / y).abs()).fold(0.0, f64::max))
    } else {
        None
    };
    let (x_ratio, ydot) = match (x0, state.vortices.len()) {
        (Some(x0), 2) => (Some(state.vortices.positions[1].re / x0), Some(frame.zdot[1].im)),
        _ => (None, None),
    };
    let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
    Ok(DiagnosticsRecord {
        t: state.t,
        e_lagrangian: energy_lagrangian_state(state, frame, options.s)?,
        e_s: es.map(|e| e.value),
        e_s_comparison: es.map(|e| e.comparison),
        sobolev_triple: sobolev_triple(state, frame, options.s),
        d_i: finite(d_i),
        d_p: finite(d_p),
        x_ratio,
        ydot,
        taylor_margin: frame.taylor_margin(),
        chord_arc: (ca.c1, ca.c2),
        symmetry_residual: state.symmetry_residual(),
        cubic_residuals: cubic_residuals(state, frame, options.s),
        at_over_a_sup,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongtimeParameters {
    pub epsilon: f64,
    pub lambda: f64,
    pub x0: f64,
    pub depth: f64,
    pub mirror_pair: bool,
    pub grid_tolerance: f64,
}

impl LongtimeParameters {
    /// |λ|/(20π x(0)).
    pub fn rate(&self) -> f64 {
        self.lambda.abs() / (20.0 * PI * self.x0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorOutcome {
    pub name: String,
    pub passed: bool,
    pub first_violation: Option<f64>,
    pub worst_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongtimeReport {
    pub applicable: bool,
    pub monitors: Vec<MonitorOutcome>,
}

impl LongtimeReport {
    pub fn passed(&self) -> bool {
        self.applicable && self.monitors.iter().all(|m| m.passed)
    }

    pub fn monitor(&self, name: &str) -> Option<&MonitorOutcome> {
        self.monitors.iter().find(|m| m.name == name)
    }
}

fn monitor<F: Fn(&DiagnosticsRecord) -> Option<f64>>(name: &str, history: &[DiagnosticsRecord], slack: F) -> MonitorOutcome {
    let mut worst = f64::INFINITY;
    let mut first = None;
    for r in history {
        let Some(s) = slack(r) else { continue };
        if s < 0.0 && first.is_none() {
            first = Some(r.t);
        }
        worst = worst.min(s);
    }
    MonitorOutcome { name: name.to_string(), passed: first.is_none(), first_violation: first, worst_slack: worst }
}

/// Key-control, decay and bootstrap monitors over a run history.
pub fn longtime_monitors(history: &[DiagnosticsRecord], p: &LongtimeParameters) -> LongtimeReport {
    let rate = p.rate();
    let bound = 5.0 * p.epsilon;
    let monitors = vec![
        monitor("x_ratio", history, |r| r.x_ratio.map(|x| (x - 0.5).min(2.0 - x))),
        monitor("descent", history, |r| r.ydot.map(|y| -rate - y)),
        monitor("d_I", history, |r| r.d_i.map(|d| d - (p.depth + rate * r.t) + p.grid_tolerance)),
        monitor("bootstrap_zeta", history, |r| Some(bound - r.sobolev_triple.0)),
        monitor("bootstrap_F", history, |r| Some(bound - r.sobolev_triple.1)),
        monitor("bootstrap_DtF", history, |r| Some(bound - r.sobolev_triple.2)),
    ];
    LongtimeReport { applicable: p.mirror_pair, monitors }
}

/// Largest entry of a field, used for scaling fits.
pub fn sup_deviation_from_one(a: &[f64]) -> f64 {
    a.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

/// sup |D_t²ζ - iAζ_α + i|, zero by construction.
pub fn momentum_residual(frame: &Frame) -> f64 {
    let r: Vec<C64> = (0..frame.w.len())
        .map(|i| frame.w[i] - I * frame.a[i] * frame.curve().z_alpha[i] + I)
        .collect();
    sup_norm(&r)
}
