//! Taylor sign quantity A₁ in Riemann-mapping variables: closed forms,
//! quadrature evaluation and classification.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::singular_integrals::{csc2_kernel, CurveTrace};
use crate::spectral_core::{GridFunction, PeriodicGrid};
use crate::vortex_dynamics::{separations, VortexSet};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Strong,
    Degenerate,
    Failed,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Strong => "strong",
            Classification::Degenerate => "degenerate",
            Classification::Failed => "failed",
        }
    }
}

/// Degenerate band: |inf| ≤ 1e-8 (1 + ‖A₁‖_∞).
pub fn classify(infimum: f64, sup_abs: f64) -> Classification {
    if infimum.abs() <= 1e-8 * (1.0 + sup_abs) {
        Classification::Degenerate
    } else if infimum > 0.0 {
        Classification::Strong
    } else {
        Classification::Failed
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaylorReport {
    pub alphas: Vec<f64>,
    pub samples: Vec<f64>,
    pub infimum: f64,
    pub argmin: f64,
    pub classification: Classification,
    /// inf A₁ / |Z_α|.
    pub margin: f64,
}

impl TaylorReport {
    pub fn from_samples(alphas: Vec<f64>, samples: Vec<f64>, speeds: &[f64]) -> Self {
        let (mut idx, mut inf) = (0, f64::INFINITY);
        for (i, &v) in samples.iter().enumerate() {
            if v < inf {
                inf = v;
                idx = i;
            }
        }
        let sup_abs = samples.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let margin = samples
            .iter()
            .zip(speeds)
            .map(|(a, s)| a / s)
            .fold(f64::INFINITY, f64::min);
        Self {
            argmin: alphas.get(idx).copied().unwrap_or(0.0),
            alphas,
            classification: classify(inf, sup_abs),
            infimum: inf,
            samples,
            margin,
        }
    }
}

/// A₁(x) = 1 - 3λ²/(8π²|y|³) for a single vortex under a flat surface.
pub fn a1_single_vortex_closed(lambda: f64, y: f64) -> Result<(f64, Classification)> {
    if !(y < 0.0) {
        return Err(WaveError::InvalidInput(format!("vortex depth must be negative, got {y}")));
    }
    let v = 1.0 - 3.0 * lambda * lambda / (8.0 * PI * PI * y.abs().powi(3));
    Ok((v, classify(v, v.abs().max(1.0))))
}

/// Pointwise single-vortex profile A₁(α) for a vortex at x + iy.
pub fn a1_single_vortex_profile(lambda: f64, x: f64, y: f64, alpha: f64) -> f64 {
    let r2 = (alpha - x).powi(2) + y * y;
    1.0 + lambda * lambda / (4.0 * PI * PI) / (r2 * 2.0 * y.abs()) + lambda * lambda / (2.0 * PI * PI) * y / (r2 * r2)
}

/// A₁(0) for the mirror pair at ±x + iy with strengths ±λ.
pub fn a1_pair_closed(lambda: f64, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y < 0.0) {
        return Err(WaveError::InvalidInput(format!("pair needs x > 0 and y < 0, got x={x}, y={y}")));
    }
    let (x2, y2) = (x * x, y * y);
    Ok(1.0 + lambda * lambda / (4.0 * PI * PI) * (x2 * x2 + 4.0 * y2 * y2 - 7.0 * x2 * y2)
        / (y.abs() * (x2 + y2).powi(3)))
}

/// Line-model surface velocity induced by the vortices alone.
pub fn induced_line_velocity(vortices: &VortexSet, alpha: f64) -> C64 {
    vortices
        .positions
        .iter()
        .zip(&vortices.strengths)
        .map(|(&z, &l)| I * l / (2.0 * PI * (C64::new(alpha, 0.0) - z).conj()))
        .sum()
}

fn vortex_correction_line(vortices: &VortexSet, zdot: &[C64], d: C64, alpha: f64) -> f64 {
    vortices
        .positions
        .iter()
        .zip(&vortices.strengths)
        .zip(zdot)
        .map(|((&z, &l), &zd)| {
            let u = C64::new(alpha, 0.0) - z;
            -l / PI * ((d - zd) / (u * u)).re
        })
        .sum()
}

/// Closed-form flat A₁ on the line with the velocity induced by the vortices.
pub fn a1_flat_closed_form(vortices: &VortexSet, zdot: &[C64], alpha: f64) -> f64 {
    let a = C64::new(alpha, 0.0);
    let mut quad = C64::new(0.0, 0.0);
    for (&zj, &lj) in vortices.positions.iter().zip(&vortices.strengths) {
        for (&zk, &lk) in vortices.positions.iter().zip(&vortices.strengths) {
            quad += lj * lk / (4.0 * PI * PI) / ((a - zj) * (a - zk).conj()) * I / (zk.conj() - zj);
        }
    }
    let d = induced_line_velocity(vortices, alpha);
    1.0 + quad.re + vortex_correction_line(vortices, zdot, d, alpha)
}

/// (1/2π) ∫_ℝ |D(α) - D(β)|² / (α - β)² dβ under β = α + s tan(θ/2),
/// using `nodes` offset trapezoid points in θ.
pub fn line_quadratic_integral<F: Fn(f64) -> C64>(d: F, alpha: f64, scale: f64, nodes: usize) -> f64 {
    let da = d(alpha);
    let mut sum = 0.0;
    for m in 0..nodes {
        let theta = -PI + (m as f64 + 0.5) * 2.0 * PI / nodes as f64;
        let half = 0.5 * theta;
        let beta = alpha + scale * half.tan();
        let diff = da - d(beta);
        sum += diff.norm_sqr() / (2.0 * scale * half.sin().powi(2));
    }
    sum / nodes as f64
}

fn line_scale(vortices: &VortexSet, alpha: f64) -> f64 {
    vortices
        .positions
        .iter()
        .map(|z| (C64::new(alpha, 0.0) - z.conj()).norm())
        .fold(f64::INFINITY, f64::min)
        .min(1e3)
        .max(1e-3)
}

/// A₁ on the line with the quadratic term from [`line_quadratic_integral`].
pub fn a1_flat_line_quadrature(vortices: &VortexSet, zdot: &[C64], alpha: f64, nodes: usize) -> f64 {
    let scale = if vortices.is_empty() { 1.0 } else { line_scale(vortices, alpha) };
    let d = |b: f64| induced_line_velocity(vortices, b);
    let quad = line_quadratic_integral(d, alpha, scale, nodes);
    1.0 + quad + vortex_correction_line(vortices, zdot, d(alpha), alpha)
}

/// Periodic-grid A₁: quadratic term with the csc² kernel (alternating points),
/// vortex term with K₂(α - ω_j)/c_j.
pub fn a1_periodic_samples(
    grid: &PeriodicGrid,
    d: &[C64],
    vortices: &VortexSet,
    zdot: &[C64],
    images: &[C64],
    derivs: &[C64],
) -> Vec<f64> {
    let n = grid.n();
    let l = grid.half_period();
    let h = grid.spacing();
    let alphas = grid.alphas();
    (0..n)
        .map(|i| {
            let mut quad = 0.0;
            for j in ((i + 1) % 2..n).step_by(2) {
                let k2 = csc2_kernel(C64::new(alphas[i] - alphas[j], 0.0), l).re;
                quad += (d[i] - d[j]).norm_sqr() * k2;
            }
            quad *= 2.0 * h / (2.0 * PI);
            let mut corr = 0.0;
            for j in 0..vortices.len() {
                let k2 = csc2_kernel(C64::new(alphas[i], 0.0) - images[j], l);
                corr -= vortices.strengths[j] / PI * ((d[i] - zdot[j]) * k2 / derivs[j]).re;
            }
            1.0 + quad + corr
        })
        .collect()
}

/// Surface velocity model for the flat evaluation.
#[derive(Debug, Clone)]
pub enum FlatVelocity {
    /// D_tZ = Σ λ_j i / (2π conj(α - z_j)) on the line.
    VortexInduced,
    /// Arbitrary periodic samples; only the periodic quadrature path applies.
    Trace(GridFunction),
}

#[derive(Debug, Clone)]
pub struct FlatA1 {
    /// Residue closed form, available for [`FlatVelocity::VortexInduced`].
    pub closed: Option<TaylorReport>,
    pub quadrature: TaylorReport,
    pub max_path_gap: Option<f64>,
}

pub const LINE_NODES: usize = 4096;

pub fn a1_flat_general(
    curve: &CurveTrace,
    velocity: &FlatVelocity,
    vortices: &VortexSet,
    vortex_velocities: &[C64],
) -> Result<FlatA1> {
    let flat = curve
        .z
        .iter()
        .zip(curve.grid.alphas())
        .all(|(z, &a)| (z - a).norm() <= 1e-12 * (1.0 + a.abs()));
    if !flat {
        return Err(WaveError::InvalidInput("a1_flat_general needs Z(α) = α; use a1_general".into()));
    }
    check_vortex_inputs(vortices, vortex_velocities)?;
    let grid = &curve.grid;
    let alphas = grid.alphas().to_vec();
    let ones = vec![1.0; alphas.len()];
    match velocity {
        FlatVelocity::VortexInduced => {
            let closed: Vec<f64> = alphas
                .iter()
                .map(|&a| a1_flat_closed_form(vortices, vortex_velocities, a))
                .collect();
            let quad: Vec<f64> = alphas
                .iter()
                .map(|&a| a1_flat_line_quadrature(vortices, vortex_velocities, a, LINE_NODES))
                .collect();
            let gap = closed.iter().zip(&quad).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            Ok(FlatA1 {
                closed: Some(TaylorReport::from_samples(alphas.clone(), closed, &ones)),
                quadrature: TaylorReport::from_samples(alphas, quad, &ones),
                max_path_gap: Some(gap),
            })
        }
        FlatVelocity::Trace(d) => {
            let samples = a1_periodic_samples(
                grid,
                &d.values,
                vortices,
                vortex_velocities,
                &vortices.positions,
                &vec![C64::new(1.0, 0.0); vortices.len()],
            );
            Ok(FlatA1 {
                closed: None,
                quadrature: TaylorReport::from_samples(alphas, samples, &ones),
                max_path_gap: None,
            })
        }
    }
}

fn check_vortex_inputs(vortices: &VortexSet, vortex_velocities: &[C64]) -> Result<()> {
    if vortex_velocities.len() != vortices.len() {
        return Err(WaveError::InvalidInput(format!(
            "{} vortex velocities for {} vortices",
            vortex_velocities.len(),
            vortices.len()
        )));
    }
    Ok(())
}

/// Periodic-grid A₁ for a conformal trace Z with caller-supplied images ω_j = Φ(z_j)
/// and derivatives c_j = (Φ⁻¹)_z(ω_j).
pub fn a1_general(
    conformal: &CurveTrace,
    velocity: &GridFunction,
    vortices: &VortexSet,
    vortex_velocities: &[C64],
    images: Option<&[C64]>,
    derivs: Option<&[C64]>,
) -> Result<TaylorReport> {
    check_vortex_inputs(vortices, vortex_velocities)?;
    let (images, derivs) = match (images, derivs) {
        (Some(w), Some(c)) if w.len() == vortices.len() && c.len() == vortices.len() => (w, c),
        _ if vortices.is_empty() => (&[][..], &[][..]),
        _ => return Err(WaveError::InvalidInput("conformal images and derivatives are required".into())),
    };
    let grid: &Arc<PeriodicGrid> = &conformal.grid;
    let samples = a1_periodic_samples(grid, &velocity.values, vortices, vortex_velocities, images, derivs);
    let speeds: Vec<f64> = conformal.z_alpha.iter().map(|z| z.norm()).collect();
    Ok(TaylorReport::from_samples(grid.alphas().to_vec(), samples, &speeds))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongTaylorCheck {
    pub holds: bool,
    pub lhs: f64,
    pub slack: f64,
}

/// Sufficient condition λ̃²/(2d̃_I³β₀) + λ̃²/(2d̃_I²d̃_P) + 2M₀λ̃/d̃_I² < β₀ with
/// λ̃ = Σ|λ_j|/π, d̃_I = d_I/C₂ and d̃_P = d_P.
pub fn strong_taylor_criterion(curve: &CurveTrace, vortices: &VortexSet, f_sup: f64, beta0: f64) -> Result<StrongTaylorCheck> {
    if !(beta0 > 0.0) {
        return Err(WaveError::InvalidInput(format!("β₀ must be positive, got {beta0}")));
    }
    let lt: f64 = vortices.strengths.iter().map(|l| l.abs()).sum::<f64>() / PI;
    if lt == 0.0 {
        return Ok(StrongTaylorCheck { holds: true, lhs: 0.0, slack: beta0 });
    }
    let (d_i, d_p) = separations(curve, vortices);
    let c2 = curve.chord_arc().c2;
    let di = d_i / c2;
    let pair_term = if d_p.is_finite() { lt * lt / (2.0 * di * di * d_p) } else { 0.0 };
    let lhs = lt * lt / (2.0 * di.powi(3) * beta0) + pair_term + 2.0 * f_sup * lt / (di * di);
    Ok(StrongTaylorCheck { holds: lhs < beta0, lhs, slack: beta0 - lhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vortex_closed_values() {
        let (v, c) = a1_single_vortex_closed(1.0, -1.0).unwrap();
        assert!((v - (1.0 - 3.0 / (8.0 * PI * PI))).abs() < 1e-15);
        assert!((v - 0.9620042).abs() < 1e-6);
        assert_eq!(c, Classification::Strong);
        let lam = 2.0 * PI * (2.0f64 / 3.0).sqrt();
        assert_eq!(a1_single_vortex_closed(lam, -1.0).unwrap().1, Classification::Degenerate);
        let lam = PI * 10f64.sqrt();
        let (v, c) = a1_single_vortex_closed(lam, -1.0).unwrap();
        assert!((v + 2.75).abs() < 1e-12);
        assert_eq!(c, Classification::Failed);
        assert!(a1_single_vortex_closed(1.0, 0.0).is_err());
    }

    #[test]
    fn pair_closed_values() {
        assert!(a1_pair_closed(4.0 * PI, 1.0, -1.0).unwrap().abs() < 1e-14);
        assert_eq!(a1_pair_closed(0.0, 1.0, -1.0).unwrap(), 1.0);
        assert!((a1_pair_closed(1.0, 2.0, -1.0).unwrap() - 0.998379).abs() < 1e-6);
        assert!(a1_pair_closed(1.0, -2.0, -1.0).is_err());
    }

    #[test]
    fn profile_matches_center_value() {
        let v = a1_single_vortex_profile(1.3, 0.4, -0.8, 0.4);
        let (c, _) = a1_single_vortex_closed(1.3, -0.8).unwrap();
        assert!((v - c).abs() < 1e-14);
    }
}
