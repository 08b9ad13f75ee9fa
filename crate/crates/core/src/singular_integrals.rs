//! Layer potentials and Cauchy-type integrals attached to a periodic interface.
//!
//! Every 1/u kernel of the line setting is replaced by its 2L-periodic image
//! sum. Principal values use the alternating-point trapezoid rule: row i only
//! sees columns j with i - j odd, each carrying weight 2h.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{check_finite, Result, WaveError};
use crate::spectral_core::{GridFunction, PeriodicGrid};

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn exp_2ix(x: C64) -> (C64, bool) {
    // Returns e^{±2ix} with the sign chosen so the modulus is at most one.
    if x.im >= 0.0 {
        ((2.0 * I * x).exp(), true)
    } else {
        ((-2.0 * I * x).exp(), false)
    }
}

fn cot(x: C64) -> C64 {
    let (e, upper) = exp_2ix(x);
    let v = I * (e + 1.0) / (e - 1.0);
    if upper {
        v
    } else {
        -v
    }
}

fn csc2(x: C64) -> C64 {
    let (e, _) = exp_2ix(x);
    -4.0 * e / ((e - 1.0) * (e - 1.0))
}

/// (π/2L) cot(πu/2L), the periodized 1/u.
pub fn cot_kernel(u: C64, half_period: f64) -> C64 {
    let c = PI / (2.0 * half_period);
    c * cot(c * u)
}

/// Periodized vortex kernel that decays as Im u → +∞.
pub fn vortex_kernel(u: C64, half_period: f64) -> C64 {
    let c = PI / (2.0 * half_period);
    c * (cot(c * u) + I)
}

/// (π/2L)² csc²(πu/2L), the periodized 1/u².
pub fn csc2_kernel(u: C64, half_period: f64) -> C64 {
    let c = PI / (2.0 * half_period);
    c * c * csc2(c * u)
}

/// (π/2L)³ csc²(πu/2L) cot(πu/2L), the periodized 1/u³.
pub fn cube_kernel(u: C64, half_period: f64) -> C64 {
    let c = PI / (2.0 * half_period);
    c * c * c * csc2(c * u) * cot(c * u)
}

/// Sampled interface z(α_i) with z - α periodic.
#[derive(Debug, Clone)]
pub struct CurveTrace {
    pub grid: Arc<PeriodicGrid>,
    pub z: Vec<C64>,
    pub z_alpha: Vec<C64>,
}

/// Measured chord-arc constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordArc {
    pub c1: f64,
    pub c2: f64,
    pub min_speed: f64,
    pub max_speed: f64,
}

impl CurveTrace {
    pub fn new(grid: Arc<PeriodicGrid>, z: Vec<C64>) -> Result<Self> {
        if z.len() != grid.n() {
            return Err(WaveError::InvalidInput(format!(
                "curve has {} samples, grid has {}",
                z.len(),
                grid.n()
            )));
        }
        check_finite("curve", &z)?;
        let disp: Vec<C64> = z
            .iter()
            .zip(grid.alphas())
            .map(|(zi, &a)| zi - a)
            .collect();
        let z_alpha = grid
            .derivative(&disp, 1)
            .into_iter()
            .map(|d| d + 1.0)
            .collect();
        Ok(Self { grid, z, z_alpha })
    }

    pub fn flat(grid: Arc<PeriodicGrid>) -> Self {
        let z: Vec<C64> = grid.alphas().iter().map(|&a| C64::new(a, 0.0)).collect();
        let n = z.len();
        Self { grid, z, z_alpha: vec![C64::new(1.0, 0.0); n] }
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn half_period(&self) -> f64 {
        self.grid.half_period()
    }

    /// Distance between z_i and z_j in the periodized metric.
    fn periodic_gap(&self, i: usize, j: usize) -> f64 {
        let p = self.grid.period();
        let d = self.z[i] - self.z[j];
        (-1..=1)
            .map(|m| (d + p * m as f64).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn chord_arc(&self) -> ChordArc {
        let n = self.n();
        let alphas = self.grid.alphas();
        let (c1, c2) = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut lo = f64::INFINITY;
                let mut hi: f64 = 0.0;
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let r = self.periodic_gap(i, j) / self.grid.periodic_distance(alphas[i], alphas[j]);
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
                (lo, hi)
            })
            .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
        let speeds = self.z_alpha.iter().map(|v| v.norm());
        let min_speed = speeds.clone().fold(f64::INFINITY, f64::min);
        let max_speed = speeds.fold(0.0, f64::max);
        ChordArc { c1: c1.min(min_speed), c2: c2.max(max_speed), min_speed, max_speed }
    }

    pub fn check_chord_arc(&self, floor: f64) -> Result<ChordArc> {
        let ca = self.chord_arc();
        if ca.c1 < floor {
            return Err(WaveError::ChordArc { c1: ca.c1, c2: ca.c2, floor });
        }
        Ok(ca)
    }

    /// Smallest periodized distance from w to the sampled curve and the index attaining it.
    pub fn distance_to(&self, w: C64) -> (f64, usize) {
        let p = self.grid.period();
        let mut best = (f64::INFINITY, 0);
        for (j, zj) in self.z.iter().enumerate() {
            let d = w - zj;
            for m in -1..=1 {
                let r = (d + p * m as f64).norm();
                if r < best.0 {
                    best = (r, j);
                }
            }
        }
        best
    }
}

/// Dense discretizations of the layer operators on one curve.
pub struct CurveOperators {
    pub curve: CurveTrace,
    hilbert: Vec<C64>,
    quadratic: OnceLock<Vec<C64>>,
    smooth_pair: OnceLock<Vec<C64>>,
}

impl CurveOperators {
    pub fn new(curve: CurveTrace) -> Self {
        let n = curve.n();
        let l = curve.half_period();
        let w = 2.0 * curve.grid.spacing() / PI;
        let mut hilbert = vec![C64::new(0.0, 0.0); n * n];
        hilbert.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for j in ((i + 1) % 2..n).step_by(2) {
                row[j] = -I * w * cot_kernel(curve.z[i] - curve.z[j], l) * curve.z_alpha[j];
            }
        });
        Self { curve, hilbert, quadratic: OnceLock::new(), smooth_pair: OnceLock::new() }
    }

    pub fn n(&self) -> usize {
        self.curve.n()
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        &self.curve.grid
    }

    fn row(&self, i: usize) -> &[C64] {
        let n = self.n();
        &self.hilbert[i * n..(i + 1) * n]
    }

    /// 𝓗f = (1/πi) p.v.∫ z_β K(z(α) - z(β)) f(β) dβ.
    pub fn hilbert(&self, f: &[C64]) -> Vec<C64> {
        (0..self.n())
            .into_par_iter()
            .map(|i| self.row(i).iter().zip(f).map(|(h, v)| h * v).sum())
            .collect()
    }

    /// (I - 𝓗)f.
    pub fn i_minus_h(&self, f: &[C64]) -> Vec<C64> {
        self.hilbert(f).iter().zip(f).map(|(h, v)| v - h).collect()
    }

    /// [g, 𝓗]h = (1/πi) ∫ (g(α) - g(β)) z_β K(z(α) - z(β)) h(β) dβ.
    pub fn commutator(&self, g: &[C64], h: &[C64]) -> Vec<C64> {
        (0..self.n())
            .into_par_iter()
            .map(|i| {
                let gi = g[i];
                self.row(i)
                    .iter()
                    .zip(g.iter().zip(h))
                    .map(|(k, (gj, hj))| k * (gi - gj) * hj)
                    .sum()
            })
            .collect()
    }

    /// 𝔎f for real f.
    pub fn double_layer(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n())
            .into_par_iter()
            .map(|i| self.row(i).iter().zip(f).map(|(h, v)| h.re * v).sum())
            .collect()
    }

    fn adjoint_entry(&self, i: usize, j: usize) -> f64 {
        let za = self.curve.z_alpha[i];
        let zb = self.curve.z_alpha[j];
        let h = self.row(i)[j];
        if h == C64::new(0.0, 0.0) {
            return 0.0;
        }
        (-h * (za / za.norm()) * (zb.norm() / zb)).re
    }

    /// 𝔎*f for real f.
    pub fn adjoint_double_layer(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n())
            .into_par_iter()
            .map(|i| (0..self.n()).map(|j| self.adjoint_entry(i, j) * f[j]).sum())
            .collect()
    }

    fn quadratic_matrix(&self) -> &Vec<C64> {
        self.quadratic.get_or_init(|| {
            let n = self.n();
            let l = self.curve.half_period();
            let w = 2.0 * self.curve.grid.spacing() / PI;
            let mut m = vec![C64::new(0.0, 0.0); n * n];
            m.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                for j in ((i + 1) % 2..n).step_by(2) {
                    row[j] = -I * w * csc2_kernel(self.curve.z[i] - self.curve.z[j], l);
                }
            });
            m
        })
    }

    /// (1/πi) ∫ (g(α) - g(β))² K₂(z(α) - z(β)) f(β) dβ.
    pub fn squared_difference(&self, g: &[C64], f: &[C64]) -> Vec<C64> {
        let m = self.quadratic_matrix();
        let n = self.n();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let gi = g[i];
                m[i * n..(i + 1) * n]
                    .iter()
                    .zip(g.iter().zip(f))
                    .map(|(k, (gj, fj))| {
                        let d = gi - gj;
                        k * d * d * fj
                    })
                    .sum()
            })
            .collect()
    }

    fn smooth_pair_matrix(&self) -> &Vec<C64> {
        self.smooth_pair.get_or_init(|| {
            let n = self.n();
            let l = self.curve.half_period();
            let w = 2.0 * self.curve.grid.spacing() / PI;
            let mut m = vec![C64::new(0.0, 0.0); n * n];
            m.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                for j in ((i + 1) % 2..n).step_by(2) {
                    let d = self.curve.z[i] - self.curve.z[j];
                    row[j] = -I * w * (cot_kernel(d, l) - cot_kernel(d.conj(), l));
                }
            });
            m
        })
    }

    /// 𝓗(f/z_α) + 𝓗̄(f/z̄_α) with 𝓗̄ = conj ∘ 𝓗 ∘ conj.
    pub fn hilbert_pair(&self, f: &[C64]) -> Vec<C64> {
        let m = self.smooth_pair_matrix();
        let n = self.n();
        (0..n)
            .into_par_iter()
            .map(|i| m[i * n..(i + 1) * n].iter().zip(f).map(|(k, v)| k * v).sum())
            .collect()
    }

    /// Projection onto traces of functions holomorphic below the curve and vanishing at depth.
    pub fn holomorphic_projection(&self, g: &[C64]) -> Vec<C64> {
        let hg = self.hilbert(g);
        let h = self.curve.grid.spacing();
        let far: C64 = g.iter().zip(&self.curve.z_alpha).map(|(a, b)| a * b).sum::<C64>() * h
            / (4.0 * self.curve.half_period());
        g.iter().zip(&hg).map(|(a, b)| 0.5 * (a + b) - far).collect()
    }

    pub fn second_kind(&self, kind: SecondKind) -> Result<SecondKindSolver> {
        let n = self.n();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let k = match kind {
                    SecondKind::IMinusK | SecondKind::IMinusKr => -self.row(i)[j].re,
                    SecondKind::IPlusK => self.row(i)[j].re,
                    SecondKind::IPlusKStar => self.adjoint_entry(i, j),
                };
                m[(i, j)] = k + if i == j { 1.0 } else { 0.0 };
            }
        }
        SecondKindSolver::new(m)
    }
}

/// Second-kind operators handled by [`CurveOperators::second_kind`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondKind {
    IMinusK,
    IPlusK,
    IPlusKStar,
    /// I - Re 𝓗 acting on real densities.
    IMinusKr,
}

pub struct SecondKindSolver {
    matrix: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl SecondKindSolver {
    fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let lu = matrix.clone().lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].abs()).collect();
        let hi = diag.iter().cloned().fold(0.0, f64::max);
        let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let pivot_ratio = if hi > 0.0 { lo / hi } else { 0.0 };
        if !(pivot_ratio > 1e-13) {
            return Err(WaveError::SingularSystem { pivot_ratio });
        }
        Ok(Self { matrix, lu })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.matrix * DVector::from_column_slice(x);
        v.iter().cloned().collect()
    }

    /// Direct solve followed by one refinement sweep.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let b = DVector::from_column_slice(rhs);
        let mut x = self
            .lu
            .solve(&b)
            .ok_or(WaveError::SingularSystem { pivot_ratio: 0.0 })?;
        let r = &b - &self.matrix * &x;
        if let Some(dx) = self.lu.solve(&r) {
            x += dx;
        }
        Ok(x.iter().cloned().collect())
    }

    pub fn residual(&self, x: &[f64], rhs: &[f64]) -> f64 {
        let ax = self.apply(x);
        ax.iter().zip(rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// (1/2πi) ∫ z_β K̃(w - z(β)) ρ(β) dβ at each interior point.
pub fn cauchy_interior_raw(curve: &CurveTrace, density: &[C64], points: &[C64], near_floor: f64) -> Result<Vec<C64>> {
    let l = curve.half_period();
    let h = curve.grid.spacing();
    let mut out = Vec::with_capacity(points.len());
    for (index, &w) in points.iter().enumerate() {
        let (distance, nearest) = curve.distance_to(w);
        if distance < near_floor || w.im >= curve.z[nearest].im {
            return Err(WaveError::NearBoundary { index, distance, floor: near_floor });
        }
        let s: C64 = curve
            .z
            .iter()
            .zip(&curve.z_alpha)
            .zip(density)
            .map(|((zj, za), rho)| vortex_kernel(w - zj, l) * za * rho)
            .sum();
        out.push(s * h / (2.0 * PI * I));
    }
    Ok(out)
}

pub fn default_near_floor(grid: &PeriodicGrid) -> f64 {
    2.0 * grid.spacing()
}

pub fn cauchy_interior(curve: &CurveTrace, density: &GridFunction, points: &[C64]) -> Result<Vec<C64>> {
    check_finite("Cauchy density", &density.values)?;
    cauchy_interior_raw(curve, &density.values, points, default_near_floor(&curve.grid))
}

pub fn curve_hilbert(curve: &CurveTrace, f: &GridFunction, chord_floor: f64) -> Result<GridFunction> {
    check_finite("Hilbert input", &f.values)?;
    curve.check_chord_arc(chord_floor)?;
    let ops = CurveOperators::new(curve.clone());
    GridFunction::new(Arc::clone(&curve.grid), ops.hilbert(&f.values))
}

pub fn double_layer(curve: &CurveTrace, f: &[f64], chord_floor: f64) -> Result<Vec<f64>> {
    curve.check_chord_arc(chord_floor)?;
    Ok(CurveOperators::new(curve.clone()).double_layer(f))
}

pub fn adjoint_double_layer(curve: &CurveTrace, f: &[f64], chord_floor: f64) -> Result<Vec<f64>> {
    curve.check_chord_arc(chord_floor)?;
    Ok(CurveOperators::new(curve.clone()).adjoint_double_layer(f))
}

pub fn commutator(curve: &CurveTrace, g: &GridFunction, h: &GridFunction, chord_floor: f64) -> Result<GridFunction> {
    curve.check_chord_arc(chord_floor)?;
    let ops = CurveOperators::new(curve.clone());
    GridFunction::new(Arc::clone(&curve.grid), ops.commutator(&g.values, &h.values))
}

pub fn solve_second_kind(curve: &CurveTrace, kind: SecondKind, rhs: &[f64], chord_floor: f64) -> Result<Vec<f64>> {
    curve.check_chord_arc(chord_floor)?;
    let ops = CurveOperators::new(curve.clone());
    ops.second_kind(kind)?.solve(rhs)
}

/// ∫_ℝ dβ / ((β - w₁)(β - w̄₂)) by the trapezoid rule on the periodized
/// partial-fraction form of the integrand.
pub fn residue_pair_integral(grid: &PeriodicGrid, w1: C64, w2: C64) -> C64 {
    let l = grid.half_period();
    let a = w1;
    let b = w2.conj();
    let s: C64 = grid
        .alphas()
        .iter()
        .map(|&beta| {
            let x = C64::new(beta, 0.0);
            cot_kernel(x - a, l) - cot_kernel(x - b, l)
        })
        .sum();
    s * grid.spacing() / (a - b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::sup_norm;

    fn grid(n: usize) -> Arc<PeriodicGrid> {
        PeriodicGrid::new(n, 16.0 * PI).unwrap()
    }

    #[test]
    fn kernels_match_line_kernels_near_origin() {
        let l = 16.0 * PI;
        let u = C64::new(0.01, -0.02);
        assert!((cot_kernel(u, l) - 1.0 / u).norm() < 1e-4);
        assert!((csc2_kernel(u, l) - 1.0 / (u * u)).norm() < 1e-2);
        assert!((cube_kernel(u, l) - 1.0 / (u * u * u)).norm() / (1.0 / (u * u * u)).norm() < 1e-6);
        let far = C64::new(0.3, 800.0);
        assert!(vortex_kernel(far, l).norm() < 1e-12);
        assert!(vortex_kernel(-far, l).is_finite());
    }

    #[test]
    fn kernel_derivatives_consistent() {
        let l = 5.0;
        let u = C64::new(0.7, -0.4);
        let eps = 1e-5;
        let dk = (cot_kernel(u + eps, l) - cot_kernel(u - eps, l)) / (2.0 * eps);
        assert!((dk + csc2_kernel(u, l)).norm() < 1e-8);
        let dk2 = (csc2_kernel(u + eps, l) - csc2_kernel(u - eps, l)) / (2.0 * eps);
        assert!((dk2 + 2.0 * cube_kernel(u, l)).norm() < 1e-7);
    }

    #[test]
    fn flat_curve_hilbert_matches_symbol() {
        let g = grid(128);
        let l = g.half_period();
        let f = GridFunction::from_fn(g.clone(), |a| C64::new(0.0, -PI * a / l).exp());
        let hf = curve_hilbert(&CurveTrace::flat(g.clone()), &f, 0.1).unwrap();
        for (a, b) in hf.values.iter().zip(&f.values) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn flat_layers_vanish() {
        let g = grid(64);
        let ops = CurveOperators::new(CurveTrace::flat(g.clone()));
        let f: Vec<f64> = g.alphas().iter().map(|a| (a * 0.2).sin() + 0.3).collect();
        assert!(ops.double_layer(&f).iter().all(|v| v.abs() < 1e-14));
        assert!(ops.adjoint_double_layer(&f).iter().all(|v| v.abs() < 1e-14));
        let x = ops.second_kind(SecondKind::IPlusKStar).unwrap().solve(&f).unwrap();
        assert!(x.iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn commutator_with_constant_vanishes() {
        let g = grid(64);
        let ops = CurveOperators::new(CurveTrace::flat(g.clone()));
        let c = vec![C64::new(2.0, -1.0); 64];
        let h: Vec<C64> = g.alphas().iter().map(|a| C64::new((0.3 * a).cos(), 0.0)).collect();
        assert!(sup_norm(&ops.commutator(&c, &h)) < 1e-13);
    }

    #[test]
    fn cauchy_of_constant_is_constant() {
        let g = grid(128);
        let curve = CurveTrace::flat(g.clone());
        let c = C64::new(0.4, -1.3);
        let rho = GridFunction::from_fn(g, |_| c);
        let vals = cauchy_interior(&curve, &rho, &[C64::new(0.0, -6.0), C64::new(10.0, -20.0)]).unwrap();
        for v in vals {
            assert!((v - c).norm() < 1e-12, "{v} vs {c}");
        }
    }

    #[test]
    fn cauchy_refuses_near_points() {
        let g = grid(64);
        let curve = CurveTrace::flat(g.clone());
        let rho = GridFunction::zeros(g.clone());
        let err = cauchy_interior(&curve, &rho, &[C64::new(0.0, -1e-3)]).unwrap_err();
        assert!(matches!(err, WaveError::NearBoundary { .. }));
        assert!(cauchy_interior(&curve, &rho, &[C64::new(0.0, 5.0)]).is_err());
    }

    #[test]
    fn chord_arc_flat_is_one() {
        let ca = CurveTrace::flat(grid(32)).chord_arc();
        assert!((ca.c1 - 1.0).abs() < 1e-12 && (ca.c2 - 1.0).abs() < 1e-12);
    }
}
