//! Point vortex state and motion laws.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::singular_integrals::{
    cauchy_interior_raw, csc2_kernel, default_near_floor, vortex_kernel, CurveTrace,
};
use crate::spectral_core::GridFunction;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct VortexSet {
    pub positions: Vec<C64>,
    pub strengths: Vec<f64>,
}

impl VortexSet {
    pub fn new(positions: Vec<C64>, strengths: Vec<f64>) -> Result<Self> {
        if positions.len() != strengths.len() {
            return Err(WaveError::InvalidInput(format!(
                "{} positions but {} strengths",
                positions.len(),
                strengths.len()
            )));
        }
        if positions.iter().any(|z| !z.is_finite()) || strengths.iter().any(|l| !l.is_finite()) {
            return Err(WaveError::InvalidInput("non-finite vortex data".into()));
        }
        Ok(Self { positions, strengths })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn with_positions(&self, positions: Vec<C64>) -> Self {
        Self { positions, strengths: self.strengths.clone() }
    }

    /// Whether the set has the mirror structure z₂ = -z̄₁, λ₂ = -λ₁.
    pub fn is_mirror_pair(&self) -> bool {
        self.len() == 2
            && (self.strengths[0] + self.strengths[1]).abs() <= 1e-14 * self.strengths[0].abs()
            && (self.positions[1] + self.positions[0].conj()).norm() <= 1e-12 * (1.0 + self.positions[0].norm())
    }
}

/// Mirror-symmetric pair: z₁ = -x + iy, z₂ = x + iy, λ₁ = -λ₂ = λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricPair {
    pub x: f64,
    pub y: f64,
    pub lambda: f64,
}

impl SymmetricPair {
    pub fn new(x: f64, y: f64, lambda: f64) -> Result<Self> {
        if !(x > 0.0 && y < 0.0 && lambda < 0.0) {
            return Err(WaveError::InvalidInput(format!(
                "symmetric pair needs x > 0, y < 0, λ < 0; got x={x}, y={y}, λ={lambda}"
            )));
        }
        Ok(Self { x, y, lambda })
    }

    pub fn vortices(&self) -> VortexSet {
        VortexSet {
            positions: vec![C64::new(-self.x, self.y), C64::new(self.x, self.y)],
            strengths: vec![self.lambda, -self.lambda],
        }
    }

    /// Translation velocity of the isolated pair on the line, λi/(4πx).
    pub fn free_velocity(&self) -> C64 {
        I * self.lambda / (4.0 * PI * self.x)
    }
}

/// q = -Σ λ_j i/(2π) K̃(ζ - z_j) on the curve samples.
pub fn vortex_trace(curve: &CurveTrace, vortices: &VortexSet) -> Vec<C64> {
    let l = curve.half_period();
    curve
        .z
        .iter()
        .map(|&z| {
            vortices
                .positions
                .iter()
                .zip(&vortices.strengths)
                .map(|(&zj, &lj)| -I * lj / (2.0 * PI) * vortex_kernel(z - zj, l))
                .sum()
        })
        .collect()
}

/// Σ λ_j i/(2π) K₂(ζ - z_j) c_j(α) for per-vortex coefficient traces.
pub fn weighted_square_trace<F>(curve: &CurveTrace, vortices: &VortexSet, coeff: F) -> Vec<C64>
where
    F: Fn(usize, usize) -> C64,
{
    let l = curve.half_period();
    curve
        .z
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            vortices
                .positions
                .iter()
                .zip(&vortices.strengths)
                .enumerate()
                .map(|(j, (&zj, &lj))| I * lj / (2.0 * PI) * csc2_kernel(z - zj, l) * coeff(i, j))
                .sum()
        })
        .collect()
}

/// Field of the other vortices plus the regular part of the self image row at z_j.
fn induced_by_vortices(vortices: &VortexSet, j: usize, half_period: f64) -> C64 {
    let zj = vortices.positions[j];
    let mut v = C64::new(vortices.strengths[j] / (4.0 * half_period), 0.0);
    for (k, (&zk, &lk)) in vortices.positions.iter().zip(&vortices.strengths).enumerate() {
        if k != j {
            v += (-I * lk / (2.0 * PI) * vortex_kernel(zj - zk, half_period)).conj();
        }
    }
    v
}

pub fn check_collisions(vortices: &VortexSet, half_period: f64, floor: f64) -> Result<()> {
    let d_p = pair_distance(vortices, half_period);
    if d_p < floor {
        return Err(WaveError::Collision { d_p, floor });
    }
    Ok(())
}

/// Velocities ż_j from the holomorphic density 𝔉 on the curve.
pub fn velocities_from_density(
    curve: &CurveTrace,
    density: &[C64],
    vortices: &VortexSet,
    near_floor: f64,
) -> Result<Vec<C64>> {
    if vortices.is_empty() {
        return Ok(Vec::new());
    }
    let f = cauchy_interior_raw(curve, density, &vortices.positions, near_floor)?;
    let l = curve.half_period();
    Ok((0..vortices.len())
        .map(|j| f[j].conj() + induced_by_vortices(vortices, j, l))
        .collect())
}

/// ż_j for a surface with velocity trace z_t (= D_tζ in flattened labels).
pub fn vortex_velocity(
    curve: &CurveTrace,
    surface_velocity_trace: &GridFunction,
    vortices: &VortexSet,
    j: usize,
) -> Result<C64> {
    if j >= vortices.len() {
        return Err(WaveError::InvalidInput(format!("vortex index {j} out of range")));
    }
    check_collisions(vortices, curve.half_period(), collision_floor())?;
    let q = vortex_trace(curve, vortices);
    let density: Vec<C64> = surface_velocity_trace
        .values
        .iter()
        .zip(&q)
        .map(|(u, q)| u.conj() - q)
        .collect();
    let v = velocities_from_density(curve, &density, vortices, default_near_floor(&curve.grid))?;
    Ok(v[j])
}

/// Accelerations z̈_j given traces z_t, z_tt on the curve and the velocities ż.
pub fn accelerations_from_traces(
    curve: &CurveTrace,
    z_t: &[C64],
    z_tt: &[C64],
    vortices: &VortexSet,
    zdot: &[C64],
    near_floor: f64,
) -> Result<Vec<C64>> {
    if vortices.is_empty() {
        return Ok(Vec::new());
    }
    let grid = &curve.grid;
    let l = curve.half_period();
    let q = vortex_trace(curve, vortices);
    let density: Vec<C64> = z_t.iter().zip(&q).map(|(u, q)| u.conj() - q).collect();
    let f_alpha = grid.derivative(&density, 1);
    let f_z: Vec<C64> = f_alpha.iter().zip(&curve.z_alpha).map(|(a, b)| a / b).collect();
    let dt_q = weighted_square_trace(curve, vortices, |i, j| z_t[i] - zdot[j]);
    let f_t: Vec<C64> = (0..curve.n())
        .map(|i| z_tt[i].conj() - dt_q[i] - z_t[i] * f_z[i])
        .collect();
    let fz_at = cauchy_interior_raw(curve, &f_z, &vortices.positions, near_floor)?;
    let ft_at = cauchy_interior_raw(curve, &f_t, &vortices.positions, near_floor)?;
    Ok((0..vortices.len())
        .map(|j| {
            let zj = vortices.positions[j];
            let mut acc = (fz_at[j] * zdot[j] + ft_at[j]).conj();
            for (k, (&zk, &lk)) in vortices.positions.iter().zip(&vortices.strengths).enumerate() {
                if k != j {
                    acc += (I * lk / (2.0 * PI) * csc2_kernel(zj - zk, l) * (zdot[j] - zdot[k])).conj();
                }
            }
            acc
        })
        .collect())
}

pub fn vortex_acceleration(
    curve: &CurveTrace,
    z_t: &GridFunction,
    z_tt: &GridFunction,
    vortices: &VortexSet,
    j: usize,
) -> Result<C64> {
    if j >= vortices.len() {
        return Err(WaveError::InvalidInput(format!("vortex index {j} out of range")));
    }
    let floor = default_near_floor(&curve.grid);
    let q = vortex_trace(curve, vortices);
    let density: Vec<C64> = z_t.values.iter().zip(&q).map(|(u, q)| u.conj() - q).collect();
    let zdot = velocities_from_density(curve, &density, vortices, floor)?;
    Ok(accelerations_from_traces(curve, &z_t.values, &z_tt.values, vortices, &zdot, floor)?[j])
}

pub fn pair_distance(vortices: &VortexSet, half_period: f64) -> f64 {
    let p = 2.0 * half_period;
    let mut best = f64::INFINITY;
    for a in 0..vortices.len() {
        for b in a + 1..vortices.len() {
            let d = vortices.positions[a] - vortices.positions[b];
            for m in -1..=1 {
                best = best.min((d + p * m as f64).norm());
            }
        }
    }
    best
}

/// (d_I, d_P); d_I is measured against the sampled curve points.
pub fn separations(curve: &CurveTrace, vortices: &VortexSet) -> (f64, f64) {
    let d_i = vortices
        .positions
        .iter()
        .map(|&z| curve.distance_to(z).0)
        .fold(f64::INFINITY, f64::min);
    (d_i, pair_distance(vortices, curve.half_period()))
}

pub fn collision_floor() -> f64 {
    10.0 * f64::EPSILON.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::PeriodicGrid;

    #[test]
    fn separations_examples() {
        let g = PeriodicGrid::new(256, 16.0 * PI).unwrap();
        let curve = CurveTrace::flat(g);
        let single = VortexSet::new(vec![C64::new(0.0, -1.0)], vec![1.0]).unwrap();
        let (d_i, d_p) = separations(&curve, &single);
        assert!((d_i - 1.0).abs() < 1e-12);
        assert!(d_p.is_infinite());
        let pair = SymmetricPair::new(0.5, -1.0, -0.2).unwrap().vortices();
        assert!((separations(&curve, &pair).1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pair_constructor_validates() {
        assert!(SymmetricPair::new(-1.0, -1.0, -0.1).is_err());
        assert!(SymmetricPair::new(1.0, 1.0, -0.1).is_err());
        assert!(SymmetricPair::new(1.0, -1.0, 0.1).is_err());
        let p = SymmetricPair::new(1.0, -2.0, -0.3).unwrap();
        assert!(p.vortices().is_mirror_pair());
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(VortexSet::new(vec![C64::new(0.0, -1.0)], vec![]).is_err());
    }
}
