//! Uniform-grid spectral primitives on one period [-L, L).
//!
//! Coefficients are normalized so that `f(α_i) = Σ_m f̂_m e^{i k_m (α_i + L)}`
//! and the trapezoid L² norm satisfies `‖f‖² = 2L Σ_m |f̂_m|²`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_finite, Result, WaveError};

pub struct PeriodicGrid {
    n: usize,
    half_period: f64,
    alphas: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("n", &self.n)
            .field("half_period", &self.half_period)
            .finish()
    }
}

impl PeriodicGrid {
    pub fn new(n: usize, half_period: f64) -> Result<Arc<Self>> {
        if n < 16 || n % 2 != 0 {
            return Err(WaveError::InvalidInput(format!(
                "grid size must be even and at least 16, got {n}"
            )));
        }
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(WaveError::InvalidInput(format!(
                "half period must be positive, got {half_period}"
            )));
        }
        let h = 2.0 * half_period / n as f64;
        let alphas = (0..n).map(|i| -half_period + h * i as f64).collect();
        let wavenumbers = (0..n)
            .map(|idx| std::f64::consts::PI * signed_index(idx, n) as f64 / half_period)
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            n,
            half_period,
            alphas,
            wavenumbers,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_period
    }

    pub fn spacing(&self) -> f64 {
        self.period() / self.n as f64
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Angular wavenumbers in FFT storage order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Wavenumber table ordered as m = -n/2, ..., n/2 - 1.
    pub fn wavenumber_table(&self) -> Vec<f64> {
        let half = (self.n / 2) as i64;
        (-half..half)
            .map(|m| std::f64::consts::PI * m as f64 / self.half_period)
            .collect()
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        idx == self.n / 2
    }

    /// Index of the grid point at -α_i (mod the period).
    pub fn mirror_index(&self, i: usize) -> usize {
        (self.n - i) % self.n
    }

    /// Periodized distance between two parameter values.
    pub fn periodic_distance(&self, a: f64, b: f64) -> f64 {
        let p = self.period();
        let d = (a - b).rem_euclid(p);
        d.min(p - d)
    }

    pub fn forward(&self, values: &[C64]) -> Vec<C64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
        buf
    }

    pub fn inverse(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        buf
    }

    /// Applies a Fourier multiplier; the Nyquist mode is always zeroed.
    pub fn apply_multiplier<F>(&self, values: &[C64], symbol: F) -> Vec<C64>
    where
        F: Fn(f64) -> C64,
    {
        let mut coeffs = self.forward(values);
        for (idx, c) in coeffs.iter_mut().enumerate() {
            if self.is_nyquist(idx) {
                *c = C64::new(0.0, 0.0);
            } else {
                *c *= symbol(self.wavenumbers[idx]);
            }
        }
        self.inverse(&coeffs)
    }

    pub fn derivative(&self, values: &[C64], order: u32) -> Vec<C64> {
        let i = C64::new(0.0, 1.0);
        self.apply_multiplier(values, |k| (i * k).powu(order))
    }

    pub fn derivative_real(&self, values: &[f64]) -> Vec<f64> {
        let c: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.derivative(&c, 1).iter().map(|v| v.re).collect()
    }

    pub fn hilbert(&self, values: &[C64]) -> Vec<C64> {
        self.apply_multiplier(values, |k| C64::new(-sign(k), 0.0))
    }

    pub fn half_derivative(&self, values: &[C64]) -> Vec<C64> {
        self.apply_multiplier(values, |k| C64::new(k.abs().sqrt(), 0.0))
    }

    /// Two-thirds rule: zeroes every mode with |m| > n/3.
    pub fn dealias(&self, values: &[C64]) -> Vec<C64> {
        let cutoff = self.n as i64 / 3;
        let mut coeffs = self.forward(values);
        for (idx, c) in coeffs.iter_mut().enumerate() {
            if signed_index(idx, self.n).abs() > cutoff || self.is_nyquist(idx) {
                *c = C64::new(0.0, 0.0);
            }
        }
        self.inverse(&coeffs)
    }

    /// Discrete H^s norm with Bessel weight (1 + k²)^s.
    pub fn sobolev_norm(&self, values: &[C64], s: f64) -> f64 {
        let coeffs = self.forward(values);
        let sum: f64 = coeffs
            .iter()
            .zip(&self.wavenumbers)
            .map(|(c, &k)| (1.0 + k * k).powf(s) * c.norm_sqr())
            .sum();
        (self.period() * sum).sqrt()
    }

    /// Σ_{j=0..s} ‖∂^j f‖², the derivative-sum form of the squared H^s norm.
    pub fn derivative_sum_norm_sq(&self, values: &[C64], s: u32) -> f64 {
        let coeffs = self.forward(values);
        let sum: f64 = coeffs
            .iter()
            .zip(&self.wavenumbers)
            .map(|(c, &k)| {
                let k2 = k * k;
                let w: f64 = (0..=s).map(|j| k2.powi(j as i32)).sum();
                w * c.norm_sqr()
            })
            .sum();
        self.period() * sum
    }

    pub fn l2_norm(&self, values: &[C64]) -> f64 {
        (self.spacing() * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn integrate(&self, values: &[C64]) -> C64 {
        values.iter().sum::<C64>() * self.spacing()
    }

    pub fn mean(&self, values: &[C64]) -> C64 {
        values.iter().sum::<C64>() / self.n as f64
    }
}

pub(crate) fn signed_index(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

fn sign(k: f64) -> f64 {
    if k > 0.0 {
        1.0
    } else if k < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn sup_norm(values: &[C64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn sup_norm_real(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

pub fn to_complex(values: &[f64]) -> Vec<C64> {
    values.iter().map(|&v| C64::new(v, 0.0)).collect()
}

/// Complex samples on a grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub grid: Arc<PeriodicGrid>,
    pub values: Vec<C64>,
}

impl GridFunction {
    pub fn new(grid: Arc<PeriodicGrid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(WaveError::InvalidInput(format!(
                "grid function has {} samples, grid has {}",
                values.len(),
                grid.n()
            )));
        }
        check_finite("grid function", &values)?;
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> C64>(grid: Arc<PeriodicGrid>, f: F) -> Self {
        let values = grid.alphas().iter().map(|&a| f(a)).collect();
        Self { grid, values }
    }

    pub fn from_real(grid: Arc<PeriodicGrid>, values: &[f64]) -> Result<Self> {
        Self::new(grid, to_complex(values))
    }

    pub fn zeros(grid: Arc<PeriodicGrid>) -> Self {
        let n = grid.n();
        Self { grid, values: vec![C64::new(0.0, 0.0); n] }
    }

    fn with_values(&self, values: Vec<C64>) -> Self {
        Self { grid: Arc::clone(&self.grid), values }
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }
}

pub fn fourier_derivative(f: &GridFunction, order: u32) -> Result<GridFunction> {
    check_finite("derivative input", &f.values)?;
    if order == 0 || order > 4 {
        return Err(WaveError::InvalidInput(format!(
            "derivative order must be in 1..=4, got {order}"
        )));
    }
    Ok(f.with_values(f.grid.derivative(&f.values, order)))
}

pub fn flat_hilbert(f: &GridFunction) -> Result<GridFunction> {
    check_finite("Hilbert input", &f.values)?;
    Ok(f.with_values(f.grid.hilbert(&f.values)))
}

pub fn half_derivative(f: &GridFunction) -> Result<GridFunction> {
    check_finite("half-derivative input", &f.values)?;
    Ok(f.with_values(f.grid.half_derivative(&f.values)))
}

pub fn sobolev_norm(f: &GridFunction, s: f64) -> Result<f64> {
    check_finite("norm input", &f.values)?;
    if !(0.0..=8.0).contains(&s) {
        return Err(WaveError::InvalidInput(format!("Sobolev index must lie in [0, 8], got {s}")));
    }
    Ok(f.grid.sobolev_norm(&f.values, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Arc<PeriodicGrid> {
        PeriodicGrid::new(n, 16.0 * PI).unwrap()
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(PeriodicGrid::new(15, 1.0).is_err());
        assert!(PeriodicGrid::new(8, 1.0).is_err());
        assert!(PeriodicGrid::new(32, -1.0).is_err());
    }

    #[test]
    fn grid_points_and_mirror() {
        let g = grid(64);
        assert_eq!(g.alphas()[0], -g.half_period());
        for i in 0..64 {
            let j = g.mirror_index(i);
            assert!(g.periodic_distance(g.alphas()[j], -g.alphas()[i]) < 1e-12);
        }
        let table = g.wavenumber_table();
        assert_eq!(table.len(), 64);
        assert!((table[0] + table[63] + PI / g.half_period()).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid(256);
        let l = g.half_period();
        let f = GridFunction::from_fn(g.clone(), |a| C64::new((PI * a / l).sin(), 0.0));
        let d = fourier_derivative(&f, 1).unwrap();
        for (a, v) in g.alphas().iter().zip(&d.values) {
            assert!((v.re - PI / l * (PI * a / l).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_constant_and_exponential() {
        let g = grid(128);
        let l = g.half_period();
        let one = GridFunction::from_fn(g.clone(), |_| C64::new(1.0, 0.0));
        assert!(sup_norm(&fourier_derivative(&one, 1).unwrap().values) < 1e-14);
        let k = 2.0 * PI / l;
        let e = GridFunction::from_fn(g.clone(), |a| C64::new(0.0, k * a).exp());
        let d2 = fourier_derivative(&e, 2).unwrap();
        for (v, w) in d2.values.iter().zip(&e.values) {
            assert!((v + k * k * w).norm() < 1e-12);
        }
    }

    #[test]
    fn non_finite_rejected() {
        let g = grid(32);
        let mut f = GridFunction::zeros(g);
        f.values[3] = C64::new(f64::NAN, 0.0);
        assert!(fourier_derivative(&f, 1).is_err());
        assert!(GridFunction::new(f.grid.clone(), f.values.clone()).is_err());
    }

    #[test]
    fn hilbert_signs() {
        let g = grid(64);
        let l = g.half_period();
        let neg = GridFunction::from_fn(g.clone(), |a| C64::new(0.0, -PI * a / l).exp());
        let pos = GridFunction::from_fn(g.clone(), |a| C64::new(0.0, PI * a / l).exp());
        let hn = flat_hilbert(&neg).unwrap();
        let hp = flat_hilbert(&pos).unwrap();
        for i in 0..64 {
            assert!((hn.values[i] - neg.values[i]).norm() < 1e-13);
            assert!((hp.values[i] + pos.values[i]).norm() < 1e-13);
        }
        let one = GridFunction::from_fn(g, |_| C64::new(1.0, 0.0));
        assert!(sup_norm(&flat_hilbert(&one).unwrap().values) < 1e-15);
    }

    #[test]
    fn half_derivative_examples() {
        let g = grid(64);
        let l = g.half_period();
        let k = 2.0 * PI / l;
        let c = GridFunction::from_fn(g.clone(), |a| C64::new((k * a).cos(), 0.0));
        let d = half_derivative(&c).unwrap();
        for (v, w) in d.values.iter().zip(&c.values) {
            assert!((v - w * k.sqrt()).norm() < 1e-13);
        }
        let one = GridFunction::from_fn(g, |_| C64::new(1.0, 0.0));
        assert!(sup_norm(&half_derivative(&one).unwrap().values) < 1e-15);
    }

    #[test]
    fn sobolev_examples() {
        let g = grid(64);
        let l = g.half_period();
        let k = PI / l;
        let e = GridFunction::from_fn(g.clone(), |a| C64::new(0.0, k * a).exp());
        assert!((sobolev_norm(&e, 0.0).unwrap() - (2.0 * l).sqrt()).abs() < 1e-12);
        assert!(sobolev_norm(&e, 1.0).unwrap() >= sobolev_norm(&e, 0.0).unwrap());
        assert_eq!(sobolev_norm(&GridFunction::zeros(g.clone()), 2.0).unwrap(), 0.0);
        assert!(sobolev_norm(&e, 9.0).is_err());
    }

    #[test]
    fn dealias_keeps_low_modes() {
        let g = grid(96);
        let l = g.half_period();
        let low = GridFunction::from_fn(g.clone(), |a| C64::new(0.0, 5.0 * PI * a / l).exp());
        let high = GridFunction::from_fn(g.clone(), |a| C64::new(0.0, 40.0 * PI * a / l).exp());
        let d = g.dealias(&low.values);
        assert!(d.iter().zip(&low.values).all(|(a, b)| (a - b).norm() < 1e-13));
        assert!(sup_norm(&g.dealias(&high.values)) < 1e-13);
    }
}
