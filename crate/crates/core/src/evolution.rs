//! Closed evolution of the interface and vortices in flattened coordinates.
//!
//! State: ζ(α, t) with ζ̄ - α holomorphic in the fluid, u = D_tζ, and the
//! vortex positions. The auxiliary fields b and A come from second-kind
//! solves; D_t²ζ = iAζ_α - i closes the system.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::singular_integrals::{
    csc2_kernel, default_near_floor, CurveOperators, CurveTrace, SecondKind, SecondKindSolver,
};
use crate::spectral_core::{sup_norm, PeriodicGrid};
use crate::vortex_dynamics::{
    accelerations_from_traces, check_collisions, collision_floor, separations, velocities_from_density,
    vortex_trace, VortexSet,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaltFloors {
    /// Halt when inf A|ζ_α| drops to or below this value.
    pub taylor_margin: f64,
    pub chord_arc: f64,
    /// Minimum vortex-interface distance in units of the grid spacing.
    pub interface_cells: f64,
    pub collision: f64,
}

impl Default for HaltFloors {
    fn default() -> Self {
        Self { taylor_margin: 0.0, chord_arc: 0.05, interface_cells: 2.0, collision: collision_floor() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_end: f64,
    pub a_tolerance: f64,
    pub a_max_iterations: usize,
    /// Project onto the constraint class every this many steps; 0 disables.
    pub projection_cadence: usize,
    pub enforce_symmetry: bool,
    pub dealias: bool,
    pub floors: HaltFloors,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            t_end: 1.0,
            a_tolerance: 1e-12,
            a_max_iterations: 50,
            projection_cadence: 1,
            enforce_symmetry: false,
            dealias: true,
            floors: HaltFloors::default(),
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(WaveError::InvalidInput(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.a_tolerance > 0.0) || self.a_max_iterations == 0 {
            return Err(WaveError::InvalidInput("A-iteration tolerance and cap must be positive".into()));
        }
        if !(self.floors.chord_arc > 0.0 && self.floors.interface_cells > 0.0 && self.floors.collision > 0.0) {
            return Err(WaveError::InvalidInput("halt floors must be positive".into()));
        }
        Ok(())
    }

    /// Stability guideline dt ≤ 0.5 k_max^{-1/2}.
    pub fn stable_dt(grid: &PeriodicGrid) -> f64 {
        let kmax = PI * (grid.n() / 2) as f64 / grid.half_period();
        0.5 / kmax.sqrt()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceState {
    pub t: f64,
    pub step_index: u64,
    #[serde(skip)]
    pub grid: Option<Arc<PeriodicGrid>>,
    pub zeta: Vec<C64>,
    pub u: Vec<C64>,
    pub vortices: VortexSet,
}

impl SurfaceState {
    pub fn new(grid: Arc<PeriodicGrid>, t: f64, zeta: Vec<C64>, u: Vec<C64>, vortices: VortexSet) -> Result<Self> {
        if zeta.len() != grid.n() || u.len() != grid.n() {
            return Err(WaveError::InvalidInput("state traces must match the grid size".into()));
        }
        crate::error::check_finite("ζ", &zeta)?;
        crate::error::check_finite("D_tζ", &u)?;
        Ok(Self { t, step_index: 0, grid: Some(grid), zeta, u, vortices })
    }

    pub fn rest(grid: Arc<PeriodicGrid>) -> Self {
        let zeta = grid.alphas().iter().map(|&a| C64::new(a, 0.0)).collect();
        let u = vec![C64::new(0.0, 0.0); grid.n()];
        Self { t: 0.0, step_index: 0, grid: Some(grid), zeta, u, vortices: VortexSet::empty() }
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        self.grid.as_ref().expect("state carries its grid")
    }

    pub fn attach_grid(&mut self, grid: Arc<PeriodicGrid>) {
        self.grid = Some(grid);
    }

    pub fn curve(&self) -> Result<CurveTrace> {
        CurveTrace::new(Arc::clone(self.grid()), self.zeta.clone())
    }

    /// ζ - α.
    pub fn displacement(&self) -> Vec<C64> {
        self.zeta.iter().zip(self.grid().alphas()).map(|(z, &a)| z - a).collect()
    }

    pub fn q(&self) -> Result<Vec<C64>> {
        Ok(vortex_trace(&self.curve()?, &self.vortices))
    }

    /// 𝔉 = conj(D_tζ) - q.
    pub fn frak_f(&self) -> Result<Vec<C64>> {
        let q = self.q()?;
        Ok(self.u.iter().zip(&q).map(|(u, q)| u.conj() - q).collect())
    }

    /// (‖(I-𝓗)(ζ̄-α)‖₂, ‖(I-𝓗)𝔉‖₂).
    pub fn constraint_residuals(&self) -> Result<(f64, f64)> {
        let ops = CurveOperators::new(self.curve()?);
        let grid = self.grid();
        let g: Vec<C64> = self.displacement().iter().map(|d| d.conj()).collect();
        let r1 = grid.l2_norm(&ops.i_minus_h(&g));
        let r2 = grid.l2_norm(&ops.i_minus_h(&self.frak_f()?));
        Ok((r1, r2))
    }

    /// Largest deviation from the mirror symmetry ζ(-α) = -conj ζ(α), same for D_tζ,
    /// and z₂ = -z̄₁ for a pair.
    pub fn symmetry_residual(&self) -> f64 {
        let grid = self.grid();
        let d = self.displacement();
        let mut r: f64 = 0.0;
        for i in 0..grid.n() {
            let m = grid.mirror_index(i);
            r = r.max((d[m] + d[i].conj()).norm());
            r = r.max((self.u[m] + self.u[i].conj()).norm());
        }
        if self.vortices.len() == 2 {
            let p = &self.vortices.positions;
            r = r.max((p[1] + p[0].conj()).norm());
            r = r.max((self.vortices.strengths[0] + self.vortices.strengths[1]).abs());
        }
        r
    }

    pub fn enforce_symmetry(&mut self) {
        let grid = Arc::clone(self.grid());
        let d = self.displacement();
        let u = self.u.clone();
        for i in 0..grid.n() {
            let m = grid.mirror_index(i);
            self.zeta[i] = grid.alphas()[i] + 0.5 * (d[i] - d[m].conj());
            self.u[i] = 0.5 * (u[i] - u[m].conj());
        }
        if self.vortices.len() == 2 {
            let p = self.vortices.positions.clone();
            let z1 = 0.5 * (p[0] - p[1].conj());
            self.vortices.positions = vec![z1, -z1.conj()];
        }
    }

    /// Re-imposes (I-𝓗)(ζ̄-α) = 0 and (I-𝓗)𝔉 = 0.
    pub fn project_constraints(&mut self, sweeps: usize) -> Result<()> {
        let grid = Arc::clone(self.grid());
        let f_old = self.frak_f()?;
        for _ in 0..sweeps.max(1) {
            let ops = CurveOperators::new(self.curve()?);
            let g: Vec<C64> = self.displacement().iter().map(|d| d.conj()).collect();
            let p = ops.holomorphic_projection(&g);
            self.zeta = grid.alphas().iter().zip(&p).map(|(&a, v)| a + v.conj()).collect();
        }
        let ops = CurveOperators::new(self.curve()?);
        let f = ops.holomorphic_projection(&f_old);
        let q = vortex_trace(&ops.curve, &self.vortices);
        self.u = f.iter().zip(&q).map(|(f, q)| (f + q).conj()).collect();
        Ok(())
    }

    /// Projects ζ onto the constraint class until the update stalls.
    pub fn settle_coordinates(&mut self, tol: f64, max_sweeps: usize) -> Result<usize> {
        let grid = Arc::clone(self.grid());
        for sweep in 1..=max_sweeps {
            let ops = CurveOperators::new(self.curve()?);
            let g: Vec<C64> = self.displacement().iter().map(|d| d.conj()).collect();
            let p = ops.holomorphic_projection(&g);
            let new: Vec<C64> = grid.alphas().iter().zip(&p).map(|(&a, v)| a + v.conj()).collect();
            let change = new.iter().zip(&self.zeta).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            self.zeta = new;
            if change <= tol {
                return Ok(sweep);
            }
        }
        Err(WaveError::NoConvergence { iterations: max_sweeps, update: f64::NAN })
    }

    fn dealias(&mut self) {
        let grid = Arc::clone(self.grid());
        let d = grid.dealias(&self.displacement());
        self.zeta = grid.alphas().iter().zip(&d).map(|(&a, v)| a + v).collect();
        self.u = grid.dealias(&self.u);
    }
}

/// Σ_j λ_j K₂(ζ - z_j) c(i, j) along the curve.
pub(crate) fn vortex_square_sum<F>(curve: &CurveTrace, vortices: &VortexSet, coeff: F) -> Vec<C64>
where
    F: Fn(usize, usize) -> C64,
{
    let l = curve.half_period();
    (0..curve.n())
        .map(|i| {
            (0..vortices.len())
                .map(|j| vortices.strengths[j] * csc2_kernel(curve.z[i] - vortices.positions[j], l) * coeff(i, j))
                .sum()
        })
        .collect()
}

fn re(v: &[C64]) -> Vec<f64> {
    v.iter().map(|c| c.re).collect()
}

/// Auxiliary quantities attached to one state.
pub struct Frame {
    pub ops: CurveOperators,
    pub q: Vec<C64>,
    pub frak_f: Vec<C64>,
    pub frak_f_alpha: Vec<C64>,
    pub u_alpha: Vec<C64>,
    /// (ζ̄_α - 1)/ζ_α.
    pub g0: Vec<C64>,
    pub zdot: Vec<C64>,
    pub b: Vec<f64>,
    pub b_residual: f64,
    pub a: Vec<f64>,
    pub a_iterations: usize,
    /// D_t²ζ = iAζ_α - i.
    pub w: Vec<C64>,
    solver: SecondKindSolver,
}

impl Frame {
    pub fn new(state: &SurfaceState, config: &EvolutionConfig) -> Result<Self> {
        let curve = state.curve()?;
        let grid = Arc::clone(state.grid());
        let n = grid.n();
        let l = grid.half_period();
        let near = config.floors.interface_cells * grid.spacing();
        check_collisions(&state.vortices, l, config.floors.collision)?;

        let q = vortex_trace(&curve, &state.vortices);
        let frak_f: Vec<C64> = state.u.iter().zip(&q).map(|(u, q)| u.conj() - q).collect();
        let zdot = velocities_from_density(&curve, &frak_f, &state.vortices, near)?;
        let ops = CurveOperators::new(curve);
        let za = ops.curve.z_alpha.clone();
        let g0: Vec<C64> = za.iter().map(|z| (z.conj() - 1.0) / z).collect();
        let u_alpha = grid.derivative(&state.u, 1);
        let frak_f_alpha = grid.derivative(&frak_f, 1);
        let solver = ops.second_kind(SecondKind::IMinusK)?;

        // b
        let comm = ops.commutator(&state.u, &g0);
        let rhs_b: Vec<C64> = (0..n)
            .map(|i| {
                let v: C64 = state
                    .vortices
                    .positions
                    .iter()
                    .zip(&state.vortices.strengths)
                    .map(|(&zj, &lj)| lj * crate::singular_integrals::vortex_kernel(ops.curve.z[i] - zj, l))
                    .sum();
                -comm[i] - I / PI * v
            })
            .collect();
        let b = solver.solve(&re(&rhs_b))?;
        let bc: Vec<C64> = b.iter().map(|&v| C64::new(v, 0.0)).collect();
        let b_residual = sup_norm(
            &ops.i_minus_h(&bc).iter().zip(&rhs_b).map(|(a, r)| a - r).collect::<Vec<_>>(),
        );

        // A
        let ff_over: Vec<C64> = frak_f_alpha.iter().zip(&za).map(|(a, z)| a / z).collect();
        let c1 = ops.commutator(&state.u, &ff_over);
        let vs = vortex_square_sum(&ops.curve, &state.vortices, |i, j| state.u[i] - zdot[j]);
        let vs: Vec<C64> = vs.iter().map(|v| v / (2.0 * PI)).collect();
        let vs_proj = ops.i_minus_h(&vs);
        let fixed: Vec<C64> = (0..n).map(|i| 1.0 + I * c1[i] - vs_proj[i]).collect();
        let flat_coords = sup_norm(&g0) == 0.0;
        let mut a = vec![1.0; n];
        let mut iterations = 0;
        loop {
            iterations += 1;
            let w: Vec<C64> = (0..n).map(|i| I * a[i] * za[i] - I).collect();
            let rhs: Vec<f64> = if flat_coords {
                re(&fixed)
            } else {
                let c2 = ops.commutator(&w, &g0);
                (0..n).map(|i| (fixed[i] + I * c2[i]).re).collect()
            };
            let next = solver.solve(&rhs)?;
            let update = next.iter().zip(&a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            a = next;
            if update <= config.a_tolerance || flat_coords {
                break;
            }
            if iterations >= config.a_max_iterations {
                return Err(WaveError::NoConvergence { iterations, update });
            }
        }
        let w: Vec<C64> = (0..n).map(|i| I * a[i] * za[i] - I).collect();
        Ok(Self {
            ops,
            q,
            frak_f,
            frak_f_alpha,
            u_alpha,
            g0,
            zdot,
            b,
            b_residual,
            a,
            a_iterations: iterations,
            w,
            solver,
        })
    }

    pub fn curve(&self) -> &CurveTrace {
        &self.ops.curve
    }

    pub fn solver(&self) -> &SecondKindSolver {
        &self.solver
    }

    /// inf A|ζ_α|, the flattened-coordinate form of -∂P/∂n.
    pub fn taylor_margin(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.ops.curve.z_alpha)
            .map(|(a, z)| a * z.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// D_t q = Σ λ_j i/(2π) K₂(ζ - z_j)(D_tζ - ż_j).
    pub fn dt_q(&self, state: &SurfaceState) -> Vec<C64> {
        vortex_square_sum(&self.ops.curve, &state.vortices, |i, j| state.u[i] - self.zdot[j])
            .into_iter()
            .map(|v| I * v / (2.0 * PI))
            .collect()
    }

    /// D_t𝔉 = conj(D_t²ζ) - D_t q.
    pub fn dt_frak_f(&self, state: &SurfaceState) -> Vec<C64> {
        let dq = self.dt_q(state);
        self.w.iter().zip(&dq).map(|(w, d)| w.conj() - d).collect()
    }

    pub fn accelerations(&self, state: &SurfaceState, config: &EvolutionConfig) -> Result<Vec<C64>> {
        let near = config.floors.interface_cells * state.grid().spacing();
        accelerations_from_traces(&self.ops.curve, &state.u, &self.w, &state.vortices, &self.zdot, near)
    }

    /// Solves (I-𝓗)D_t b = RHS for the real field D_t b. The commutator
    /// [D_tζ,𝓗](∂_αb/ζ_α) enters twice: once from D_t acting on 𝓗 and once
    /// from the label drift of the dβ in (ζ̄_β - 1)dβ.
    pub fn dt_b(&self, state: &SurfaceState) -> Result<Vec<f64>> {
        let grid = state.grid();
        let n = grid.n();
        let za = &self.ops.curve.z_alpha;
        let b_alpha = grid.derivative_real(&self.b);
        let t1: Vec<C64> = (0..n).map(|i| b_alpha[i] / za[i]).collect();
        let ubar_alpha: Vec<C64> = self.u_alpha.iter().map(|v| v.conj()).collect();
        let t3: Vec<C64> = (0..n).map(|i| ubar_alpha[i] / za[i]).collect();
        let zbar_beta: Vec<C64> = za.iter().map(|z| z.conj() - 1.0).collect();
        let c1 = self.ops.commutator(&state.u, &t1);
        let c2 = self.ops.commutator(&self.w, &self.g0);
        let c3 = self.ops.commutator(&state.u, &t3);
        let sq = self.ops.squared_difference(&state.u, &zbar_beta);
        let vs = vortex_square_sum(&self.ops.curve, &state.vortices, |i, j| state.u[i] - self.zdot[j]);
        let rhs: Vec<f64> = (0..n)
            .map(|i| (2.0 * c1[i] - c2[i] - c3[i] + sq[i] + I / PI * vs[i]).re)
            .collect();
        self.solver.solve(&rhs)
    }

    fn derivatives(&self, state: &SurfaceState) -> Deriv {
        let n = state.zeta.len();
        let za = &self.ops.curve.z_alpha;
        Deriv {
            zeta: (0..n).map(|i| state.u[i] - self.b[i] * za[i]).collect(),
            u: (0..n).map(|i| self.w[i] - self.b[i] * self.u_alpha[i]).collect(),
            z: self.zdot.clone(),
        }
    }
}

struct Deriv {
    zeta: Vec<C64>,
    u: Vec<C64>,
    z: Vec<C64>,
}

fn advance(state: &SurfaceState, d: &[(&Deriv, f64)], h: f64) -> SurfaceState {
    let mut next = state.clone();
    for (deriv, weight) in d {
        let s = h * weight;
        for (z, dz) in next.zeta.iter_mut().zip(&deriv.zeta) {
            *z += dz * s;
        }
        for (u, du) in next.u.iter_mut().zip(&deriv.u) {
            *u += du * s;
        }
        for (p, dp) in next.vortices.positions.iter_mut().zip(&deriv.z) {
            *p += dp * s;
        }
    }
    next.t = state.t + h;
    next
}

/// Terminal conditions that stop a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltKind {
    TaylorSignFailed,
    ChordArcCollapse,
    InterfaceContact,
    VortexCollision,
    SolverFailure,
}

impl HaltKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            HaltKind::TaylorSignFailed => "taylor_sign_failed",
            HaltKind::ChordArcCollapse => "chord_arc_collapse",
            HaltKind::InterfaceContact => "interface_contact",
            HaltKind::VortexCollision => "vortex_collision",
            HaltKind::SolverFailure => "solver_failure",
        }
    }

    pub fn from_error(e: &WaveError) -> Self {
        match e {
            WaveError::TaylorFailed { .. } => HaltKind::TaylorSignFailed,
            WaveError::ChordArc { .. } => HaltKind::ChordArcCollapse,
            WaveError::NearBoundary { .. } => HaltKind::InterfaceContact,
            WaveError::Collision { .. } => HaltKind::VortexCollision,
            _ => HaltKind::SolverFailure,
        }
    }
}

/// Checks the halt floors on a state whose frame is already built.
pub fn check_floors(state: &SurfaceState, frame: &Frame, config: &EvolutionConfig) -> Result<()> {
    let floors = &config.floors;
    frame.curve().check_chord_arc(floors.chord_arc)?;
    let (d_i, d_p) = separations(frame.curve(), &state.vortices);
    let near = floors.interface_cells * state.grid().spacing();
    if d_i < near {
        return Err(WaveError::NearBoundary { index: 0, distance: d_i, floor: near });
    }
    if d_p < floors.collision {
        return Err(WaveError::Collision { d_p, floor: floors.collision });
    }
    let margin = frame.taylor_margin();
    if margin <= floors.taylor_margin {
        return Err(WaveError::TaylorFailed { margin });
    }
    Ok(())
}

/// One RK4 step without floors, projection or filtering.
pub fn rk4_raw(state: &SurfaceState, config: &EvolutionConfig, h: f64) -> Result<SurfaceState> {
    let f1 = Frame::new(state, config)?;
    rk4_with_first(state, &f1, config, h)
}

fn rk4_with_first(state: &SurfaceState, f1: &Frame, config: &EvolutionConfig, h: f64) -> Result<SurfaceState> {
    let k1 = f1.derivatives(state);
    let s2 = advance(state, &[(&k1, 0.5)], h);
    let k2 = Frame::new(&s2, config)?.derivatives(&s2);
    let s3 = advance(state, &[(&k2, 0.5)], h);
    let k3 = Frame::new(&s3, config)?.derivatives(&s3);
    let s4 = advance(state, &[(&k3, 1.0)], h);
    let k4 = Frame::new(&s4, config)?.derivatives(&s4);
    let mut next = advance(state, &[(&k1, 1.0 / 6.0), (&k2, 1.0 / 3.0), (&k3, 1.0 / 3.0), (&k4, 1.0 / 6.0)], h);
    next.step_index = state.step_index + 1;
    Ok(next)
}

/// Advances one step; the frame of the incoming state is returned for monitoring.
pub fn step_with_frame(state: &SurfaceState, config: &EvolutionConfig) -> Result<(SurfaceState, Frame)> {
    let f1 = Frame::new(state, config)?;
    check_floors(state, &f1, config)?;
    let next = advance_from_frame(state, &f1, config)?;
    Ok((next, f1))
}

/// One full step (RK4, filter, projection, symmetry) given the frame of `state`;
/// halt floors are not checked.
pub fn advance_from_frame(state: &SurfaceState, f1: &Frame, config: &EvolutionConfig) -> Result<SurfaceState> {
    let mut next = rk4_with_first(state, f1, config, config.dt)?;
    if config.dealias {
        next.dealias();
    }
    if config.projection_cadence > 0 && next.step_index % config.projection_cadence as u64 == 0 {
        next.project_constraints(1)?;
    }
    if config.enforce_symmetry {
        next.enforce_symmetry();
    }
    Ok(next)
}

pub fn step(state: &SurfaceState, config: &EvolutionConfig) -> Result<SurfaceState> {
    Ok(step_with_frame(state, config)?.0)
}

pub fn compute_b(state: &SurfaceState) -> Result<Vec<f64>> {
    Ok(Frame::new(state, &EvolutionConfig::default())?.b)
}

/// Returns A and the number of fixed-point iterations used.
pub fn compute_a(state: &SurfaceState, config: &EvolutionConfig) -> Result<(Vec<f64>, usize)> {
    let f = Frame::new(state, config)?;
    if f.a.iter().any(|&a| a <= 0.0) {
        return Err(WaveError::TaylorFailed { margin: f.taylor_margin() });
    }
    Ok((f.a, f.a_iterations))
}

pub fn compute_dt_b(state: &SurfaceState) -> Result<Vec<f64>> {
    Frame::new(state, &EvolutionConfig::default())?.dt_b(state)
}

/// Initial state from a symmetric curve ζ₀, a real odd g and a mirror pair
/// (or no vortices): ζ₀ is settled into the constraint class, 𝔉 is the
/// holomorphic projection of g and D_tζ = conj(𝔉 + q).
pub fn build_initial_data(
    grid: Arc<PeriodicGrid>,
    zeta0: Vec<C64>,
    g: &[f64],
    vortices: VortexSet,
) -> Result<SurfaceState> {
    let n = grid.n();
    if zeta0.len() != n || g.len() != n {
        return Err(WaveError::InvalidInput("initial traces must match the grid size".into()));
    }
    let tol = 1e-12;
    for i in 0..n {
        let m = grid.mirror_index(i);
        let di = zeta0[i] - grid.alphas()[i];
        let dm = zeta0[m] - grid.alphas()[m];
        if (di.re + dm.re).abs() > tol || (di.im - dm.im).abs() > tol {
            return Err(WaveError::InvalidInput("ζ₀ - α must have odd real part and even imaginary part".into()));
        }
        if (g[i] + g[m]).abs() > tol {
            return Err(WaveError::InvalidInput("g must be odd".into()));
        }
    }
    if !(vortices.is_empty() || vortices.is_mirror_pair()) {
        return Err(WaveError::InvalidInput("vortices must form a mirror pair".into()));
    }
    let mut state = build_general_initial_data(grid, zeta0, g, vortices)?;
    state.enforce_symmetry();
    Ok(state)
}

/// Same construction as [`build_initial_data`] without the parity requirements.
pub fn build_general_initial_data(
    grid: Arc<PeriodicGrid>,
    zeta0: Vec<C64>,
    g: &[f64],
    vortices: VortexSet,
) -> Result<SurfaceState> {
    let n = grid.n();
    if zeta0.len() != n || g.len() != n {
        return Err(WaveError::InvalidInput("initial traces must match the grid size".into()));
    }
    let mut state = SurfaceState::new(Arc::clone(&grid), 0.0, zeta0, vec![C64::new(0.0, 0.0); n], vortices)?;
    state.settle_coordinates(1e-14, 60)?;
    let ops = CurveOperators::new(state.curve()?);
    let gc: Vec<C64> = g.iter().map(|&v| C64::new(v, 0.0)).collect();
    let f = ops.holomorphic_projection(&gc);
    let q = vortex_trace(&ops.curve, &state.vortices);
    state.u = f.iter().zip(&q).map(|(f, q)| (f + q).conj()).collect();
    Ok(state)
}

/// Compatibility residual ‖(I-𝔥)(v̄ + Σ λ_j i/(2π(z - z_j)))‖₂ of a state.
pub fn compatibility_residual(state: &SurfaceState) -> Result<f64> {
    Ok(state.constraint_residuals()?.1)
}

/// Default near-boundary floor used by standalone evaluations.
pub fn near_floor(grid: &PeriodicGrid) -> f64 {
    default_near_floor(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_state_is_fixed_point() {
        let g = PeriodicGrid::new(32, 4.0 * PI).unwrap();
        let s = SurfaceState::rest(g);
        let cfg = EvolutionConfig { dt: 0.1, ..Default::default() };
        let next = step(&s, &cfg).unwrap();
        assert!(next.zeta.iter().zip(&s.zeta).all(|(a, b)| (a - b).norm() < 1e-12));
        assert!(sup_norm(&next.u) < 1e-12);
        let (a, _) = compute_a(&s, &cfg).unwrap();
        assert!(a.iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!(compute_b(&s).unwrap().iter().all(|v| v.abs() < 1e-14));
        assert!(compute_dt_b(&s).unwrap().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn config_validation() {
        assert!(EvolutionConfig { dt: 0.0, ..Default::default() }.validate().is_err());
        assert!(EvolutionConfig::default().validate().is_ok());
    }

    #[test]
    fn parity_violation_rejected() {
        let g = PeriodicGrid::new(32, 4.0 * PI).unwrap();
        let zeta: Vec<C64> = g.alphas().iter().map(|&a| C64::new(a + 0.01 * (a * 0.5).cos(), 0.0)).collect();
        let odd = vec![0.0; 32];
        assert!(build_initial_data(g.clone(), zeta, &odd, VortexSet::empty()).is_err());
        let zeta: Vec<C64> = g.alphas().iter().map(|&a| C64::new(a, 0.0)).collect();
        let even: Vec<f64> = g.alphas().iter().map(|a| (a * 0.5).cos()).collect();
        assert!(build_initial_data(g, zeta, &even, VortexSet::empty()).is_err());
    }
}
