use alloc::vec;
use alloc::vec::Vec;

use super::grid::Grid2D;
use super::operator::{Damping, WaveOperator};
use super::source::SourceSpec;
use super::state::WaveState;
use crate::energy::RedshiftComponent;
use crate::numerics::smooth::smoothstep;
use crate::spacetime::{BlackHoleParams, KerrDeSitter, MetricProvider};
use crate::{Error, Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Method-of-lines integrator for one mode: RK4 on `(u, v)`.
pub struct Evolution<'a> {
    op: &'a WaveOperator,
    source: Option<(SourceSpec, Vec<C64>)>,
    state: WaveState,
    stage: [Vec<C64>; 8],
    tmp_u: Vec<C64>,
    tmp_v: Vec<C64>,
    forcing: Vec<C64>,
}

impl<'a> Evolution<'a> {
    pub fn new(op: &'a WaveOperator, initial: WaveState, source: Option<&SourceSpec>) -> Result<Self> {
        if initial.m != op.m() {
            return Err(Error::ModeMismatch { expected: op.m(), found: initial.m });
        }
        let g = op.grid();
        if initial.n1 != g.q1.n || initial.n2 != g.q2.n {
            return Err(Error::InvalidGrid("state does not live on the operator's grid"));
        }
        let source = match source {
            Some(s) => Some((*s, op.source_samples(s)?)),
            None => None,
        };
        let n = g.len();
        let z = || vec![C64::new(0.0, 0.0); n];
        Ok(Self {
            op,
            source,
            state: initial,
            stage: [z(), z(), z(), z(), z(), z(), z(), z()],
            tmp_u: z(),
            tmp_v: z(),
            forcing: z(),
        })
    }

    pub fn state(&self) -> &WaveState {
        &self.state
    }

    pub fn into_state(self) -> WaveState {
        self.state
    }

    fn forcing_at(&mut self, t: f64) -> bool {
        match &self.source {
            Some((spec, samples)) => {
                let bt = spec.time.value(t);
                if bt == 0.0 {
                    return false;
                }
                for (f, s) in self.forcing.iter_mut().zip(samples) {
                    *f = *s * bt;
                }
                true
            }
            None => false,
        }
    }

    fn rhs(&mut self, t: f64, from_tmp: bool, du: usize, dv: usize) {
        let active = self.forcing_at(t);
        let (u, v) = if from_tmp { (&self.tmp_u, &self.tmp_v) } else { (&self.state.u, &self.state.v) };
        let forcing = if active { Some(self.forcing.as_slice()) } else { None };
        let (left, right) = self.stage.split_at_mut(dv.max(du));
        let (du_buf, dv_buf) = if du < dv { (&mut left[du], &mut right[0]) } else { (&mut right[0], &mut left[dv]) };
        du_buf.copy_from_slice(v);
        self.op.acceleration(u, v, forcing, dv_buf);
        self.op.dissipate(u, du_buf);
        self.op.dissipate(v, dv_buf);
    }

    fn load_tmp(&mut self, coef: f64, du: usize, dv: usize) {
        for k in 0..self.tmp_u.len() {
            self.tmp_u[k] = self.state.u[k] + self.stage[du][k] * coef;
            self.tmp_v[k] = self.state.v[k] + self.stage[dv][k] * coef;
        }
    }

    /// One classical RK4 step.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let max_dt = self.op.max_dt();
        if !(dt > 0.0) || dt > max_dt * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, max_dt });
        }
        let t = self.state.time;
        self.rhs(t, false, 0, 1);
        self.load_tmp(0.5 * dt, 0, 1);
        self.rhs(t + 0.5 * dt, true, 2, 3);
        self.load_tmp(0.5 * dt, 2, 3);
        self.rhs(t + 0.5 * dt, true, 4, 5);
        self.load_tmp(dt, 4, 5);
        self.rhs(t + dt, true, 6, 7);
        let w = dt / 6.0;
        for k in 0..self.tmp_u.len() {
            let s = &self.stage;
            self.state.u[k] += (s[0][k] + (s[2][k] + s[4][k]) * 2.0 + s[6][k]) * w;
            self.state.v[k] += (s[1][k] + (s[3][k] + s[5][k]) * 2.0 + s[7][k]) * w;
        }
        self.state.time = t + dt;
        if !self.state.is_finite() {
            return Err(Error::NonFinite { time: self.state.time });
        }
        Ok(())
    }

    /// Steps to `t_end` with equal steps no larger than `dt_max`, calling
    /// `observe` after every `every` steps (and on the initial state).
    pub fn run(&mut self, t_end: f64, dt: f64, every: usize, mut observe: impl FnMut(&WaveState)) -> Result<()> {
        observe(&self.state);
        let t0 = self.state.time;
        let steps = ((t_end - t0) / dt).round() as usize;
        for s in 1..=steps {
            self.step(dt)?;
            if every > 0 && s % every == 0 {
                observe(&self.state);
            }
        }
        Ok(())
    }
}

/// Time interval and output cadence of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub t_start: f64,
    pub t_end: f64,
    /// Snapshot spacing; rounded to a whole number of steps.
    pub cadence: f64,
    pub cfl: f64,
}

impl SolveOptions {
    /// A step `dt ≤ cfl/rate` with `cadence / dt` integral and
    /// `(t_end − t_start) / cadence` integral after rounding the end time.
    pub fn schedule(&self, op: &WaveOperator) -> Result<(f64, usize, usize)> {
        if !(self.t_end > self.t_start) {
            return Err(Error::InvalidParameter { name: "t_end", reason: "must exceed t_start" });
        }
        if !(self.cadence > 0.0) {
            return Err(Error::InvalidParameter { name: "cadence", reason: "must be positive" });
        }
        let per = (self.cadence / op.max_dt()).ceil().max(1.0) as usize;
        let dt = self.cadence / per as f64;
        let snaps = ((self.t_end - self.t_start) / self.cadence).round().max(1.0) as usize;
        Ok((dt, per, snaps))
    }
}

fn check_forward(source: &SourceSpec, opts: &SolveOptions) -> Result<()> {
    if source.start() < opts.t_start {
        return Err(Error::InvalidParameter { name: "t_start", reason: "source must vanish before the start time" });
    }
    Ok(())
}

/// Forward solution of `(□_g + ψX) u = f` from zero data, returning
/// snapshots at the configured cadence (the first at `t_start`).
pub fn forward_solve<M: MetricProvider + ?Sized>(
    metric: &M,
    grid: &Grid2D,
    source: &SourceSpec,
    opts: &SolveOptions,
    damping: Option<Damping<'_>>,
) -> Result<Vec<WaveState>> {
    check_forward(source, opts)?;
    let op = WaveOperator::new(metric, grid, source.m, opts.cfl, damping)?;
    solve_with(&op, source, opts)
}

/// [`forward_solve`] with a prebuilt operator.
pub fn solve_with(op: &WaveOperator, source: &SourceSpec, opts: &SolveOptions) -> Result<Vec<WaveState>> {
    check_forward(source, opts)?;
    let (dt, per, snaps) = opts.schedule(op)?;
    let mut evo = Evolution::new(op, WaveState::zeros(op.grid(), source.m, opts.t_start), Some(source))?;
    let mut out = Vec::with_capacity(snaps + 1);
    evo.run(opts.t_start + snaps as f64 * opts.cadence, dt, per, |s| out.push(s.clone()))?;
    Ok(out)
}

/// The near-horizon solve on `M_δ ∖ K_{2δ}` with homogeneous Dirichlet data
/// on `∂K_{2δ}`. The two components are evolved independently and both are
/// returned as `(component, snapshots)`; the one the source misses stays zero.
pub fn forward_solve_dirichlet(
    kds: &KerrDeSitter,
    n_r: usize,
    n_theta: usize,
    source: &SourceSpec,
    opts: &SolveOptions,
) -> Result<Vec<(RedshiftComponent, Vec<WaveState>)>> {
    let p = kds.params();
    let lower = (p.r_minus() - p.delta, p.r_minus() + 2.0 * p.delta);
    let upper = (p.r_plus() - 2.0 * p.delta, p.r_plus() + p.delta);
    let (lo, hi) = (source.radial.lo, source.radial.hi);
    let inside = |(a, b): (f64, f64)| lo >= a && hi <= b;
    let component = if inside(lower) {
        RedshiftComponent::Lower
    } else if inside(upper) {
        RedshiftComponent::Upper
    } else {
        return Err(Error::InvalidParameter {
            name: "source_r",
            reason: "source must lie in one component of M_delta minus K_2delta",
        });
    };
    let mut out = Vec::new();
    for c in [RedshiftComponent::Lower, RedshiftComponent::Upper] {
        let grid = Grid2D::dirichlet_component(p, c, n_r, n_theta)?;
        let snaps = if c == component {
            forward_solve(kds, &grid, source, opts, None)?
        } else {
            // A quiet component stays identically zero; evolve it anyway so
            // callers see both halves on the same clock.
            let op = WaveOperator::new(kds, &grid, source.m, opts.cfl, None)?;
            let (_, _, snaps) = opts.schedule(&op)?;
            (0..=snaps).map(|s| WaveState::zeros(&grid, source.m, opts.t_start + s as f64 * opts.cadence)).collect()
        };
        out.push((c, snaps));
    }
    Ok(out)
}

/// A damping profile `ψ ≥ 0` vanishing on `K_δ`: equal to `strength`
/// within `δ/2` of either horizon (and beyond it), tapering smoothly to zero
/// at `r_± ∓ δ`.
pub fn horizon_damping(p: &BlackHoleParams, strength: f64) -> impl Fn(f64) -> f64 {
    let (rm, rp, d) = (p.r_minus(), p.r_plus(), p.delta);
    move |r: f64| {
        let depth = (r - rm).min(rp - r);
        strength * (1.0 - smoothstep(2.0 * depth / d - 1.0))
    }
}
