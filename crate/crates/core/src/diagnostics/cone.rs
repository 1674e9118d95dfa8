use alloc::vec::Vec;
use core::f64::consts::PI;

use super::norms::trapezoid;
use crate::numerics::interp::{PeriodicAxis, PeriodicBicubic};
use crate::numerics::quad::GaussLegendre;
use crate::solver::{gradient_at, AxisKind, SourceSpec, WaveOperator, WaveState};
use crate::spacetime::Chart;
use crate::{Error, Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// The shrinking cone `{|x − x0| < R − t, t0 ≤ t ≤ T}` in the flat
/// `(x, y)` plane, `t0` and `T` being the first and last snapshot times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cone {
    pub center: (f64, f64),
    pub radius: f64,
}

/// Terms of `E(T) + F_mantle = E(t0) + ∫_Ω u_t □u` on the cone, with
/// `E(s) = ½∫_{|x−x0|<R−s} (|u_t|² + |∇u|²) dx` and `F_mantle ≥ 0` the flux
/// out through the mantle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeBudget {
    pub initial_energy: f64,
    pub final_energy: f64,
    pub source_work: f64,
    pub mantle_flux: f64,
    /// `E(T) + F_mantle − E(t0) − ∫u_t□u`: zero in the continuum.
    pub defect: f64,
    /// `E(T) − E(t0) − ∫u_t□u`; the energy inequality says `≤ 0`, the
    /// discrete one `≤ |defect|`.
    pub excess: f64,
}

struct Fields {
    v: Vec<C64>,
    ux: Vec<C64>,
    uy: Vec<C64>,
    u: Vec<C64>,
}

/// Evaluates the energy estimate on flat space over `cone` from a run on
/// a doubly periodic Cartesian grid. Fields between nodes come from bicubic
/// interpolation of `u_t` and the solver's difference quotients; discs use
/// Gauss–Legendre in the radius and the trapezoidal rule in angle, time
/// integrals the trapezoidal rule over the snapshots.
pub fn cone_energy_budget(
    op: &WaveOperator,
    snapshots: &[WaveState],
    source: Option<&SourceSpec>,
    cone: &Cone,
) -> Result<ConeBudget> {
    let grid = op.grid();
    if op.chart() != Chart::Minkowski || grid.q1.kind != AxisKind::Periodic || grid.q2.kind != AxisKind::Periodic {
        return Err(Error::InvalidGrid("cone budget needs flat space on a doubly periodic grid"));
    }
    if snapshots.len() < 2 {
        return Err(Error::InsufficientData);
    }
    let t_end = snapshots[snapshots.len() - 1].time;
    if cone.radius - (t_end - snapshots[0].time) <= 0.0 {
        return Err(Error::InvalidParameter { name: "radius", reason: "cone closes before the last snapshot" });
    }
    let ax = PeriodicAxis { start: grid.q1.start, step: grid.q1.step, n: grid.q1.n };
    let ay = PeriodicAxis { start: grid.q2.start, step: grid.q2.step, n: grid.q2.n };
    let h = grid.q1.step.max(grid.q2.step);
    let rule = GaussLegendre::new(4);
    let m2 = (op.m() as f64).powi(2);
    let t0 = snapshots[0].time;

    let mut energy = Vec::with_capacity(snapshots.len());
    let mut work = Vec::with_capacity(snapshots.len());
    let mut mantle = Vec::with_capacity(snapshots.len());
    for s in snapshots {
        let f = fields(op, s);
        let at = |vals: &[C64], x: f64, y: f64| PeriodicBicubic { values: vals, x: ax, y: ay }.at(x, y);
        let sample = |x: f64, y: f64| (at(&f.v, x, y), at(&f.ux, x, y), at(&f.uy, x, y), at(&f.u, x, y));
        let density = |x: f64, y: f64| {
            let (v, ux, uy, u) = sample(x, y);
            0.5 * (v.norm_sqr() + ux.norm_sqr() + uy.norm_sqr() + m2 * u.norm_sqr())
        };
        let rho = cone.radius - (s.time - t0);
        let n_ang = ((2.0 * PI * rho / h).ceil() as usize * 2).max(16);
        let panels = ((rho / h).ceil() as usize).max(1);
        let disc = |g: &dyn Fn(f64, f64) -> f64| -> f64 {
            let dr = rho / panels as f64;
            let mut total = 0.0;
            for p in 0..panels {
                for (r, wr) in rule.mapped(p as f64 * dr, (p + 1) as f64 * dr) {
                    let mut ring = 0.0;
                    for k in 0..n_ang {
                        let a = 2.0 * PI * k as f64 / n_ang as f64;
                        ring += g(cone.center.0 + r * a.cos(), cone.center.1 + r * a.sin());
                    }
                    total += wr * r * ring * (2.0 * PI / n_ang as f64);
                }
            }
            total
        };
        energy.push((s.time, disc(&density)));
        let w = match source {
            Some(src) if src.time.value(s.time) != 0.0 => disc(&|x, y| {
                let (v, ..) = sample(x, y);
                (v * src.value(s.time, x, y).conj()).re
            }),
            _ => 0.0,
        };
        work.push((s.time, w));
        // J^t + J^ρ = ½(|u_t|² + |∇u|²) − Re(u_t conj u_ρ) on |x − x0| = ρ.
        let mut ring = 0.0;
        for k in 0..n_ang {
            let a = 2.0 * PI * k as f64 / n_ang as f64;
            let (c, sn) = (a.cos(), a.sin());
            let (x, y) = (cone.center.0 + rho * c, cone.center.1 + rho * sn);
            let (v, ux, uy, u) = sample(x, y);
            let ur = ux * c + uy * sn;
            let e = 0.5 * (v.norm_sqr() + ux.norm_sqr() + uy.norm_sqr() + m2 * u.norm_sqr());
            ring += e - (v * ur.conj()).re;
        }
        mantle.push((s.time, ring * rho * 2.0 * PI / n_ang as f64));
    }
    let initial_energy = energy[0].1;
    let final_energy = energy[energy.len() - 1].1;
    let source_work = trapezoid(&work);
    let mantle_flux = trapezoid(&mantle);
    Ok(ConeBudget {
        initial_energy,
        final_energy,
        source_work,
        mantle_flux,
        defect: final_energy + mantle_flux - initial_energy - source_work,
        excess: final_energy - initial_energy - source_work,
    })
}

fn fields(op: &WaveOperator, s: &WaveState) -> Fields {
    let n = s.u.len();
    let (mut ux, mut uy) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..s.n1 {
        for j in 0..s.n2 {
            let g = gradient_at(op, s, i, j);
            ux.push(g[1]);
            uy.push(g[2]);
        }
    }
    Fields { v: s.v.clone(), ux, uy, u: s.u.clone() }
}
