use alloc::vec;
use alloc::vec::Vec;

use crate::solver::{integrate_axis, row_integrals, SourceSpec, WaveOperator, WaveState};
use crate::{Error, Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Sobolev order of [`weighted_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SobolevOrder {
    L2,
    H1,
    H2,
}

impl SobolevOrder {
    pub fn from_index(s: u32) -> Result<Self> {
        match s {
            0 => Ok(Self::L2),
            1 => Ok(Self::H1),
            2 => Ok(Self::H2),
            _ => Err(Error::InvalidParameter { name: "s", reason: "Sobolev order must be 0, 1 or 2" }),
        }
    }
}

/// `Σ_{|β| ≤ s} |∂^β u|²` at every node, with `β` running over the
/// coordinates `(τ, q1, q2, φ)` and `∂_φ = im`. Spatial derivatives use the
/// solver's stencils; `∂_τ² u` comes from the evolution equation with the
/// given source (or none).
pub fn sobolev_density(
    op: &WaveOperator,
    state: &WaveState,
    order: SobolevOrder,
    source: Option<&SourceSpec>,
) -> Result<Vec<f64>> {
    let (n1, n2) = (state.n1, state.n2);
    let m2 = (op.m() as f64).powi(2);
    let mut out: Vec<f64> = state.u.iter().map(|z| z.norm_sqr()).collect();
    if order == SobolevOrder::L2 {
        return Ok(out);
    }
    let d1 = |w: &[C64]| -> Vec<C64> {
        let mut g = vec![C64::new(0.0, 0.0); w.len()];
        for i in 0..n1 {
            for j in 0..n2 {
                g[i * n2 + j] = op.d1(i, |ii| w[ii * n2 + j]);
            }
        }
        g
    };
    let d2 = |w: &[C64]| -> Vec<C64> {
        let mut g = vec![C64::new(0.0, 0.0); w.len()];
        for i in 0..n1 {
            for j in 0..n2 {
                g[i * n2 + j] = op.d2(w, i, j);
            }
        }
        g
    };
    let (u1, u2) = (d1(&state.u), d2(&state.u));
    for k in 0..out.len() {
        out[k] += state.v[k].norm_sqr() + u1[k].norm_sqr() + u2[k].norm_sqr() + m2 * state.u[k].norm_sqr();
    }
    if order == SobolevOrder::H1 {
        return Ok(out);
    }
    let samples = match source {
        Some(s) => {
            let base = op.source_samples(s)?;
            let bt = s.time.value(state.time);
            Some(base.into_iter().map(|z| z * bt).collect::<Vec<_>>())
        }
        None => None,
    };
    let mut acc = vec![C64::new(0.0, 0.0); state.u.len()];
    op.acceleration(&state.u, &state.v, samples.as_deref(), &mut acc);
    let (v1, v2) = (d1(&state.v), d2(&state.v));
    let (u11, u12, u22) = (d1(&u1), d2(&u1), d2(&u2));
    // Unordered pairs of (τ, 1, 2, φ): ττ, τ1, τ2, τφ, 11, 12, 1φ, 22, 2φ, φφ.
    for k in 0..out.len() {
        out[k] += acc[k].norm_sqr()
            + v1[k].norm_sqr()
            + v2[k].norm_sqr()
            + m2 * state.v[k].norm_sqr()
            + u11[k].norm_sqr()
            + u12[k].norm_sqr()
            + m2 * u1[k].norm_sqr()
            + u22[k].norm_sqr()
            + m2 * u2[k].norm_sqr()
            + m2 * m2 * state.u[k].norm_sqr();
    }
    Ok(out)
}

/// `‖u(τ)‖²_{H^s}` over the slice with the volume density `√g`, restricted
/// to `q1 ∈ region` when given.
pub fn slice_norm_sq(
    op: &WaveOperator,
    state: &WaveState,
    order: SobolevOrder,
    region: Option<(f64, f64)>,
    source: Option<&SourceSpec>,
) -> Result<f64> {
    let dens = sobolev_density(op, state, order, source)?;
    let weighted: Vec<f64> = dens.iter().enumerate().map(|(k, d)| d * op.sqrt_det_at(k)).collect();
    let rows = row_integrals(op.grid(), &weighted);
    Ok(integrate_axis(&op.grid().q1, &rows, region).max(0.0))
}

/// Discrete `‖e^{ντ} u‖_{H^s}`. A single snapshot gives the slice norm
/// times `e^{ντ}`; several give the space-time norm
/// `(∫ e^{2ντ} ‖u(τ)‖²_{H^s} dτ)^{1/2}` by the trapezoidal rule in time.
pub fn weighted_norm(
    op: &WaveOperator,
    snapshots: &[WaveState],
    order: SobolevOrder,
    nu: f64,
    region: Option<(f64, f64)>,
    source: Option<&SourceSpec>,
) -> Result<f64> {
    match snapshots {
        [] => Ok(0.0),
        [s] => Ok((nu * s.time).exp() * slice_norm_sq(op, s, order, region, source)?.sqrt()),
        _ => {
            let vals = snapshots
                .iter()
                .map(|s| Ok((s.time, (2.0 * nu * s.time).exp() * slice_norm_sq(op, s, order, region, source)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(trapezoid(&vals).max(0.0).sqrt())
        }
    }
}

/// Trapezoidal rule over `(t, f)` samples.
pub(crate) fn trapezoid(vals: &[(f64, f64)]) -> f64 {
    vals.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum()
}
