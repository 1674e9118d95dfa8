use alloc::vec::Vec;
use core::f64::consts::PI;

use super::grid::{Axis, AxisKind, Grid2D};
use super::operator::WaveOperator;
use super::state::WaveState;
use crate::energy::VectorField;
use crate::numerics::linalg::Vec4;
use crate::C64;

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Measure of the ignorable coordinate: `2π` for `φ` on a polar grid, unit
/// length otherwise.
pub fn ignorable_period(grid: &Grid2D) -> f64 {
    if grid.q2.kind == AxisKind::Polar {
        2.0 * PI
    } else {
        1.0
    }
}

/// Multiplier components sampled at the grid nodes.
pub fn sample_field(grid: &Grid2D, field: &dyn VectorField) -> Vec<Vec4> {
    let mut out = Vec::with_capacity(grid.len());
    for q1 in grid.q1.nodes() {
        for q2 in grid.q2.nodes() {
            out.push(field.at(q1, q2));
        }
    }
    out
}

/// Discrete `(∂_τ u, ∂_1 u, ∂_2 u, im u)` at node `(i, j)`.
pub fn gradient_at(op: &WaveOperator, state: &WaveState, i: usize, j: usize) -> [C64; 4] {
    let n2 = state.n2;
    let k = state.index(i, j);
    [state.v[k], op.d1(i, |ii| state.u[ii * n2 + j]), op.d2(&state.u, i, j), C64::new(0.0, op.m() as f64) * state.u[k]]
}

/// `√g J_X^ν` at node `k` for the gradient `c`, complex parts summed.
pub fn current_density(op: &WaveOperator, k: usize, c: &[C64; 4], x: &Vec4) -> Vec4 {
    let a = op.densitized_at(k);
    let mut xc = C64::new(0.0, 0.0);
    for mu in 0..4 {
        xc += c[mu] * x[mu];
    }
    let mut ac = [C64::new(0.0, 0.0); 4];
    for nu in 0..4 {
        for lam in 0..4 {
            ac[nu] += c[lam] * a[nu][lam];
        }
    }
    let mut norm = 0.0;
    for mu in 0..4 {
        norm += (c[mu].conj() * ac[mu]).re;
    }
    let mut j = [0.0; 4];
    for nu in 0..4 {
        j[nu] = (xc * ac[nu].conj()).re - 0.5 * norm * x[nu];
    }
    j
}

/// `√g J_X^0` at every node: the density of the slice energy.
pub fn energy_density(op: &WaveOperator, state: &WaveState, x: &[Vec4]) -> Vec<f64> {
    let mut out = Vec::with_capacity(state.u.len());
    for i in 0..state.n1 {
        for j in 0..state.n2 {
            let k = state.index(i, j);
            out.push(current_density(op, k, &gradient_at(op, state, i, j), &x[k])[0]);
        }
    }
    out
}

/// `∫_a^b` of the piecewise-linear interpolant of nodal values along a
/// bounded or periodic axis (whole period when periodic).
pub fn integrate_axis(axis: &Axis, values: &[f64], range: Option<(f64, f64)>) -> f64 {
    let h = axis.step;
    match axis.kind {
        AxisKind::Periodic | AxisKind::Polar => values.iter().sum::<f64>() * h,
        AxisKind::Bounded { .. } => {
            let (a, b) = range.unwrap_or((axis.start, axis.end()));
            let (a, b) = (a.max(axis.start), b.min(axis.end()));
            let mut total = 0.0;
            for i in 0..values.len() - 1 {
                let (x0, x1) = (axis.node(i), axis.node(i + 1));
                let (lo, hi) = (a.max(x0), b.min(x1));
                if hi <= lo {
                    continue;
                }
                let at = |x: f64| values[i] + (values[i + 1] - values[i]) * (x - x0) / h;
                total += 0.5 * (at(lo) + at(hi)) * (hi - lo);
            }
            total
        }
    }
}

/// Integral over `q2` of a nodal array, one value per `q1` row, times the
/// ignorable period.
pub fn row_integrals(grid: &Grid2D, density: &[f64]) -> Vec<f64> {
    let n2 = grid.q2.n;
    let w = ignorable_period(grid);
    (0..grid.q1.n).map(|i| w * integrate_axis(&grid.q2, &density[i * n2..(i + 1) * n2], None)).collect()
}

/// `∫ T(X, n) dS` over the slice, restricted to `q1 ∈ region` when given.
pub fn energy_functional(op: &WaveOperator, state: &WaveState, x: &[Vec4], region: Option<(f64, f64)>) -> f64 {
    let rows = row_integrals(op.grid(), &energy_density(op, state, x));
    integrate_axis(&op.grid().q1, &rows, region)
}

/// Flux `∫ √g J_X^1 dq2 dq3` through the `q1`-node row `i`, counted
/// positive in the `+q1` direction.
pub fn q1_flux(op: &WaveOperator, state: &WaveState, x: &[Vec4], i: usize) -> f64 {
    let grid = op.grid();
    let dens: Vec<f64> = (0..state.n2)
        .map(|j| {
            let k = state.index(i, j);
            current_density(op, k, &gradient_at(op, state, i, j), &x[k])[1]
        })
        .collect();
    ignorable_period(grid) * integrate_axis(&grid.q2, &dens, None)
}

/// `(∫ |u|² √g)^{1/2}` over the slice, restricted to `q1 ∈ region`.
pub fn l2_norm(op: &WaveOperator, state: &WaveState, region: Option<(f64, f64)>) -> f64 {
    let dens: Vec<f64> = state.u.iter().enumerate().map(|(k, z)| z.norm_sqr() * op.sqrt_det_at(k)).collect();
    let rows = row_integrals(op.grid(), &dens);
    integrate_axis(&op.grid().q1, &rows, region).max(0.0).sqrt()
}

/// Volume-weighted mean of `u` over `q1 ∈ region`.
pub fn mean_value(op: &WaveOperator, state: &WaveState, region: Option<(f64, f64)>) -> C64 {
    let grid = op.grid();
    let part = |f: &dyn Fn(usize) -> f64| -> f64 {
        let dens: Vec<f64> = (0..state.u.len()).map(|k| f(k) * op.sqrt_det_at(k)).collect();
        integrate_axis(&grid.q1, &row_integrals(grid, &dens), region)
    };
    let vol = part(&|_| 1.0);
    C64::new(part(&|k| state.u[k].re), part(&|k| state.u[k].im)) / vol
}
