use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::cone::{cone_energy_budget, Cone, ConeBudget};
use crate::solver::{
    l2_norm, AngularProfile, Evolution, Grid2D, SolveOptions, SourceSpec, Support, WaveOperator, WaveState, DEFAULT_CFL,
};
use crate::spacetime::Minkowski;
use crate::{Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Half-width of the flat test box `[−L, L)²`.
pub const FLAT_BOX: f64 = 4.0;

fn pulse(x: f64, y: f64, center: (f64, f64), width: f64) -> C64 {
    let (dx, dy) = (x - center.0, y - center.1);
    C64::new((-(dx * dx + dy * dy) / (width * width)).exp(), 0.0)
}

/// Evolves `u₀` (with `∂_t u = 0`) on the `n × n` flat periodic box to
/// `t_end`, with snapshots every `cadence` and an optional source.
fn evolve_flat(
    n: usize,
    u0: impl Fn(f64, f64) -> C64,
    source: Option<&SourceSpec>,
    t_end: f64,
    cadence: f64,
) -> Result<(WaveOperator, Vec<WaveState>)> {
    let grid = Grid2D::periodic_box((-FLAT_BOX, FLAT_BOX), n, (-FLAT_BOX, FLAT_BOX), n)?;
    let op = WaveOperator::new(&Minkowski, &grid, 0, DEFAULT_CFL, None)?;
    let opts = SolveOptions { t_start: 0.0, t_end, cadence, cfl: DEFAULT_CFL };
    let (dt, per, snaps) = opts.schedule(&op)?;
    let init = WaveState::from_fn(&grid, 0, 0.0, u0, |_, _| C64::new(0.0, 0.0));
    let mut evo = Evolution::new(&op, init, source)?;
    let mut out = Vec::with_capacity(snaps + 1);
    evo.run(snaps as f64 * cadence, dt, per, |s| out.push(s.clone()))?;
    Ok((op, out))
}

/// Smooth flat-space benchmark at resolution `n` (even): a Gaussian pulse
/// evolved to `t = 1`. Reports `u_center` (the node at the origin) and
/// `l2`, the `L²` norm of the final slice.
pub fn flat_pulse_observables(n: usize) -> Result<Vec<(String, f64)>> {
    let (op, snaps) = evolve_flat(n, |x, y| pulse(x, y, (0.0, 0.0), 0.8), None, 1.0, 0.5)?;
    let last = &snaps[snaps.len() - 1];
    let center = last.at(n / 2, n / 2).re;
    Ok(vec![(String::from("u_center"), center), (String::from("l2"), l2_norm(&op, last, None))])
}

/// The flat energy estimate on the shrinking cone of radius 2.5 centred at
/// the origin over `0 ≤ t ≤ 1.5`, for an off-centre pulse plus a source
/// active during `0.2 < t < 1.2`. Returns the budget and the grid step.
pub fn flat_cone_budget(n: usize) -> Result<(ConeBudget, f64)> {
    let source = SourceSpec::new(
        0,
        C64::new(1.0, 0.0),
        (0.2, 1.2),
        (-1.5, 1.0),
        AngularProfile::Gaussian { center: 0.3, width: 0.7 },
        Support::General,
    )?;
    let h = 2.0 * FLAT_BOX / n as f64;
    let (op, snaps) = evolve_flat(n, |x, y| pulse(x, y, (0.5, -0.3), 0.7), Some(&source), 1.5, 0.5 * h)?;
    let cone = Cone { center: (0.0, 0.0), radius: 2.5 };
    Ok((cone_energy_budget(&op, &snaps, Some(&source), &cone)?, h))
}
