use core::f64::consts::PI;

use crate::numerics::quad::GaussLegendre;
use crate::solver::SourceSpec;
use crate::spacetime::BlackHoleParams;
use crate::C64;

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

const RULE: usize = 16;
const PANELS: usize = 48;

/// `(1+α) / (4π(r_+² + r_-² + 2a²))`, the factor in front of `∫_M f dVol`.
pub fn pi0_prefactor(p: &BlackHoleParams) -> f64 {
    let (rm, rp) = (p.r_minus(), p.r_plus());
    (1.0 + p.alpha) / (4.0 * PI * (rp * rp + rm * rm + 2.0 * p.a * p.a))
}

/// The late-time constant of the forward solution with source `f`:
///
/// ```text
/// Π₀f = (1+α) / (4π(r_+² + r_-² + 2a²)) · ∫_M f dVol,
/// dVol = ρ² sinθ / (1+α)² dt dr dθ dφ,
/// ```
///
/// integrated over `r ∈ (r_-, r_+)` only. Sources outside that range, and
/// every `m ≠ 0` source, give zero. Composite Gauss–Legendre in each
/// separated factor.
pub fn pi0(p: &BlackHoleParams, source: &SourceSpec) -> C64 {
    if source.m != 0 {
        return C64::new(0.0, 0.0);
    }
    let rule = GaussLegendre::new(RULE);
    let time = rule.composite(source.time.lo, source.time.hi, PANELS, |t| source.time.value(t));
    let (r0, r1) = (source.radial.lo.max(p.r_minus()), source.radial.hi.min(p.r_plus()));
    if r1 <= r0 {
        return C64::new(0.0, 0.0);
    }
    let rad2 = rule.composite(r0, r1, PANELS, |r| r * r * source.radial.value(r));
    let rad0 = rule.composite(r0, r1, PANELS, |r| source.radial.value(r));
    let ang =
        |w: &dyn Fn(f64) -> f64| rule.composite(0.0, PI, PANELS, |th| source.angular.value(0, th) * th.sin() * w(th));
    let ang0 = ang(&|_| 1.0);
    let ang2 = ang(&|th| th.cos() * th.cos());
    // ρ² = r² + a²cos²θ splits the (r, θ) integral into two products.
    let space = rad2 * ang0 + p.a * p.a * rad0 * ang2;
    let integral = 2.0 * PI * time * space / ((1.0 + p.alpha) * (1.0 + p.alpha));
    source.amplitude * (pi0_prefactor(p) * integral)
}

/// [`pi0`] for an arbitrary axisymmetric density `f(t, r, θ)` supported in
/// `[t0, t1] × [r0, r1] × [θ0, θ1]`, by tensor Gauss–Legendre quadrature
/// with `panels` sub-intervals per axis. The radial range is clipped to
/// `(r_-, r_+)`.
pub fn pi0_integral(
    p: &BlackHoleParams,
    f: &dyn Fn(f64, f64, f64) -> C64,
    t: (f64, f64),
    r: (f64, f64),
    theta: (f64, f64),
    panels: usize,
) -> C64 {
    let (r0, r1) = (r.0.max(p.r_minus()), r.1.min(p.r_plus()));
    if r1 <= r0 || t.1 <= t.0 {
        return C64::new(0.0, 0.0);
    }
    let rule = GaussLegendre::new(RULE);
    let panels = panels.max(1);
    let mut total = C64::new(0.0, 0.0);
    for (tt, wt) in panel_nodes(&rule, t.0, t.1, panels) {
        for (rr, wr) in panel_nodes(&rule, r0, r1, panels) {
            for (th, wth) in panel_nodes(&rule, theta.0.max(0.0), theta.1.min(PI), panels) {
                total += f(tt, rr, th) * (wt * wr * wth * p.rho2(rr, th) * th.sin());
            }
        }
    }
    let integral = total * (2.0 * PI / ((1.0 + p.alpha) * (1.0 + p.alpha)));
    integral * pi0_prefactor(p)
}

fn panel_nodes(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
    let h = (b - a) / panels as f64;
    (0..panels).flat_map(move |k| rule.mapped(a + k as f64 * h, a + (k + 1) as f64 * h))
}
