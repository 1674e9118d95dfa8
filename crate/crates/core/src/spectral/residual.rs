use alloc::vec::Vec;

use crate::numerics::linalg::det_inverse4;
use crate::solver::{Grid2D, WaveOperator, WaveState, DEFAULT_CFL};
use crate::spacetime::KerrDeSitter;
use crate::{Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Step of the fourth-order difference quotients used for reference
/// derivatives of the test function.
const REF_STEP: f64 = 4e-3;

/// Outcome of [`stationary_residual_check`]; maxima over the interior nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryResidual {
    /// `|ρ²□_g(e^{−iωt}e^{imφ}w)e^{iωt}e^{−imφ} − P_g(ω)w|` with the left side
    /// taken in divergence form from the Boyer–Lindquist inverse metric and
    /// the right side from the separated radial and angular blocks.
    pub assembly: f64,
    /// The same comparison with the left side computed by the solver's
    /// discrete operator in the shifted Kerr-star chart; `O(h²)`.
    pub solver: f64,
    /// `max |P_g(ω)w|`, for relative statements.
    pub scale: f64,
}

/// `P_g(ω)` applied to `w` through its two blocks:
///
/// ```text
/// P_g(ω) = −D_r(Δ_r D_r) − (1+α)²K²/Δ_r
///          − (1/sinθ)D_θ(Δ_θ sinθ D_θ) + (1+α)²(aω sin²θ − m)²/(Δ_θ sin²θ),
/// ```
///
/// `K = (r²+a²)ω − am`, with accurate difference quotients of `w`. This is
/// `ρ²□_g` on `e^{−iωt}e^{imφ}w` in Boyer–Lindquist coordinates, so the
/// angular and radial parts separate with `λ` entering as `P_r + λ`.
pub fn apply_stationary(
    kds: &KerrDeSitter,
    omega: C64,
    m: i32,
    w: &dyn Fn(f64, f64) -> C64,
    r: f64,
    theta: f64,
) -> C64 {
    let p = kds.params();
    let (a, al) = (p.a, p.alpha);
    let h = REF_STEP;
    let mf = m as f64;
    let dr = |g: &dyn Fn(f64) -> C64| (g(r - 2.0 * h) - g(r - h) * 8.0 + g(r + h) * 8.0 - g(r + 2.0 * h)) / (12.0 * h);
    let dt = |g: &dyn Fn(f64) -> C64| {
        (g(theta - 2.0 * h) - g(theta - h) * 8.0 + g(theta + h) * 8.0 - g(theta + 2.0 * h)) / (12.0 * h)
    };
    let w_r = |rr: f64| {
        let f = |x: f64| w(x, theta);
        (f(rr - 2.0 * h) - f(rr - h) * 8.0 + f(rr + h) * 8.0 - f(rr + 2.0 * h)) / (12.0 * h)
    };
    let w_t = |tt: f64| {
        let f = |x: f64| w(r, x);
        (f(tt - 2.0 * h) - f(tt - h) * 8.0 + f(tt + h) * 8.0 - f(tt + 2.0 * h)) / (12.0 * h)
    };
    let radial = -dr(&|rr| w_r(rr) * p.delta_r(rr));
    let angular = -dt(&|tt| w_t(tt) * (p.delta_theta(tt) * tt.sin())) / theta.sin();
    let k = omega * (r * r + a * a) - a * mf;
    let s2 = theta.sin() * theta.sin();
    let t = omega * (a * s2) - mf;
    let c = (1.0 + al) * (1.0 + al);
    let wv = w(r, theta);
    radial + angular - k * k * (c / p.delta_r(r)) * wv + t * t * (c / (p.delta_theta(theta) * s2)) * wv
}

/// `ρ²□_g(e^{−iωt}e^{imφ}w)` with the exponentials stripped, from the
/// divergence form with the Boyer–Lindquist inverse metric.
fn joint_bl(kds: &KerrDeSitter, omega: C64, m: i32, w: &dyn Fn(f64, f64) -> C64, r: f64, theta: f64) -> C64 {
    let p = kds.params();
    let h = REF_STEP;
    let dens = |rr: f64, tt: f64| {
        let g = kds.bl_components(rr, tt);
        // Boyer–Lindquist is regular inside (r_-, r_+), where this is used.
        let (det, inv) = det_inverse4(&g).unwrap_or((0.0, [[0.0; 4]; 4]));
        (det.abs().sqrt(), inv)
    };
    let im = C64::new(0.0, 1.0);
    let mf = m as f64;
    let d4 = |f: &dyn Fn(f64) -> C64, x: f64| {
        (f(x - 2.0 * h) - f(x - h) * 8.0 + f(x + h) * 8.0 - f(x + 2.0 * h)) / (12.0 * h)
    };
    let flux_r = |rr: f64| {
        let (sg, inv) = dens(rr, theta);
        d4(&|x| w(x, theta), rr) * (sg * inv[1][1])
    };
    let flux_t = |tt: f64| {
        let (sg, inv) = dens(r, tt);
        d4(&|x| w(r, x), tt) * (sg * inv[2][2])
    };
    let (sg, inv) = dens(r, theta);
    // ∂_t → −iω, ∂_φ → im.
    let dt = -im * omega;
    let dp = im * mf;
    let zeroth = dt * dt * inv[0][0] + dt * dp * (2.0 * inv[0][3]) + dp * dp * inv[3][3];
    let box_w = (d4(&flux_r, r) + d4(&flux_t, theta)) / sg + zeroth * w(r, theta);
    box_w * p.rho2(r, theta)
}

/// Compares `P_g(ω)w` from its separated blocks with the full wave operator,
/// once in exact divergence form and once through the solver's discrete
/// operator on `grid` (which must lie inside `(r_-, r_+)`). `w` should vanish
/// near the radial ends of the grid; the two outermost rows are skipped.
pub fn stationary_residual_check(
    kds: &KerrDeSitter,
    grid: &Grid2D,
    omega: C64,
    m: i32,
    w: &dyn Fn(f64, f64) -> C64,
) -> Result<StationaryResidual> {
    let p = kds.params();
    let tr = kds.transition();
    let sh = kds.shift();
    let im = C64::new(0.0, 1.0);
    let mf = m as f64;
    // w̃ = e^{−iω(F_t + H) + imF_φ} w is the profile in the solver's chart.
    let phase = |r: f64| (-im * omega * (tr.ft(r) + sh.h(r)) + im * mf * tr.fphi(r)).exp();
    let state = WaveState::from_fn(grid, m, 0.0, |r, t| phase(r) * w(r, t), |r, t| -im * omega * phase(r) * w(r, t));
    let wtt: Vec<C64> = state.u.iter().map(|z| -omega * omega * *z).collect();
    let op = WaveOperator::new(kds, grid, m, DEFAULT_CFL, None)?;
    let mut out = StationaryResidual { assembly: 0.0, solver: 0.0, scale: 0.0 };
    for i in 2..grid.q1.n - 2 {
        let r = grid.q1.node(i);
        for j in 0..grid.q2.n {
            let theta = grid.q2.node(j);
            let pg = apply_stationary(kds, omega, m, w, r, theta);
            let joint = joint_bl(kds, omega, m, w, r, theta);
            let disc = op.dalembertian_at(&state, &wtt, i, j)? * p.rho2(r, theta) / phase(r);
            out.assembly = out.assembly.max((joint - pg).norm());
            out.solver = out.solver.max((disc - pg).norm());
            out.scale = out.scale.max(pg.norm());
        }
    }
    Ok(out)
}
