use core::f64::consts::PI;

use super::deformation::{deformation_k, VectorField};
use super::stress::current_j;
use crate::numerics::linalg::Vec4;
use crate::numerics::quad::GaussLegendre;
use crate::spacetime::{BlackHoleParams, Chart, MetricProvider};
use crate::{Error, Result};

fn shifted(p: &Vec4, mu: usize, d: f64) -> Vec4 {
    let mut q = *p;
    q[mu] += d;
    q
}

fn gradient(u: &dyn Fn(Vec4) -> f64, p: &Vec4, h: f64) -> Vec4 {
    let mut du = [0.0; 4];
    for (mu, d) in du.iter_mut().enumerate() {
        *d = (u(shifted(p, mu, h)) - u(shifted(p, mu, -h))) / (2.0 * h);
    }
    du
}

/// `|Div J_X(u) − (Xu) □_g u − K^X(∇u, ∇u)|` at `point`, with every
/// derivative of `u` and of the fluxes `√g J`, `√g ∇u` taken by centred
/// differences of step `h`. The continuum identity is exact, so the result
/// is `O(h²)`.
pub fn divergence_identity_residual<M, X>(m: &M, x: &X, u: &dyn Fn(Vec4) -> f64, point: Vec4, h: f64) -> Result<f64>
where
    M: MetricProvider + ?Sized,
    X: VectorField + ?Sized,
{
    let flux_j = |q: Vec4| -> Result<Vec4> {
        let ginv = m.inverse_metric(q[1], q[2])?;
        let j = current_j(&ginv, &gradient(u, &q, h), &x.at(q[1], q[2]));
        let s = m.sqrt_det(q[1], q[2]);
        Ok(j.map(|v| v * s))
    };
    let flux_u = |q: Vec4| -> Result<Vec4> {
        let ginv = m.inverse_metric(q[1], q[2])?;
        let du = gradient(u, &q, h);
        let s = m.sqrt_det(q[1], q[2]);
        let mut out = [0.0; 4];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = s * (0..4).map(|n| ginv[mu][n] * du[n]).sum::<f64>();
        }
        Ok(out)
    };
    let sg = m.sqrt_det(point[1], point[2]);
    let mut div_j = 0.0;
    let mut box_u = 0.0;
    for mu in 0..4 {
        div_j += (flux_j(shifted(&point, mu, h))?[mu] - flux_j(shifted(&point, mu, -h))?[mu]) / (2.0 * h);
        box_u += (flux_u(shifted(&point, mu, h))?[mu] - flux_u(shifted(&point, mu, -h))?[mu]) / (2.0 * h);
    }
    div_j /= sg;
    box_u /= sg;
    let du = gradient(u, &point, h);
    let xv = x.at(point[1], point[2]);
    let xu: f64 = (0..4).map(|i| xv[i] * du[i]).sum();
    let ginv = m.inverse_metric(point[1], point[2])?;
    let k = deformation_k(m, x, point[1], point[2])?.on_gradient(&ginv, &du);
    Ok((div_j - xu * box_u - k).abs())
}

/// Coordinate hypersurfaces for flux integrals. Ranges are in coordinates;
/// the integrand is `s·√g·J^k`, where `k` is the constant coordinate and `s`
/// the orientation sign. For a spacelike or null surface this equals
/// `∫ T(X, n) dS` with the induced measure, and it stays finite when the
/// surface is null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface {
    /// `{q0 = t}`, oriented along `+dq0`.
    Slice { t: f64, q1: (f64, f64), q2: (f64, f64), q3: (f64, f64) },
    /// `{q1 = r}`; `outward = ±1` orients along `±dr`.
    Radial { r: f64, outward: f64, t: (f64, f64), q2: (f64, f64), q3: (f64, f64) },
    /// `∂K_{2δ} = {r = r_- + 2δ} ∪ {r = r_+ − 2δ}`, oriented into `K_{2δ}`
    /// (out of `M_δ ∖ K_{2δ}`).
    CoreBoundary { lower: f64, upper: f64, t: (f64, f64) },
}

impl Surface {
    /// A time slice of a spherical chart over `r ∈ [r0, r1]`.
    pub fn spherical_slice(t: f64, r0: f64, r1: f64) -> Self {
        Surface::Slice { t, q1: (r0, r1), q2: (0.0, PI), q3: (0.0, 2.0 * PI) }
    }

    pub fn spherical_radial(r: f64, outward: f64, t0: f64, t1: f64) -> Self {
        Surface::Radial { r, outward, t: (t0, t1), q2: (0.0, PI), q3: (0.0, 2.0 * PI) }
    }

    pub fn core_boundary(p: &BlackHoleParams, t0: f64, t1: f64) -> Self {
        Surface::CoreBoundary { lower: p.r_minus() + 2.0 * p.delta, upper: p.r_plus() - 2.0 * p.delta, t: (t0, t1) }
    }
}

fn valid(range: (f64, f64)) -> bool {
    range.0.is_finite() && range.1.is_finite() && range.1 > range.0
}

/// Flux of `J_X(u)` through `surface`; `du` returns the covector `∂_μ u` at
/// a point. `nodes` Gauss–Legendre nodes are used per dimension.
pub fn flux_integral<M, X>(m: &M, x: &X, du: &dyn Fn(Vec4) -> Vec4, surface: &Surface, nodes: usize) -> Result<f64>
where
    M: MetricProvider + ?Sized,
    X: VectorField + ?Sized,
{
    let rule = GaussLegendre::new(nodes.max(1));
    let integrand = |k: usize, q: Vec4| -> Result<f64> {
        let ginv = m.inverse_metric(q[1], q[2])?;
        let j = current_j(&ginv, &du(q), &x.at(q[1], q[2]));
        Ok(m.sqrt_det(q[1], q[2]) * j[k])
    };
    let cube = |k: usize, fixed: f64, a: (f64, f64), b: (f64, f64), c: (f64, f64)| -> Result<f64> {
        let mut total = 0.0;
        for (s1, w1) in rule.mapped(a.0, a.1) {
            for (s2, w2) in rule.mapped(b.0, b.1) {
                for (s3, w3) in rule.mapped(c.0, c.1) {
                    let q = match k {
                        0 => [fixed, s1, s2, s3],
                        _ => [s1, fixed, s2, s3],
                    };
                    total += w1 * w2 * w3 * integrand(k, q)?;
                }
            }
        }
        Ok(total)
    };
    match *surface {
        Surface::Slice { t, q1, q2, q3 } => {
            if !(valid(q1) && valid(q2) && valid(q3)) {
                return Err(Error::UnsupportedSurface("empty or unbounded slice"));
            }
            cube(0, t, q1, q2, q3)
        }
        Surface::Radial { r, outward, t, q2, q3 } => {
            if !(valid(t) && valid(q2) && valid(q3)) || outward.abs() != 1.0 {
                return Err(Error::UnsupportedSurface("radial surface needs bounded ranges and outward = ±1"));
            }
            Ok(outward * cube(1, r, t, q2, q3)?)
        }
        Surface::CoreBoundary { lower, upper, t } => {
            if !matches!(m.chart(), Chart::KerrStar | Chart::ShiftedKerrStar | Chart::BoyerLindquist) {
                return Err(Error::UnsupportedSurface("the core boundary exists only on Kerr-de Sitter"));
            }
            if !(valid(t) && upper > lower) {
                return Err(Error::UnsupportedSurface("degenerate core boundary"));
            }
            let ang = ((0.0, PI), (0.0, 2.0 * PI));
            // Into K_{2δ}: +dr at the lower sphere, −dr at the upper one.
            Ok(cube(1, lower, t, ang.0, ang.1)? - cube(1, upper, t, ang.0, ang.1)?)
        }
    }
}
