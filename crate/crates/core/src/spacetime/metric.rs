use core::f64::consts::PI;

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use super::christoffel::christoffel;
use super::params::BlackHoleParams;
use super::transition::{ChartTransition, SliceShift};
use super::Chart;
use crate::numerics::linalg::{bilinear4, congruence4, det_inverse4, identity4, Mat4, Vec4, ZERO4};
use crate::{Error, Result};

/// A point together with the chart its coordinates refer to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub chart: Chart,
    /// `(time, r, θ, φ)`, or `(t, x, y, z)` for [`Chart::Minkowski`].
    pub x: Vec4,
}

impl SpacetimePoint {
    pub fn new(chart: Chart, t: f64, r: f64, theta: f64, phi: f64) -> Self {
        Self { chart, x: [t, r, theta, phi] }
    }

    pub fn r(&self) -> f64 {
        self.x[1]
    }

    pub fn theta(&self) -> f64 {
        self.x[2]
    }
}

/// Covariant metric components at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric4 {
    pub g: Mat4,
    pub point: SpacetimePoint,
}

impl Metric4 {
    pub fn chart(&self) -> Chart {
        self.point.chart
    }
}

/// Contravariant components `g^{μν}`.
pub fn inverse_metric(m: &Metric4) -> Result<Mat4> {
    det_inverse4(&m.g).map(|(_, inv)| inv).ok_or(Error::Singular)
}

/// `√|det g|`; zero for a degenerate matrix.
pub fn sqrt_det(m: &Metric4) -> f64 {
    det_inverse4(&m.g).map(|(d, _)| d.abs().sqrt()).unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalCharacter {
    Timelike,
    Null,
    Spacelike,
}

/// Classifies `X` by the sign of `g(X, X)`; `|g(X,X)| ≤ tol·‖X‖²` is null.
pub fn causal_character(g: &Mat4, x: &Vec4, tol: f64) -> Result<CausalCharacter> {
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let q = bilinear4(g, x, x);
    Ok(if q.abs() <= tol * norm2 {
        CausalCharacter::Null
    } else if q > 0.0 {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Spacelike
    })
}

/// A stationary metric whose components depend on the two middle
/// coordinates `(q1, q2)` only; `q0` is time and `q3` is ignorable.
pub trait MetricProvider: Sync {
    fn chart(&self) -> Chart;

    /// Covariant components at `(q1, q2)`. No domain checks.
    fn metric(&self, q1: f64, q2: f64) -> Mat4;

    fn inverse_metric(&self, q1: f64, q2: f64) -> Result<Mat4> {
        det_inverse4(&self.metric(q1, q2)).map(|(_, inv)| inv).ok_or(Error::Singular)
    }

    fn sqrt_det(&self, q1: f64, q2: f64) -> f64 {
        det_inverse4(&self.metric(q1, q2)).map(|(d, _)| d.abs().sqrt()).unwrap_or(0.0)
    }
}

/// Flat space in Cartesian coordinates `(t, x, y, z)`, `g = diag(1, −1, −1, −1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Minkowski;

impl MetricProvider for Minkowski {
    fn chart(&self) -> Chart {
        Chart::Minkowski
    }

    fn metric(&self, _: f64, _: f64) -> Mat4 {
        let mut g = ZERO4;
        g[0][0] = 1.0;
        for (i, row) in g.iter_mut().enumerate().skip(1) {
            row[i] = -1.0;
        }
        g
    }

    fn inverse_metric(&self, q1: f64, q2: f64) -> Result<Mat4> {
        Ok(self.metric(q1, q2))
    }

    fn sqrt_det(&self, _: f64, _: f64) -> f64 {
        1.0
    }
}

/// Default slope `η` of the slice shift `H' = −ησ`.
pub const DEFAULT_SLICE_ETA: f64 = 1.0;

const SLICE_CHECK_R: usize = 400;
const SLICE_CHECK_THETA: usize = 24;

/// Kerr–de Sitter spacetime with its chart transition and slice shift.
///
/// As a [`MetricProvider`] it evaluates in the chart selected by
/// [`KerrDeSitter::in_chart`] (shifted Kerr-star by default).
#[derive(Debug, Clone)]
pub struct KerrDeSitter {
    params: BlackHoleParams,
    transition: ChartTransition,
    shift: SliceShift,
    chart: Chart,
}

impl KerrDeSitter {
    pub fn new(params: BlackHoleParams) -> Result<Self> {
        Self::with_slice_shift(params, DEFAULT_SLICE_ETA)
    }

    /// Builds the geometry and verifies that `dτ` is timelike (the slices
    /// `τ = const` are spacelike) on a dense sample of the extended domain.
    pub fn with_slice_shift(params: BlackHoleParams, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidParameter { name: "eta", reason: "must be positive" });
        }
        let transition = ChartTransition::new(&params);
        let shift = SliceShift::new(&transition, eta);
        let kds = Self { params, transition, shift, chart: Chart::ShiftedKerrStar };
        let (lo, hi) = kds.extended_range();
        for i in 0..=SLICE_CHECK_R {
            let r = lo + (hi - lo) * i as f64 / SLICE_CHECK_R as f64;
            for j in 0..SLICE_CHECK_THETA {
                let theta = PI * (j as f64 + 0.5) / SLICE_CHECK_THETA as f64;
                let ginv = kds.shifted_inverse(r, theta);
                if !(ginv[0][0] > 0.0) {
                    return Err(Error::SliceNotSpacelike { r, theta });
                }
            }
        }
        Ok(kds)
    }

    /// Same geometry, evaluated in `chart` when used as a [`MetricProvider`].
    pub fn in_chart(&self, chart: Chart) -> Self {
        assert!(chart != Chart::Minkowski, "Kerr-de Sitter has no Minkowski chart");
        Self { chart, ..self.clone() }
    }

    pub fn params(&self) -> &BlackHoleParams {
        &self.params
    }

    pub fn transition(&self) -> &ChartTransition {
        &self.transition
    }

    pub fn shift(&self) -> &SliceShift {
        &self.shift
    }

    /// `[r_- − δ, r_+ + δ]`.
    pub fn extended_range(&self) -> (f64, f64) {
        (self.params.r_minus() - self.params.delta, self.params.r_plus() + self.params.delta)
    }

    fn check(&self, point: &SpacetimePoint, chart: Chart) -> Result<()> {
        if point.chart != chart {
            return Err(Error::OutOfChart { chart, r: point.r() });
        }
        let r = point.r();
        let inside = match chart {
            Chart::BoyerLindquist => self.params.in_exterior(r),
            _ => self.params.in_extended(r),
        };
        let theta = point.theta();
        if !inside || !(theta > 0.0 && theta < PI) {
            return Err(Error::OutOfChart { chart, r });
        }
        Ok(())
    }

    pub fn metric_bl(&self, point: &SpacetimePoint) -> Result<Metric4> {
        self.check(point, Chart::BoyerLindquist)?;
        Ok(Metric4 { g: self.bl_components(point.r(), point.theta()), point: *point })
    }

    /// Kerr-star metric: the closed near-horizon form inside the collars
    /// `|r − r_±| < ε`, the pushforward of the Boyer–Lindquist metric between
    /// them.
    pub fn metric_star(&self, point: &SpacetimePoint) -> Result<Metric4> {
        self.check(point, Chart::KerrStar)?;
        let (r, theta) = (point.r(), point.theta());
        let p = &self.params;
        let g = if (r - p.r_minus()).abs() < p.epsilon {
            self.closed_form(r, theta, -1.0)
        } else if (r - p.r_plus()).abs() < p.epsilon {
            self.closed_form(r, theta, 1.0)
        } else {
            self.star_pushforward(r, theta)
        };
        Ok(Metric4 { g, point: *point })
    }

    pub fn metric_shifted(&self, point: &SpacetimePoint) -> Result<Metric4> {
        self.check(point, Chart::ShiftedKerrStar)?;
        Ok(Metric4 { g: self.shifted_components(point.r(), point.theta()), point: *point })
    }

    /// Boyer–Lindquist components as displayed in the usual form.
    pub fn bl_components(&self, r: f64, theta: f64) -> Mat4 {
        let p = &self.params;
        let a = p.a;
        let s2 = theta.sin().powi(2);
        let dr = p.delta_r(r);
        let dth = p.delta_theta(theta);
        let rho2 = p.rho2(r, theta);
        let big_a = (1.0 + p.alpha).powi(2) * rho2;
        let ra = r * r + a * a;
        let mut g = ZERO4;
        g[0][0] = (dr - dth * s2 * a * a) / big_a;
        g[0][3] = (-dr * a * s2 + dth * s2 * a * ra) / big_a;
        g[3][0] = g[0][3];
        g[3][3] = (dr * a * a * s2 * s2 - dth * s2 * ra * ra) / big_a;
        g[1][1] = -rho2 / dr;
        g[2][2] = -rho2 / dth;
        g
    }

    /// `J^T g_BL J` for `t = t_+ + F_t(r)`, `φ = φ_+ + F_φ(r)`.
    pub fn star_pushforward(&self, r: f64, theta: f64) -> Mat4 {
        let mut j = identity4();
        j[0][1] = self.transition.ft_prime(r);
        j[3][1] = self.transition.fphi_prime(r);
        congruence4(&j, &self.bl_components(r, theta))
    }

    /// Kerr-star components written with the switch value `σ`:
    ///
    /// ```text
    /// g = (Δ_r/A) W² + (2σ/(1+α)) W dr + ρ²(σ²−1)/Δ_r dr² − (Δ_θ sin²θ/A) Z² − ρ²/Δ_θ dθ²
    /// ```
    ///
    /// with `W = dt_+ − a sin²θ dφ_+`, `Z = a dt_+ − (r²+a²) dφ_+` and
    /// `A = (1+α)²ρ²`. `σ = ±1` gives the near-horizon form,
    /// `σ = 0` the Boyer–Lindquist metric.
    pub fn closed_form(&self, r: f64, theta: f64, sigma: f64) -> Mat4 {
        let p = &self.params;
        let a = p.a;
        let s2 = theta.sin().powi(2);
        let dr = p.delta_r(r);
        let dth = p.delta_theta(theta);
        let rho2 = p.rho2(r, theta);
        let big_a = (1.0 + p.alpha).powi(2) * rho2;
        let ra = r * r + a * a;
        let pp = dr / big_a;
        let q = sigma / (1.0 + p.alpha);
        let one_minus = 1.0 - sigma * sigma;
        let s = if one_minus == 0.0 { 0.0 } else { -rho2 * one_minus / dr };
        let u = dth * s2 / big_a;
        let mut g = ZERO4;
        g[0][0] = pp - u * a * a;
        g[0][3] = -pp * a * s2 + u * a * ra;
        g[3][3] = pp * a * a * s2 * s2 - u * ra * ra;
        g[0][1] = q;
        g[1][3] = -q * a * s2;
        g[1][1] = s;
        g[2][2] = -rho2 / dth;
        g[3][0] = g[0][3];
        g[1][0] = g[0][1];
        g[3][1] = g[1][3];
        g
    }

    /// Kerr-star components at any `r` of the extended domain.
    pub fn star_components(&self, r: f64, theta: f64) -> Mat4 {
        self.closed_form(r, theta, self.transition.sigma(r))
    }

    pub fn shifted_components(&self, r: f64, theta: f64) -> Mat4 {
        let mut j = identity4();
        j[0][1] = self.shift.h_prime(r);
        congruence4(&j, &self.star_components(r, theta))
    }

    /// Inverse of [`KerrDeSitter::closed_form`], in closed form.
    pub fn closed_form_inverse(&self, r: f64, theta: f64, sigma: f64) -> Mat4 {
        let p = &self.params;
        let a = p.a;
        let s2 = theta.sin().powi(2);
        let dr = p.delta_r(r);
        let dth = p.delta_theta(theta);
        let rho2 = p.rho2(r, theta);
        let ra = r * r + a * a;
        let k2 = (1.0 + p.alpha).powi(2);
        let one_minus = 1.0 - sigma * sigma;
        // (1 − σ²)/Δ_r, which vanishes identically in the collars.
        let band = if one_minus == 0.0 { 0.0 } else { one_minus / dr };
        let mut gi = ZERO4;
        gi[0][0] = k2 * (band * ra * ra - a * a * s2 / dth) / rho2;
        gi[0][1] = (1.0 + p.alpha) * sigma * ra / rho2;
        gi[0][3] = k2 * (band * ra * a - a / dth) / rho2;
        gi[1][1] = -dr / rho2;
        gi[1][3] = (1.0 + p.alpha) * sigma * a / rho2;
        gi[2][2] = -dth / rho2;
        gi[3][3] = k2 * (band * a * a - 1.0 / (dth * s2)) / rho2;
        gi[1][0] = gi[0][1];
        gi[3][0] = gi[0][3];
        gi[3][1] = gi[1][3];
        gi
    }

    pub fn star_inverse(&self, r: f64, theta: f64) -> Mat4 {
        self.closed_form_inverse(r, theta, self.transition.sigma(r))
    }

    /// Contravariant components in the `(τ, r, θ, φ_+)` chart.
    pub fn shifted_inverse(&self, r: f64, theta: f64) -> Mat4 {
        let k = self.star_inverse(r, theta);
        let hp = self.shift.h_prime(r);
        let mut gi = k;
        gi[0][0] = k[0][0] - 2.0 * hp * k[0][1] + hp * hp * k[1][1];
        gi[0][1] = k[0][1] - hp * k[1][1];
        gi[0][3] = k[0][3] - hp * k[1][3];
        gi[1][0] = gi[0][1];
        gi[3][0] = gi[0][3];
        gi
    }

    /// `√|det g| = ρ² sinθ/(1+α)²`, the same in every chart.
    pub fn volume_density(&self, r: f64, theta: f64) -> f64 {
        self.params.rho2(r, theta) * theta.sin() / (1.0 + self.params.alpha).powi(2)
    }

    /// `g(∂_t, ∂_t)`; negative inside the ergoregions.
    pub fn ergosphere_indicator(&self, r: f64, theta: f64) -> f64 {
        self.bl_components(r, theta)[0][0]
    }

    /// Angular velocity `a/(r_h² + a²)` of the horizon at `r_h`.
    pub fn horizon_angular_velocity(&self, r_h: f64) -> f64 {
        let a = self.params.a;
        a / (r_h * r_h + a * a)
    }

    /// Proportionality constant `κ` in `∇_ξ ξ = κ ξ` at the horizon `r_h`,
    /// checked at several polar angles.
    pub fn horizon_acceleration(&self, r_h: f64) -> Result<f64> {
        const TOL: f64 = 1e-6;
        let star = self.in_chart(Chart::KerrStar);
        let xi = [1.0, 0.0, 0.0, self.horizon_angular_velocity(r_h)];
        let mut kappa = None::<f64>;
        for theta in [0.45, 1.1, 0.5 * PI, 2.3] {
            let gamma = christoffel(&star, r_h, theta)?;
            let mut acc = [0.0; 4];
            for (mu, a) in acc.iter_mut().enumerate() {
                for nu in 0..4 {
                    for s in 0..4 {
                        *a += gamma[mu][nu][s] * xi[nu] * xi[s];
                    }
                }
            }
            let xx: f64 = xi.iter().map(|v| v * v).sum();
            let c = (0..4).map(|i| acc[i] * xi[i]).sum::<f64>() / xx;
            let res: f64 = (0..4).map(|i| (acc[i] - c * xi[i]).powi(2)).sum::<f64>().sqrt();
            let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            if res / norm > TOL {
                return Err(Error::NotProportional { residual: res / norm });
            }
            match kappa {
                None => kappa = Some(c),
                Some(k) if (k - c).abs() > TOL * k.abs() => {
                    return Err(Error::NotProportional { residual: (k - c).abs() / k.abs() });
                }
                _ => {}
            }
        }
        kappa.ok_or(Error::NoConvergence("surface gravity"))
    }
}

impl MetricProvider for KerrDeSitter {
    fn chart(&self) -> Chart {
        self.chart
    }

    fn metric(&self, r: f64, theta: f64) -> Mat4 {
        match self.chart {
            Chart::BoyerLindquist => self.bl_components(r, theta),
            Chart::KerrStar => self.star_components(r, theta),
            _ => self.shifted_components(r, theta),
        }
    }

    fn inverse_metric(&self, r: f64, theta: f64) -> Result<Mat4> {
        Ok(match self.chart {
            Chart::BoyerLindquist => self.closed_form_inverse(r, theta, 0.0),
            Chart::KerrStar => self.star_inverse(r, theta),
            _ => self.shifted_inverse(r, theta),
        })
    }

    fn sqrt_det(&self, r: f64, theta: f64) -> f64 {
        self.volume_density(r, theta)
    }
}
