// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use super::metric::KerrDeSitter;
use crate::numerics::roots::bisect;
use crate::{Error, Result};

/// Physical configuration of a Kerr–de Sitter black hole together with the
/// widths of the horizon extension (`delta`) and of the chart-transition
/// collars (`epsilon`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackHoleParams {
    pub m0: f64,
    pub lambda: f64,
    pub a: f64,
    /// `Λa²/3`.
    pub alpha: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// Roots of Δ_r in increasing order: `r_n < r_0 ≤ r_- < r_+`.
    roots: [f64; 4],
}

/// Default horizon-extension width as a fraction of `r_+ − r_-`.
pub const DEFAULT_DELTA_FRACTION: f64 = 0.04;
/// Default transition-collar width as a fraction of `r_+ − r_-`.
pub const DEFAULT_EPSILON_FRACTION: f64 = 0.1;

impl BlackHoleParams {
    /// Parameters with the default widths.
    pub fn new(m0: f64, lambda: f64, a: f64) -> Result<Self> {
        Self::with_widths(m0, lambda, a, None, None)
    }

    /// Parameters with optional explicit widths; `None` selects the default
    /// fraction of the horizon separation.
    pub fn with_widths(m0: f64, lambda: f64, a: f64, delta: Option<f64>, epsilon: Option<f64>) -> Result<Self> {
        if !(m0.is_finite() && m0 > 0.0) {
            return Err(Error::InvalidParameter { name: "M0", reason: "must be finite and positive" });
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::NotAdmissible("a cosmological horizon requires Lambda > 0"));
        }
        if !a.is_finite() {
            return Err(Error::InvalidParameter { name: "a", reason: "must be finite" });
        }
        let roots = delta_roots(m0, lambda, a)?;
        let width = roots[3] - roots[2];
        let delta = delta.unwrap_or(DEFAULT_DELTA_FRACTION * width);
        let epsilon = epsilon.unwrap_or(DEFAULT_EPSILON_FRACTION * width);
        if !(delta > 0.0 && delta < width / 8.0) {
            return Err(Error::InvalidParameter { name: "delta", reason: "must lie in (0, (r_+ - r_-)/8)" });
        }
        if !(epsilon > 0.0 && epsilon < width / 8.0) {
            return Err(Error::InvalidParameter { name: "epsilon", reason: "must lie in (0, (r_+ - r_-)/8)" });
        }
        if roots[2] - delta <= roots[1].max(0.0) {
            return Err(Error::InvalidParameter { name: "delta", reason: "extended domain reaches the inner horizon" });
        }
        Ok(Self { m0, lambda, a, alpha: lambda * a * a / 3.0, delta, epsilon, roots })
    }

    pub fn r_minus(&self) -> f64 {
        self.roots[2]
    }

    pub fn r_plus(&self) -> f64 {
        self.roots[3]
    }

    /// All four roots of Δ_r, increasing.
    pub fn roots(&self) -> [f64; 4] {
        self.roots
    }

    pub fn delta_r(&self, r: f64) -> f64 {
        delta_r(self, r)
    }

    pub fn delta_r_prime(&self, r: f64) -> f64 {
        delta_r_prime(self, r)
    }

    /// Δ_r'(r_i) at each root, from the factored form.
    pub fn delta_r_prime_at_roots(&self) -> [f64; 4] {
        let c4 = -self.lambda / 3.0;
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            let mut p = c4;
            for j in 0..4 {
                if j != i {
                    p *= self.roots[i] - self.roots[j];
                }
            }
            *o = p;
        }
        out
    }

    pub fn delta_theta(&self, theta: f64) -> f64 {
        let c = theta.cos();
        1.0 + self.alpha * c * c
    }

    pub fn rho2(&self, r: f64, theta: f64) -> f64 {
        let c = theta.cos();
        r * r + self.a * self.a * c * c
    }

    /// Domain of outer communications `r_- < r < r_+`.
    pub fn in_exterior(&self, r: f64) -> bool {
        r > self.r_minus() && r < self.r_plus()
    }

    /// Extended domain `M_δ`.
    pub fn in_extended(&self, r: f64) -> bool {
        r >= self.r_minus() - self.delta && r <= self.r_plus() + self.delta
    }

    /// Compact core `K_δ` scaled by `k`: `r_- + kδ < r < r_+ − kδ`.
    pub fn in_core(&self, r: f64, k: f64) -> bool {
        r > self.r_minus() + k * self.delta && r < self.r_plus() - k * self.delta
    }
}

/// `Δ_r = (r²+a²)(1 − Λr²/3) − 2M₀r`.
pub fn delta_r(p: &BlackHoleParams, r: f64) -> f64 {
    delta_r_raw(p.m0, p.lambda, p.a, r)
}

pub fn delta_r_prime(p: &BlackHoleParams, r: f64) -> f64 {
    let l3 = p.lambda / 3.0;
    2.0 * r * (1.0 - l3 * r * r) - (r * r + p.a * p.a) * 2.0 * l3 * r - 2.0 * p.m0
}

/// Δ_r from raw parameters, without admissibility checks.
pub fn delta_r_raw(m0: f64, lambda: f64, a: f64, r: f64) -> f64 {
    (r * r + a * a) * (1.0 - lambda * r * r / 3.0) - 2.0 * m0 * r
}

fn delta_roots(m0: f64, lambda: f64, a: f64) -> Result<[f64; 4]> {
    const SAMPLES: usize = 20_000;
    let f = |r: f64| delta_r_raw(m0, lambda, a, r);
    let r_max = (3.0 / lambda).sqrt();
    let h = r_max / SAMPLES as f64;
    // Sign changes on (0, r_max]; Δ_r(r_max) < 0 and Δ_r < 0 beyond.
    let mut r_minus = None;
    let mut r_plus = None;
    let mut r_inner = None;
    let mut prev_r = if a == 0.0 { h * 1e-6 } else { 0.0 };
    let mut prev = f(prev_r);
    for k in 1..=SAMPLES {
        let r = k as f64 * h;
        let v = f(r);
        if prev > 0.0 && v <= 0.0 {
            let root = bisect(f, prev_r, r, 0.0).ok_or(Error::NoRoot)?;
            if r_minus.is_some() {
                r_plus = Some(root);
            } else if r_inner.is_none() {
                r_inner = Some(root);
            }
        } else if prev <= 0.0 && v > 0.0 && r_minus.is_none() {
            r_minus = Some(bisect(f, prev_r, r, 0.0).ok_or(Error::NoRoot)?);
        }
        prev = v;
        prev_r = r;
    }
    let (Some(rm), Some(rp)) = (r_minus, r_plus) else {
        return Err(Error::NotAdmissible(
            "Delta_r has no pair of positive roots enclosing a region where it is positive",
        ));
    };
    let r0 = if a == 0.0 { 0.0 } else { r_inner.ok_or(Error::NotAdmissible("missing inner root of Delta_r"))? };
    let rn = -(r0 + rm + rp);
    let dm = {
        let l3 = lambda / 3.0;
        move |r: f64| 2.0 * r * (1.0 - l3 * r * r) - (r * r + a * a) * 2.0 * l3 * r - 2.0 * m0
    };
    let scale = 1.0 + 2.0 * m0;
    if dm(rm) <= 1e-8 * scale || dm(rp) >= -1e-8 * scale {
        return Err(Error::NotAdmissible("horizons are degenerate"));
    }
    Ok([rn, r0, rm, rp])
}

/// Horizon radii, Δ_r' there and the surface gravities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonGeometry {
    pub r_minus: f64,
    pub r_plus: f64,
    pub d_delta_minus: f64,
    pub d_delta_plus: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    pub alpha: f64,
}

pub fn find_horizons(params: &BlackHoleParams) -> Result<HorizonGeometry> {
    let (kappa_minus, kappa_plus) = surface_gravity(params)?;
    Ok(HorizonGeometry {
        r_minus: params.r_minus(),
        r_plus: params.r_plus(),
        d_delta_minus: params.delta_r_prime(params.r_minus()),
        d_delta_plus: params.delta_r_prime(params.r_plus()),
        kappa_minus,
        kappa_plus,
        alpha: params.alpha,
    })
}

/// Surface gravities `(κ_-, κ_+)` from `∇_ξ ξ = κ ξ` on each horizon, where
/// `ξ = ∂_t + Ω ∂_φ` is the null generator, `Ω = a/(r_h² + a²)`. For `a = 0`
/// the generator is `∂_t`.
pub fn surface_gravity(params: &BlackHoleParams) -> Result<(f64, f64)> {
    let kds = KerrDeSitter::new(*params)?;
    let km = kds.horizon_acceleration(params.r_minus())?;
    let kp = kds.horizon_acceleration(params.r_plus())?;
    Ok((km, kp))
}
