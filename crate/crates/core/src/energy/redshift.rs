use alloc::vec::Vec;
use core::f64::consts::PI;

use super::deformation::{deformation_k, negdef_margin, VectorField};
use crate::numerics::linalg::{bilinear4, Vec4};
use crate::spacetime::{BlackHoleParams, Chart, KerrDeSitter, MetricProvider, SliceShift};
use crate::{Error, Result};

/// Linear red-shift profile near each horizon `r_h = r_±`:
///
/// ```text
/// X_t = 1 ∓ slope·(r − r_h),    X_r = ±1 − bend·(r − r_h),
/// X = X_t ∂_{t_+} + X_r ∂_r   (Kerr-star components).
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RedshiftProfile {
    pub slope: f64,
    pub bend: f64,
}

impl RedshiftProfile {
    pub const DEFAULT_SLOPE_DELTAS: f64 = 0.75;
    pub const DEFAULT_BEND_DELTAS: f64 = 0.05;

    /// `slope = 0.75/δ`, `bend = 0.05/δ`.
    pub fn default_for(p: &BlackHoleParams) -> Self {
        Self { slope: Self::DEFAULT_SLOPE_DELTAS / p.delta, bend: Self::DEFAULT_BEND_DELTAS / p.delta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RedshiftComponent {
    /// `[r_- − δ, r_- + 2δ]`
    Lower,
    /// `[r_+ − 2δ, r_+ + δ]`
    Upper,
}

/// The red-shift multiplier on `M_δ ∖ K_{2δ}`.
#[derive(Debug, Clone)]
pub struct RedshiftField {
    params: BlackHoleParams,
    pub profile: RedshiftProfile,
    shift: SliceShift,
    chart: Chart,
}

/// Outcome of a successful certification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificationReport {
    pub samples: usize,
    /// `min(−λ_max(K^X))` over the samples.
    pub min_negativity: f64,
    /// `min g(X, X)`.
    pub min_norm: f64,
    /// `min dt_+(X)`.
    pub min_dt: f64,
    /// `min ±dr(X)`.
    pub min_dr: f64,
}

/// Default certification sample: `2 × 100 × 50 = 10⁴` points.
pub const CERT_SAMPLES_R: usize = 100;
pub const CERT_SAMPLES_THETA: usize = 50;

const NEGDEF_TOL: f64 = 1e-10;

impl RedshiftField {
    /// The field has no transition data of its own, so its domain must lie
    /// inside the collars where the Kerr-star metric takes its closed
    /// near-horizon form; this needs `2δ < ε`.
    pub fn new(kds: &KerrDeSitter, profile: RedshiftProfile) -> Result<Self> {
        let p = *kds.params();
        if 2.0 * p.delta >= p.epsilon {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "red-shift region must lie inside the transition collars (2 delta < epsilon)",
            });
        }
        if !(profile.slope >= 0.0 && profile.bend.is_finite() && profile.slope.is_finite()) {
            return Err(Error::InvalidParameter { name: "redshift_slope", reason: "must be finite and non-negative" });
        }
        Ok(Self { params: p, profile, shift: kds.shift().clone(), chart: Chart::KerrStar })
    }

    /// Same field with components expressed in `chart` (Kerr-star or shifted
    /// Kerr-star).
    pub fn in_chart(&self, chart: Chart) -> Self {
        assert!(matches!(chart, Chart::KerrStar | Chart::ShiftedKerrStar));
        Self { chart, ..self.clone() }
    }

    pub fn params(&self) -> &BlackHoleParams {
        &self.params
    }

    pub fn component(&self, r: f64) -> Option<RedshiftComponent> {
        let p = &self.params;
        let d = p.delta;
        if r >= p.r_minus() - d && r <= p.r_minus() + 2.0 * d {
            Some(RedshiftComponent::Lower)
        } else if r >= p.r_plus() - 2.0 * d && r <= p.r_plus() + d {
            Some(RedshiftComponent::Upper)
        } else {
            None
        }
    }

    pub fn range(&self, c: RedshiftComponent) -> (f64, f64) {
        let p = &self.params;
        match c {
            RedshiftComponent::Lower => (p.r_minus() - p.delta, p.r_minus() + 2.0 * p.delta),
            RedshiftComponent::Upper => (p.r_plus() - 2.0 * p.delta, p.r_plus() + p.delta),
        }
    }

    fn horizon(&self, r: f64) -> (f64, f64) {
        let p = &self.params;
        if r < 0.5 * (p.r_minus() + p.r_plus()) {
            (p.r_minus(), -1.0)
        } else {
            (p.r_plus(), 1.0)
        }
    }

    /// `(X_t, X_r)` in Kerr-star components.
    pub fn kerr_star_components(&self, r: f64) -> (f64, f64) {
        let (rh, sign) = self.horizon(r);
        let x = r - rh;
        (1.0 - sign * self.profile.slope * x, sign - self.profile.bend * x)
    }

    /// Scans `n_r × n_θ` points of each component; returns the first
    /// violation or a report.
    pub fn certify(&self, kds: &KerrDeSitter, n_r: usize, n_theta: usize) -> Result<CertificationReport> {
        let mut points = Vec::with_capacity(2 * n_r * n_theta);
        for c in [RedshiftComponent::Lower, RedshiftComponent::Upper] {
            let (lo, hi) = self.range(c);
            for i in 0..n_r {
                let r = lo + (hi - lo) * i as f64 / (n_r.max(2) - 1) as f64;
                points.extend((0..n_theta).map(|j| (r, PI * (j as f64 + 0.5) / n_theta as f64)));
            }
        }
        self.certify_at(kds, &points)
    }

    /// Certifies at arbitrary `(r, θ)` points of `M_δ ∖ K_{2δ}`; a point
    /// outside that region is an `InvalidParameter` error.
    pub fn certify_at(&self, kds: &KerrDeSitter, points: &[(f64, f64)]) -> Result<CertificationReport> {
        let star = kds.in_chart(Chart::KerrStar);
        let x = self.in_chart(Chart::KerrStar);
        let mut rep = CertificationReport {
            samples: 0,
            min_negativity: f64::INFINITY,
            min_norm: f64::INFINITY,
            min_dt: f64::INFINITY,
            min_dr: f64::INFINITY,
        };
        for &(r, theta) in points {
            let sign = match self.component(r) {
                Some(RedshiftComponent::Lower) => -1.0,
                Some(RedshiftComponent::Upper) => 1.0,
                None => {
                    return Err(Error::InvalidParameter {
                        name: "r",
                        reason: "sample point outside the red-shift region",
                    })
                }
            };
            let xv = x.at(r, theta);
            let g = star.metric(r, theta);
            let norm = bilinear4(&g, &xv, &xv);
            if !(norm > 0.0) {
                return Err(Error::CertificationFailed { r, theta, property: "X is not timelike" });
            }
            if !(xv[0] > 0.0) {
                return Err(Error::CertificationFailed { r, theta, property: "dt_+(X) is not positive" });
            }
            if !(sign * xv[1] > 0.0) {
                return Err(Error::CertificationFailed { r, theta, property: "dr(X) has the wrong sign" });
            }
            let k = deformation_k(&star, &x, r, theta)?;
            let lam = negdef_margin(&k.k, &g);
            if !(lam < -NEGDEF_TOL) {
                return Err(Error::CertificationFailed { r, theta, property: "K^X is not negative definite" });
            }
            rep.samples += 1;
            rep.min_negativity = rep.min_negativity.min(-lam);
            rep.min_norm = rep.min_norm.min(norm);
            rep.min_dt = rep.min_dt.min(xv[0]);
            rep.min_dr = rep.min_dr.min(sign * xv[1]);
        }
        Ok(rep)
    }

    /// Smallest slope (to `tol`) for which the profile with the current
    /// bend certifies, searched on `[0, 1/δ)`; `None` if none does.
    pub fn slope_threshold(&self, kds: &KerrDeSitter, n_r: usize, n_theta: usize, tol: f64) -> Option<f64> {
        let passes = |s: f64| {
            let f = Self { profile: RedshiftProfile { slope: s, ..self.profile }, ..self.clone() };
            f.certify(kds, n_r, n_theta).is_ok()
        };
        let mut hi = (1.0 - 1e-9) / self.params.delta;
        if !passes(hi) {
            return None;
        }
        let mut lo = 0.0;
        if passes(lo) {
            return Some(0.0);
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if passes(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

impl VectorField for RedshiftField {
    fn chart(&self) -> Chart {
        self.chart
    }

    fn at(&self, r: f64, _theta: f64) -> Vec4 {
        let (xt, xr) = self.kerr_star_components(r);
        match self.chart {
            // τ = t_+ − H(r): X^τ = X^t − H' X^r.
            Chart::ShiftedKerrStar => [xt - self.shift.h_prime(r) * xr, xr, 0.0, 0.0],
            _ => [xt, xr, 0.0, 0.0],
        }
    }
}

/// Builds the red-shift field with the default profile and certifies it on
/// the default sample.
pub fn redshift_field(kds: &KerrDeSitter) -> Result<RedshiftField> {
    let f = RedshiftField::new(kds, RedshiftProfile::default_for(kds.params()))?;
    f.certify(kds, CERT_SAMPLES_R, CERT_SAMPLES_THETA)?;
    Ok(f)
}
