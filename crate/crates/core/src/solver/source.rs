use crate::numerics::smooth::Bump;
use crate::numerics::special::assoc_legendre;
use crate::spacetime::BlackHoleParams;
use crate::{Error, Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Declared support of a source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// Inside the core `K_δ = {r_- + δ < r < r_+ − δ}`.
    InsideKDelta,
    General,
}

/// Angular factor of a separable source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularProfile {
    /// Normalized associated Legendre function `P̄_l^{|m|}(cos θ)`.
    Legendre { l: u32 },
    /// `exp(−((θ − θ0)/w)²)`.
    Gaussian { center: f64, width: f64 },
}

impl AngularProfile {
    pub fn value(&self, m: i32, theta: f64) -> f64 {
        match *self {
            AngularProfile::Legendre { l } => {
                let am = m.unsigned_abs() as usize;
                let l = l as usize;
                if l < am {
                    return 0.0;
                }
                let (p, _) = assoc_legendre(l, am, theta.cos());
                p[l - am]
            }
            AngularProfile::Gaussian { center, width } => {
                let x = (theta - center) / width;
                (-x * x).exp()
            }
        }
    }
}

/// Separable smooth source `f_m(t, r, θ) = A · b_t(t) · b_r(r) · Θ(θ)` for
/// the azimuthal mode `m`, where `b_t`, `b_r` are compact bumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub m: i32,
    pub amplitude: C64,
    pub time: Bump,
    pub radial: Bump,
    pub angular: AngularProfile,
    pub support: Support,
}

impl SourceSpec {
    pub fn new(
        m: i32,
        amplitude: C64,
        time: (f64, f64),
        radial: (f64, f64),
        angular: AngularProfile,
        support: Support,
    ) -> Result<Self> {
        if !(time.1 > time.0) {
            return Err(Error::InvalidParameter { name: "source_t", reason: "time window must be non-empty" });
        }
        if !(radial.1 > radial.0) {
            return Err(Error::InvalidParameter { name: "source_r", reason: "radial window must be non-empty" });
        }
        if let AngularProfile::Legendre { l } = angular {
            if (l as i64) < m.unsigned_abs() as i64 {
                return Err(Error::InvalidParameter { name: "source_l", reason: "l must be at least |m|" });
            }
        }
        Ok(Self {
            m,
            amplitude,
            time: Bump::new(time.0, time.1),
            radial: Bump::new(radial.0, radial.1),
            angular,
            support,
        })
    }

    /// Checks the declared support against the geometry.
    pub fn validate(&self, p: &BlackHoleParams) -> Result<()> {
        if self.support == Support::InsideKDelta
            && !(self.radial.lo >= p.r_minus() + p.delta && self.radial.hi <= p.r_plus() - p.delta)
        {
            return Err(Error::InvalidParameter {
                name: "source_r",
                reason: "source is declared inside K_delta but is not",
            });
        }
        Ok(())
    }

    pub fn start(&self) -> f64 {
        self.time.lo
    }

    pub fn end(&self) -> f64 {
        self.time.hi
    }

    pub fn value(&self, t: f64, r: f64, theta: f64) -> C64 {
        let bt = self.time.value(t);
        if bt == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let br = self.radial.value(r);
        if br == 0.0 {
            return C64::new(0.0, 0.0);
        }
        self.amplitude * (bt * br * self.angular.value(self.m, theta))
    }
}
