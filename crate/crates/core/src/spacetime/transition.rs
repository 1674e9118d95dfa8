// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use super::params::BlackHoleParams;
use crate::numerics::quad::GaussLegendre;
use crate::numerics::smooth::{smoothstep, smoothstep_derivative};

const BAND_PANELS: usize = 16;
const BAND_NODES: usize = 24;

/// The functions `F_t`, `F_φ` defining the Kerr-star chart.
///
/// With a smooth switch `σ(r)` equal to `−1` on `r ≤ r_- + ε` and `+1` on
/// `r ≥ r_+ − ε`,
///
/// ```text
/// F_t'(r) = σ(r) (1+α)(r²+a²)/Δ_r,    F_φ'(r) = σ(r) (1+α) a/Δ_r.
/// ```
///
/// The antiderivatives are evaluated in closed form through the partial
/// fraction expansion of `1/Δ_r`, with a quadrature over the switching band
/// only. Both vanish at the middle of the band.
#[derive(Debug, Clone)]
pub struct ChartTransition {
    params: BlackHoleParams,
    lo: f64,
    hi: f64,
    roots: [f64; 4],
    /// Partial-fraction weights of `(r²+a²)/Δ_r` and `1/Δ_r`.
    ct: [f64; 4],
    cphi: [f64; 4],
    rule: GaussLegendre,
}

impl ChartTransition {
    pub fn new(p: &BlackHoleParams) -> Self {
        let roots = p.roots();
        let dd = p.delta_r_prime_at_roots();
        let mut ct = [0.0; 4];
        let mut cphi = [0.0; 4];
        for i in 0..4 {
            ct[i] = (roots[i] * roots[i] + p.a * p.a) / dd[i];
            cphi[i] = 1.0 / dd[i];
        }
        Self {
            params: *p,
            lo: p.r_minus() + p.epsilon,
            hi: p.r_plus() - p.epsilon,
            roots,
            ct,
            cphi,
            rule: GaussLegendre::new(BAND_NODES),
        }
    }

    /// The switching band `[r_- + ε, r_+ − ε]` outside which `σ = ±1`.
    pub fn band(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn sigma(&self, r: f64) -> f64 {
        switch(self.lo, self.hi, r)
    }

    pub fn sigma_prime(&self, r: f64) -> f64 {
        2.0 * smoothstep_derivative((r - self.lo) / (self.hi - self.lo)) / (self.hi - self.lo)
    }

    pub fn ft_prime(&self, r: f64) -> f64 {
        let p = &self.params;
        self.sigma(r) * (1.0 + p.alpha) * (r * r + p.a * p.a) / p.delta_r(r)
    }

    pub fn fphi_prime(&self, r: f64) -> f64 {
        let p = &self.params;
        self.sigma(r) * (1.0 + p.alpha) * p.a / p.delta_r(r)
    }

    fn log_sum(&self, c: &[f64; 4], r: f64) -> f64 {
        (1.0 + self.params.alpha)
            * (0..4).map(|i| if c[i] == 0.0 { 0.0 } else { c[i] * (r - self.roots[i]).abs().ln() }).sum::<f64>()
    }

    /// `∫_{mid}^r σ' L` over the part of `[mid, r]` inside the band.
    fn band_integral(&self, c: &[f64; 4], r: f64) -> f64 {
        let mid = 0.5 * (self.lo + self.hi);
        let end = r.clamp(self.lo, self.hi);
        if end == mid {
            0.0
        } else {
            self.rule.composite(mid, end, BAND_PANELS, |s| self.sigma_prime(s) * self.log_sum(c, s))
        }
    }

    fn antiderivative(&self, c: &[f64; 4], scale: f64, r: f64) -> f64 {
        // ∫_{mid}^r σ L' = σ(r) L(r) − ∫_{mid}^r σ' L, since σ(mid) = 0.
        scale * (self.sigma(r) * self.log_sum(c, r) - self.band_integral(c, r))
    }

    /// `F_t(r)` on `(r_-, r_+)`.
    pub fn ft(&self, r: f64) -> f64 {
        self.antiderivative(&self.ct, 1.0, r)
    }

    /// `F_φ(r)` on `(r_-, r_+)`.
    pub fn fphi(&self, r: f64) -> f64 {
        self.antiderivative(&self.cphi, self.params.a, r)
    }

    /// `(F_t, F_φ)` minus their logarithmic terms at root `k` (2 for `r_-`,
    /// 3 for `r_+`), i.e. minus `σ(r)(1+α)c_k ln|r − r_k|` times the scale.
    /// Finite at that horizon and valid on both sides of it.
    pub fn without_log(&self, r: f64, k: usize) -> (f64, f64) {
        let drop = |c: &[f64; 4], scale: f64| {
            let mut reduced = *c;
            reduced[k] = 0.0;
            scale * (self.sigma(r) * self.log_sum(&reduced, r) - self.band_integral(c, r))
        };
        (drop(&self.ct, 1.0), drop(&self.cphi, self.params.a))
    }
}

fn switch(lo: f64, hi: f64, r: f64) -> f64 {
    2.0 * smoothstep((r - lo) / (hi - lo)) - 1.0
}

/// Additional time shift `τ = t_+ − H(r)` with `H' = −η σ(r)`, making
/// `dτ` timelike on the whole extended domain.
#[derive(Debug, Clone)]
pub struct SliceShift {
    pub eta: f64,
    lo: f64,
    hi: f64,
    rule: GaussLegendre,
}

impl SliceShift {
    pub fn new(transition: &ChartTransition, eta: f64) -> Self {
        let (lo, hi) = transition.band();
        Self { eta, lo, hi, rule: GaussLegendre::new(BAND_NODES) }
    }

    pub fn h_prime(&self, r: f64) -> f64 {
        -self.eta * switch(self.lo, self.hi, r)
    }

    /// `H(r)`, zero at the middle of the switching band.
    pub fn h(&self, r: f64) -> f64 {
        let mid = 0.5 * (self.lo + self.hi);
        let end = r.clamp(self.lo, self.hi);
        let band =
            if end == mid { 0.0 } else { self.rule.composite(mid, end, BAND_PANELS, |s| switch(self.lo, self.hi, s)) };
        // σ = ±1 outside the band, so both tails contribute |r − edge|.
        let tail = if r > self.hi {
            r - self.hi
        } else if r < self.lo {
            self.lo - r
        } else {
            0.0
        };
        -self.eta * (band + tail)
    }
}
