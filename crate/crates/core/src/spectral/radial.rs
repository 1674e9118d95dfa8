use alloc::vec;
use alloc::vec::Vec;

use super::angular::{AngularMode, AngularProblem, DEFAULT_BASIS};
use crate::numerics::poly::{self, Poly};
use crate::numerics::special::recip_gamma;
use crate::spacetime::{BlackHoleParams, KerrDeSitter};
use crate::{Error, Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Fraction of the convergence radius at which a local expansion hands
/// over to the next one.
const STEP_FRACTION: f64 = 0.5;
/// Largest `|ξ|` at which a stored expansion is evaluated.
const EVAL_FRACTION: f64 = 0.6;
const MAX_TERMS: usize = 6000;
const SERIES_TOL: f64 = 1e-18;
const NEWTON_MAX_ITER: usize = 60;
/// Largest positive imaginary part accepted as round-off of a real mode.
pub const UNSTABLE_TOL: f64 = 1e-9;

/// The radial equation `P_r R + λR = 0` at fixed `(ω, λ, m)`:
///
/// ```text
/// Δ² R'' + Δ Δ' R' + [(1+α)² K² − λΔ] R = 0,    K = (r²+a²)ω − am,
/// ```
///
/// with real Δ-polynomial coefficients, so every local expansion is exact
/// polynomial arithmetic.
#[derive(Debug, Clone)]
pub struct RadialProblem {
    params: BlackHoleParams,
    pub omega: C64,
    pub lambda: C64,
    pub m: i32,
    delta: Poly,
    k2: Poly,
    p2: Poly,
    p1: Poly,
    p0: Poly,
}

/// Which horizon a Frobenius expansion is centred on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `r_-`, with `σ = −1`.
    Lower,
    /// `r_+`, with `σ = +1`.
    Upper,
}

impl Side {
    fn root_index(self) -> usize {
        match self {
            Side::Lower => 2,
            Side::Upper => 3,
        }
    }

    fn sigma(self) -> f64 {
        match self {
            Side::Lower => -1.0,
            Side::Upper => 1.0,
        }
    }
}

/// A local power series `|x|^s Σ c_n ξ^n` with `x = r − center = scale·ξ`
/// (`s = 0` for ordinary points), usable on `[lo, hi]`.
#[derive(Debug, Clone)]
struct Patch {
    center: f64,
    scale: f64,
    exponent: C64,
    coeffs: Vec<C64>,
    lo: f64,
    hi: f64,
}

impl Patch {
    /// `(S, dS/dr)` of the series part, without the power prefactor.
    fn series(&self, r: f64) -> (C64, C64) {
        let xi = (r - self.center) / self.scale;
        let mut s = C64::new(0.0, 0.0);
        let mut ds = C64::new(0.0, 0.0);
        for (n, c) in self.coeffs.iter().enumerate().rev() {
            s = s * xi + *c;
            if n > 0 {
                ds = ds * xi + *c * n as f64;
            }
        }
        (s, ds / self.scale)
    }

    /// `(R, R')`.
    fn eval(&self, r: f64) -> (C64, C64) {
        let (s, ds) = self.series(r);
        if self.exponent == C64::new(0.0, 0.0) {
            return (s, ds);
        }
        let x = r - self.center;
        let pw = (self.exponent * x.abs().ln()).exp();
        (pw * s, pw * (s * self.exponent / x + ds))
    }
}

/// Values at the matching radius and the normalized Wronskian.
#[derive(Debug, Clone, Copy)]
pub struct Matching {
    /// `F(ω) = Δ(r_m)(y_- y_+' − y_-' y_+)`; entire in `ω` for fixed `λ`.
    pub value: C64,
    /// `|W| L / ((|y_-| + L|y_-'|)(|y_+| + L|y_+'|))` with `L = r_+ − r_-`.
    pub residual: f64,
    pub r_match: f64,
}

impl RadialProblem {
    pub fn new(params: &BlackHoleParams, omega: C64, lambda: C64, m: i32) -> Result<Self> {
        if !(omega.re.is_finite() && omega.im.is_finite() && lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::InvalidParameter { name: "omega", reason: "must be finite" });
        }
        let dd = params.delta_r_prime_at_roots();
        let scale = params.r_plus() - params.r_minus();
        if dd[2].abs() < 1e-10 * scale || dd[3].abs() < 1e-10 * scale {
            return Err(Error::DegenerateHorizon);
        }
        let (a, l3) = (params.a, params.lambda / 3.0);
        let delta = poly::from_real(&[a * a, -2.0 * params.m0, 1.0 - l3 * a * a, 0.0, -l3]);
        let ddelta = poly::derivative(&delta);
        let k = [omega * (a * a) - a * m as f64, C64::new(0.0, 0.0), omega];
        let k2 = poly::mul(&k, &k);
        let c = (1.0 + params.alpha) * (1.0 + params.alpha);
        let p0 = poly::add(&poly::scale(&k2, C64::new(c, 0.0)), &poly::scale(&delta, -lambda));
        Ok(Self {
            params: *params,
            omega,
            lambda,
            m,
            p2: poly::mul(&delta, &delta),
            p1: poly::mul(&delta, &ddelta),
            p0,
            delta,
            k2,
        })
    }

    pub fn params(&self) -> &BlackHoleParams {
        &self.params
    }

    fn k_at(&self, r: f64) -> C64 {
        let a = self.params.a;
        self.omega * (r * r + a * a) - a * self.m as f64
    }

    /// Exponent `s` of the Kerr-star regular branch `R ~ |r − r_h|^s`:
    /// `s = iσ(1+α)K(r_h)/Δ'(r_h)`.
    pub fn exponent(&self, side: Side) -> C64 {
        let k = side.root_index();
        let rh = self.params.roots()[k];
        let dd = self.params.delta_r_prime_at_roots()[k];
        C64::new(0.0, side.sigma() * (1.0 + self.params.alpha) / dd) * self.k_at(rh)
    }

    /// Distance from `r` to the nearest root of Δ other than `skip`.
    fn clearance(&self, r: f64, skip: Option<usize>) -> f64 {
        let roots = self.params.roots();
        (0..4).filter(|&i| Some(i) != skip).map(|i| (r - roots[i]).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Frobenius series at a horizon, normalized by `c_0 = 1/Γ(1+2s)` so
    /// that the coefficients are entire in `ω`.
    fn frobenius(&self, side: Side) -> Patch {
        let k = side.root_index();
        let rh = self.params.roots()[k];
        let h = self.clearance(rh, Some(k));
        let d = poly::rescale_shift(&self.delta, rh, h);
        // q̃ = Δ/ξ; its constant term is hΔ'(r_h).
        let mut q: Poly = d[1..].to_vec();
        q[0] = C64::new(h * self.params.delta_r_prime_at_roots()[k], 0.0);
        let dq = poly::derivative(&q);
        let xdq: Poly = core::iter::once(C64::new(0.0, 0.0)).chain(dq).collect();
        let xq: Poly = core::iter::once(C64::new(0.0, 0.0)).chain(q.iter().copied()).collect();
        // x²Â R_xx + xB̂ R_x + Ĉ R = 0 in the scaled variable, with Δ = ξq̃:
        // Â = q̃², B̂ = q̃(q̃ + ξq̃'), Ĉ = h²[(1+α)²K² − λξq̃].
        let a_hat = poly::mul(&q, &q);
        let b_hat = poly::mul(&q, &poly::add(&q, &xdq));
        let k2 = poly::rescale_shift(&self.k2, rh, h);
        let alpha2 = (1.0 + self.params.alpha) * (1.0 + self.params.alpha);
        let c_hat = poly::scale(
            &poly::add(&poly::scale(&k2, C64::new(alpha2, 0.0)), &poly::scale(&xq, -self.lambda)),
            C64::new(h * h, 0.0),
        );
        let deg = a_hat.len().max(b_hat.len()).max(c_hat.len());
        let s = self.exponent(side);
        let q0 = q[0];
        let mut c = vec![recip_gamma(C64::new(1.0, 0.0) + s * 2.0)];
        let mut small = 0;
        for n in 1..MAX_TERMS {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=n.min(deg) {
                let nn = s + (n - j) as f64;
                let t = coef(&a_hat, j) * nn * (nn - 1.0) + coef(&b_hat, j) * nn + coef(&c_hat, j);
                acc += t * c[n - j];
            }
            // The indicial polynomial at s + n factors as q̃₀² n (n + 2s).
            let den = q0 * q0 * (n as f64) * (s * 2.0 + n as f64);
            let cn = if den == C64::new(0.0, 0.0) { C64::new(0.0, 0.0) } else { -acc / den };
            c.push(cn);
            if converged(&c, n) {
                small += 1;
                if small >= 4 && n >= 8 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        let reach = EVAL_FRACTION * h;
        Patch { center: rh, scale: h, exponent: s, coeffs: c, lo: rh - reach, hi: rh + reach }
    }

    /// Taylor series at an ordinary point from `(y, y')`.
    fn taylor(&self, center: f64, y: C64, dy: C64) -> Patch {
        let h = self.clearance(center, None);
        let p2 = poly::rescale_shift(&self.p2, center, h);
        let p1 = poly::scale(&poly::rescale_shift(&self.p1, center, h), C64::new(h, 0.0));
        let p0 = poly::scale(&poly::rescale_shift(&self.p0, center, h), C64::new(h * h, 0.0));
        let mut d = vec![y, dy * h];
        let mut small = 0;
        for n in 0..MAX_TERMS {
            // Coefficient of ξ^n in p2 y'' + p1 y' + p0 y.
            let mut acc = C64::new(0.0, 0.0);
            for (k, c) in p2.iter().enumerate().skip(1) {
                if k > n {
                    break;
                }
                let i = n - k + 2;
                acc += *c * d[i] * ((i * (i - 1)) as f64);
            }
            for (k, c) in p1.iter().enumerate() {
                if k > n {
                    break;
                }
                let i = n - k + 1;
                acc += *c * d[i] * i as f64;
            }
            for (k, c) in p0.iter().enumerate() {
                if k > n {
                    break;
                }
                acc += *c * d[n - k];
            }
            let next = -acc / (p2[0] * (((n + 2) * (n + 1)) as f64));
            d.push(next);
            if converged(&d, n + 2) {
                small += 1;
                if small >= 4 && n >= 8 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        let reach = EVAL_FRACTION * h;
        Patch { center, scale: h, exponent: C64::new(0.0, 0.0), coeffs: d, lo: center - reach, hi: center + reach }
    }

    /// Regular solution from one horizon, continued to `r_m`.
    fn chain(&self, side: Side, r_m: f64) -> Vec<Patch> {
        let f = self.frobenius(side);
        let dir = -side.sigma();
        let mut at = f.center + dir * STEP_FRACTION * f.scale;
        let (mut y, mut dy) = f.eval(at);
        let mut out = vec![f];
        loop {
            let p = self.taylor(at, y, dy);
            let step = STEP_FRACTION * p.scale;
            if (r_m - at) * dir <= step {
                out.push(p);
                return out;
            }
            at += dir * step;
            (y, dy) = p.eval(at);
            out.push(p);
        }
    }

    fn default_match(&self) -> f64 {
        0.5 * (self.params.r_minus() + self.params.r_plus())
    }

    /// The matching function at the default radius.
    pub fn matching(&self) -> Matching {
        self.matching_at(self.default_match())
    }

    pub fn matching_at(&self, r_m: f64) -> Matching {
        let (yl, dyl) = eval_chain(&self.chain(Side::Lower, r_m), r_m);
        let (yr, dyr) = eval_chain(&self.chain(Side::Upper, r_m), r_m);
        let w = yl * dyr - dyl * yr;
        // Length scale keeps the normalization finite when both derivatives
        // vanish (the constant solution at ω = 0).
        let len = self.params.r_plus() - self.params.r_minus();
        let scale = (yl.norm() + len * dyl.norm()) * (yr.norm() + len * dyr.norm()) / len;
        let residual = if scale > 0.0 { w.norm() / scale } else { 0.0 };
        Matching { value: w * self.params.delta_r(r_m), residual, r_match: r_m }
    }

    /// The regular solution from `r_-`, continued across `(r_-, r_+)` and
    /// joined to the regular solution at `r_+` with the best-fitting scale.
    /// For a resonance the two agree, giving one solution on the whole
    /// extended domain.
    pub fn solution(&self) -> RadialSolution {
        let r_m = self.default_match();
        let left = self.chain(Side::Lower, r_m);
        let right = self.chain(Side::Upper, r_m);
        let (yl, dyl) = eval_chain(&left, r_m);
        let (yr, dyr) = eval_chain(&right, r_m);
        let den = yr.norm_sqr() + dyr.norm_sqr();
        let join = if den > 0.0 { (yl * yr.conj() + dyl * dyr.conj()) / den } else { C64::new(1.0, 0.0) };
        RadialSolution { left, right, join, r_match: r_m }
    }
}

/// Whether the newest term is negligible at `|ξ| = EVAL_FRACTION`.
fn converged(c: &[C64], n: usize) -> bool {
    let size = c.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    c[n].norm() * EVAL_FRACTION.powi(n as i32) < SERIES_TOL * size
}

fn coef(p: &[C64], k: usize) -> C64 {
    p.get(k).copied().unwrap_or_default()
}

fn eval_chain(chain: &[Patch], r: f64) -> (C64, C64) {
    // Later patches are closer to the matching radius.
    for p in chain.iter().rev() {
        if r >= p.lo && r <= p.hi {
            return p.eval(r);
        }
    }
    chain.last().map(|p| p.eval(r)).unwrap_or_default()
}

fn find_patch(chain: &[Patch], r: f64) -> Option<&Patch> {
    chain
        .iter()
        .filter(|p| r >= p.lo && r <= p.hi)
        .min_by(|a, b| ((r - a.center).abs() / a.scale).total_cmp(&((r - b.center).abs() / b.scale)))
}

/// A radial solution assembled from local expansions.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    left: Vec<Patch>,
    right: Vec<Patch>,
    join: C64,
    r_match: f64,
}

impl RadialSolution {
    /// `(R, R')` at `r ≠ r_±`.
    pub fn eval(&self, r: f64) -> Result<(C64, C64)> {
        let (chain, factor) =
            if r <= self.r_match { (&self.left, C64::new(1.0, 0.0)) } else { (&self.right, self.join) };
        let p = find_patch(chain, r).ok_or(Error::OutOfChart { chart: crate::spacetime::Chart::BoyerLindquist, r })?;
        let (y, dy) = p.eval(r);
        Ok((y * factor, dy * factor))
    }

    /// The series part `R |r − r_h|^{−s}` of the Frobenius expansion at a
    /// horizon, if `r` lies in its disc.
    fn regular_part(&self, side: Side, r: f64) -> Option<C64> {
        let (chain, factor) = match side {
            Side::Lower => (&self.left, C64::new(1.0, 0.0)),
            Side::Upper => (&self.right, self.join),
        };
        let f = &chain[0];
        if r >= f.lo && r <= f.hi {
            Some(f.series(r).0 * factor)
        } else {
            None
        }
    }
}

/// A resonance `ω` with separation constant `λ`.
#[derive(Debug, Clone)]
pub struct QnmMode {
    pub omega: C64,
    pub lambda: C64,
    pub m: i32,
    /// Angular label when `λ` was computed from `(l, m)`.
    pub l: Option<usize>,
    /// Normalized Wronskian at the root.
    pub residual: f64,
    pub iterations: usize,
}

impl QnmMode {
    /// `−Im ω`.
    pub fn decay_rate(&self) -> f64 {
        -self.omega.im
    }
}

/// Newton iteration on an entire function with a centred difference
/// derivative.
pub(crate) fn polish<F: FnMut(C64) -> Result<C64>>(mut f: F, guess: C64, radius: f64) -> Result<(C64, usize)> {
    let mut w = guess;
    for it in 0..NEWTON_MAX_ITER {
        let fw = f(w)?;
        if fw == C64::new(0.0, 0.0) {
            return Ok((w, it));
        }
        let h = 1e-6 * (1.0 + w.norm());
        let d = (f(w + h)? - f(w - h)?) / (2.0 * h);
        if !(d.norm() > 0.0) || !d.re.is_finite() {
            return Err(Error::NoRoot);
        }
        let step = fw / d;
        // Damp wild steps to stay near the guess.
        let step = if step.norm() > 0.25 * radius { step * (0.25 * radius / step.norm()) } else { step };
        w -= step;
        if (w - guess).norm() > radius {
            return Err(Error::NoRoot);
        }
        if step.norm() <= 1e-13 * (1.0 + w.norm()) {
            return Ok((w, it + 1));
        }
    }
    Err(Error::NoRoot)
}

fn check_unstable(omega: C64) -> Result<()> {
    if omega.im > UNSTABLE_TOL {
        return Err(Error::UnstableMode { re: omega.re, im: omega.im });
    }
    Ok(())
}

/// How far from the initial guess a polished root may land.
pub const DEFAULT_SEARCH_RADIUS: f64 = 0.5;
/// Residual above which a converged Newton iterate is rejected.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-7;

/// Resonance of the radial problem for a fixed separation constant `λ`.
pub fn radial_qnm(params: &BlackHoleParams, lambda: C64, m: i32, guess: C64) -> Result<QnmMode> {
    let f = |w: C64| RadialProblem::new(params, w, lambda, m).map(|p| p.matching().value);
    let (omega, iterations) = polish(f, guess, DEFAULT_SEARCH_RADIUS)?;
    let residual = RadialProblem::new(params, omega, lambda, m)?.matching().residual;
    if !(residual <= ROOT_RESIDUAL_TOL) {
        return Err(Error::NoRoot);
    }
    check_unstable(omega)?;
    Ok(QnmMode { omega, lambda, m, l: None, residual, iterations })
}

/// `F(ω)` with `λ = λ_{lm}(ω)` from the angular problem.
pub fn coupled_matching(params: &BlackHoleParams, l: usize, m: i32, omega: C64) -> Result<(C64, C64, f64)> {
    let lambda = coupled_lambda(params, l, m, omega)?;
    let mt = RadialProblem::new(params, omega, lambda, m)?.matching();
    Ok((mt.value, lambda, mt.residual))
}

fn coupled_lambda(params: &BlackHoleParams, l: usize, m: i32, omega: C64) -> Result<C64> {
    if params.a == 0.0 {
        return Ok(C64::new((l * (l + 1)) as f64, 0.0));
    }
    let size = DEFAULT_BASIS.max(2 * (l + 1) + 8);
    Ok(AngularProblem::new(params.a, params.alpha, omega, m, size)?.mode(l)?.lambda)
}

/// Resonance of the coupled problem with angular label `(l, m)`.
pub fn qnm(params: &BlackHoleParams, l: usize, m: i32, guess: C64) -> Result<QnmMode> {
    qnm_within(params, l, m, guess, DEFAULT_SEARCH_RADIUS)
}

pub fn qnm_within(params: &BlackHoleParams, l: usize, m: i32, guess: C64, radius: f64) -> Result<QnmMode> {
    if l < m.unsigned_abs() as usize {
        return Err(Error::InvalidParameter { name: "l", reason: "must satisfy l >= |m|" });
    }
    let f = |w: C64| coupled_matching(params, l, m, w).map(|x| x.0);
    let (omega, iterations) = polish(f, guess, radius)?;
    let (_, lambda, residual) = coupled_matching(params, l, m, omega)?;
    if !(residual <= ROOT_RESIDUAL_TOL) {
        return Err(Error::NoRoot);
    }
    check_unstable(omega)?;
    Ok(QnmMode { omega, lambda, m, l: Some(l), residual, iterations })
}

/// Indicial exponents of the mode profile `w̃` in the Kerr-star gauge at
/// `(r_-, r_+)`: each pair is `(0, e)` with `e = −2s = ∓2i(1+α)K(r_±)/Δ'(r_±)`
/// for the regular and the singular branch. At `a = 0`, `e = iω/κ_±`.
pub fn indicial_exponents(params: &BlackHoleParams, omega: C64, m: i32) -> Result<[(C64, C64); 2]> {
    let p = RadialProblem::new(params, omega, C64::new(0.0, 0.0), m)?;
    let z = C64::new(0.0, 0.0);
    Ok([(z, p.exponent(Side::Lower) * -2.0), (z, p.exponent(Side::Upper) * -2.0)])
}

/// A separated resonant state `e^{−iωτ} e^{imφ} w̃(r, θ)` in the shifted
/// Kerr-star chart used by the solver.
#[derive(Debug, Clone)]
pub struct ModeProfile {
    kds: KerrDeSitter,
    pub omega: C64,
    pub m: i32,
    radial: RadialSolution,
    angular: AngularMode,
}

impl ModeProfile {
    pub fn new(kds: &KerrDeSitter, mode: &QnmMode, angular: AngularMode) -> Result<Self> {
        let rp = RadialProblem::new(kds.params(), mode.omega, mode.lambda, mode.m)?;
        Ok(Self { kds: kds.clone(), omega: mode.omega, m: mode.m, radial: rp.solution(), angular })
    }

    /// Profile of the coupled resonance `(l, m)`.
    pub fn for_mode(kds: &KerrDeSitter, mode: &QnmMode) -> Result<Self> {
        let p = kds.params();
        let l = mode.l.ok_or(Error::InvalidParameter { name: "l", reason: "mode has no angular label" })?;
        let size = DEFAULT_BASIS.max(2 * (l + 1) + 8);
        let angular = AngularProblem::new(p.a, p.alpha, mode.omega, mode.m, size)?.mode(l)?;
        Self::new(kds, mode, angular)
    }

    /// `G(r) = R(r) e^{−iω(F_t + H) + imF_φ}`. Inside the collars the
    /// horizon power of `R` cancels the logarithms of `F_t`, `F_φ` exactly,
    /// so the value is finite and smooth across `r_±`.
    pub fn radial_factor(&self, r: f64) -> Result<C64> {
        let p = self.kds.params();
        let tr = self.kds.transition();
        let (lo, hi) = tr.band();
        let h = self.kds.shift().h(r);
        let im = C64::new(0.0, 1.0);
        let mf = self.m as f64;
        for side in [Side::Lower, Side::Upper] {
            let in_collar = match side {
                Side::Lower => r <= lo,
                Side::Upper => r >= hi,
            };
            if !in_collar {
                continue;
            }
            if let Some(series) = self.radial.regular_part(side, r) {
                let (ft, fphi) = tr.without_log(r, side.root_index());
                let phase = (-im * self.omega * (ft + h) + im * mf * fphi).exp();
                return Ok(series * phase);
            }
        }
        if r <= p.r_minus() || r >= p.r_plus() {
            return Err(Error::OutOfChart { chart: crate::spacetime::Chart::ShiftedKerrStar, r });
        }
        let (y, _) = self.radial.eval(r)?;
        let phase = (-im * self.omega * (tr.ft(r) + h) + im * mf * tr.fphi(r)).exp();
        Ok(y * phase)
    }

    pub fn angular_factor(&self, theta: f64) -> C64 {
        self.angular.eval(theta).0
    }

    pub fn value(&self, r: f64, theta: f64) -> Result<C64> {
        Ok(self.radial_factor(r)? * self.angular_factor(theta))
    }
}
