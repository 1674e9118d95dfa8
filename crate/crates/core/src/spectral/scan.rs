use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::angular::AngularProblem;
use super::radial::{polish, RadialProblem, UNSTABLE_TOL};
use crate::spacetime::BlackHoleParams;
use crate::{Error, Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Search box and resolution of [`spectral_gap_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct GapScanConfig {
    pub re: (f64, f64),
    pub im: (f64, f64),
    /// Angular labels `0 ≤ l ≤ l_max`, and `|m| ≤ min(l, m_max)`.
    pub l_max: usize,
    pub m_max: u32,
    /// Galerkin size for `λ(ω)` when `a ≠ 0`.
    pub angular_basis: usize,
    /// Largest bisection depth before a count is declared unresolvable.
    pub max_depth: usize,
}

impl Default for GapScanConfig {
    fn default() -> Self {
        Self { re: (-1.0, 1.0), im: (-0.5, 0.1), l_max: 3, m_max: 3, angular_basis: 32, max_depth: 12 }
    }
}

/// A polished zero of `F_{lm}` inside the box.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRoot {
    pub l: usize,
    pub m: i32,
    pub omega: C64,
    pub lambda: C64,
    pub residual: f64,
}

/// A leaf of the bisection with its winding number.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCount {
    pub l: usize,
    pub m: i32,
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapScanReport {
    pub config: GapScanConfig,
    pub roots: Vec<ScanRoot>,
    pub cells: Vec<CellCount>,
}

/// Roots closer than this to the origin are identified with the
/// stationary mode `ω = 0`.
pub const ZERO_MODE_TOL: f64 = 1e-8;

impl GapScanReport {
    pub fn zero_mode(&self) -> bool {
        self.roots.iter().any(|r| r.omega.norm() < ZERO_MODE_TOL)
    }

    /// `min(−Im ω)` over the roots other than the zero mode.
    pub fn gap(&self) -> Option<f64> {
        self.roots.iter().filter(|r| r.omega.norm() >= ZERO_MODE_TOL).map(|r| -r.omega.im).reduce(f64::min)
    }

    /// Whether the only root with `Im ω ≥ −ν/2` is the zero mode.
    pub fn certifies(&self, nu: f64) -> bool {
        self.zero_mode() && self.gap().is_none_or(|g| g > 0.5 * nu)
    }
}

/// `F_{lm}(ω)` with the separation constant from the angular problem.
struct Target<'a> {
    params: &'a BlackHoleParams,
    l: usize,
    m: i32,
    basis: usize,
}

impl Target<'_> {
    fn lambda(&self, w: C64) -> Result<C64> {
        let p = self.params;
        if p.a == 0.0 {
            return Ok(C64::new((self.l * (self.l + 1)) as f64, 0.0));
        }
        let size = self.basis.max(2 * (self.l + 1) + 8);
        Ok(AngularProblem::new(p.a, p.alpha, w, self.m, size)?.mode(self.l)?.lambda)
    }

    fn eval(&self, w: C64) -> Result<C64> {
        let lam = self.lambda(w)?;
        Ok(RadialProblem::new(self.params, w, lam, self.m)?.matching().value)
    }
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    re: (f64, f64),
    im: (f64, f64),
}

impl Rect {
    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re.0, self.im.0),
            C64::new(self.re.1, self.im.0),
            C64::new(self.re.1, self.im.1),
            C64::new(self.re.0, self.im.1),
        ]
    }

    fn contains(&self, w: C64) -> bool {
        w.re > self.re.0 && w.re < self.re.1 && w.im > self.im.0 && w.im < self.im.1
    }

    fn center(&self) -> C64 {
        C64::new(0.5 * (self.re.0 + self.re.1), 0.5 * (self.im.0 + self.im.1))
    }

    fn diameter(&self) -> f64 {
        (self.re.1 - self.re.0).hypot(self.im.1 - self.im.0)
    }

    /// Halves along the longer side, slightly off centre so that split
    /// lines avoid the symmetric points where resonances tend to sit.
    fn split(&self) -> [Rect; 2] {
        const OFF: f64 = 0.5 + 0.0173;
        if self.re.1 - self.re.0 >= self.im.1 - self.im.0 {
            let c = self.re.0 + OFF * (self.re.1 - self.re.0);
            [Rect { re: (self.re.0, c), ..*self }, Rect { re: (c, self.re.1), ..*self }]
        } else {
            let c = self.im.0 + OFF * (self.im.1 - self.im.0);
            [Rect { im: (self.im.0, c), ..*self }, Rect { im: (c, self.im.1), ..*self }]
        }
    }
}

/// Winding data of `F` along a closed contour.
struct Winding {
    count: i64,
    /// `Σ` of the zeros inside, from the Delves–Lyness first moment.
    moment: C64,
}

const EDGE_START: usize = 12;
const MAX_PHASE_STEP: f64 = PI / 6.0;
const MAX_EDGE_SPLITS: usize = 16;
const INTEGER_SLACK: f64 = 0.05;

/// Samples `F` along the boundary, refining wherever the phase moves by
/// more than `π/6` between neighbours, and accumulates the unwrapped
/// argument and the first moment `−(1/2πi) ∮ log F dω + ω₀N`.
fn winding(f: &Target<'_>, rect: &Rect) -> Result<Winding> {
    let corners = rect.corners();
    let start = corners[0];
    let mut total_arg = 0.0;
    let mut log_int = C64::new(0.0, 0.0);
    let f0 = f.eval(start)?;
    if f0 == C64::new(0.0, 0.0) {
        return Err(Error::NoConvergence("zero of the matching function on a scan contour"));
    }
    let mut prev_w = start;
    let mut prev_f = f0;
    let mut prev_log = C64::new(f0.norm().ln(), f0.arg());
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let mut stack: Vec<(f64, usize)> = (1..=EDGE_START).rev().map(|k| (k as f64 / EDGE_START as f64, 0)).collect();
        let mut t_prev = 0.0;
        while let Some((t, depth)) = stack.pop() {
            let w = a + (b - a) * t;
            let fw = f.eval(w)?;
            if fw == C64::new(0.0, 0.0) || !fw.re.is_finite() {
                return Err(Error::NoConvergence("zero of the matching function on a scan contour"));
            }
            let dphi = (fw / prev_f).arg();
            if dphi.abs() > MAX_PHASE_STEP && depth < MAX_EDGE_SPLITS {
                stack.push((t, depth + 1));
                stack.push((0.5 * (t_prev + t), depth + 1));
                continue;
            }
            total_arg += dphi;
            let log = C64::new(fw.norm().ln(), prev_log.im + dphi);
            log_int += (log + prev_log) * 0.5 * (w - prev_w);
            prev_w = w;
            prev_f = fw;
            prev_log = log;
            t_prev = t;
        }
    }
    let turns = total_arg / (2.0 * PI);
    let count = turns.round();
    if (turns - count).abs() > INTEGER_SLACK || count < 0.0 {
        return Err(Error::NoConvergence("argument principle count is not an integer"));
    }
    let n = count as i64;
    let moment = start * n as f64 - log_int / C64::new(0.0, 2.0 * PI);
    Ok(Winding { count: n, moment })
}

/// Counts and locates the zeros of every `F_{lm}` in the configured box by
/// the argument principle, bisecting until each cell holds at most one zero
/// and polishing it by Newton's method. Fails with `CountMismatch` when a
/// counted zero cannot be polished inside its cell, and with
/// `UnstableMode` if any resonance has `Im ω > 0`.
pub fn spectral_gap_scan(params: &BlackHoleParams, config: &GapScanConfig) -> Result<GapScanReport> {
    if !(config.re.1 > config.re.0 && config.im.1 > config.im.0) {
        return Err(Error::InvalidParameter { name: "scan_box", reason: "empty search box" });
    }
    let mut roots = Vec::new();
    let mut cells = Vec::new();
    for l in 0..=config.l_max {
        let mm = (l as i32).min(config.m_max as i32);
        for m in -mm..=mm {
            let target = Target { params, l, m, basis: config.angular_basis };
            scan_one(&target, config, &mut roots, &mut cells)?;
        }
    }
    for r in &roots {
        if r.omega.im > UNSTABLE_TOL {
            return Err(Error::UnstableMode { re: r.omega.re, im: r.omega.im });
        }
    }
    Ok(GapScanReport { config: config.clone(), roots, cells })
}

fn robust_winding(f: &Target<'_>, rect: Rect) -> Result<(Rect, Winding)> {
    // A zero on or very near the contour spoils the count; nudge the
    // outer edges and retry.
    let mut r = rect;
    for k in 0..4 {
        match winding(f, &r) {
            Ok(w) => return Ok((r, w)),
            Err(Error::NoConvergence(_)) if k < 3 => {
                let d = 1e-3 * (k + 1) as f64 * r.diameter();
                r = Rect { re: (r.re.0 - d, r.re.1 + 0.7 * d), im: (r.im.0 - 0.6 * d, r.im.1 + d) };
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoConvergence("argument principle count"))
}

fn scan_one(f: &Target<'_>, cfg: &GapScanConfig, roots: &mut Vec<ScanRoot>, cells: &mut Vec<CellCount>) -> Result<()> {
    let (rect, w) = robust_winding(f, Rect { re: cfg.re, im: cfg.im })?;
    let mut work = vec![(rect, w, 0usize)];
    while let Some((rect, w, depth)) = work.pop() {
        if w.count == 0 {
            continue;
        }
        if w.count == 1 {
            if let Some(root) = polish_in(f, &rect, w.moment) {
                cells.push(CellCount { l: f.l, m: f.m, re: rect.re, im: rect.im, count: 1 });
                roots.push(root);
                continue;
            }
        }
        if depth >= cfg.max_depth {
            return Err(Error::CountMismatch { expected: w.count as usize, found: 0 });
        }
        let halves = rect.split();
        let w0 = winding(f, &halves[0]);
        let w1 = winding(f, &halves[1]);
        match (w0, w1) {
            (Ok(a), Ok(b)) => {
                if a.count + b.count != w.count {
                    return Err(Error::CountMismatch {
                        expected: w.count as usize,
                        found: (a.count + b.count) as usize,
                    });
                }
                work.push((halves[0], a, depth + 1));
                work.push((halves[1], b, depth + 1));
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok(())
}

fn polish_in(f: &Target<'_>, rect: &Rect, moment: C64) -> Option<ScanRoot> {
    let radius = rect.diameter();
    let starts = [moment, rect.center()];
    for s in starts {
        if !(s.re.is_finite() && s.im.is_finite()) {
            continue;
        }
        if let Ok((w, _)) = polish(|z| f.eval(z), s, radius) {
            if rect.contains(w) {
                let lambda = f.lambda(w).ok()?;
                let residual = RadialProblem::new(f.params, w, lambda, f.m).ok()?.matching().residual;
                return Some(ScanRoot { l: f.l, m: f.m, omega: w, lambda, residual });
            }
        }
    }
    None
}
