use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::linalg::{CMatrix, ComplexLu};
use crate::numerics::quad::GaussLegendre;
use crate::numerics::special::assoc_legendre;
use crate::{Error, Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Default number of Legendre functions in the Galerkin basis.
pub const DEFAULT_BASIS: usize = 64;

const RQI_MAX_ITER: usize = 60;
const RQI_TOL: f64 = 1e-13;

/// The angular operator at fixed `(a, α, ω, m)` in the variable `x = cos θ`:
///
/// ```text
/// P_θ S = −d/dx((1+αx²)(1−x²) dS/dx) + (1+α)²(aω(1−x²) − m)² / ((1+αx²)(1−x²)) S
/// ```
///
/// discretized by a Galerkin method in the normalized associated Legendre
/// functions `P̄_l^{|m|}`, `l = |m|, …, |m| + n − 1`. At `a = 0` the matrix is
/// diagonal with entries `l(l+1)`. It is complex symmetric for complex `ω`.
#[derive(Debug, Clone)]
pub struct AngularProblem {
    pub a: f64,
    pub alpha: f64,
    pub omega: C64,
    pub m: i32,
    matrix: CMatrix,
    size: usize,
}

/// An eigenpair of [`AngularProblem`] continued from `l(l+1)` at `a = 0`.
#[derive(Debug, Clone)]
pub struct AngularMode {
    pub l: usize,
    pub m: i32,
    pub lambda: C64,
    /// Legendre coefficients, normalized by `cᵀc = 1` with the coefficient
    /// of `P̄_l^{|m|}` real and positive.
    pub coeffs: Vec<C64>,
}

impl AngularProblem {
    pub fn new(a: f64, alpha: f64, omega: C64, m: i32, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter { name: "basis", reason: "must be positive" });
        }
        if !(a.is_finite() && alpha.is_finite() && omega.re.is_finite() && omega.im.is_finite()) {
            return Err(Error::InvalidParameter { name: "omega", reason: "must be finite" });
        }
        let am = m.unsigned_abs() as usize;
        let lmax = am + size - 1;
        let rule = GaussLegendre::new(size + am + 48);
        let mut matrix = CMatrix::zeros(size);
        let mf = m as f64;
        for (x, wq) in rule.mapped(-1.0, 1.0) {
            let s2 = 1.0 - x * x;
            let dth = 1.0 + alpha * x * x;
            let (p, dp) = assoc_legendre(lmax, am, x);
            let t = C64::new(-mf, 0.0) + omega * (a * s2);
            let pot = t * t * ((1.0 + alpha) * (1.0 + alpha) / (dth * s2));
            for k in 0..size {
                for l in k..size {
                    // dp holds (1−x²)P', so (1−x²)P_k'P_l' = dp_k dp_l/(1−x²).
                    let v = pot * (p[k] * p[l]) + dth * dp[k] * dp[l] / s2;
                    matrix.add_to(k, l, v * wq);
                }
            }
        }
        for k in 0..size {
            for l in 0..k {
                let v = matrix.get(l, k);
                matrix.set(k, l, v);
            }
        }
        Ok(Self { a, alpha, omega, m, matrix, size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// The eigenpair continued from `l(l+1)`, found by Rayleigh quotient
    /// iteration with the bilinear quotient `cᵀMc / cᵀc`.
    pub fn mode(&self, l: usize) -> Result<AngularMode> {
        let am = self.m.unsigned_abs() as usize;
        if l < am {
            return Err(Error::InvalidParameter { name: "l", reason: "must satisfy l >= |m|" });
        }
        let idx = l - am;
        if idx >= self.size / 2 {
            return Err(Error::InvalidParameter { name: "l", reason: "too close to the basis truncation" });
        }
        let n = self.size;
        let mut c = vec![C64::new(0.0, 0.0); n];
        c[idx] = C64::new(1.0, 0.0);
        let mut lambda = self.matrix.get(idx, idx);
        // Diagonal-dominant start: a few inverse iterations at the fixed
        // shift l(l+1) keep the label before the quotient takes over.
        let base = C64::new((l * (l + 1)) as f64, 0.0);
        let mut shift = base;
        for it in 0..RQI_MAX_ITER {
            let mc = self.matrix.mul_vec(&c);
            let resid = mc.iter().zip(&c).map(|(y, x)| (*y - *x * lambda).norm_sqr()).sum::<f64>().sqrt();
            if resid <= RQI_TOL * (1.0 + lambda.norm()) {
                return Ok(self.finish(l, idx, lambda, c));
            }
            if it >= 3 {
                shift = lambda;
            }
            let mut shifted = self.matrix.clone();
            for k in 0..n {
                shifted.add_to(k, k, -shift);
            }
            let y = match ComplexLu::factor(&shifted) {
                Ok(lu) => lu.solve(&c),
                // Shift is an eigenvalue to working precision.
                Err(_) => return Ok(self.finish(l, idx, lambda, c)),
            };
            let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::NoConvergence("angular eigenvalue iteration"));
            }
            c = y.into_iter().map(|z| z / norm).collect();
            let mc = self.matrix.mul_vec(&c);
            let num: C64 = c.iter().zip(&mc).map(|(x, y)| *x * *y).sum();
            let den: C64 = c.iter().map(|x| *x * *x).sum();
            if den.norm() < 1e-12 {
                return Err(Error::NoConvergence("angular eigenvalue iteration (isotropic vector)"));
            }
            lambda = num / den;
        }
        Err(Error::NoConvergence("angular eigenvalue iteration"))
    }

    fn finish(&self, l: usize, idx: usize, lambda: C64, mut c: Vec<C64>) -> AngularMode {
        let den: C64 = c.iter().map(|x| *x * *x).sum();
        let mut s = den.sqrt();
        // The square root leaves a sign; pick the label coefficient near +1.
        if (c[idx] / s).re < 0.0 {
            s = -s;
        }
        c.iter_mut().for_each(|x| *x /= s);
        AngularMode { l, m: self.m, lambda, coeffs: c }
    }
}

/// Separation constants `λ_l`, `l = |m|, …, |m| + count − 1`, with the
/// default basis size.
pub fn angular_eigenvalues(a: f64, alpha: f64, omega: C64, m: i32, count: usize) -> Result<Vec<C64>> {
    let size = DEFAULT_BASIS.max(2 * count + 8);
    let prob = AngularProblem::new(a, alpha, omega, m, size)?;
    let am = m.unsigned_abs() as usize;
    (am..am + count).map(|l| prob.mode(l).map(|md| md.lambda)).collect()
}

/// The single separation constant for label `l` with the default basis.
pub fn angular_eigenvalue(a: f64, alpha: f64, omega: C64, m: i32, l: usize) -> Result<C64> {
    let size = DEFAULT_BASIS.max(2 * (l + 1) + 8);
    AngularProblem::new(a, alpha, omega, m, size)?.mode(l).map(|md| md.lambda)
}

impl AngularMode {
    /// `(S, dS/dθ)` at `θ`.
    pub fn eval(&self, theta: f64) -> (C64, C64) {
        let am = self.m.unsigned_abs() as usize;
        let x = theta.cos();
        let sn = theta.sin();
        let (p, dp) = assoc_legendre(am + self.coeffs.len() - 1, am, x);
        let mut s = C64::new(0.0, 0.0);
        let mut ds = C64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            s += *c * p[k];
            // dS/dθ = −sinθ P'(x) = −dp/sinθ.
            ds -= *c * (dp[k] / sn);
        }
        (s, ds)
    }

    /// `P_θ S` at `θ`, evaluated pointwise from the Legendre equation
    /// `((1−x²)P')' = (m²/(1−x²) − l(l+1))P`; equals `λS` up to truncation.
    pub fn apply_operator(&self, a: f64, alpha: f64, omega: C64, theta: f64) -> C64 {
        let am = self.m.unsigned_abs() as usize;
        let x = theta.cos();
        let s2 = 1.0 - x * x;
        let dth = 1.0 + alpha * x * x;
        let (p, dp) = assoc_legendre(am + self.coeffs.len() - 1, am, x);
        let mf = self.m as f64;
        let t = C64::new(-mf, 0.0) + omega * (a * s2);
        let pot = t * t * ((1.0 + alpha) * (1.0 + alpha) / (dth * s2));
        let mut out = C64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let l = (am + k) as f64;
            let second = (mf * mf / s2 - l * (l + 1.0)) * p[k];
            // −(Δ_θ w)' with w = (1−x²)P', Δ_θ' = 2αx.
            let op = -(dth * second + 2.0 * alpha * x * dp[k]);
            out += *c * (pot * p[k] + op);
        }
        out
    }
}
