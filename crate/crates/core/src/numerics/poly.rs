//! Dense polynomials with coefficients stored lowest degree first.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

use num_complex::Complex64;

pub type Poly = Vec<Complex64>;

pub fn from_real(c: &[f64]) -> Poly {
    c.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

pub fn eval<T>(p: &[T], x: T) -> T
where
    T: Copy + Add<Output = T> + Mul<Output = T> + Default,
{
    p.iter().rev().fold(T::default(), |acc, &c| acc * x + c)
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> Poly {
    let n = a.len().max(b.len());
    (0..n).map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default()).collect()
}

pub fn scale(a: &[Complex64], s: Complex64) -> Poly {
    a.iter().map(|&c| c * s).collect()
}

pub fn derivative(a: &[Complex64]) -> Poly {
    a.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

/// Coefficients of `q(ξ) = p(x0 + h ξ)`.
pub fn rescale_shift(p: &[Complex64], x0: f64, h: f64) -> Poly {
    // Horner in the polynomial ring.
    let lin = [Complex64::new(x0, 0.0), Complex64::new(h, 0.0)];
    let mut out: Poly = Vec::new();
    for &c in p.iter().rev() {
        out = mul(&out, &lin);
        if out.is_empty() {
            out.push(c);
        } else {
            out[0] += c;
        }
    }
    out
}
