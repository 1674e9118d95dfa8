//! C^∞ cutoffs used for chart transitions, multiplier cutoffs and sources.

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

fn psi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn dpsi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        psi(x) / (x * x)
    }
}

/// Smooth monotone transition: 0 for `x <= 0`, 1 for `x >= 1`.
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let p = psi(x);
    let q = psi(1.0 - x);
    p / (p + q)
}

pub fn smoothstep_derivative(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let p = psi(x);
    let q = psi(1.0 - x);
    let s = p + q;
    (dpsi(x) * q + p * dpsi(1.0 - x)) / (s * s)
}

/// Compactly supported bump on `(lo, hi)` with peak value 1 at the midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub lo: f64,
    pub hi: f64,
}

impl Bump {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(hi > lo, "bump window must be non-empty");
        Self { lo, hi }
    }

    fn local(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }

    pub fn value(&self, x: f64) -> f64 {
        let y = self.local(x);
        if y.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - y * y)).exp()
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let y = self.local(x);
        if y.abs() >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - y * y;
        let dy = 2.0 / (self.hi - self.lo);
        self.value(x) * (-2.0 * y / (d * d)) * dy
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let y = self.local(x);
        if y.abs() >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - y * y;
        let dy = 2.0 / (self.hi - self.lo);
        let g = -2.0 * y / (d * d);
        // g' = (-2 d^2 - (-2y)(2d)(-2y)) / d^4 = (-2 d - 8 y^2) / d^3
        let dg = (-2.0 * d - 8.0 * y * y) / (d * d * d);
        self.value(x) * (g * g + dg) * dy * dy
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_limits_and_symmetry() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
        for x in [0.1, 0.3, 0.77] {
            assert!((smoothstep(x) + smoothstep(1.0 - x) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn smoothstep_derivative_matches_difference_quotient() {
        let h = 1e-6;
        for x in [0.05, 0.2, 0.5, 0.9] {
            let fd = (smoothstep(x + h) - smoothstep(x - h)) / (2.0 * h);
            assert!((fd - smoothstep_derivative(x)).abs() < 1e-7);
        }
    }

    #[test]
    fn bump_derivatives_match_difference_quotients() {
        let b = Bump::new(1.0, 3.0);
        let h = 1e-5;
        for x in [1.3, 1.9, 2.0, 2.6] {
            let fd1 = (b.value(x + h) - b.value(x - h)) / (2.0 * h);
            let fd2 = (b.value(x + h) - 2.0 * b.value(x) + b.value(x - h)) / (h * h);
            assert!((fd1 - b.derivative(x)).abs() < 1e-8);
            assert!((fd2 - b.second_derivative(x)).abs() < 1e-4);
        }
        assert_eq!(b.value(1.0), 0.0);
        assert!((b.value(2.0) - 1.0).abs() < 1e-15);
    }
}
