//! Reciprocal gamma function and normalized associated Legendre functions.

use alloc::vec::Vec;
use core::f64::consts::PI;

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `1/Γ(z)`, an entire function; exact zeros at the non-positive integers.
pub fn recip_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // Reflection: 1/Γ(z) = Γ(1-z) sin(πz) / π.
        let s = (z * PI).sin();
        if z.im == 0.0 && z.re == z.re.round() {
            return C64::new(0.0, 0.0);
        }
        return s / (recip_gamma(C64::new(1.0, 0.0) - z) * PI);
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // Γ(z+1) = sqrt(2π) t^(z+1/2) e^(-t) x
    let ln_gamma = 0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln();
    (-ln_gamma).exp()
}

/// Fully normalized associated Legendre functions `P̄_l^m(x)`,
/// `l = m..=lmax`, with unit L² norm on [-1, 1].
///
/// Returns `(values, w)` where `w[k] = (1 - x²) dP̄/dx` for `l = m + k`.
pub fn assoc_legendre(lmax: usize, m: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(lmax >= m);
    let n = lmax - m + 1;
    let mut p = Vec::with_capacity(n);
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = (0.5f64).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
    }
    p.push(pmm);
    if n > 1 {
        p.push(x * (2.0 * m as f64 + 3.0).sqrt() * pmm);
    }
    let mf = m as f64;
    for l in (m + 2)..=lmax {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let l1 = lf - 1.0;
        let b = ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt();
        let k = l - m;
        p.push(a * (x * p[k - 1] - b * p[k - 2]));
    }
    let mut w = Vec::with_capacity(n);
    for (k, &pl) in p.iter().enumerate() {
        let l = (m + k) as f64;
        let prev = if k == 0 { 0.0 } else { p[k - 1] };
        let c = ((2.0 * l + 1.0) * (l - mf) * (l + mf) / (2.0 * l - 1.0)).max(0.0).sqrt();
        w.push(-l * x * pl + c * prev);
    }
    (p, w)
}
