use crate::numerics::linalg::{bilinear4, Mat4, Vec4};
use crate::spacetime::{inverse_metric, Metric4};
use crate::{Result, C64};

/// `T_{∇u}(X, Y)` with precomputed inverse metric.
pub fn stress_energy_with(g: &Mat4, ginv: &Mat4, du: &Vec4, x: &Vec4, y: &Vec4) -> f64 {
    let xu: f64 = (0..4).map(|i| x[i] * du[i]).sum();
    let yu: f64 = (0..4).map(|i| y[i] * du[i]).sum();
    xu * yu - 0.5 * bilinear4(ginv, du, du) * bilinear4(g, x, y)
}

pub fn stress_energy(m: &Metric4, du: &Vec4, x: &Vec4, y: &Vec4) -> Result<f64> {
    let ginv = inverse_metric(m)?;
    Ok(stress_energy_with(&m.g, &ginv, du, x, y))
}

/// `T_{∇Re u} + T_{∇Im u}`.
pub fn stress_energy_complex(g: &Mat4, ginv: &Mat4, du: &[C64; 4], x: &Vec4, y: &Vec4) -> f64 {
    let re = du.map(|z| z.re);
    let im = du.map(|z| z.im);
    stress_energy_with(g, ginv, &re, x, y) + stress_energy_with(g, ginv, &im, x, y)
}

/// `J_X^μ = (Xu) ∇^μ u − ½ g(∇u, ∇u) X^μ`.
pub fn current_j(ginv: &Mat4, du: &Vec4, x: &Vec4) -> Vec4 {
    let xu: f64 = (0..4).map(|i| x[i] * du[i]).sum();
    let q = bilinear4(ginv, du, du);
    let mut j = [0.0; 4];
    for (mu, jm) in j.iter_mut().enumerate() {
        let grad: f64 = (0..4).map(|n| ginv[mu][n] * du[n]).sum();
        *jm = xu * grad - 0.5 * q * x[mu];
    }
    j
}

pub fn current_j_complex(ginv: &Mat4, du: &[C64; 4], x: &Vec4) -> Vec4 {
    let a = current_j(ginv, &du.map(|z| z.re), x);
    let b = current_j(ginv, &du.map(|z| z.im), x);
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}
