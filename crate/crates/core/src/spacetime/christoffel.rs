use super::metric::MetricProvider;
use crate::numerics::linalg::{Mat4, ZERO4};
use crate::Result;

/// `Γ^μ_{νσ}` indexed as `[μ][ν][σ]`.
pub type Christoffel = [[[f64; 4]; 4]; 4];

const STEP: f64 = 1e-3;

/// `∂_μ g_{αβ}` by fourth-order central differences in `q1`, `q2`; the time
/// and ignorable-angle derivatives vanish identically.
pub fn metric_derivatives<M: MetricProvider + ?Sized>(m: &M, q1: f64, q2: f64) -> [Mat4; 4] {
    let mut d = [ZERO4; 4];
    for (axis, slot) in [(1usize, 1usize), (2, 2)] {
        let h = STEP;
        let at = |k: f64| {
            if axis == 1 {
                m.metric(q1 + k * h, q2)
            } else {
                m.metric(q1, q2 + k * h)
            }
        };
        let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
        for i in 0..4 {
            for j in 0..4 {
                d[slot][i][j] = (m2[i][j] - 8.0 * m1[i][j] + 8.0 * p1[i][j] - p2[i][j]) / (12.0 * h);
            }
        }
    }
    d
}

/// Christoffel symbols of the second kind.
pub fn christoffel<M: MetricProvider + ?Sized>(m: &M, q1: f64, q2: f64) -> Result<Christoffel> {
    let ginv = m.inverse_metric(q1, q2)?;
    let dg = metric_derivatives(m, q1, q2);
    let mut first = [[[0.0f64; 4]; 4]; 4];
    for l in 0..4 {
        for n in 0..4 {
            for s in n..4 {
                let v = 0.5 * (dg[n][l][s] + dg[s][l][n] - dg[l][n][s]);
                first[l][n][s] = v;
                first[l][s][n] = v;
            }
        }
    }
    let mut gamma = [[[0.0f64; 4]; 4]; 4];
    for mu in 0..4 {
        for n in 0..4 {
            for s in n..4 {
                let v: f64 = (0..4).map(|l| ginv[mu][l] * first[l][n][s]).sum();
                gamma[mu][n][s] = v;
                gamma[mu][s][n] = v;
            }
        }
    }
    Ok(gamma)
}
