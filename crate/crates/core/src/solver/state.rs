use alloc::vec;
use alloc::vec::Vec;

use super::grid::Grid2D;
use crate::C64;

/// One azimuthal mode `u = u_m(τ, q1, q2) e^{imφ}` and its time derivative,
/// stored row-major with `q2` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub m: i32,
    pub time: f64,
    pub n1: usize,
    pub n2: usize,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

impl WaveState {
    pub fn zeros(grid: &Grid2D, m: i32, time: f64) -> Self {
        let n = grid.len();
        Self { m, time, n1: grid.q1.n, n2: grid.q2.n, u: vec![C64::new(0.0, 0.0); n], v: vec![C64::new(0.0, 0.0); n] }
    }

    /// Samples `u` and `v = ∂_τ u` from closures of `(q1, q2)`.
    pub fn from_fn(grid: &Grid2D, m: i32, time: f64, u: impl Fn(f64, f64) -> C64, v: impl Fn(f64, f64) -> C64) -> Self {
        let mut s = Self::zeros(grid, m, time);
        for (i, q1) in grid.q1.nodes().enumerate() {
            for (j, q2) in grid.q2.nodes().enumerate() {
                let k = grid.index(i, j);
                s.u[k] = u(q1, q2);
                s.v[k] = v(q1, q2);
            }
        }
        s
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().chain(&self.v).all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.u[self.index(i, j)]
    }
}
