use core::ops::{Add, Mul, Sub};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Catmull–Rom cubic through `p[1]` (t = 0) and `p[2]` (t = 1), with the
/// outer points setting the end slopes. Third-order accurate for smooth data.
pub fn catmull_rom<T>(p: [T; 4], t: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let t2 = t * t;
    let t3 = t2 * t;
    p[0] * (-0.5 * t3 + t2 - 0.5 * t)
        + p[1] * (1.5 * t3 - 2.5 * t2 + 1.0)
        + p[2] * (-1.5 * t3 + 2.0 * t2 + 0.5 * t)
        + p[3] * (0.5 * t3 - 0.5 * t2)
}

/// One periodic axis: `n` nodes `start + i·step`, period `n·step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicAxis {
    pub start: f64,
    pub step: f64,
    pub n: usize,
}

impl PeriodicAxis {
    /// Cell index (wrapped) and offset in `[0, 1)`.
    fn locate(&self, x: f64) -> (usize, f64) {
        let s = (x - self.start) / self.step;
        let i = s.floor();
        let n = self.n as i64;
        let k = (i as i64).rem_euclid(n) as usize;
        (k, s - i)
    }
}

/// Bicubic Catmull–Rom interpolation of row-major nodal data (second axis
/// fastest) on a doubly periodic grid.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicBicubic<'a, T> {
    pub values: &'a [T],
    pub x: PeriodicAxis,
    pub y: PeriodicAxis,
}

impl<T> PeriodicBicubic<'_, T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    pub fn at(&self, x: f64, y: f64) -> T {
        let (i, tx) = self.x.locate(x);
        let (j, ty) = self.y.locate(y);
        let (nx, ny) = (self.x.n, self.y.n);
        let wrap = |k: usize, d: isize, n: usize| ((k as isize + d).rem_euclid(n as isize)) as usize;
        let row = |d: isize| {
            let ii = wrap(i, d, nx);
            let v = |e: isize| self.values[ii * ny + wrap(j, e, ny)];
            catmull_rom([v(-1), v(0), v(1), v(2)], ty)
        };
        catmull_rom([row(-1), row(0), row(1), row(2)], tx)
    }
}
