//! Linear algebra for 4x4 tensors and small dense complex systems.

use alloc::vec;
use alloc::vec::Vec;

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

pub type Mat4 = [[f64; 4]; 4];
pub type Vec4 = [f64; 4];

pub const ZERO4: Mat4 = [[0.0; 4]; 4];

pub fn identity4() -> Mat4 {
    let mut m = ZERO4;
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn transpose4(a: &Mat4) -> Mat4 {
    let mut t = ZERO4;
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn mul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = ZERO4;
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn mat_vec4(a: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = (0..4).map(|k| a[i][k] * v[k]).sum();
    }
    out
}

/// Quadratic form `u^T a v`.
pub fn bilinear4(a: &Mat4, u: &Vec4, v: &Vec4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += u[i] * a[i][j] * v[j];
        }
    }
    s
}

/// `J^T G J`: pulls back a covariant 2-tensor under the Jacobian `J`.
pub fn congruence4(j: &Mat4, g: &Mat4) -> Mat4 {
    mul4(&transpose4(j), &mul4(g, j))
}

pub fn max_abs_diff4(a: &Mat4, b: &Mat4) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j] - b[i][j]).abs());
        }
    }
    d
}

pub fn max_abs4(a: &Mat4) -> f64 {
    max_abs_diff4(a, &ZERO4)
}

/// Determinant and inverse by Gauss–Jordan elimination with partial pivoting.
pub fn det_inverse4(a: &Mat4) -> Option<(f64, Mat4)> {
    let mut m = *a;
    let mut inv = identity4();
    let mut det = 1.0;
    let scale = max_abs4(a).max(f64::MIN_POSITIVE);
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap_or(col);
        if m[piv][col].abs() <= 1e-14 * scale {
            return None;
        }
        if piv != col {
            m.swap(piv, col);
            inv.swap(piv, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for k in 0..4 {
            m[col][k] /= p;
            inv[col][k] /= p;
        }
        for row in 0..4 {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    for k in 0..4 {
                        m[row][k] -= f * m[col][k];
                        inv[row][k] -= f * inv[col][k];
                    }
                }
            }
        }
    }
    Some((det, inv))
}

/// Eigen-decomposition of a symmetric 4x4 matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the orthogonal matrix whose columns are the
/// eigenvectors.
pub fn sym_eigen4(a: &Mat4) -> (Vec4, Mat4) {
    let mut m = *a;
    let mut q = identity4();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                off += m[i][j] * m[i][j];
            }
        }
        let diag: f64 = (0..4).map(|i| m[i][i] * m[i][i]).sum();
        if off <= 1e-32 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..4 {
            for r in (p + 1)..4 {
                if m[p][r].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[r][r] - m[p][p]) / (2.0 * m[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let mkp = m[k][p];
                    let mkr = m[k][r];
                    m[k][p] = c * mkp - s * mkr;
                    m[k][r] = s * mkp + c * mkr;
                }
                for k in 0..4 {
                    let mpk = m[p][k];
                    let mrk = m[r][k];
                    m[p][k] = c * mpk - s * mrk;
                    m[r][k] = s * mpk + c * mrk;
                }
                for k in 0..4 {
                    let qkp = q[k][p];
                    let qkr = q[k][r];
                    q[k][p] = c * qkp - s * qkr;
                    q[k][r] = s * qkp + c * qkr;
                }
            }
        }
    }
    ([m[0][0], m[1][1], m[2][2], m[3][3]], q)
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky4(a: &Mat4) -> Option<Mat4> {
    let mut l = ZERO4;
    for i in 0..4 {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Eigenvalues of the symmetric pencil `K v = λ H v` with `H` positive
/// definite, sorted ascending.
pub fn generalized_sym_eigenvalues4(k: &Mat4, h: &Mat4) -> Option<Vec4> {
    let l = cholesky4(h)?;
    let (_, linv) = det_inverse4(&l)?;
    let c = mul4(&linv, &mul4(k, &transpose4(&linv)));
    // Symmetrize against rounding.
    let mut cs = c;
    for i in 0..4 {
        for j in 0..4 {
            cs[i][j] = 0.5 * (c[i][j] + c[j][i]);
        }
    }
    let (mut ev, _) = sym_eigen4(&cs);
    ev.sort_by(f64::total_cmp);
    Some(ev)
}

/// Dense square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] += v;
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// Solves `A x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let lu = ComplexLu::factor(self)?;
        Ok(lu.solve(b))
    }
}

/// LU factorization with row pivoting.
#[derive(Debug, Clone)]
pub struct ComplexLu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl ComplexLu {
    pub fn factor(a: &CMatrix) -> Result<Self> {
        let n = a.n;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| lu.get(i, k).norm().total_cmp(&lu.get(j, k).norm())).unwrap_or(k);
            if lu.get(piv, k).norm() <= 1e-300 + 1e-15 * scale * f64::EPSILON {
                return Err(Error::Singular);
            }
            if piv != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let p = lu.get(k, k);
            for i in (k + 1)..n {
                let f = lu.get(i, k) / p;
                lu.set(i, k, f);
                if f != C64::new(0.0, 0.0) {
                    for j in (k + 1)..n {
                        let v = lu.get(k, j);
                        lu.add_to(i, j, -f * v);
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu.get(i, j);
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu.get(i, j);
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu.get(i, i);
        }
        x
    }
}
