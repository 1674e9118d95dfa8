use crate::numerics::linalg::{generalized_sym_eigenvalues4, sym_eigen4, Mat4, Vec4, ZERO4};
use crate::spacetime::{metric_derivatives, Chart, MetricProvider};
use crate::Result;

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

const STEP: f64 = 1e-3;

/// A stationary, axisymmetric vector field: components depend on the two
/// middle coordinates only.
pub trait VectorField: Sync {
    fn chart(&self) -> Chart;

    fn at(&self, q1: f64, q2: f64) -> Vec4;

    /// `(∂_{q1} X, ∂_{q2} X)`, by fourth-order differences unless overridden.
    fn gradient(&self, q1: f64, q2: f64) -> [Vec4; 2] {
        let h = STEP;
        let mut out = [[0.0; 4]; 2];
        for (axis, slot) in out.iter_mut().enumerate() {
            let at = |k: f64| if axis == 0 { self.at(q1 + k * h, q2) } else { self.at(q1, q2 + k * h) };
            let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
            for i in 0..4 {
                slot[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
            }
        }
        out
    }
}

/// A field with constant components, e.g. the Killing fields `∂_t`, `∂_φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantField {
    pub chart: Chart,
    pub components: Vec4,
}

impl VectorField for ConstantField {
    fn chart(&self) -> Chart {
        self.chart
    }

    fn at(&self, _: f64, _: f64) -> Vec4 {
        self.components
    }

    fn gradient(&self, _: f64, _: f64) -> [Vec4; 2] {
        [[0.0; 4]; 2]
    }
}

/// Wraps a closure `(q1, q2) ↦ X`.
pub struct FieldFn<F> {
    pub chart: Chart,
    pub f: F,
}

impl<F: Fn(f64, f64) -> Vec4 + Sync> VectorField for FieldFn<F> {
    fn chart(&self) -> Chart {
        self.chart
    }

    fn at(&self, q1: f64, q2: f64) -> Vec4 {
        (self.f)(q1, q2)
    }
}

/// `(L_X g)_{μν} = X^σ ∂_σ g_{μν} + g_{σν} ∂_μ X^σ + g_{μσ} ∂_ν X^σ`.
pub fn lie_derivative_metric<M, X>(m: &M, x: &X, q1: f64, q2: f64) -> Mat4
where
    M: MetricProvider + ?Sized,
    X: VectorField + ?Sized,
{
    debug_assert_eq!(m.chart(), x.chart(), "metric and field must share a chart");
    let g = m.metric(q1, q2);
    let dg = metric_derivatives(m, q1, q2);
    let xv = x.at(q1, q2);
    let [d1, d2] = x.gradient(q1, q2);
    // dx[μ][σ] = ∂_μ X^σ
    let mut dx = [[0.0; 4]; 4];
    dx[1] = d1;
    dx[2] = d2;
    let mut l = ZERO4;
    for mu in 0..4 {
        for nu in mu..4 {
            let mut v = 0.0;
            for s in 0..4 {
                v += xv[s] * dg[s][mu][nu] + g[s][nu] * dx[mu][s] + g[mu][s] * dx[nu][s];
            }
            l[mu][nu] = v;
            l[nu][mu] = v;
        }
    }
    l
}

/// `K^X` together with the Lie derivative it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationTensor {
    pub k: Mat4,
    pub lie: Mat4,
}

impl DeformationTensor {
    /// `K(V, W)` for covectors raised with `ginv`, i.e. `K(∇u, ∇u)`.
    pub fn on_gradient(&self, ginv: &Mat4, du: &Vec4) -> f64 {
        let mut up = [0.0; 4];
        for (mu, u) in up.iter_mut().enumerate() {
            *u = (0..4).map(|n| ginv[mu][n] * du[n]).sum();
        }
        crate::numerics::linalg::bilinear4(&self.k, &up, &up)
    }
}

pub fn deformation_k<M, X>(m: &M, x: &X, q1: f64, q2: f64) -> Result<DeformationTensor>
where
    M: MetricProvider + ?Sized,
    X: VectorField + ?Sized,
{
    let g = m.metric(q1, q2);
    let ginv = m.inverse_metric(q1, q2)?;
    let lie = lie_derivative_metric(m, x, q1, q2);
    let mut tr = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            tr += ginv[i][j] * lie[j][i];
        }
    }
    let mut k = ZERO4;
    for i in 0..4 {
        for j in 0..4 {
            k[i][j] = 0.5 * lie[i][j] - 0.25 * tr * g[i][j];
        }
    }
    Ok(DeformationTensor { k, lie })
}

/// Largest eigenvalue of `K` relative to the Riemannian reference metric
/// `|g| = Q|Λ|Qᵀ` built from the eigen-decomposition of `g`. Negative iff
/// `K` is negative definite.
pub fn negdef_margin(k: &Mat4, g: &Mat4) -> f64 {
    let (ev, q) = sym_eigen4(g);
    let mut h = ZERO4;
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] = (0..4).map(|l| q[i][l] * ev[l].abs() * q[j][l]).sum();
        }
    }
    match generalized_sym_eigenvalues4(k, &h) {
        Some(ev) => ev[3],
        None => f64::INFINITY,
    }
}

/// `true` iff `V ↦ K(V, V)` is negative definite with every eigenvalue (in a
/// frame orthonormal for `|g|`) below `−tol`.
pub fn negdef_check(k: &DeformationTensor, g: &Mat4, tol: f64) -> bool {
    negdef_margin(&k.k, g) < -tol
}
