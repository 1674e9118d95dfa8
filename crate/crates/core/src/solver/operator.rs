use alloc::vec;
use alloc::vec::Vec;

use super::grid::{Axis, AxisKind, Boundary, Grid2D};
use super::source::SourceSpec;
use super::state::WaveState;
use crate::energy::VectorField;
use crate::spacetime::{Chart, MetricProvider};
use crate::{Error, Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Default Courant factor.
pub const DEFAULT_CFL: f64 = 0.25;

/// Default Kreiss–Oliger coefficient; see [`WaveOperator::with_dissipation`].
pub const DEFAULT_DISSIPATION: f64 = 0.1;

/// Couplings to the second spatial coordinate are required to vanish; this
/// is the relative size above which the metric is rejected.
const COUPLING_TOL: f64 = 1e-12;

/// Damping term `ψ X u` added to the operator, `(□_g + ψX) u = f`.
#[derive(Clone, Copy)]
pub struct Damping<'a> {
    pub psi: &'a dyn Fn(f64) -> f64,
    pub field: &'a dyn VectorField,
}

/// Discrete `√g □_g` for one azimuthal mode, in divergence form with the
/// densitized coefficients `A^{μν} = √g g^{μν}` sampled once at
/// construction.
///
/// The metric must be independent of the time coordinate (index 0) and the
/// ignorable coordinate (index 3), and must not couple index 2 to the
/// others. Time slices must be spacelike (`A^{00} > 0`).
#[derive(Debug, Clone)]
pub struct WaveOperator {
    grid: Grid2D,
    chart: Chart,
    m: i32,
    cfl: f64,
    rate: f64,
    a00: Vec<f64>,
    a01: Vec<f64>,
    a03: Vec<f64>,
    a11: Vec<f64>,
    a13: Vec<f64>,
    a22: Vec<f64>,
    a33: Vec<f64>,
    sg: Vec<f64>,
    /// `A^{22}` on the face below node `j` (`j = 0..=n2`), per `q1` node.
    face2: Vec<f64>,
    /// `√g ψ X^μ` per node, for μ = 0, 1, 3.
    damp: Option<Vec<[f64; 3]>>,
    dissipation: f64,
    dirichlet_lo: bool,
    dirichlet_hi: bool,
}

fn densitized<M: MetricProvider + ?Sized>(metric: &M, q1: f64, q2: f64) -> Result<([[f64; 4]; 4], f64)> {
    let ginv = metric.inverse_metric(q1, q2)?;
    let sg = metric.sqrt_det(q1, q2);
    if !(sg.is_finite() && sg > 0.0) {
        return Err(Error::InvalidGrid("metric volume density vanishes on the grid"));
    }
    let mut a = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            a[mu][nu] = sg * ginv[mu][nu];
        }
    }
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if a[0][2].abs() + a[1][2].abs() + a[2][3].abs() > COUPLING_TOL * scale {
        return Err(Error::InvalidGrid("metric couples the second spatial coordinate"));
    }
    Ok((a, sg))
}

impl WaveOperator {
    pub fn new<M: MetricProvider + ?Sized>(
        metric: &M,
        grid: &Grid2D,
        m: i32,
        cfl: f64,
        damping: Option<Damping<'_>>,
    ) -> Result<Self> {
        if !(cfl > 0.0 && cfl.is_finite()) {
            return Err(Error::InvalidParameter { name: "cfl", reason: "must be positive" });
        }
        let (n1, n2) = (grid.q1.n, grid.q2.n);
        let n = n1 * n2;
        let mut op = Self {
            grid: grid.clone(),
            chart: metric.chart(),
            m,
            cfl,
            rate: 0.0,
            a00: vec![0.0; n],
            a01: vec![0.0; n],
            a03: vec![0.0; n],
            a11: vec![0.0; n],
            a13: vec![0.0; n],
            a22: vec![0.0; n],
            a33: vec![0.0; n],
            sg: vec![0.0; n],
            face2: vec![0.0; n1 * (n2 + 1)],
            damp: None,
            dissipation: DEFAULT_DISSIPATION,
            dirichlet_lo: false,
            dirichlet_hi: false,
        };
        if let AxisKind::Bounded { lower, upper } = grid.q1.kind {
            op.dirichlet_lo = lower == Boundary::Dirichlet;
            op.dirichlet_hi = upper == Boundary::Dirichlet;
        }
        if grid.q2.kind != AxisKind::Polar && matches!(grid.q2.kind, AxisKind::Bounded { .. }) {
            return Err(Error::InvalidGrid("second axis must be polar or periodic"));
        }

        for i in 0..n1 {
            let q1 = grid.q1.node(i);
            for j in 0..n2 {
                let q2 = grid.q2.node(j);
                let (a, sg) = densitized(metric, q1, q2)?;
                let k = grid.index(i, j);
                if !(a[0][0] > 0.0) {
                    return Err(Error::SliceNotSpacelike { r: q1, theta: q2 });
                }
                op.a00[k] = a[0][0];
                op.a01[k] = a[0][1];
                op.a03[k] = a[0][3];
                op.a11[k] = a[1][1];
                op.a13[k] = a[1][3];
                op.a22[k] = a[2][2];
                op.a33[k] = a[3][3];
                op.sg[k] = sg;
            }
            for j in 0..=n2 {
                let pole = grid.q2.kind == AxisKind::Polar && (j == 0 || j == n2);
                op.face2[i * (n2 + 1) + j] = if pole { 0.0 } else { densitized(metric, q1, grid.q2.face(j))?.0[2][2] };
            }
        }
        if let Some(d) = damping {
            if d.field.chart() != metric.chart() {
                return Err(Error::InvalidParameter {
                    name: "damping",
                    reason: "field chart differs from metric chart",
                });
            }
            let mut damp = vec![[0.0; 3]; n];
            for i in 0..n1 {
                let q1 = grid.q1.node(i);
                let psi = (d.psi)(q1);
                if !(psi >= 0.0 && psi.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "damping",
                        reason: "psi must be finite and non-negative",
                    });
                }
                if psi == 0.0 {
                    continue;
                }
                for j in 0..n2 {
                    let x = d.field.at(q1, grid.q2.node(j));
                    let k = grid.index(i, j);
                    let w = op.sg[k] * psi;
                    damp[k] = [w * x[0], w * x[1], w * x[3]];
                }
            }
            op.damp = Some(damp);
        }
        op.rate = op.measure_rate();
        Ok(op)
    }

    /// `Σ (coordinate characteristic speed / spacing)`, maximized over the
    /// nodes; the stable step is `cfl / rate`.
    fn measure_rate(&self) -> f64 {
        let g = &self.grid;
        let m = self.m.unsigned_abs() as f64;
        let mut rate = 0.0f64;
        for i in 0..g.q1.n {
            for j in 0..g.q2.n {
                let k = g.index(i, j);
                let (a00, a01, a11) = (self.a00[k], self.a01[k], self.a11[k]);
                let disc = (a01 * a01 - a00 * a11).max(0.0).sqrt();
                let c1 = (a01.abs() + disc) / a00;
                let n2 = g.q2.n;
                let f2 = 0.5 * (self.face2[i * (n2 + 1) + j] + self.face2[i * (n2 + 1) + j + 1]);
                let a22 = if g.q2.kind == AxisKind::Polar { self.a22[k].min(f2) } else { self.a22[k] };
                let c2 = (-a22).max(0.0).sqrt() / a00.sqrt();
                let c3 = m * ((-self.a33[k]).max(0.0).sqrt() / a00.sqrt() + self.a03[k].abs() / a00);
                rate = rate.max(c1 / g.q1.step + c2 / g.q2.step + c3);
            }
        }
        rate
    }

    /// Sets the coefficient `σ` of the radial Kreiss–Oliger term
    /// `−(σ/16h) δ⁴`, added to both `∂_τ u` and `∂_τ v` away from the two
    /// outermost rows. It damps the grid-scale mode that the wide radial
    /// stencil does not see, costs `O(h³)` in accuracy and leaves constants
    /// exact. `σ = 0` disables it.
    pub fn with_dissipation(mut self, sigma: f64) -> Self {
        self.dissipation = sigma.max(0.0);
        self
    }

    pub fn dissipation(&self) -> f64 {
        self.dissipation
    }

    /// Adds the Kreiss–Oliger term for `w` to `out`.
    pub(crate) fn dissipate(&self, w: &[C64], out: &mut [C64]) {
        if self.dissipation == 0.0 {
            return;
        }
        let g = &self.grid;
        let (n1, n2) = (g.q1.n, g.q2.n);
        let c = -self.dissipation / (16.0 * g.q1.step);
        let periodic = g.q1.kind == AxisKind::Periodic;
        for i in 0..n1 {
            if !periodic && (i < 2 || i + 2 >= n1 || self.is_dirichlet_row(i)) {
                continue;
            }
            let at = |o: isize| ((i as isize + o).rem_euclid(n1 as isize)) as usize * n2;
            let (m2, m1, p1, p2) = (at(-2), at(-1), at(1), at(2));
            let k0 = i * n2;
            for j in 0..n2 {
                let d4 = w[m2 + j] - w[m1 + j] * 4.0 + w[k0 + j] * 6.0 - w[p1 + j] * 4.0 + w[p2 + j];
                out[k0 + j] += d4 * c;
            }
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    pub fn cfl(&self) -> f64 {
        self.cfl
    }

    /// Largest admissible step, `cfl / rate`.
    pub fn max_dt(&self) -> f64 {
        if self.rate > 0.0 {
            self.cfl / self.rate
        } else {
            f64::INFINITY
        }
    }

    pub fn is_dirichlet_row(&self, i: usize) -> bool {
        (self.dirichlet_lo && i == 0) || (self.dirichlet_hi && i + 1 == self.grid.q1.n)
    }

    pub fn sqrt_det_at(&self, k: usize) -> f64 {
        self.sg[k]
    }

    /// Densitized inverse metric `A^{μν}` at node `k`.
    pub fn densitized_at(&self, k: usize) -> [[f64; 4]; 4] {
        let mut a = [[0.0; 4]; 4];
        a[0][0] = self.a00[k];
        a[0][1] = self.a01[k];
        a[1][0] = self.a01[k];
        a[0][3] = self.a03[k];
        a[3][0] = self.a03[k];
        a[1][1] = self.a11[k];
        a[1][3] = self.a13[k];
        a[3][1] = self.a13[k];
        a[2][2] = self.a22[k];
        a[3][3] = self.a33[k];
        a
    }

    fn check_mode(&self, state: &WaveState) -> Result<()> {
        if state.m != self.m {
            return Err(Error::ModeMismatch { expected: self.m, found: state.m });
        }
        if state.n1 != self.grid.q1.n || state.n2 != self.grid.q2.n {
            return Err(Error::InvalidGrid("state does not live on the operator's grid"));
        }
        Ok(())
    }

    /// Second-order `∂_1 w` at `(i, j)` for any nodal array.
    pub(crate) fn d1<F: Fn(usize) -> C64>(&self, i: usize, w: F) -> C64 {
        let a = &self.grid.q1;
        let h = a.step;
        let n = a.n;
        match a.kind {
            AxisKind::Periodic => (w((i + 1) % n) - w((i + n - 1) % n)) / (2.0 * h),
            _ if i == 0 => (w(0) * -3.0 + w(1) * 4.0 - w(2)) / (2.0 * h),
            _ if i + 1 == n => (w(n - 1) * 3.0 - w(n - 2) * 4.0 + w(n - 3)) / (2.0 * h),
            _ => (w(i + 1) - w(i - 1)) / (2.0 * h),
        }
    }

    /// Second-order `∂_2 w` at `(i, j)`, with the `(−1)^m` ghost across
    /// the poles.
    pub(crate) fn d2(&self, state_u: &[C64], i: usize, j: usize) -> C64 {
        let a: &Axis = &self.grid.q2;
        let n2 = a.n;
        let row = &state_u[i * n2..(i + 1) * n2];
        let parity = if self.m % 2 == 0 { 1.0 } else { -1.0 };
        let (lo, hi) = match a.kind {
            AxisKind::Periodic => (row[(j + n2 - 1) % n2], row[(j + 1) % n2]),
            _ => {
                let lo = if j == 0 { row[0] * parity } else { row[j - 1] };
                let hi = if j + 1 == n2 { row[n2 - 1] * parity } else { row[j + 1] };
                (lo, hi)
            }
        };
        (hi - lo) / (2.0 * a.step)
    }

    /// `√g □_g u − A^{00} ∂_τ v` at node `(i, j)`: every term of the
    /// divergence-form operator except the one carrying `∂_τ² u`.
    fn spatial_at(&self, u: &[C64], v: &[C64], i: usize, j: usize) -> C64 {
        let g = &self.grid;
        let n2 = g.q2.n;
        let k = i * n2 + j;
        let im = C64::new(0.0, self.m as f64);
        let m2 = (self.m as f64) * (self.m as f64);
        let idx = |ii: usize| ii * n2 + j;

        let du = self.d1(i, |ii| u[idx(ii)]);
        let dv = self.d1(i, |ii| v[idx(ii)]);
        let d_a01v = self.d1(i, |ii| v[idx(ii)] * self.a01[idx(ii)]);
        let d_a13u = self.d1(i, |ii| u[idx(ii)] * self.a13[idx(ii)]);
        // Wide `D(A D u)` built from the same first difference as the mixed
        // terms. Beyond the horizons `A^{11} > 0`, and a compact second
        // difference would then outweigh the centered first difference at
        // the grid scale, making the semi-discrete problem ill-posed there.
        let flux1 = self.d1(i, |ii| self.d1(ii, |jj| u[idx(jj)]) * self.a11[idx(ii)]);

        let h2 = g.q2.step;
        let row = &u[i * n2..(i + 1) * n2];
        let f2 = &self.face2[i * (n2 + 1)..(i + 1) * (n2 + 1)];
        let (lo, hi) = match g.q2.kind {
            AxisKind::Periodic => (row[(j + n2 - 1) % n2], row[(j + 1) % n2]),
            // Pole faces carry zero flux, so the ghost value is irrelevant.
            _ => (if j == 0 { row[0] } else { row[j - 1] }, if j + 1 == n2 { row[n2 - 1] } else { row[j + 1] }),
        };
        let flux2 = ((hi - row[j]) * f2[j + 1] - (row[j] - lo) * f2[j]) / (h2 * h2);

        dv * self.a01[k]
            + d_a01v
            + im * v[k] * (2.0 * self.a03[k])
            + flux1
            + im * d_a13u
            + im * du * self.a13[k]
            + flux2
            - u[k] * (m2 * self.a33[k])
    }

    /// Discrete `□_g u` at node `(i, j)`, given `u`, `v = ∂_τ u` and
    /// `w = ∂_τ² u` on the grid.
    pub fn dalembertian_at(&self, u: &WaveState, w: &[C64], i: usize, j: usize) -> Result<C64> {
        self.check_mode(u)?;
        let k = u.index(i, j);
        Ok((w[k] * self.a00[k] + self.spatial_at(&u.u, &u.v, i, j)) / self.sg[k])
    }

    /// `∂_τ v` from `(□_g + ψX) u = f`, written to `out`. `source` holds
    /// `√g f` at each node.
    pub(crate) fn acceleration(&self, u: &[C64], v: &[C64], source: Option<&[C64]>, out: &mut [C64]) {
        let g = &self.grid;
        let (n1, n2) = (g.q1.n, g.q2.n);
        let im = C64::new(0.0, self.m as f64);
        for i in 0..n1 {
            if self.is_dirichlet_row(i) {
                out[i * n2..(i + 1) * n2].fill(C64::new(0.0, 0.0));
                continue;
            }
            for j in 0..n2 {
                let k = i * n2 + j;
                let mut rhs = -self.spatial_at(u, v, i, j);
                if let Some(s) = source {
                    rhs += s[k];
                }
                if let Some(d) = &self.damp {
                    let [x0, x1, x3] = d[k];
                    if x0 != 0.0 || x1 != 0.0 || x3 != 0.0 {
                        let du = self.d1(i, |ii| u[ii * n2 + j]);
                        rhs -= v[k] * x0 + du * x1 + im * u[k] * x3;
                    }
                }
                out[k] = rhs / self.a00[k];
            }
        }
    }

    /// Samples `√g · (spatial part of f)` so that the source at time `t` is
    /// `time_factor(t) · samples`.
    pub fn source_samples(&self, source: &SourceSpec) -> Result<Vec<C64>> {
        if source.m != self.m {
            return Err(Error::ModeMismatch { expected: self.m, found: source.m });
        }
        let g = &self.grid;
        let mut out = vec![C64::new(0.0, 0.0); g.len()];
        for i in 0..g.q1.n {
            let r = g.q1.node(i);
            let br = source.radial.value(r);
            if br == 0.0 || self.is_dirichlet_row(i) {
                continue;
            }
            for j in 0..g.q2.n {
                let k = g.index(i, j);
                out[k] = source.amplitude * (self.sg[k] * br * source.angular.value(source.m, g.q2.node(j)));
            }
        }
        Ok(out)
    }
}
