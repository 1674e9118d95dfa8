use alloc::vec;
use alloc::vec::Vec;

use super::norms::trapezoid;
use crate::energy::{deformation_k, DeformationTensor, VectorField};
use crate::numerics::linalg::{Mat4, Vec4};
use crate::solver::{
    current_density, gradient_at, ignorable_period, integrate_axis, row_integrals, sample_field, AxisKind, SourceSpec,
    WaveOperator, WaveState,
};
use crate::spacetime::{Chart, MetricProvider};
use crate::{Error, Result, C64};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// `∇τ = g^{μ0}∂_μ`, future-directed and timelike wherever the time slices
/// are spacelike. A convenient multiplier on all of `M_δ`.
pub struct SliceNormal<'a, M: ?Sized> {
    pub metric: &'a M,
}

impl<M: MetricProvider + ?Sized> VectorField for SliceNormal<'_, M> {
    fn chart(&self) -> Chart {
        self.metric.chart()
    }

    fn at(&self, q1: f64, q2: f64) -> Vec4 {
        self.metric.inverse_metric(q1, q2).map(|g| g[0]).unwrap_or([0.0; 4])
    }
}

/// The space-time region `Ω_T = {t0 ≤ τ ≤ T, q1 ∈ range}` and weights of a
/// budget. Times are those of the first and last snapshot.
#[derive(Clone, Copy)]
pub struct BudgetRegion<'a> {
    /// Radial range, snapped to the nearest grid nodes; `None` is the
    /// whole grid.
    pub q1: Option<(f64, f64)>,
    /// Rate of the weight `e^{2ντ}`.
    pub nu: f64,
    /// `χ(q1)` and its derivative; `None` is `χ ≡ 1`.
    pub cutoff: Option<&'a dyn Fn(f64) -> (f64, f64)>,
}

impl Default for BudgetRegion<'_> {
    fn default() -> Self {
        Self { q1: None, nu: 0.0, cutoff: None }
    }
}

/// Outward flux `∫ e^{2ντ}χ J_X·n dS` through one piece of `∂Ω_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFlux {
    pub name: &'static str,
    pub flux: f64,
    /// The piece is spacelike with `Ω_T` to its past, so the flux of a
    /// future-directed timelike multiplier must be `≥ 0`.
    pub expect_nonnegative: bool,
}

/// Divergence-theorem budget `Σ outward fluxes = ∫_Ω Div(e^{2ντ}χJ_X(u))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxBudget {
    pub surfaces: Vec<SurfaceFlux>,
    pub interior: f64,
    /// `Σ fluxes − interior`; a discretization error.
    pub defect: f64,
}

impl FluxBudget {
    pub fn boundary_total(&self) -> f64 {
        self.surfaces.iter().map(|s| s.flux).sum()
    }

    /// Every piece expected to be non-negative is at least `−tol`.
    pub fn signs_ok(&self, tol: f64) -> bool {
        self.surfaces.iter().all(|s| !s.expect_nonnegative || s.flux >= -tol)
    }

    /// `|defect|` relative to the largest term in the budget.
    pub fn relative_defect(&self) -> f64 {
        let scale = self.surfaces.iter().map(|s| s.flux.abs()).fold(self.interior.abs(), f64::max);
        if scale > 0.0 {
            self.defect.abs() / scale
        } else {
            0.0
        }
    }
}

/// Assembles the weighted energy budget of a forward run.
///
/// With `Div J_X(u) = (Xu)□u + K^X(∇u, ∇u)`, `□u = f` and the product rule
/// for the weight, the interior integrand is
///
/// ```text
/// e^{2ντ}[χ((Xu)f + K^X(∇u,∇u)) + 2νχ J^τ + χ' J^{q1}] √g,
/// ```
///
/// summed over real and imaginary parts. Time integrals use the trapezoidal
/// rule over the snapshots, so the cadence must be fine enough for the
/// closure defect to be meaningful. The run must carry no damping term.
pub fn budget_report<M: MetricProvider + ?Sized>(
    metric: &M,
    op: &WaveOperator,
    field: &dyn VectorField,
    snapshots: &[WaveState],
    source: Option<&SourceSpec>,
    region: &BudgetRegion<'_>,
) -> Result<FluxBudget> {
    if snapshots.len() < 2 {
        return Err(Error::InsufficientData);
    }
    let grid = op.grid();
    let (n1, n2) = (grid.q1.n, grid.q2.n);
    let periodic = grid.q1.kind == AxisKind::Periodic;
    let (i_lo, i_hi) = match region.q1 {
        Some((a, b)) if !periodic => {
            let snap = |x: f64| (((x - grid.q1.start) / grid.q1.step).round().max(0.0) as usize).min(n1 - 1);
            (snap(a), snap(b))
        }
        _ => (0, n1 - 1),
    };
    if i_hi <= i_lo {
        return Err(Error::InvalidParameter { name: "region", reason: "budget region must span at least one cell" });
    }
    let range = (!periodic).then(|| (grid.q1.node(i_lo), grid.q1.node(i_hi)));
    let chi: Vec<(f64, f64)> = grid.q1.nodes().map(|q| region.cutoff.map_or((1.0, 0.0), |c| c(q))).collect();
    let x = sample_field(grid, field);
    let mut kx: Vec<DeformationTensor> = Vec::with_capacity(grid.len());
    let mut ginv: Vec<Mat4> = Vec::with_capacity(grid.len());
    for q1 in grid.q1.nodes() {
        for q2 in grid.q2.nodes() {
            kx.push(deformation_k(metric, field, q1, q2)?);
            ginv.push(metric.inverse_metric(q1, q2)?);
        }
    }
    let samples = source.map(|s| op.source_samples(s)).transpose()?;
    let period = ignorable_period(grid);
    let nu = region.nu;

    let mut slice_energy = Vec::with_capacity(snapshots.len());
    let mut lower = Vec::with_capacity(snapshots.len());
    let mut upper = Vec::with_capacity(snapshots.len());
    let mut interior = Vec::with_capacity(snapshots.len());
    let mut dens0 = vec![0.0; grid.len()];
    let mut dens1 = vec![0.0; grid.len()];
    let mut bulk = vec![0.0; grid.len()];
    for s in snapshots {
        let w = (2.0 * nu * s.time).exp();
        let bt = source.map_or(0.0, |src| src.time.value(s.time));
        for i in 0..n1 {
            let (c, dc) = chi[i];
            for j in 0..n2 {
                let k = grid.index(i, j);
                let g = gradient_at(op, s, i, j);
                let jd = current_density(op, k, &g, &x[k]);
                dens0[k] = c * jd[0];
                dens1[k] = jd[1];
                let mut xc = C64::new(0.0, 0.0);
                for mu in 0..4 {
                    xc += g[mu] * x[k][mu];
                }
                let work = match &samples {
                    Some(sm) if bt != 0.0 => (xc * (sm[k] * bt).conj()).re,
                    _ => 0.0,
                };
                let re: Vec4 = [g[0].re, g[1].re, g[2].re, g[3].re];
                let im: Vec4 = [g[0].im, g[1].im, g[2].im, g[3].im];
                let kk = kx[k].on_gradient(&ginv[k], &re) + kx[k].on_gradient(&ginv[k], &im);
                let sg = op.sqrt_det_at(k);
                bulk[k] = c * (work + sg * kk) + 2.0 * nu * c * jd[0] + dc * jd[1];
            }
        }
        let e = integrate_axis(&grid.q1, &row_integrals(grid, &dens0), range);
        slice_energy.push((s.time, w * e));
        interior.push((s.time, w * integrate_axis(&grid.q1, &row_integrals(grid, &bulk), range)));
        if !periodic {
            let row = |i: usize| period * integrate_axis(&grid.q2, &dens1[i * n2..(i + 1) * n2], None);
            lower.push((s.time, -w * chi[i_lo].0 * row(i_lo)));
            upper.push((s.time, w * chi[i_hi].0 * row(i_hi)));
        }
    }

    let spacelike_row = |i: usize| (0..n2).all(|j| op.densitized_at(grid.index(i, j))[1][1] > 0.0);
    let mut surfaces = vec![
        SurfaceFlux { name: "initial slice", flux: -slice_energy[0].1, expect_nonnegative: false },
        SurfaceFlux { name: "final slice", flux: slice_energy[slice_energy.len() - 1].1, expect_nonnegative: true },
    ];
    if !periodic {
        surfaces.push(SurfaceFlux {
            name: "lower end",
            flux: trapezoid(&lower),
            expect_nonnegative: spacelike_row(i_lo),
        });
        surfaces.push(SurfaceFlux {
            name: "upper end",
            flux: trapezoid(&upper),
            expect_nonnegative: spacelike_row(i_hi),
        });
    }
    let interior = trapezoid(&interior);
    let defect = surfaces.iter().map(|s| s.flux).sum::<f64>() - interior;
    Ok(FluxBudget { surfaces, interior, defect })
}
