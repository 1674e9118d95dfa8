//! Kerr–de Sitter geometry.
//!
//! Coordinates are always ordered `(time, r, θ, φ)` and the signature is
//! `(+, −, −, −)`. Three charts are provided:
//!
//! * Boyer–Lindquist `(t, r, θ, φ)`, valid on `r_- < r < r_+`;
//! * Kerr-star `(t_+, r, θ, φ_+)` with `t_+ = t − F_t(r)`, `φ_+ = φ − F_φ(r)`,
//!   smooth across both horizons;
//! * shifted Kerr-star `(τ, r, θ, φ_+)` with `τ = t_+ − H(r)`, whose level
//!   sets are spacelike on the whole extended domain. The solver evolves in
//!   this chart.

mod christoffel;
mod metric;
mod params;
mod transition;

pub use christoffel::{christoffel, metric_derivatives, Christoffel};
pub use metric::{
    causal_character, inverse_metric, sqrt_det, CausalCharacter, KerrDeSitter, Metric4, MetricProvider, Minkowski,
    SpacetimePoint,
};
pub use params::{
    delta_r, delta_r_prime, delta_r_raw, find_horizons, surface_gravity, BlackHoleParams, HorizonGeometry,
};
pub use transition::{ChartTransition, SliceShift};

/// Coordinate chart tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    BoyerLindquist,
    KerrStar,
    ShiftedKerrStar,
    /// Cartesian `(t, x, y, z)` on flat space.
    Minkowski,
}

impl core::fmt::Display for Chart {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Chart::BoyerLindquist => "boyer-lindquist",
            Chart::KerrStar => "kerr-star",
            Chart::ShiftedKerrStar => "shifted-kerr-star",
            Chart::Minkowski => "minkowski",
        })
    }
}
