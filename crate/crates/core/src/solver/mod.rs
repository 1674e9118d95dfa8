//! Time-domain forward solution of `(□_g + ψX) u = f` for one azimuthal mode
//! `u = u_m(τ, r, θ) e^{imφ}`.
//!
//! The operator is discretized in divergence form with the densitized
//! coefficients `A^{μν} = √g g^{μν}` of any [`MetricProvider`]; for
//! Kerr–de Sitter this is the shifted Kerr-star chart, whose time slices are
//! spacelike on all of `M_δ`. Radial ends are spacelike, so they take no
//! boundary condition (one-sided stencils); `θ` nodes sit at `(j + ½)π/N`
//! and the pole faces carry no flux.
//!
//! [`MetricProvider`]: crate::spacetime::MetricProvider

mod evolve;
mod grid;
mod observables;
mod operator;
mod source;
mod state;

pub use evolve::{forward_solve, forward_solve_dirichlet, horizon_damping, solve_with, Evolution, SolveOptions};
pub use grid::{Axis, AxisKind, Boundary, Grid2D, MIN_NODES};
pub use observables::{
    current_density, energy_density, energy_functional, gradient_at, ignorable_period, integrate_axis, l2_norm,
    mean_value, q1_flux, row_integrals, sample_field,
};
pub use operator::{Damping, WaveOperator, DEFAULT_CFL, DEFAULT_DISSIPATION};
pub use source::{AngularProfile, SourceSpec, Support};
pub use state::WaveState;
