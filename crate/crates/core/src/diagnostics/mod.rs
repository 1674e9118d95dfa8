//! Late-time diagnostics of forward solutions: the constant `Π₀f` the
//! solution settles to, exponential decay fits, weighted Sobolev norms,
//! divergence-theorem energy budgets and refinement studies.

mod budget;
mod cone;
mod convergence;
mod decay;
mod norms;
mod pi0;
mod scenarios;

pub use budget::{budget_report, BudgetRegion, FluxBudget, SliceNormal, SurfaceFlux};
pub use cone::{cone_energy_budget, Cone, ConeBudget};
pub use convergence::{convergence_runner, ConvergenceReport, Designation, Expectation, ObservableReport};
pub use decay::{decay_fit, DecayFit, FitWindow, MAX_LOG_RESIDUAL, NOISE_FLOOR};
pub use norms::{slice_norm_sq, sobolev_density, weighted_norm, SobolevOrder};
pub use pi0::{pi0, pi0_integral, pi0_prefactor};
pub use scenarios::{flat_cone_budget, flat_pulse_observables, FLAT_BOX};
