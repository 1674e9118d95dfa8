//! Separation of variables and resonances.
//!
//! For `u = e^{−iωt} e^{imφ} R(r) S(θ)` in Boyer–Lindquist coordinates the
//! wave equation splits into an angular eigenproblem `P_θ S = λS` and the
//! radial equation `P_r R + λR = 0`. A resonance is an `ω` for which the
//! solutions regular at both horizons in the Kerr-star sense are linearly
//! dependent, i.e. a zero of the entire matching function `F(ω)`.

mod angular;
mod radial;
mod residual;
mod scan;

pub use angular::{angular_eigenvalue, angular_eigenvalues, AngularMode, AngularProblem, DEFAULT_BASIS};
pub use radial::{
    coupled_matching, indicial_exponents, qnm, qnm_within, radial_qnm, Matching, ModeProfile, QnmMode, RadialProblem,
    RadialSolution, Side, DEFAULT_SEARCH_RADIUS, ROOT_RESIDUAL_TOL, UNSTABLE_TOL,
};
pub use residual::{apply_stationary, stationary_residual_check, StationaryResidual};
pub use scan::{spectral_gap_scan, CellCount, GapScanConfig, GapScanReport, ScanRoot, ZERO_MODE_TOL};
