//! Energy currents and the red-shift multiplier.
//!
//! For a real field `u` and a vector field `X`,
//!
//! ```text
//! T(X, Y) = (Xu)(Yu) − ½ g(∇u, ∇u) g(X, Y),    g(J_X, Y) = T(X, Y),
//! Div J_X = (Xu) □_g u + K^X(∇u, ∇u),         K^X = ½ L_X g − ¼ tr(g⁻¹ L_X g) g.
//! ```
//!
//! Complex mode fields are handled as the pair `(Re u, Im u)`: every
//! quadratic quantity is the sum of the two real contributions.

mod deformation;
mod identity;
mod redshift;
mod stress;

pub use deformation::{
    deformation_k, lie_derivative_metric, negdef_check, negdef_margin, ConstantField, DeformationTensor, FieldFn,
    VectorField,
};
pub use identity::{divergence_identity_residual, flux_integral, Surface};
pub use redshift::{
    redshift_field, CertificationReport, RedshiftComponent, RedshiftField, RedshiftProfile, CERT_SAMPLES_R,
    CERT_SAMPLES_THETA,
};
pub use stress::{current_j, current_j_complex, stress_energy, stress_energy_complex, stress_energy_with};
