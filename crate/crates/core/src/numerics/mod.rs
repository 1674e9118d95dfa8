//! Small self-contained numerical kernels: quadrature, interpolation, smooth
//! cutoffs, special functions, dense linear algebra on tiny matrices, root
//! bracketing and polynomial arithmetic.

pub mod interp;
pub mod linalg;
pub mod poly;
pub mod quad;
pub mod roots;
pub mod smooth;
pub mod special;
