use core::fmt;

use crate::spacetime::Chart;

/// Failure modes of the geometry, evolution and spectral routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Δ_r has no pair of simple positive roots bracketing a region where it
    /// is positive.
    NotAdmissible(&'static str),
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    OutOfChart {
        chart: Chart,
        r: f64,
    },
    Singular,
    /// ∇_ξ ξ was not parallel to the horizon generator ξ.
    NotProportional {
        residual: f64,
    },
    ZeroVector,
    /// The shifted time slices failed to be spacelike at the given point.
    SliceNotSpacelike {
        r: f64,
        theta: f64,
    },
    CertificationFailed {
        r: f64,
        theta: f64,
        property: &'static str,
    },
    UnsupportedSurface(&'static str),
    CflViolation {
        dt: f64,
        max_dt: f64,
    },
    NonFinite {
        time: f64,
    },
    ModeMismatch {
        expected: i32,
        found: i32,
    },
    InvalidGrid(&'static str),
    NoConvergence(&'static str),
    NoRoot,
    DegenerateHorizon,
    /// Argument-principle count disagrees with the number of polished roots.
    CountMismatch {
        expected: usize,
        found: usize,
    },
    /// A resonance in the upper half plane.
    UnstableMode {
        re: f64,
        im: f64,
    },
    InsufficientData,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotAdmissible(why) => write!(f, "parameters not admissible: {why}"),
            Error::InvalidParameter { name, reason } => write!(f, "invalid parameter `{name}`: {reason}"),
            Error::OutOfChart { chart, r } => write!(f, "r = {r} is outside the {chart:?} chart"),
            Error::Singular => f.write_str("matrix is singular"),
            Error::NotProportional { residual } => {
                write!(f, "acceleration of the horizon generator is not parallel to it (residual {residual:e})")
            }
            Error::ZeroVector => f.write_str("zero vector has no causal character"),
            Error::SliceNotSpacelike { r, theta } => {
                write!(f, "time slice is not spacelike at r = {r}, theta = {theta}")
            }
            Error::CertificationFailed { r, theta, property } => {
                write!(f, "red-shift certification failed at r = {r}, theta = {theta}: {property}")
            }
            Error::UnsupportedSurface(why) => write!(f, "unsupported surface: {why}"),
            Error::CflViolation { dt, max_dt } => write!(f, "time step {dt} exceeds stability limit {max_dt}"),
            Error::NonFinite { time } => write!(f, "non-finite field values at t = {time}"),
            Error::ModeMismatch { expected, found } => {
                write!(f, "state carries azimuthal mode {found}, operator expects {expected}")
            }
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::NoConvergence(what) => write!(f, "{what} did not converge"),
            Error::NoRoot => f.write_str("no zero of the matching determinant near the initial guess"),
            Error::DegenerateHorizon => f.write_str("horizon is degenerate (Δ_r has a multiple root)"),
            Error::CountMismatch { expected, found } => {
                write!(f, "argument principle counted {expected} zeros but {found} were polished")
            }
            Error::UnstableMode { re, im } => write!(f, "mode with Im ω > 0 found: ω = {re} + {im}i"),
            Error::InsufficientData => f.write_str("not enough data above the noise floor"),
        }
    }
}

impl core::error::Error for Error {}
