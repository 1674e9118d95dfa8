use core::f64::consts::PI;

use crate::energy::RedshiftComponent;
use crate::spacetime::BlackHoleParams;
use crate::{Error, Result};

/// How the nodes of one axis are laid out and closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    /// Nodes include both endpoints; each end carries a [`Boundary`].
    Bounded { lower: Boundary, upper: Boundary },
    /// `n` nodes on `[start, start + n·step)`, wrapping around.
    Periodic,
    /// Polar angle: nodes at `(j + ½)·π/n`, never on the axis. The faces at
    /// the poles carry zero flux; ghost values across the pole use the
    /// parity `(−1)^m`.
    Polar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// No condition: one-sided stencils. Correct on spacelike boundaries,
    /// through which every characteristic leaves the domain.
    Outflow,
    /// Homogeneous Dirichlet data.
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub n: usize,
    pub kind: AxisKind,
}

impl Axis {
    pub fn node(&self, i: usize) -> f64 {
        match self.kind {
            AxisKind::Polar => (i as f64 + 0.5) * self.step,
            _ => self.start + i as f64 * self.step,
        }
    }

    /// Coordinate of the face between nodes `i − 1` and `i` (`i = 0..=n`).
    pub fn face(&self, i: usize) -> f64 {
        match self.kind {
            AxisKind::Polar => i as f64 * self.step,
            _ => self.start + (i as f64 - 0.5) * self.step,
        }
    }

    pub fn end(&self) -> f64 {
        match self.kind {
            AxisKind::Bounded { .. } => self.start + (self.n - 1) as f64 * self.step,
            AxisKind::Periodic => self.start + self.n as f64 * self.step,
            AxisKind::Polar => PI,
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.node(i))
    }
}

/// Tensor-product grid on the `(q1, q2)` plane; for Kerr–de Sitter `q1 = r`
/// and `q2 = θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub q1: Axis,
    pub q2: Axis,
}

/// Smallest admissible number of nodes per axis.
pub const MIN_NODES: usize = 16;

impl Grid2D {
    fn checked(q1: Axis, q2: Axis) -> Result<Self> {
        if q1.n < MIN_NODES || q2.n < MIN_NODES {
            return Err(Error::InvalidGrid("each axis needs at least 16 nodes"));
        }
        if !(q1.step > 0.0 && q2.step > 0.0 && q1.step.is_finite() && q2.step.is_finite()) {
            return Err(Error::InvalidGrid("grid spacing must be positive"));
        }
        Ok(Self { q1, q2 })
    }

    fn polar(n_theta: usize) -> Axis {
        Axis { start: 0.0, step: PI / n_theta as f64, n: n_theta, kind: AxisKind::Polar }
    }

    fn bounded(lo: f64, hi: f64, n: usize, lower: Boundary, upper: Boundary) -> Axis {
        Axis { start: lo, step: (hi - lo) / (n.max(2) - 1) as f64, n, kind: AxisKind::Bounded { lower, upper } }
    }

    /// The whole extended domain `[r_- − δ, r_+ + δ] × (0, π)` with outflow
    /// at both radial ends.
    pub fn extended(p: &BlackHoleParams, n_r: usize, n_theta: usize) -> Result<Self> {
        let q1 = Self::bounded(p.r_minus() - p.delta, p.r_plus() + p.delta, n_r, Boundary::Outflow, Boundary::Outflow);
        Self::checked(q1, Self::polar(n_theta))
    }

    /// One component of `M_δ ∖ K_{2δ}` with homogeneous Dirichlet data on
    /// `∂K_{2δ}` and outflow at the outer end.
    pub fn dirichlet_component(
        p: &BlackHoleParams,
        component: RedshiftComponent,
        n_r: usize,
        n_theta: usize,
    ) -> Result<Self> {
        let d = p.delta;
        let q1 = match component {
            RedshiftComponent::Lower => {
                Self::bounded(p.r_minus() - d, p.r_minus() + 2.0 * d, n_r, Boundary::Outflow, Boundary::Dirichlet)
            }
            RedshiftComponent::Upper => {
                Self::bounded(p.r_plus() - 2.0 * d, p.r_plus() + d, n_r, Boundary::Dirichlet, Boundary::Outflow)
            }
        };
        Self::checked(q1, Self::polar(n_theta))
    }

    /// A bounded radial interval with explicit boundary types.
    pub fn radial(r0: f64, r1: f64, n_r: usize, n_theta: usize, lower: Boundary, upper: Boundary) -> Result<Self> {
        if !(r1 > r0) {
            return Err(Error::InvalidGrid("empty radial interval"));
        }
        Self::checked(Self::bounded(r0, r1, n_r, lower, upper), Self::polar(n_theta))
    }

    /// Doubly periodic box `[x0, x1) × [y0, y1)`.
    pub fn periodic_box(x: (f64, f64), nx: usize, y: (f64, f64), ny: usize) -> Result<Self> {
        let q1 = Axis { start: x.0, step: (x.1 - x.0) / nx as f64, n: nx, kind: AxisKind::Periodic };
        let q2 = Axis { start: y.0, step: (y.1 - y.0) / ny as f64, n: ny, kind: AxisKind::Periodic };
        Self::checked(q1, q2)
    }

    pub fn len(&self) -> usize {
        self.q1.n * self.q2.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.q2.n + j
    }

    /// Same layout with `factor` times as many intervals per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let refine = |a: &Axis| -> Axis {
            match a.kind {
                AxisKind::Bounded { .. } => {
                    let n = (a.n - 1) * factor + 1;
                    Axis { step: a.step / factor as f64, n, ..*a }
                }
                _ => Axis { step: a.step / factor as f64, n: a.n * factor, ..*a },
            }
        };
        Self::checked(refine(&self.q1), refine(&self.q2))
    }
}
