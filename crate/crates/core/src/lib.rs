//! Support functions of convex bodies in the plane and in space, their
//! spherical-harmonic expansions, and the constructions built on them:
//!
//! * [`sphere_quadrature`]: product rules on `S^1`, `S^2` and Euler-angle
//!   rules on the rotation groups.
//! * [`harmonics`]: a fixed real orthonormal basis per order, the
//!   representation matrices `t^m(θ)` and coefficient containers.
//! * [`bodies`]: convex bodies described by their support functions, star
//!   bodies, the dual mixed volume `Ṽ₋₁` and the change-of-variables identity
//!   for homogeneous integrands.
//! * [`analysis`]: projections `π_m`, mean width, Steiner point, cosine
//!   transform multipliers and universality certificates.
//! * [`decomposition`]: writes a band-limited body `L` as `L + T₁ = T₂` with
//!   `T₁, T₂` finite nonnegative combinations of rotated copies of a generator.
//! * [`perturbation`]: searches for linear maps near the identity that make a
//!   body (centrally) universal.
//!
//! Points and directions are stored as [`Vec3`] in both dimensions; planar
//! data lives in the first two coordinates and the third is kept at zero.
//! Matrices follow the same embedding (a planar map `A` is stored as
//! `diag(A, 1)`).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod bodies;
pub mod decomposition;
mod error;
pub mod harmonics;
pub mod io;
pub mod perturbation;
pub mod rotation;
pub mod sphere_quadrature;

pub use error::{Error, Result};

pub use analysis::UniversalityCertificate;
pub use bodies::{ConvexBody, StarBody};
pub use decomposition::{DecompositionResult, GeneratorProfile};
pub use harmonics::{HarmonicExpansion, HarmonicIndex};
pub use perturbation::PerturbationSearchReport;
pub use rotation::Rotation;
pub use sphere_quadrature::{RotationQuadrature, SphereQuadrature};

use serde::{Deserialize, Serialize};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Ambient dimension. Only the plane and space are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn new(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }

    pub fn get(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Surface measure `ω_n` of the unit sphere `S^{n-1}`.
    pub fn sphere_measure(self) -> f64 {
        match self {
            Dim::Two => 2.0 * std::f64::consts::PI,
            Dim::Three => 4.0 * std::f64::consts::PI,
        }
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Dim::new(n)
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.get()
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.get())
    }
}

/// Neumaier-compensated sum. Quadrature sums go through this so that the
/// result does not depend on how node values were produced.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}
