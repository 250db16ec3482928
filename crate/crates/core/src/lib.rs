//! Explicit maps S³ → S² of prescribed Hopf degree, their fractional
//! Sobolev energies, and numerical certificates of their topology.
//!
//! * [`geometry`]: points, balls, rotations and packings on spheres.
//! * [`maps`]: the Hopf map, bumps, multi-bubbles and patched maps.
//! * [`energy`]: Monte Carlo and quadrature estimates of E_{s,p}.
//! * [`topology`]: mapping degrees, fiber tracing and linking numbers.
//! * [`experiments`]: the scaling experiment and the verification suite.

pub mod energy;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod maps;
pub mod topology;

pub use error::{Error, Result};
