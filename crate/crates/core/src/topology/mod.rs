//! Integer invariants: the mapping degree of Sᵐ → Sᵐ by Jacobian
//! integration, and the Hopf invariant of S³ → S² as the linking number of
//! two regular fibers.
//!
//! The Hopf invariant is defined by Whitehead's integral ∫ η ∧ dη with
//! dη = f*ω. We do not discretize that integral; the classical equivalent
//! used here is the linking number of the preimages of two regular values.

mod bookkeeping;
mod curve;
mod degree;
mod fiber;
mod linking;

use serde::{Deserialize, Serialize};

pub use bookkeeping::bookkept_degree;
pub use curve::ClosedCurve;
pub use degree::{mapping_degree, MIN_GRID_CELLS};
pub use fiber::{hopf_invariant, hopf_invariant_with, trace_fiber, HopfOptions, DEFAULT_STEP, MIN_SINGULAR_VALUE};
pub use linking::gauss_linking;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeMethod {
    JacobianIntegral,
    Linking,
    Bookkeeping,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub value: i64,
    pub raw: f64,
    /// |raw − value|
    pub residual: f64,
    pub method: DegreeMethod,
}

impl DegreeReport {
    /// Rounds `raw`; `None` when the residual reaches 1/2.
    pub fn from_raw(raw: f64, method: DegreeMethod) -> Option<Self> {
        let value = raw.round();
        let residual = (raw - value).abs();
        (raw.is_finite() && residual < 0.5).then_some(Self { value: value as i64, raw, residual, method })
    }

    pub fn exact(value: i64, method: DegreeMethod) -> Self {
        Self { value, raw: value as f64, residual: 0.0, method }
    }
}
