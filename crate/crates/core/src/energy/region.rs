use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_uniform, sphere_measure, GeodesicBall, SpherePoint};

/// Integration domain Ω ⊂ Sⁿ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Whole,
    Ball { ball: GeodesicBall },
    Complement { ball: GeodesicBall },
    /// outer ∖ inner, with inner ⊂ outer.
    Difference { outer: GeodesicBall, inner: GeodesicBall },
}

impl Region {
    pub fn ball(ball: GeodesicBall) -> Self {
        Region::Ball { ball }
    }

    pub fn complement(ball: GeodesicBall) -> Self {
        Region::Complement { ball }
    }

    pub fn difference(outer: GeodesicBall, inner: GeodesicBall) -> Result<Self> {
        if outer.dim() != inner.dim() {
            return Err(Error::DimensionMismatch { expected: outer.dim(), got: inner.dim() });
        }
        if !outer.contains_ball(&inner) {
            return Err(Error::Precondition("difference region needs inner ⊂ outer".into()));
        }
        Ok(Region::Difference { outer, inner })
    }

    /// Dimension pinned by the region's balls, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Region::Whole => None,
            Region::Ball { ball } | Region::Complement { ball } => Some(ball.dim()),
            Region::Difference { outer, .. } => Some(outer.dim()),
        }
    }

    #[inline]
    pub fn contains(&self, x: &SpherePoint) -> bool {
        match self {
            Region::Whole => true,
            Region::Ball { ball } => ball.contains(x),
            Region::Complement { ball } => !ball.contains(x),
            Region::Difference { outer, inner } => outer.contains(x) && !inner.contains(x),
        }
    }

    pub fn measure(&self, n: usize) -> f64 {
        match self {
            Region::Whole => sphere_measure(n),
            Region::Ball { ball } => ball.measure(),
            Region::Complement { ball } => sphere_measure(n) - ball.measure(),
            Region::Difference { outer, inner } => outer.measure() - inner.measure(),
        }
    }

    /// Checks the dimension and that the region has positive measure.
    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(d) = self.dim() {
            if d != n {
                return Err(Error::DimensionMismatch { expected: n, got: d });
            }
        }
        if let Region::Difference { outer, inner } = self {
            if !outer.contains_ball(inner) {
                return Err(Error::Precondition("difference region needs inner ⊂ outer".into()));
            }
        }
        let m = self.measure(n);
        if !(m > 1e-12 * sphere_measure(n)) {
            return Err(Error::EmptyRegion(format!("{self:?} has measure {m}")));
        }
        Ok(())
    }

    /// Uniform sample from the region.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> SpherePoint {
        match self {
            Region::Whole => sample_uniform(n, rng),
            Region::Ball { ball } => ball.sample(rng),
            Region::Complement { ball } => loop {
                let x = sample_uniform(n, rng);
                if !ball.contains(&x) {
                    break x;
                }
            },
            Region::Difference { outer, inner } => loop {
                let x = outer.sample(rng);
                if !inner.contains(&x) {
                    break x;
                }
            },
        }
    }
}
