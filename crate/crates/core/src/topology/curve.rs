use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpherePoint;

/// Closed polyline on a sphere; the last point connects back to the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct ClosedCurve {
    points: Vec<SpherePoint>,
    tolerance: f64,
}

#[derive(Deserialize)]
struct RawCurve {
    points: Vec<SpherePoint>,
    tolerance: f64,
}

impl TryFrom<RawCurve> for ClosedCurve {
    type Error = Error;
    fn try_from(raw: RawCurve) -> Result<Self> {
        ClosedCurve::new(raw.points, raw.tolerance)
    }
}

impl ClosedCurve {
    /// Requires at least three points, one dimension, and every chordal gap
    /// (including last → first) at most `tolerance`.
    pub fn new(points: Vec<SpherePoint>, tolerance: f64) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Parameter(format!("closed curve needs ≥ 3 points, got {}", points.len())));
        }
        let dim = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
        }
        let curve = Self { points, tolerance };
        let gap = curve.max_gap();
        if gap > tolerance {
            return Err(Error::Parameter(format!("curve gap {gap} exceeds tolerance {tolerance}")));
        }
        Ok(curve)
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Largest chord between consecutive points, closing segment included.
    pub fn max_gap(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|i| self.points[i].chord(&self.points[(i + 1) % n])).fold(0.0, f64::max)
    }

    /// Polygonal length in chords.
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|i| self.points[i].chord(&self.points[(i + 1) % n])).sum()
    }

    /// Same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points, tolerance: self.tolerance }
    }

    /// Smallest chord from `x` to a vertex.
    pub fn distance_to(&self, x: &SpherePoint) -> f64 {
        self.points.iter().map(|p| p.chord(x)).fold(f64::INFINITY, f64::min)
    }

    /// Symmetric Hausdorff distance between vertex sets.
    pub fn hausdorff(&self, other: &ClosedCurve) -> f64 {
        let one = |a: &ClosedCurve, b: &ClosedCurve| a.points.iter().map(|p| b.distance_to(p)).fold(0.0, f64::max);
        one(self, other).max(one(other, self))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// One whitespace-separated point per line.
    pub fn to_plain_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let line: Vec<String> = p.coords().iter().map(|c| format!("{c:.12}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn circle(n: usize) -> Vec<SpherePoint> {
        (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                SpherePoint::new(&[t.cos(), t.sin(), 0.0, 0.0]).unwrap()
            })
            .collect()
    }

    #[test]
    fn gaps_are_checked() {
        assert!(ClosedCurve::new(circle(100), 0.07).is_ok());
        assert!(ClosedCurve::new(circle(100), 0.05).is_err());
        let mut open = circle(100);
        open.truncate(50);
        assert!(ClosedCurve::new(open, 0.07).is_err());
    }

    #[test]
    fn serialization() {
        let c = ClosedCurve::new(circle(10), 1.0).unwrap();
        let back: ClosedCurve = serde_json::from_str(&c.to_json().unwrap()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.to_plain_text().lines().count(), 10);
        assert_eq!(c.reversed().reversed(), c);
        assert!((ClosedCurve::new(circle(1000), 1.0).unwrap().length() - TAU).abs() < 1e-4);
    }
}
