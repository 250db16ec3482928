//! Serializable construction records.
//!
//! A descriptor is the single source of truth for a map: [`SphereMap`]
//! compiles it into an evaluator, and two maps with equal descriptors
//! agree bit for bit. The JSON form is internally tagged by `"variant"`:
//!
//! ```json
//! {"variant": "compose",
//!  "outer": {"variant": "multi_bubble", "k": 2, "safety": 0.9,
//!            "basepoint": [1.0, 0.0, 0.0], "balls": [...]},
//!  "inner": {"variant": "hopf"}}
//! ```
//!
//! [`SphereMap`]: super::SphereMap

use serde::{Deserialize, Serialize};

use crate::geometry::{GeodesicBall, Rotation, SpherePoint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MapDescriptor {
    /// x ↦ x on Sᵈⁱᵐ.
    Identity { dim: usize },

    /// Sᵈᵒᵐᵃⁱⁿ_ᵈⁱᵐ → {value}.
    Constant { domain_dim: usize, value: SpherePoint },

    /// h(w, z) = (|w|² − |z|², 2wz̄) from S³ ⊂ C² to S² ⊂ R × C.
    Hopf,

    /// g(x) = (−2x₁x_{m+1}, …, −2x_m x_{m+1}, 1 − 2x²_{m+1}) on Sᵈⁱᵐ.
    EquatorCollapse { dim: usize },

    /// x ↦ Rx.
    Rotation { rotation: Rotation },

    /// Degree-one self-map of Sᵐ equal to `basepoint` outside the geodesic
    /// ball of radius `support_radius` = 2·atan(`stereo_radius`) around
    /// `center`.
    BumpDeg1 {
        center: SpherePoint,
        stereo_radius: f64,
        support_radius: f64,
        basepoint: SpherePoint,
    },

    /// h ∘ f where f is the S³ bump onto `lift` ∈ h⁻¹(basepoint).
    HopfBump {
        center: SpherePoint,
        stereo_radius: f64,
        support_radius: f64,
        basepoint: SpherePoint,
        lift: SpherePoint,
    },

    /// One degree-one bump per ball, `basepoint` elsewhere. `k` is the
    /// requested count; the balls are the recorded packing.
    MultiBubble {
        k: usize,
        safety: f64,
        basepoint: SpherePoint,
        balls: Vec<GeodesicBall>,
    },

    /// outer ∘ inner.
    Compose {
        outer: Box<MapDescriptor>,
        inner: Box<MapDescriptor>,
    },

    /// Piece i on its support ball, otherwise `base` (if any) or
    /// `basepoint`.
    Patch {
        basepoint: SpherePoint,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<Box<MapDescriptor>>,
        pieces: Vec<PatchPiece>,
    },

    /// Precomposition with (x₁, x₂, …) ↦ (−x₁, x₂, …).
    OrientationFlip { inner: Box<MapDescriptor> },

    /// Labelled result of the arbitrary-degree construction.
    PrescribedHopf {
        degree: i64,
        k: u64,
        body: Box<MapDescriptor>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchPiece {
    pub map: MapDescriptor,
    pub support: GeodesicBall,
}

impl MapDescriptor {
    pub fn variant_name(&self) -> &'static str {
        match self {
            Self::Identity { .. } => "identity",
            Self::Constant { .. } => "constant",
            Self::Hopf => "hopf",
            Self::EquatorCollapse { .. } => "equator_collapse",
            Self::Rotation { .. } => "rotation",
            Self::BumpDeg1 { .. } => "bump_deg1",
            Self::HopfBump { .. } => "hopf_bump",
            Self::MultiBubble { .. } => "multi_bubble",
            Self::Compose { .. } => "compose",
            Self::Patch { .. } => "patch",
            Self::OrientationFlip { .. } => "orientation_flip",
            Self::PrescribedHopf { .. } => "prescribed_hopf",
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
