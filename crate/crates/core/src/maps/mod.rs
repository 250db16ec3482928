//! Explicit maps between spheres: the Hopf map, degree-one bumps,
//! multi-bubbles, compositions, patches and the prescribed-degree family.
//!
//! Every [`SphereMap`] is compiled from a [`MapDescriptor`], which is also
//! its serialized form.

mod build;
mod descriptor;
mod node;
mod probe;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeodesicBall, SpherePoint};
use crate::linalg::Mat;

pub use build::{
    bump_deg1, compose, composed_with_hopf, constant, equator_collapse, hopf_bump, hopf_fiber_point,
    hopf_lift, hopf_map, identity, multi_bubble, multi_bubble_with_safety, orientation_flip,
    patch_maps, patch_with_base, precompose_rotation, prescribed_hopf_map, prescribed_hopf_map_with,
    rotation_map, PrescribedOptions, DEFAULT_BASEPOINT, MAX_PLACEMENT_RADIUS,
};
pub use descriptor::{MapDescriptor, PatchPiece};
pub use node::{stereo_radius_of, support_radius_of, HOPF_LIPSCHITZ};
pub use probe::{lipschitz_probe, PROBE_SEPARATION};

use node::{compile, Node};

/// Step for central differences on the tangent space.
pub const FD_STEP: f64 = 1e-5;

/// The map is identically `value` outside the union of `balls`.
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    pub balls: Vec<GeodesicBall>,
    pub value: SpherePoint,
}

impl Support {
    pub fn contains(&self, x: &SpherePoint) -> bool {
        self.balls.iter().any(|b| b.contains(x))
    }

    pub fn measure(&self) -> f64 {
        self.balls.iter().map(GeodesicBall::measure).sum()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MapDescriptor", into = "MapDescriptor")]
pub struct SphereMap {
    descriptor: MapDescriptor,
    node: Node,
    domain_dim: usize,
    codomain_dim: usize,
    lipschitz_hint: Option<f64>,
    support: Option<Support>,
}

impl TryFrom<MapDescriptor> for SphereMap {
    type Error = Error;

    fn try_from(d: MapDescriptor) -> Result<Self> {
        Self::from_descriptor(d)
    }
}

impl From<SphereMap> for MapDescriptor {
    fn from(m: SphereMap) -> Self {
        m.descriptor
    }
}

impl PartialEq for SphereMap {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor
    }
}

impl SphereMap {
    pub fn from_descriptor(descriptor: MapDescriptor) -> Result<Self> {
        let c = compile(&descriptor)?;
        Ok(Self {
            descriptor,
            node: c.node,
            domain_dim: c.domain_dim,
            codomain_dim: c.codomain_dim,
            lipschitz_hint: c.lipschitz,
            support: c.support.map(|(balls, value)| Support { balls, value }),
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_descriptor(MapDescriptor::from_json(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(self.descriptor.to_json()?)
    }

    pub fn descriptor(&self) -> &MapDescriptor {
        &self.descriptor
    }

    /// For a patched map, possibly wrapped in its prescribed-degree record:
    /// the base map if there is one, then every piece.
    pub fn patch_components(&self) -> Option<Vec<SphereMap>> {
        let mut d = &self.descriptor;
        while let MapDescriptor::PrescribedHopf { body, .. } = d {
            d = body;
        }
        let MapDescriptor::Patch { base, pieces, .. } = d else {
            return None;
        };
        base.iter()
            .map(|b| b.as_ref())
            .chain(pieces.iter().map(|p| &p.map))
            .map(|m| Self::from_descriptor(m.clone()).ok())
            .collect()
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    /// Upper bound on the geodesic Lipschitz constant, when known.
    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    /// Where the map can differ from a constant, when known.
    pub fn support(&self) -> Option<&Support> {
        self.support.as_ref()
    }

    /// `Some(b)` when the map is identically b.
    pub fn constant_value(&self) -> Option<SpherePoint> {
        self.support.as_ref().filter(|s| s.balls.is_empty()).map(|s| s.value)
    }

    #[inline]
    pub fn eval(&self, x: &SpherePoint) -> SpherePoint {
        debug_assert_eq!(x.dim(), self.domain_dim);
        self.node.eval(x)
    }

    pub fn try_eval(&self, x: &SpherePoint) -> Result<SpherePoint> {
        if x.dim() != self.domain_dim {
            return Err(Error::DimensionMismatch { expected: self.domain_dim, got: x.dim() });
        }
        Ok(self.node.eval(x))
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        let probe = SpherePoint::north(self.domain_dim);
        self.node.jacobian(&probe).is_some()
    }

    /// Ambient differential (codomain+1)×(domain+1), vanishing on the
    /// normal direction, when a closed form exists.
    pub fn analytic_jacobian(&self, x: &SpherePoint) -> Option<Mat> {
        self.node.jacobian(x)
    }

    /// Differential in the oriented tangent frames at x and f(x): an
    /// m′×m matrix. Analytic when available, central differences otherwise.
    pub fn tangent_jacobian(&self, x: &SpherePoint) -> Mat {
        let fx = self.eval(x);
        self.tangent_jacobian_at(x, &x.tangent_frame(), &fx.tangent_frame())
    }

    pub(crate) fn tangent_jacobian_at(
        &self,
        x: &SpherePoint,
        dom_frame: &Mat,
        cod_frame: &Mat,
    ) -> Mat {
        let (m, mc) = (self.domain_dim, self.codomain_dim);
        if let Some(j) = self.node.jacobian(x) {
            return cod_frame.transpose().mul(&j).mul(dom_frame);
        }
        let mut out = Mat::zeros(mc, m);
        for col in 0..m {
            let e = dom_frame.column(col);
            let plus = self.eval(&x.exp(&scaled(&e[..=m], FD_STEP)));
            let minus = self.eval(&x.exp(&scaled(&e[..=m], -FD_STEP)));
            for row in 0..mc {
                let f = cod_frame.column(row);
                let mut d = 0.0;
                for i in 0..=mc {
                    d += f[i] * (plus.coords()[i] - minus.coords()[i]);
                }
                out.set(row, col, d / (2.0 * FD_STEP));
            }
        }
        out
    }
}

fn scaled(v: &[f64], t: f64) -> Vec<f64> {
    v.iter().map(|x| x * t).collect()
}
