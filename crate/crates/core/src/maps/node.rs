//! Compiled evaluators for [`MapDescriptor`] trees.

use crate::error::{Error, Result};
use crate::geometry::{rotation_taking, GeodesicBall, Rotation, SpherePoint, MAX_DIM};
use crate::linalg::Mat;

use super::descriptor::MapDescriptor;

/// Geodesic Lipschitz constant of the Hopf map onto the unit S².
pub const HOPF_LIPSCHITZ: f64 = 2.0;

/// Precomputed degree-one bump: R_cod ∘ g ∘ Π⁻¹ ∘ μ_r ∘ Π ∘ R_dom on the
/// support ball, the basepoint elsewhere.
#[derive(Clone, Debug)]
pub(crate) struct Bump {
    pub support: GeodesicBall,
    inv_r: f64,
    to_south: Rotation,
    from_north: Rotation,
    pub basepoint: SpherePoint,
}

impl Bump {
    pub fn new(
        center: SpherePoint,
        stereo_radius: f64,
        support_radius: f64,
        basepoint: SpherePoint,
    ) -> Result<Self> {
        let m = center.dim();
        if basepoint.dim() != m {
            return Err(Error::DimensionMismatch { expected: m, got: basepoint.dim() });
        }
        if !(stereo_radius > 0.0 && stereo_radius < 1.0) {
            return Err(Error::Parameter(format!(
                "bump radius r must lie in (0, 1), got {stereo_radius}"
            )));
        }
        let expected = support_radius_of(stereo_radius);
        if (support_radius - expected).abs() > 1e-12 {
            return Err(Error::Descriptor(format!(
                "support radius {support_radius} does not match 2·atan(r) = {expected}"
            )));
        }
        Ok(Self {
            support: GeodesicBall::new(center, expected)?,
            inv_r: 1.0 / stereo_radius,
            to_south: rotation_taking(&center, &SpherePoint::south(m))?,
            from_north: rotation_taking(&SpherePoint::north(m), &basepoint)?,
            basepoint,
        })
    }

    #[inline]
    pub fn eval(&self, x: &SpherePoint) -> SpherePoint {
        if !self.support.contains(x) {
            return self.basepoint;
        }
        let m = x.dim();
        let y = self.to_south.apply(x);
        let yc = y.coords();
        // Π(y), then the dilation y ↦ y/r
        let scale = self.inv_r / (1.0 - yc[m]);
        let mut z2 = 0.0;
        let mut z = [0.0; MAX_DIM];
        for i in 0..m {
            z[i] = yc[i] * scale;
            z2 += z[i] * z[i];
        }
        // Π⁻¹(z): into the open southern hemisphere since |z| < 1
        let q_last = (z2 - 1.0) / (1.0 + z2);
        let mut out = [0.0; MAX_DIM + 1];
        // g(q) = (−2 q' q_last, 1 − 2 q_last²)
        for i in 0..m {
            let qi = 2.0 * z[i] / (1.0 + z2);
            out[i] = -2.0 * qi * q_last;
        }
        out[m] = 1.0 - 2.0 * q_last * q_last;
        self.from_north.apply(&SpherePoint::from_array(m, out))
    }

    pub fn lipschitz(&self) -> f64 {
        2.0 * self.inv_r
    }
}

/// ρ(r) = 2·atan(r): the geodesic radius around the south pole whose
/// stereographic image is the Euclidean r-ball.
pub fn support_radius_of(stereo_radius: f64) -> f64 {
    2.0 * stereo_radius.atan()
}

/// Inverse of [`support_radius_of`].
pub fn stereo_radius_of(support_radius: f64) -> f64 {
    (0.5 * support_radius).tan()
}

#[derive(Clone, Debug)]
pub(crate) enum Node {
    Identity,
    Constant(SpherePoint),
    Hopf,
    EquatorCollapse,
    Rotate(Rotation),
    Bump(Bump),
    /// h ∘ bump, with the exact S² basepoint used outside the support.
    HopfBump(Bump, SpherePoint),
    MultiBubble { bumps: Vec<Bump>, basepoint: SpherePoint },
    Compose { outer: Box<Node>, inner: Box<Node> },
    Patch { basepoint: SpherePoint, base: Option<Box<Node>>, pieces: Vec<(GeodesicBall, Node)> },
    Flip(Box<Node>),
}

/// Everything derived from a descriptor at compile time.
pub(crate) struct Compiled {
    pub node: Node,
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub lipschitz: Option<f64>,
    /// Union of balls outside which the map is identically the given value.
    pub support: Option<(Vec<GeodesicBall>, SpherePoint)>,
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

fn flip_point(x: &SpherePoint) -> SpherePoint {
    let mut c = *x.array();
    c[0] = -c[0];
    SpherePoint::from_array(x.dim(), c)
}

pub(crate) fn compile(d: &MapDescriptor) -> Result<Compiled> {
    use MapDescriptor as D;
    Ok(match d {
        D::Identity { dim } => {
            check_dim(*dim)?;
            Compiled {
                node: Node::Identity,
                domain_dim: *dim,
                codomain_dim: *dim,
                lipschitz: Some(1.0),
                support: None,
            }
        }
        D::Constant { domain_dim, value } => {
            check_dim(*domain_dim)?;
            Compiled {
                node: Node::Constant(*value),
                domain_dim: *domain_dim,
                codomain_dim: value.dim(),
                lipschitz: Some(0.0),
                support: Some((Vec::new(), *value)),
            }
        }
        D::Hopf => Compiled {
            node: Node::Hopf,
            domain_dim: 3,
            codomain_dim: 2,
            lipschitz: Some(HOPF_LIPSCHITZ),
            support: None,
        },
        D::EquatorCollapse { dim } => {
            check_dim(*dim)?;
            Compiled {
                node: Node::EquatorCollapse,
                domain_dim: *dim,
                codomain_dim: *dim,
                lipschitz: Some(2.0),
                support: None,
            }
        }
        D::Rotation { rotation } => Compiled {
            node: Node::Rotate(*rotation),
            domain_dim: rotation.dim(),
            codomain_dim: rotation.dim(),
            lipschitz: Some(1.0),
            support: None,
        },
        D::BumpDeg1 { center, stereo_radius, support_radius, basepoint } => {
            let bump = Bump::new(*center, *stereo_radius, *support_radius, *basepoint)?;
            let m = center.dim();
            Compiled {
                lipschitz: Some(bump.lipschitz()),
                support: Some((vec![bump.support], *basepoint)),
                node: Node::Bump(bump),
                domain_dim: m,
                codomain_dim: m,
            }
        }
        D::HopfBump { center, stereo_radius, support_radius, basepoint, lift } => {
            if center.dim() != 3 || lift.dim() != 3 || basepoint.dim() != 2 {
                return Err(Error::Descriptor("hopf_bump needs S³ center/lift and S² basepoint".into()));
            }
            let image = eval_hopf(lift);
            if image.chord(basepoint) > 1e-12 {
                return Err(Error::Descriptor(format!(
                    "lift {lift:?} is not a preimage of basepoint {basepoint:?} (h = {image:?})"
                )));
            }
            let bump = Bump::new(*center, *stereo_radius, *support_radius, *lift)?;
            Compiled {
                lipschitz: Some(HOPF_LIPSCHITZ * bump.lipschitz()),
                support: Some((vec![bump.support], *basepoint)),
                node: Node::HopfBump(bump, *basepoint),
                domain_dim: 3,
                codomain_dim: 2,
            }
        }
        D::MultiBubble { k, safety: _, basepoint, balls } => {
            if balls.len() != *k {
                return Err(Error::Descriptor(format!(
                    "multi_bubble records k = {k} but {} balls",
                    balls.len()
                )));
            }
            let m = basepoint.dim();
            let bumps = balls
                .iter()
                .map(|b| {
                    Bump::new(*b.center(), stereo_radius_of(b.radius()), b.radius(), *basepoint)
                })
                .collect::<Result<Vec<_>>>()?;
            if bumps.iter().any(|b| b.support.dim() != m) {
                return Err(Error::Descriptor("multi_bubble ball dimension mismatch".into()));
            }
            Compiled {
                lipschitz: Some(bumps.iter().map(Bump::lipschitz).fold(0.0, f64::max)),
                support: Some((balls.clone(), *basepoint)),
                node: Node::MultiBubble { bumps, basepoint: *basepoint },
                domain_dim: m,
                codomain_dim: m,
            }
        }
        D::Compose { outer, inner } => {
            let o = compile(outer)?;
            let i = compile(inner)?;
            if o.domain_dim != i.codomain_dim {
                return Err(Error::DimensionMismatch { expected: o.domain_dim, got: i.codomain_dim });
            }
            let support = match (&i.support, &i.node) {
                _ if o.support.as_ref().is_some_and(|(balls, _)| balls.is_empty()) => o.support.clone(),
                (Some((balls, value)), _) => Some((balls.clone(), o.node.eval(value))),
                (None, Node::Rotate(r)) => o.support.as_ref().map(|(balls, value)| {
                    let inv = r.inverse();
                    let moved = balls
                        .iter()
                        .map(|b| GeodesicBall::new(inv.apply(b.center()), b.radius()).expect("radius unchanged"))
                        .collect();
                    (moved, *value)
                }),
                _ => None,
            };
            Compiled {
                lipschitz: o.lipschitz.zip(i.lipschitz).map(|(a, b)| a * b),
                support,
                domain_dim: i.domain_dim,
                codomain_dim: o.codomain_dim,
                node: Node::Compose { outer: Box::new(o.node), inner: Box::new(i.node) },
            }
        }
        D::Patch { basepoint, base, pieces } => {
            let base_c = base.as_deref().map(compile).transpose()?;
            let cod = basepoint.dim();
            let mut dom = base_c.as_ref().map(|b| b.domain_dim);
            let mut lip = base_c.as_ref().map_or(Some(0.0), |b| b.lipschitz);
            let mut compiled_pieces = Vec::with_capacity(pieces.len());
            if let Some(b) = &base_c {
                if b.codomain_dim != cod {
                    return Err(Error::DimensionMismatch { expected: cod, got: b.codomain_dim });
                }
            }
            let mut balls: Vec<GeodesicBall> = Vec::new();
            for p in pieces {
                let c = compile(&p.map)?;
                if c.codomain_dim != cod {
                    return Err(Error::DimensionMismatch { expected: cod, got: c.codomain_dim });
                }
                if p.support.dim() != c.domain_dim {
                    return Err(Error::DimensionMismatch { expected: c.domain_dim, got: p.support.dim() });
                }
                match dom {
                    Some(dd) if dd != c.domain_dim => {
                        return Err(Error::DimensionMismatch { expected: dd, got: c.domain_dim })
                    }
                    _ => dom = Some(c.domain_dim),
                }
                lip = lip.zip(c.lipschitz).map(|(a, b)| a.max(b));
                balls.push(p.support);
                compiled_pieces.push((p.support, c.node));
            }
            let domain_dim = dom.unwrap_or(3);
            let support = match &base_c {
                None => Some((balls, *basepoint)),
                Some(b) => b.support.as_ref().map(|(bb, _)| {
                    let mut all = bb.clone();
                    all.extend(balls.iter().copied());
                    (all, *basepoint)
                }),
            };
            Compiled {
                node: Node::Patch {
                    basepoint: *basepoint,
                    base: base_c.map(|b| Box::new(b.node)),
                    pieces: compiled_pieces,
                },
                domain_dim,
                codomain_dim: cod,
                lipschitz: lip,
                support,
            }
        }
        D::OrientationFlip { inner } => {
            let i = compile(inner)?;
            let support = i.support.as_ref().map(|(balls, v)| {
                let flipped = balls
                    .iter()
                    .map(|b| GeodesicBall::new(flip_point(b.center()), b.radius()).expect("radius unchanged"))
                    .collect();
                (flipped, *v)
            });
            Compiled {
                node: Node::Flip(Box::new(i.node)),
                domain_dim: i.domain_dim,
                codomain_dim: i.codomain_dim,
                lipschitz: i.lipschitz,
                support,
            }
        }
        D::PrescribedHopf { body, .. } => compile(body)?,
    })
}

#[inline]
pub(crate) fn eval_hopf(x: &SpherePoint) -> SpherePoint {
    let c = x.coords();
    let (a, b, p, q) = (c[0], c[1], c[2], c[3]);
    // w = a + ib, z = p + iq; w z̄ = (ap + bq) + i(bp − aq)
    SpherePoint::from_array(
        2,
        [a * a + b * b - p * p - q * q, 2.0 * (a * p + b * q), 2.0 * (b * p - a * q), 0.0],
    )
}

impl Node {
    pub fn eval(&self, x: &SpherePoint) -> SpherePoint {
        match self {
            Node::Identity => *x,
            Node::Constant(v) => *v,
            Node::Hopf => eval_hopf(x),
            Node::EquatorCollapse => {
                let m = x.dim();
                let c = x.coords();
                let last = c[m];
                let mut out = [0.0; MAX_DIM + 1];
                for i in 0..m {
                    out[i] = -2.0 * c[i] * last;
                }
                out[m] = 1.0 - 2.0 * last * last;
                SpherePoint::from_array(m, out)
            }
            Node::Rotate(r) => r.apply(x),
            Node::Bump(b) => b.eval(x),
            Node::HopfBump(b, value) => {
                if b.support.contains(x) {
                    eval_hopf(&b.eval(x))
                } else {
                    *value
                }
            }
            Node::MultiBubble { bumps, basepoint } => bumps
                .iter()
                .find(|b| b.support.contains(x))
                .map_or(*basepoint, |b| b.eval(x)),
            Node::Compose { outer, inner } => outer.eval(&inner.eval(x)),
            Node::Patch { basepoint, base, pieces } => {
                for (ball, piece) in pieces {
                    if ball.contains(x) {
                        return piece.eval(x);
                    }
                }
                base.as_ref().map_or(*basepoint, |b| b.eval(x))
            }
            Node::Flip(inner) => inner.eval(&flip_point(x)),
        }
    }

    /// Differential on the tangent space as an ambient matrix
    /// (codomain + 1) × (domain + 1), zero on the normal direction.
    /// `None` where no closed form is wired up.
    pub fn jacobian(&self, x: &SpherePoint) -> Option<Mat> {
        let n = x.dim() + 1;
        let proj = tangent_projector(x);
        match self {
            Node::Identity => Some(proj),
            Node::Constant(v) => Some(Mat::zeros(v.dim() + 1, n)),
            Node::Rotate(r) => Some(r.matrix().mul(&proj)),
            Node::Hopf => {
                let c = x.coords();
                let (a, b, p, q) = (c[0], c[1], c[2], c[3]);
                let rows = [
                    vec![2.0 * a, 2.0 * b, -2.0 * p, -2.0 * q],
                    vec![2.0 * p, 2.0 * q, 2.0 * a, 2.0 * b],
                    vec![-2.0 * q, 2.0 * p, 2.0 * b, -2.0 * a],
                ];
                Some(Mat::from_rows(&rows).expect("3x4").mul(&proj))
            }
            Node::EquatorCollapse => {
                let m = x.dim();
                let c = x.coords();
                let mut j = Mat::zeros(n, n);
                for i in 0..m {
                    j.set(i, i, -2.0 * c[m]);
                    j.set(i, m, -2.0 * c[i]);
                }
                j.set(m, m, -4.0 * c[m]);
                Some(j.mul(&proj))
            }
            Node::Compose { outer, inner } => {
                let ji = inner.jacobian(x)?;
                let jo = outer.jacobian(&inner.eval(x))?;
                Some(jo.mul(&ji))
            }
            Node::Flip(inner) => {
                let mut j = inner.jacobian(&flip_point(x))?;
                for r in 0..j.rows() {
                    j.set(r, 0, -j.get(r, 0));
                }
                Some(j)
            }
            Node::Bump(_) | Node::HopfBump(..) | Node::MultiBubble { .. } | Node::Patch { .. } => None,
        }
    }
}

/// I − xxᵀ
pub(crate) fn tangent_projector(x: &SpherePoint) -> Mat {
    let n = x.dim() + 1;
    let c = x.coords();
    let mut p = Mat::identity(n);
    for i in 0..n {
        for j in 0..n {
            p.set(i, j, p.get(i, j) - c[i] * c[j]);
        }
    }
    p
}
