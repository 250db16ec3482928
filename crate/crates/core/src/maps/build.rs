use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::descriptor::{MapDescriptor, PatchPiece};
use super::node::{support_radius_of, HOPF_LIPSCHITZ};
use super::SphereMap;
use crate::error::{Error, Result};
use crate::geometry::{
    fibonacci_lattice, geodesic_distance, pack_disjoint_balls, sample_uniform, GeodesicBall, Rotation,
    SpherePoint, DEFAULT_SAFETY, MAX_DIM,
};

/// b = (1, 0, 0) on S².
pub const DEFAULT_BASEPOINT: [f64; 3] = [1.0, 0.0, 0.0];

/// Cap on the geodesic radius of the extra Hopf bumps placed along a fiber.
pub const MAX_PLACEMENT_RADIUS: f64 = 0.3;

/// Points drawn when checking that a patch piece is constant off its support.
const SUPPORT_CHECK_SAMPLES: usize = 2000;

/// Candidate anchors for the extra bumps.
const ANCHOR_CANDIDATES: usize = 2000;

fn build(d: MapDescriptor) -> Result<SphereMap> {
    SphereMap::from_descriptor(d)
}

fn default_basepoint() -> SpherePoint {
    SpherePoint::new(&DEFAULT_BASEPOINT).expect("unit vector")
}

/// h(w, z) = (|w|² − |z|², 2wz̄).
pub fn hopf_map() -> SphereMap {
    build(MapDescriptor::Hopf).expect("hopf map")
}

pub fn identity(dim: usize) -> Result<SphereMap> {
    build(MapDescriptor::Identity { dim })
}

pub fn constant(domain_dim: usize, value: SpherePoint) -> Result<SphereMap> {
    build(MapDescriptor::Constant { domain_dim, value })
}

pub fn equator_collapse(dim: usize) -> Result<SphereMap> {
    build(MapDescriptor::EquatorCollapse { dim })
}

pub fn rotation_map(rotation: Rotation) -> SphereMap {
    build(MapDescriptor::Rotation { rotation }).expect("rotation")
}

/// Degree-one self-map of Sᵐ equal to `b` outside the geodesic ball of
/// radius 2·atan(r) around `x0`.
pub fn bump_deg1(x0: &SpherePoint, r: f64, b: &SpherePoint) -> Result<SphereMap> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Parameter(format!("bump radius r must lie in (0, 1), got {r}")));
    }
    build(MapDescriptor::BumpDeg1 {
        center: *x0,
        stereo_radius: r,
        support_radius: support_radius_of(r),
        basepoint: *b,
    })
}

pub fn multi_bubble(k: usize, b: &SpherePoint) -> Result<SphereMap> {
    multi_bubble_with_safety(k, b, DEFAULT_SAFETY)
}

/// One degree-one bump per ball of [`pack_disjoint_balls`]`(k, safety)`.
pub fn multi_bubble_with_safety(k: usize, b: &SpherePoint, safety: f64) -> Result<SphereMap> {
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: b.dim() });
    }
    let balls = pack_disjoint_balls(k, safety)?;
    build(MapDescriptor::MultiBubble { k, safety, basepoint: *b, balls })
}

/// outer ∘ inner.
pub fn compose(outer: &SphereMap, inner: &SphereMap) -> Result<SphereMap> {
    if outer.domain_dim() != inner.codomain_dim() {
        return Err(Error::DimensionMismatch { expected: outer.domain_dim(), got: inner.codomain_dim() });
    }
    build(MapDescriptor::Compose {
        outer: Box::new(outer.descriptor().clone()),
        inner: Box::new(inner.descriptor().clone()),
    })
}

/// v ∘ h for a self-map v of S².
pub fn composed_with_hopf(v: &SphereMap) -> Result<SphereMap> {
    if v.domain_dim() != 2 || v.codomain_dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: if v.domain_dim() != 2 { v.domain_dim() } else { v.codomain_dim() },
        });
    }
    compose(v, &hopf_map())
}

/// A reference point of h⁻¹(z), as (w₀, z₀) ∈ C² with one of the two
/// components real and nonnegative.
pub fn hopf_lift(z: &SpherePoint) -> SpherePoint {
    assert_eq!(z.dim(), 2, "hopf_lift takes a point of S²");
    hopf_fiber_point(z, 0.0)
}

/// e^{iθ}·(w₀, z₀) for the reference lift (w₀, z₀) of `z`.
pub fn hopf_fiber_point(z: &SpherePoint, theta: f64) -> SpherePoint {
    assert_eq!(z.dim(), 2, "hopf_fiber_point takes a point of S²");
    let c = z.coords();
    let (w0, z0) = if c[0] >= 0.0 {
        let a = (0.5 * (1.0 + c[0])).sqrt();
        ((a, 0.0), (c[1] / (2.0 * a), -c[2] / (2.0 * a)))
    } else {
        let a = (0.5 * (1.0 - c[0])).sqrt();
        ((c[1] / (2.0 * a), c[2] / (2.0 * a)), (a, 0.0))
    };
    let (s, co) = theta.sin_cos();
    let rot = |(re, im): (f64, f64)| (co * re - s * im, s * re + co * im);
    let (w, v) = (rot(w0), rot(z0));
    let mut out = [0.0; MAX_DIM + 1];
    out[..4].copy_from_slice(&[w.0, w.1, v.0, v.1]);
    SpherePoint::from_array_normalized(3, out)
}

/// h ∘ f where f is the S³ bump onto a fixed lift of `b`.
pub fn hopf_bump(x0: &SpherePoint, r: f64, b: &SpherePoint) -> Result<SphereMap> {
    if x0.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: x0.dim() });
    }
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: b.dim() });
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Parameter(format!("bump radius r must lie in (0, 1), got {r}")));
    }
    build(MapDescriptor::HopfBump {
        center: *x0,
        stereo_radius: r,
        support_radius: support_radius_of(r),
        basepoint: *b,
        lift: hopf_lift(b),
    })
}

/// x ↦ u(Rx).
pub fn precompose_rotation(u: &SphereMap, rotation: &Rotation) -> Result<SphereMap> {
    compose(u, &rotation_map(*rotation))
}

/// x ↦ u(−x₁, x₂, …).
pub fn orientation_flip(u: &SphereMap) -> SphereMap {
    build(MapDescriptor::OrientationFlip { inner: Box::new(u.descriptor().clone()) })
        .expect("flip of a valid map")
}

/// Sample points of Sᵐ outside `ball`.
fn points_outside(ball: &GeodesicBall, count: usize, rng: &mut ChaCha8Rng) -> Vec<SpherePoint> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = sample_uniform(ball.dim(), rng);
        if !ball.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Sample points outside the ball plus points just beyond its boundary.
fn check_constant_outside(
    index: usize,
    map: &SphereMap,
    ball: &GeodesicBall,
    b: &SpherePoint,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let mut pts = points_outside(ball, SUPPORT_CHECK_SAMPLES, rng);
    for _ in 0..SUPPORT_CHECK_SAMPLES / 4 {
        let dir = crate::geometry::sample_tangent_direction(ball.center(), rng);
        let theta = ball.radius() * (1.0 + 1e-6) + rng.random::<f64>() * 1e-3;
        let x = crate::geometry::offset(ball.center(), &dir, theta);
        if !ball.contains(&x) {
            pts.push(x);
        }
    }
    for x in pts {
        let y = map.eval(&x);
        if y != *b {
            return Err(Error::NotConstantOutsideSupport {
                index,
                detail: format!("value {y:?} at {x:?}, expected {b:?}"),
            });
        }
    }
    Ok(())
}

/// Piece i on its support ball, `b` elsewhere. Supports must be pairwise
/// disjoint and each piece must equal `b` outside its own support. With no
/// pieces the result is the constant map S³ → {b}.
pub fn patch_maps(pieces: &[(SphereMap, GeodesicBall)], b: &SpherePoint) -> Result<SphereMap> {
    patch_inner(None, pieces, b)
}

/// As [`patch_maps`], with `base` in place of the constant `b` away from
/// the pieces. `base` must equal `b` on every support ball.
pub fn patch_with_base(
    base: &SphereMap,
    pieces: &[(SphereMap, GeodesicBall)],
    b: &SpherePoint,
) -> Result<SphereMap> {
    patch_inner(Some(base), pieces, b)
}

fn patch_inner(
    base: Option<&SphereMap>,
    pieces: &[(SphereMap, GeodesicBall)],
    b: &SpherePoint,
) -> Result<SphereMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_ba5e);
    for (i, (map, ball)) in pieces.iter().enumerate() {
        if map.codomain_dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: b.dim(), got: map.codomain_dim() });
        }
        if map.domain_dim() != ball.dim() {
            return Err(Error::DimensionMismatch { expected: map.domain_dim(), got: ball.dim() });
        }
        for (j, (_, other)) in pieces.iter().enumerate().take(i) {
            if !ball.is_disjoint_from(other) {
                return Err(Error::OverlappingSupports(j, i));
            }
        }
        check_constant_outside(i, map, ball, b, &mut rng)?;
    }
    if let Some(base) = base {
        for (i, (_, ball)) in pieces.iter().enumerate() {
            for _ in 0..SUPPORT_CHECK_SAMPLES {
                let x = ball.sample(&mut rng);
                let y = base.eval(&x);
                if y != *b {
                    return Err(Error::Placement(format!(
                        "base map is not identically {b:?} on support ball {i}: {y:?} at {x:?}"
                    )));
                }
            }
        }
    }
    build(MapDescriptor::Patch {
        basepoint: *b,
        base: base.map(|m| Box::new(m.descriptor().clone())),
        pieces: pieces
            .iter()
            .map(|(map, support)| PatchPiece { map: map.descriptor().clone(), support: *support })
            .collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrescribedOptions {
    pub basepoint: SpherePoint,
    pub safety: f64,
}

impl Default for PrescribedOptions {
    fn default() -> Self {
        Self { basepoint: default_basepoint(), safety: DEFAULT_SAFETY }
    }
}

pub fn prescribed_hopf_map(d: i64) -> Result<SphereMap> {
    prescribed_hopf_map_with(d, &PrescribedOptions::default())
}

/// A map S³ → S² of Hopf degree `d`: with k the largest integer such that
/// k² ≤ |d|, the base multi_bubble(k)∘h carries k², and |d| − k² Hopf
/// bumps strung along one fiber of the region where the base is constant
/// supply the rest. Negative degrees precompose with a reflection.
pub fn prescribed_hopf_map_with(d: i64, opts: &PrescribedOptions) -> Result<SphereMap> {
    let b = opts.basepoint;
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: b.dim() });
    }
    let magnitude = d.unsigned_abs();
    let k = magnitude.isqrt();
    let body = if magnitude == 0 {
        constant(3, b)?
    } else {
        let base = if k > 0 {
            Some(composed_with_hopf(&multi_bubble_with_safety(k as usize, &b, opts.safety)?)?)
        } else {
            None
        };
        let extra = (magnitude - k * k) as usize;
        let patched = if extra == 0 {
            base.expect("k ≥ 1 whenever no extra bumps are needed")
        } else {
            let s2_balls = if k > 0 { pack_disjoint_balls(k as usize, opts.safety)? } else { Vec::new() };
            let pieces = place_fiber_bumps(extra, &s2_balls, &b)?;
            match &base {
                Some(base) => patch_with_base(base, &pieces, &b)?,
                None => patch_maps(&pieces, &b)?,
            }
        };
        if d < 0 {
            orientation_flip(&patched)
        } else {
            patched
        }
    };
    build(MapDescriptor::PrescribedHopf {
        degree: d,
        k,
        body: Box::new(body.descriptor().clone()),
    })
}

/// `count` Hopf bumps centred at equispaced points of the fiber over the
/// anchor b*, the lattice point farthest from every S² bubble.
fn place_fiber_bumps(
    count: usize,
    s2_balls: &[GeodesicBall],
    b: &SpherePoint,
) -> Result<Vec<(SphereMap, GeodesicBall)>> {
    let (anchor, clearance) = if s2_balls.is_empty() {
        (*b, f64::INFINITY)
    } else {
        fibonacci_lattice(ANCHOR_CANDIDATES)
            .into_iter()
            .map(|p| {
                let c = s2_balls
                    .iter()
                    .map(|ball| geodesic_distance(&p, ball.center()).expect("S²") - ball.radius())
                    .fold(f64::INFINITY, f64::min);
                (p, c)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty lattice")
    };
    if clearance <= 0.0 {
        return Err(Error::Placement(format!(
            "no lattice point lies outside the {} bubbles",
            s2_balls.len()
        )));
    }
    let spacing = std::f64::consts::TAU / count as f64;
    let radius = (spacing / 3.0).min(clearance / (2.0 * HOPF_LIPSCHITZ)).min(MAX_PLACEMENT_RADIUS);
    if !(radius > 1e-9) {
        return Err(Error::Placement(format!(
            "bump radius {radius} too small for {count} bumps (clearance {clearance})"
        )));
    }
    let r = super::node::stereo_radius_of(radius);
    (0..count)
        .map(|j| {
            let center = hopf_fiber_point(&anchor, spacing * j as f64);
            let map = hopf_bump(&center, r, b)?;
            let support = map.support().expect("hopf bump support").balls[0];
            Ok((map, support))
        })
        .collect()
}
