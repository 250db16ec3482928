use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{gauss_linking, ClosedCurve, DegreeMethod, DegreeReport};
use crate::energy::super_fibonacci;
use crate::error::{Error, Result};
use crate::geometry::{sample_uniform, SpherePoint, MAX_DIM};
use crate::linalg::{cross3, Mat};
use crate::maps::SphereMap;

/// Arc-length step of the predictor.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Targets whose fiber carries a smaller singular value of Df are rejected.
pub const MIN_SINGULAR_VALUE: f64 = 1e-3;

const CORRECTOR_TOL: f64 = 1e-11;
const CORRECTOR_ITERS: usize = 40;
const STEP_HALVINGS: usize = 6;
/// A seed within this many steps of a traced curve belongs to it.
const DEDUP_STEPS: f64 = 5.0;
/// Targets must be at least this chord away from a value taken on an
/// open set, and from each other.
const TARGET_SEPARATION: f64 = 0.5;
/// Curves are thinned to about this many vertices before linking.
const LINKING_VERTICES: usize = 2000;

/// Sign making (tangent, pulled-back target frame) positively oriented.
const ORIENTATION: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopfOptions {
    pub step: f64,
    pub seed: u64,
    pub max_retries: usize,
    /// Super-Fibonacci points scanned for seeds.
    pub candidates: usize,
    /// Extra seed samples inside each declared support ball.
    pub samples_per_ball: usize,
    /// Best candidates passed to the corrector.
    pub corrected: usize,
}

impl Default for HopfOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            seed: 0x5EED,
            max_retries: 20,
            candidates: 40_000,
            samples_per_ball: 4000,
            corrected: 1500,
        }
    }
}

/// Linearization of f − t at x in the tangent frames at x and t.
struct Local {
    frame: Mat,
    jac: Mat,
    residual: [f64; 2],
}

fn linearize(f: &SphereMap, x: &SpherePoint, t: &SpherePoint, t_frame: &Mat) -> Local {
    let frame = x.tangent_frame();
    let jac = f.tangent_jacobian_at(x, &frame, t_frame);
    let fx = f.eval(x);
    let mut residual = [0.0; 2];
    for (k, r) in residual.iter_mut().enumerate() {
        let col = t_frame.column(k);
        *r = (0..3).map(|i| col[i] * (fx.coords()[i] - t.coords()[i])).sum();
    }
    Local { frame, jac, residual }
}

fn rows(jac: &Mat) -> ([f64; 3], [f64; 3]) {
    let r = |i| [jac.get(i, 0), jac.get(i, 1), jac.get(i, 2)];
    (r(0), r(1))
}

/// Gram matrix CCᵀ as (a, b, c) for [[a, b], [b, c]].
fn gram(c0: &[f64; 3], c1: &[f64; 3]) -> (f64, f64, f64) {
    let d = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    (d(c0, c0), d(c0, c1), d(c1, c1))
}

fn min_singular_value(jac: &Mat) -> f64 {
    let (c0, c1) = rows(jac);
    let (a, b, c) = gram(&c0, &c1);
    let mean = 0.5 * (a + c);
    let spread = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (mean - spread).max(0.0).sqrt()
}

fn ambient(frame: &Mat, v: &[f64; 3]) -> [f64; MAX_DIM + 1] {
    let mut out = [0.0; MAX_DIM + 1];
    for (k, vk) in v.iter().enumerate() {
        let col = frame.column(k);
        for i in 0..4 {
            out[i] += vk * col[i];
        }
    }
    out
}

/// Gauss-Newton onto f⁻¹(t) with the minimum-norm step −Cᵀ(CCᵀ)⁻¹G.
fn correct(f: &SphereMap, start: &SpherePoint, t: &SpherePoint, t_frame: &Mat) -> Option<SpherePoint> {
    let mut x = *start;
    for _ in 0..CORRECTOR_ITERS {
        if f.eval(&x).chord(t) < CORRECTOR_TOL {
            return Some(x);
        }
        let l = linearize(f, &x, t, t_frame);
        let (c0, c1) = rows(&l.jac);
        let (a, b, c) = gram(&c0, &c1);
        let det = a * c - b * b;
        if !(det.abs() > 1e-300) {
            return None;
        }
        let [g0, g1] = l.residual;
        let (y0, y1) = ((c * g0 - b * g1) / det, (a * g1 - b * g0) / det);
        let delta: Vec<f64> = (0..3).map(|i| -(c0[i] * y0 + c1[i] * y1)).collect();
        let len = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
        if !len.is_finite() || len > 0.5 {
            return None;
        }
        let step = ambient(&l.frame, &[delta[0], delta[1], delta[2]]);
        x = x.exp(&step[..4]);
    }
    (f.eval(&x).chord(t) < CORRECTOR_TOL).then_some(x)
}

fn non_regular(t: &SpherePoint, detail: String) -> Error {
    Error::NonRegularValue(format!("{t:?}: {detail}"))
}

/// Follow the fiber through `start` (already on it) until it closes.
fn trace_one(f: &SphereMap, t: &SpherePoint, t_frame: &Mat, start: &SpherePoint, step: f64) -> Result<ClosedCurve> {
    let max_steps = (50.0 * std::f64::consts::TAU / step) as usize;
    let mut pts = vec![*start];
    let mut x = *start;
    loop {
        let l = linearize(f, &x, t, t_frame);
        let sigma = min_singular_value(&l.jac);
        if sigma < MIN_SINGULAR_VALUE {
            return Err(non_regular(t, format!("singular value {sigma:.2e} at {x:?}")));
        }
        let (c0, c1) = rows(&l.jac);
        let k = cross3(&c0, &c1);
        let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        let tangent = ambient(&l.frame, &[k[0] / kn, k[1] / kn, k[2] / kn]);
        let mut h = step;
        let mut next = None;
        for _ in 0..=STEP_HALVINGS {
            let v: Vec<f64> = tangent[..4].iter().map(|c| ORIENTATION * h * c).collect();
            if let Some(y) = correct(f, &x.exp(&v), t, t_frame) {
                let gap = y.chord(&x);
                if gap < 1.5 * h && gap > 0.25 * h {
                    next = Some(y);
                    break;
                }
            }
            h *= 0.5;
        }
        let Some(y) = next else {
            return Err(non_regular(t, format!("corrector diverged near {x:?}")));
        };
        pts.push(y);
        x = y;
        if pts.len() > 10 && x.chord(start) < 1.5 * step {
            pts.pop();
            if pts.last().expect("nonempty").chord(start) > 2.0 * step {
                pts.push(x);
            }
            return ClosedCurve::new(pts, 2.0 * step);
        }
        if pts.len() > max_steps {
            return Err(non_regular(t, format!("fiber did not close after {max_steps} steps")));
        }
    }
}

/// Components of f⁻¹(target) reached from `seeds`. Seeds whose corrector
/// fails are not on the fiber and are skipped; seeds near an already traced
/// component are dropped. Orientation: (tangent, pulled-back frame of the
/// target) is positive in S³.
pub fn trace_fiber(f: &SphereMap, target: &SpherePoint, seeds: &[SpherePoint], step: f64) -> Result<Vec<ClosedCurve>> {
    if f.domain_dim() != 3 || f.codomain_dim() != 2 {
        return Err(Error::Parameter("fiber tracing needs a map S³ → S²".into()));
    }
    if target.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: target.dim() });
    }
    if !(step > 0.0 && step < 0.1) {
        return Err(Error::Parameter(format!("tracing step must lie in (0, 0.1), got {step}")));
    }
    if let Some(v) = f.constant_value() {
        if v == *target {
            return Err(non_regular(target, "the map is constant at the target".into()));
        }
        return Ok(Vec::new());
    }
    let t_frame = target.tangent_frame();
    let corrected: Vec<Option<SpherePoint>> = seeds.par_iter().map(|s| correct(f, s, target, &t_frame)).collect();
    let mut curves: Vec<ClosedCurve> = Vec::new();
    for x in corrected.into_iter().flatten() {
        if curves.iter().any(|c| c.distance_to(&x) < DEDUP_STEPS * step) {
            continue;
        }
        curves.push(trace_one(f, target, &t_frame, &x, step)?);
    }
    Ok(curves)
}

pub fn hopf_invariant(f: &SphereMap) -> Result<DegreeReport> {
    hopf_invariant_with(f, &HopfOptions::default())
}

struct Candidates {
    points: Vec<SpherePoint>,
    values: Vec<SpherePoint>,
    /// A value taken on a set of positive measure, if any.
    plateau: Option<SpherePoint>,
}

fn candidates(f: &SphereMap, opts: &HopfOptions, rng: &mut ChaCha8Rng) -> Candidates {
    let mut points = super_fibonacci(opts.candidates);
    if let Some(s) = f.support() {
        for ball in &s.balls {
            points.extend((0..opts.samples_per_ball).map(|_| ball.sample(rng)));
        }
    }
    let values: Vec<SpherePoint> = points.par_iter().map(|x| f.eval(x)).collect();
    let mut counts: HashMap<[u64; 3], usize> = HashMap::new();
    for v in &values {
        let c = v.coords();
        *counts.entry([c[0].to_bits(), c[1].to_bits(), c[2].to_bits()]).or_default() += 1;
    }
    let plateau = counts
        .into_iter()
        .max_by_key(|&(key, n)| (n, key))
        .filter(|&(_, n)| n * 100 >= values.len())
        .map(|(key, _)| SpherePoint::normalized(&key.map(f64::from_bits)).expect("unit"))
        .or_else(|| f.support().map(|s| s.value));
    Candidates { points, values, plateau }
}

fn pick_target(rng: &mut ChaCha8Rng, avoid: &[SpherePoint]) -> SpherePoint {
    loop {
        let t = sample_uniform(2, rng);
        if avoid.iter().all(|a| a.chord(&t) > TARGET_SEPARATION) {
            return t;
        }
    }
}

/// Every vertex of `c` when it has few, otherwise an evenly thinned subset.
fn thin(c: &ClosedCurve) -> ClosedCurve {
    let stride = c.len().div_ceil(LINKING_VERTICES).max(1);
    if stride == 1 || c.len() / stride < 3 {
        return c.clone();
    }
    let pts: Vec<SpherePoint> = c.points().iter().step_by(stride).copied().collect();
    ClosedCurve::new(pts, c.tolerance() * (stride + 1) as f64).expect("thinning keeps gaps bounded")
}

fn link(a: &ClosedCurve, b: &ClosedCurve) -> Result<f64> {
    match gauss_linking(&thin(a), &thin(b)) {
        Ok(r) => Ok(r.raw),
        Err(Error::IllConditionedLinking(_)) => Ok(gauss_linking(a, b)?.raw),
        Err(e) => Err(e),
    }
}

fn attempt(f: &SphereMap, cand: &Candidates, targets: [SpherePoint; 2], opts: &HopfOptions) -> Result<DegreeReport> {
    let mut fibers = Vec::with_capacity(2);
    for t in &targets {
        let mut order: Vec<(f64, usize)> =
            cand.values.iter().enumerate().map(|(i, v)| (v.chord(t), i)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let seeds: Vec<SpherePoint> = order.iter().take(opts.corrected).map(|&(_, i)| cand.points[i]).collect();
        fibers.push(trace_fiber(f, t, &seeds, opts.step)?);
    }
    let pairs: Vec<(&ClosedCurve, &ClosedCurve)> =
        fibers[0].iter().flat_map(|a| fibers[1].iter().map(move |b| (a, b))).collect();
    let mut raw = 0.0;
    for (a, b) in pairs {
        raw += link(a, b)?;
    }
    DegreeReport::from_raw(raw, DegreeMethod::Linking)
        .ok_or_else(|| Error::IllConditionedLinking(format!("linking sum {raw} is not near an integer")))
}

/// Sum of linking numbers between the fiber components over two random
/// regular values. Targets that turn out singular or whose fibers come too
/// close are redrawn up to `max_retries` times.
pub fn hopf_invariant_with(f: &SphereMap, opts: &HopfOptions) -> Result<DegreeReport> {
    if f.domain_dim() != 3 || f.codomain_dim() != 2 {
        return Err(Error::Parameter("the Hopf invariant needs a map S³ → S²".into()));
    }
    if f.constant_value().is_some() {
        return Ok(DegreeReport::exact(0, DegreeMethod::Linking));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cand = candidates(f, opts, &mut rng);
    let avoid: Vec<SpherePoint> = cand.plateau.into_iter().collect();
    let mut last = None;
    for _ in 0..=opts.max_retries {
        let t1 = pick_target(&mut rng, &avoid);
        let mut both = avoid.clone();
        both.push(t1);
        let t2 = pick_target(&mut rng, &both);
        match attempt(f, &cand, [t1, t2], opts) {
            Ok(r) => return Ok(r),
            Err(e @ (Error::NonRegularValue(_) | Error::IllConditionedLinking(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{constant, hopf_fiber_point, hopf_map, orientation_flip, prescribed_hopf_map};
    use std::f64::consts::TAU;

    fn b() -> SpherePoint {
        SpherePoint::new(&[1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn hopf_fiber_is_a_great_circle() {
        let h = hopf_map();
        let t = b();
        let seed = hopf_fiber_point(&t, 1.0);
        let curves = trace_fiber(&h, &t, &[seed, hopf_fiber_point(&t, 2.0)], DEFAULT_STEP).unwrap();
        assert_eq!(curves.len(), 1);
        let c = &curves[0];
        assert!(c.points().iter().all(|p| h.eval(p).chord(&t) < 1e-8));
        let exact: Vec<SpherePoint> = (0..4000).map(|i| hopf_fiber_point(&t, TAU * i as f64 / 4000.0)).collect();
        let exact = ClosedCurve::new(exact, 0.01).unwrap();
        assert!(c.hausdorff(&exact) < 2.0 * DEFAULT_STEP);
        assert!((c.length() - TAU).abs() < 1e-2);
    }

    #[test]
    fn constant_fibers_are_empty() {
        let c = constant(3, b()).unwrap();
        let t = SpherePoint::north(2);
        assert!(trace_fiber(&c, &t, &[SpherePoint::north(3)], DEFAULT_STEP).unwrap().is_empty());
        assert!(matches!(trace_fiber(&c, &b(), &[], DEFAULT_STEP), Err(Error::NonRegularValue(_))));
        assert_eq!(hopf_invariant(&c).unwrap().value, 0);
    }

    #[test]
    fn hopf_map_has_invariant_one() {
        let r = hopf_invariant(&hopf_map()).unwrap();
        assert_eq!(r.value, 1);
        assert!(r.residual < 0.05, "{}", r.raw);
    }

    #[test]
    fn single_bump_and_its_reflection() {
        let u = prescribed_hopf_map(1).unwrap();
        assert_eq!(hopf_invariant(&u).unwrap().value, 1);
        assert_eq!(hopf_invariant(&orientation_flip(&u)).unwrap().value, -1);
    }
}
