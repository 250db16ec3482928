use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{EnergyEstimate, EnergyParams, Region, Stratum};
use crate::error::{Error, Result};
use crate::geometry::{
    cap_measure, direction_measure, inverse_cap_measure, offset, sample_tangent_direction, GeodesicBall,
    SpherePoint,
};
use crate::maps::SphereMap;

/// J: shells [π2^{−j−1}, π2^{−j}) for j = 0…J are sampled.
pub const DEFAULT_SHELLS: usize = 20;

pub const MIN_SAMPLES: usize = 1000;

/// Samples per substream. Changing it changes the random numbers drawn.
const BATCH: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McOptions {
    pub shells: usize,
    /// Draw x from the map's declared support instead of the whole region
    /// when that is smaller.
    pub support_aware: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { shells: DEFAULT_SHELLS, support_aware: true }
    }
}

/// |u(x) − u(y)|^p / |x − y|^{n+sp}, symmetric in x and y.
pub fn pair_integrand(u: &SphereMap, params: &EnergyParams, x: &SpherePoint, y: &SpherePoint) -> f64 {
    let chord = x.chord(y);
    if chord == 0.0 {
        return 0.0;
    }
    kernel(&u.eval(x), &u.eval(y), chord, params.p, params.kernel_exponent())
}

#[inline]
fn kernel(ux: &SpherePoint, uy: &SpherePoint, chord: f64, p: f64, q: f64) -> f64 {
    let d2: f64 = ux.coords().iter().zip(uy.coords()).map(|(a, b)| (a - b) * (a - b)).sum();
    if d2 == 0.0 {
        return 0.0;
    }
    d2.powf(0.5 * p) / chord.powf(q)
}

/// Where x is drawn from, with its measure.
enum XDomain<'a> {
    Region(Region),
    /// Disjoint balls outside which u is constant; pairs with y outside the
    /// balls carry weight 2 for the mirrored (y, x) pair.
    Support { balls: &'a [GeodesicBall], cumulative: Vec<f64> },
}

impl XDomain<'_> {
    fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> SpherePoint {
        match self {
            XDomain::Region(r) => r.sample(n, rng),
            XDomain::Support { balls, cumulative } => {
                let total = *cumulative.last().expect("nonempty support");
                let t = rng.random::<f64>() * total;
                let i = cumulative.partition_point(|&c| c <= t).min(balls.len() - 1);
                balls[i].sample(rng)
            }
        }
    }
}

fn disjoint(balls: &[GeodesicBall]) -> bool {
    balls.iter().enumerate().all(|(i, a)| balls[..i].iter().all(|b| a.is_disjoint_from(b)))
}

#[derive(Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.count == 0 {
            return o;
        }
        if o.count == 0 {
            return self;
        }
        let count = self.count + o.count;
        let d = o.mean - self.mean;
        let mean = self.mean + d * o.count as f64 / count as f64;
        let m2 = self.m2 + o.m2 + d * d * self.count as f64 * o.count as f64 / count as f64;
        Moments { count, mean, m2 }
    }

    fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}

pub fn energy_mc(
    u: &SphereMap,
    params: &EnergyParams,
    region: &Region,
    n_samples: usize,
    seed: u64,
) -> Result<EnergyEstimate> {
    energy_mc_with(u, params, region, n_samples, seed, &McOptions::default())
}

/// Stratified estimate of E_{s,p}(u, Ω). The samples are split evenly over
/// the shells; within a shell, x is uniform on the sampling domain and y is
/// uniform on the shell around x. Each (shell, batch) pair draws from its
/// own ChaCha stream, so the result depends only on (seed, n_samples,
/// shells) and not on the thread count.
pub fn energy_mc_with(
    u: &SphereMap,
    params: &EnergyParams,
    region: &Region,
    n_samples: usize,
    seed: u64,
    opts: &McOptions,
) -> Result<EnergyEstimate> {
    params.validate()?;
    let n = params.n;
    if u.domain_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.domain_dim() });
    }
    region.validate(n)?;
    if n_samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: n_samples, min: MIN_SAMPLES });
    }
    let strata_count = opts.shells + 1;
    if opts.shells > 60 {
        return Err(Error::Parameter(format!("at most 60 shells, got {}", opts.shells)));
    }

    let region_measure = region.measure(n);
    let support = u.support().filter(|s| opts.support_aware && disjoint(&s.balls));
    let (domain, x_measure, doubled) = match support {
        Some(s) if s.measure() < region_measure => {
            let mut acc = 0.0;
            let cumulative = s
                .balls
                .iter()
                .map(|b| {
                    acc += b.measure();
                    acc
                })
                .collect();
            (XDomain::Support { balls: &s.balls, cumulative }, s.measure(), true)
        }
        _ => (XDomain::Region(*region), region_measure, false),
    };

    let (p, q) = (params.p, params.kernel_exponent());
    let shells: Vec<(f64, f64, f64, f64)> = (0..strata_count)
        .map(|j| {
            let hi = PI * 0.5f64.powi(j as i32);
            let lo = 0.5 * hi;
            let (c_lo, c_hi) = (cap_measure(n, lo), cap_measure(n, hi));
            (lo, hi, c_lo, c_hi - c_lo)
        })
        .collect();

    let per = n_samples / strata_count;
    let extra = n_samples % strata_count;
    let mut tasks = Vec::new();
    for j in 0..strata_count {
        let count = per + usize::from(j < extra);
        let mut start = 0;
        let mut batch = 0u64;
        while start < count {
            let len = BATCH.min(count - start);
            tasks.push((j, batch, len));
            start += len;
            batch += 1;
        }
    }

    let empty = x_measure == 0.0;
    let results: Vec<Moments> = tasks
        .par_iter()
        .map(|&(j, batch, len)| {
            let mut m = Moments::default();
            if empty {
                for _ in 0..len {
                    m.push(0.0);
                }
                return m;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((j as u64) << 32) | batch);
            let (_, _, c_lo, shell) = shells[j];
            let scale = x_measure * shell;
            for _ in 0..len {
                let x = domain.sample(n, &mut rng);
                let theta = inverse_cap_measure(n, c_lo + rng.random::<f64>() * shell);
                let dir = sample_tangent_direction(&x, &mut rng);
                if !region.contains(&x) {
                    m.push(0.0);
                    continue;
                }
                let y = offset(&x, &dir, theta);
                if !region.contains(&y) {
                    m.push(0.0);
                    continue;
                }
                let mut w = scale;
                if let (true, XDomain::Support { balls, .. }) = (doubled, &domain) {
                    if !balls.iter().any(|b| b.contains(&y)) {
                        w *= 2.0;
                    }
                }
                let chord = 2.0 * (0.5 * theta).sin();
                m.push(w * kernel(&u.eval(&x), &u.eval(&y), chord, p, q));
            }
            m
        })
        .collect();

    let mut per_stratum = vec![Moments::default(); strata_count];
    for (&(j, _, _), m) in tasks.iter().zip(&results) {
        per_stratum[j] = per_stratum[j].merge(*m);
    }
    let strata: Vec<Stratum> = per_stratum
        .iter()
        .enumerate()
        .map(|(j, m)| Stratum {
            index: j,
            theta_lo: shells[j].0,
            theta_hi: shells[j].1,
            value: m.mean,
            std_error: m.std_error(),
            n_samples: m.count,
        })
        .collect();
    let value: f64 = strata.iter().map(|s| s.value).sum();
    let std_error = strata.iter().map(|s| s.std_error * s.std_error).sum::<f64>().sqrt();

    // |u(x) − u(y)| ≤ Lθ and |x − y| ≥ 2θ/π inside the unsampled ball
    let eps = PI * 0.5f64.powi(strata_count as i32);
    let remainder_bound = u.lipschitz_hint().map(|l| {
        let exponent = p - params.s * p;
        let weight = if doubled { 2.0 } else { 1.0 };
        x_measure * weight * l.powf(p) * (0.5 * PI).powf(q) * direction_measure(n) * eps.powf(exponent)
            / exponent
    });

    Ok(EnergyEstimate {
        value: value.max(0.0),
        std_error,
        n_samples: n_samples as u64,
        s: params.s,
        p: params.p,
        n,
        region: *region,
        seed,
        strata,
        remainder_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{random_rotation, sample_uniform};
    use crate::maps::{constant, equator_collapse, hopf_map, identity, precompose_rotation};

    fn crit() -> EnergyParams {
        EnergyParams::critical(0.5, 3).unwrap()
    }

    #[test]
    fn constant_map_has_zero_energy() {
        let c = constant(3, SpherePoint::north(2)).unwrap();
        let e = energy_mc(&c, &crit(), &Region::Whole, 2000, 1).unwrap();
        assert_eq!((e.value, e.std_error), (0.0, 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = hopf_map();
        assert!(matches!(energy_mc(&h, &crit(), &Region::Whole, 999, 1), Err(Error::TooFewSamples { .. })));
        let p2 = EnergyParams::new(0.5, 4.0, 2).unwrap();
        assert!(energy_mc(&h, &p2, &Region::Whole, 5000, 1).is_err());
    }

    #[test]
    fn integrand_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = equator_collapse(3).unwrap();
        for _ in 0..1000 {
            let x = sample_uniform(3, &mut rng);
            let y = sample_uniform(3, &mut rng);
            assert_eq!(pair_integrand(&u, &crit(), &x, &y), pair_integrand(&u, &crit(), &y, &x));
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let h = hopf_map();
        let a = energy_mc(&h, &crit(), &Region::Whole, 20_000, 9).unwrap();
        let b = energy_mc(&h, &crit(), &Region::Whole, 20_000, 9).unwrap();
        let c = energy_mc(&h, &crit(), &Region::Whole, 20_000, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let h = hopf_map();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| energy_mc(&h, &crit(), &Region::Whole, 30_000, 4).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn identity_on_circle_matches_closed_form() {
        // On S¹ with p = 2: |x − y|^{2 − 1 − 2s} integrated in closed form
        // is 2π·∫₀^{2π} (2 sin(t/2))^{1−2s} dt; compare against Simpson.
        let s = 0.3;
        let params = EnergyParams::new(s, 2.0, 1).unwrap();
        let id = identity(1).unwrap();
        let e = energy_mc(&id, &params, &Region::Whole, 200_000, 5).unwrap();
        let m = 200_000;
        let h = 2.0 * PI / m as f64;
        let f = |t: f64| (2.0 * (0.5 * t).sin()).powf(1.0 - 2.0 * s);
        let mut acc = f(0.0) + f(2.0 * PI);
        for i in 1..m {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let exact = 2.0 * PI * acc * h / 3.0;
        assert!((e.value - exact).abs() < 3.0 * e.std_error + 1e-9, "{} vs {exact} ± {}", e.value, e.std_error);
    }

    #[test]
    fn rotation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = equator_collapse(2).unwrap();
        let params = EnergyParams::new(0.5, 4.0, 2).unwrap();
        let r = random_rotation(2, &mut rng);
        let ur = precompose_rotation(&u, &r).unwrap();
        let a = energy_mc(&u, &params, &Region::Whole, 100_000, 1).unwrap();
        let b = energy_mc(&ur, &params, &Region::Whole, 100_000, 2).unwrap();
        assert!(super::super::agree_within(&a, &b, 3.0), "{} vs {}", a.value, b.value);
    }
}
