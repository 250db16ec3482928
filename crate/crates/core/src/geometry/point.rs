use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{dot, Mat};

/// Largest sphere dimension the crate handles (S³ ⊂ R⁴).
pub const MAX_DIM: usize = 3;

/// Norm tolerance accepted when a point is constructed from raw coordinates.
pub const UNIT_TOL: f64 = 1e-12;

/// A unit vector on Sᵐ ⊂ Rᵐ⁺¹, 1 ≤ m ≤ 3.
#[derive(Clone, Copy, PartialEq)]
pub struct SpherePoint {
    dim: usize,
    c: [f64; MAX_DIM + 1],
}

impl SpherePoint {
    /// Builds a point from coordinates that are already unit length.
    pub fn new(coords: &[f64]) -> Result<Self> {
        let p = Self::raw(coords)?;
        let n = p.norm();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(p)
    }

    /// Builds a point by normalizing an arbitrary nonzero vector.
    pub fn normalized(coords: &[f64]) -> Result<Self> {
        let mut p = Self::raw(coords)?;
        let n = p.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::SingularInput(format!("cannot normalize vector of norm {n}")));
        }
        for v in p.c.iter_mut() {
            *v /= n;
        }
        Ok(p)
    }

    fn raw(coords: &[f64]) -> Result<Self> {
        let len = coords.len();
        if !(2..=MAX_DIM + 1).contains(&len) {
            return Err(Error::UnsupportedDimension(len.saturating_sub(1)));
        }
        let mut c = [0.0; MAX_DIM + 1];
        c[..len].copy_from_slice(coords);
        Ok(Self { dim: len - 1, c })
    }

    /// No validation; callers guarantee unit norm up to rounding.
    #[inline]
    pub(crate) fn from_array(dim: usize, c: [f64; MAX_DIM + 1]) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&dim));
        Self { dim, c }
    }

    /// Same as [`from_array`](Self::from_array) but rescales to unit norm.
    #[inline]
    pub(crate) fn from_array_normalized(dim: usize, mut c: [f64; MAX_DIM + 1]) -> Self {
        let n = dot(&c[..=dim], &c[..=dim]).sqrt();
        for v in c[..=dim].iter_mut() {
            *v /= n;
        }
        Self { dim, c }
    }

    /// The standard basis vector e_{i+1} on Sᵐ.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim) && i <= dim);
        let mut c = [0.0; MAX_DIM + 1];
        c[i] = 1.0;
        Self { dim, c }
    }

    /// (0, …, 0, 1)
    pub fn north(dim: usize) -> Self {
        Self::basis(dim, dim)
    }

    /// (0, …, 0, −1)
    pub fn south(dim: usize) -> Self {
        let mut p = Self::basis(dim, dim);
        p.c[dim] = -1.0;
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ambient coordinates, length `dim + 1`.
    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.c[..=self.dim]
    }

    #[inline]
    pub(crate) fn array(&self) -> &[f64; MAX_DIM + 1] {
        &self.c
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        dot(self.coords(), self.coords()).sqrt()
    }

    #[inline]
    pub fn dot(&self, other: &SpherePoint) -> f64 {
        dot(self.coords(), other.coords())
    }

    pub fn antipode(&self) -> Self {
        let mut p = *self;
        for v in p.c.iter_mut() {
            *v = -*v;
        }
        p
    }

    /// Euclidean distance in the ambient space.
    #[inline]
    pub fn chord(&self, other: &SpherePoint) -> f64 {
        let mut s = 0.0;
        for i in 0..=self.dim {
            let d = self.c[i] - other.c[i];
            s += d * d;
        }
        s.sqrt()
    }

    /// An orthonormal basis of the tangent space, oriented so that
    /// `det[x, e₁, …, e_m] = +1`. Returned as the columns of an
    /// (m+1)×m matrix.
    pub fn tangent_frame(&self) -> Mat {
        let n = self.dim + 1;
        // Gram-Schmidt over the standard basis, skipping the axis most
        // aligned with x.
        let skip = (0..n)
            .max_by(|&a, &b| self.c[a].abs().total_cmp(&self.c[b].abs()))
            .unwrap_or(0);
        let mut vecs: Vec<[f64; MAX_DIM + 1]> = vec![self.c];
        for axis in (0..n).filter(|&a| a != skip) {
            let mut v = [0.0; MAX_DIM + 1];
            v[axis] = 1.0;
            for u in &vecs {
                let d = dot(&v[..n], &u[..n]);
                for i in 0..n {
                    v[i] -= d * u[i];
                }
            }
            let nv = dot(&v[..n], &v[..n]).sqrt();
            for x in v[..n].iter_mut() {
                *x /= nv;
            }
            vecs.push(v);
        }
        let mut full = Mat::zeros(n, n);
        for (j, v) in vecs.iter().enumerate() {
            full.set_column(j, &v[..n]);
        }
        if full.det() < 0.0 {
            let last = vecs.len() - 1;
            for x in vecs[last][..n].iter_mut() {
                *x = -*x;
            }
        }
        let mut frame = Mat::zeros(n, self.dim);
        for (j, v) in vecs.iter().skip(1).enumerate() {
            frame.set_column(j, &v[..n]);
        }
        frame
    }

    /// Geodesic exponential map: follow the great circle from `self` in
    /// the tangent direction `v` for arc length |v|.
    pub fn exp(&self, v: &[f64]) -> SpherePoint {
        let n = self.dim + 1;
        debug_assert_eq!(v.len(), n);
        let len = dot(v, v).sqrt();
        if len == 0.0 {
            return *self;
        }
        let (s, c) = len.sin_cos();
        let mut out = [0.0; MAX_DIM + 1];
        for i in 0..n {
            out[i] = c * self.c[i] + s * v[i] / len;
        }
        SpherePoint::from_array_normalized(self.dim, out)
    }
}

impl fmt::Debug for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}{:?}", self.dim, self.coords())
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        SpherePoint::new(&v).map_err(serde::de::Error::custom)
    }
}

/// Great-circle distance in radians, in [0, π].
pub fn geodesic_distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    if x.dim != y.dim {
        return Err(Error::DimensionMismatch { expected: x.dim, got: y.dim });
    }
    Ok(x.dot(y).clamp(-1.0, 1.0).acos())
}

/// Uniform point on Sᵐ: a normalized vector of independent standard normals.
pub fn sample_uniform<R: Rng + ?Sized>(m: usize, rng: &mut R) -> SpherePoint {
    assert!((1..=MAX_DIM).contains(&m), "unsupported sphere dimension {m}");
    loop {
        let mut c = [0.0; MAX_DIM + 1];
        for v in c[..=m].iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let n = dot(&c[..=m], &c[..=m]).sqrt();
        if n > 1e-12 {
            for v in c[..=m].iter_mut() {
                *v /= n;
            }
            return SpherePoint { dim: m, c };
        }
    }
}

/// A uniformly distributed unit tangent vector at `x`.
pub(crate) fn sample_tangent_direction<R: Rng + ?Sized>(
    x: &SpherePoint,
    rng: &mut R,
) -> [f64; MAX_DIM + 1] {
    let n = x.dim + 1;
    loop {
        let mut v = [0.0; MAX_DIM + 1];
        for c in v[..n].iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let d = dot(&v[..n], x.coords());
        for i in 0..n {
            v[i] -= d * x.c[i];
        }
        let len = dot(&v[..n], &v[..n]).sqrt();
        if len > 1e-9 {
            for c in v[..n].iter_mut() {
                *c /= len;
            }
            return v;
        }
    }
}

/// Point at geodesic distance `theta` from `x` in unit tangent direction `dir`.
#[inline]
pub(crate) fn offset(x: &SpherePoint, dir: &[f64; MAX_DIM + 1], theta: f64) -> SpherePoint {
    let (s, c) = theta.sin_cos();
    let mut out = [0.0; MAX_DIM + 1];
    for i in 0..=x.dim {
        out[i] = c * x.c[i] + s * dir[i];
    }
    SpherePoint::from_array_normalized(x.dim, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn distance_examples() {
        let e1 = SpherePoint::basis(2, 0);
        let e2 = SpherePoint::basis(2, 1);
        assert_eq!(geodesic_distance(&e1, &e1).unwrap(), 0.0);
        assert!((geodesic_distance(&e1, &e1.antipode()).unwrap() - PI).abs() < 1e-15);
        assert!((geodesic_distance(&e1, &e2).unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let a = SpherePoint::basis(2, 0);
        let b = SpherePoint::basis(3, 0);
        assert!(matches!(
            geodesic_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_unit_and_bad_dims() {
        assert!(matches!(SpherePoint::new(&[1.0, 1.0]), Err(Error::NotUnit { .. })));
        assert!(SpherePoint::new(&[1.0]).is_err());
        assert!(SpherePoint::new(&[1.0, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(SpherePoint::normalized(&[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn uniform_samples_are_unit_and_centered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mut mean = [0.0; 3];
        let mut upper = 0usize;
        for _ in 0..n {
            let p = sample_uniform(2, &mut rng);
            assert!((p.norm() - 1.0).abs() < 1e-12);
            for i in 0..3 {
                mean[i] += p.coords()[i] / n as f64;
            }
            if p.coords()[2] > 0.0 {
                upper += 1;
            }
        }
        for m in mean {
            assert!(m.abs() < 0.02, "coordinate mean {m}");
        }
        let frac = upper as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.01, "upper fraction {frac}");
    }

    #[test]
    fn sampling_is_deterministic_given_stream() {
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            assert_eq!(sample_uniform(3, &mut a), sample_uniform(3, &mut b));
        }
    }

    #[test]
    fn tangent_frame_is_oriented_and_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..=3 {
            for _ in 0..200 {
                let x = sample_uniform(m, &mut rng);
                let e = x.tangent_frame();
                let mut full = Mat::zeros(m + 1, m + 1);
                full.set_column(0, x.coords());
                for j in 0..m {
                    let col = e.column(j);
                    full.set_column(j + 1, &col[..=m]);
                }
                assert!((full.det() - 1.0).abs() < 1e-12);
                let gram = full.transpose().mul(&full);
                for i in 0..=m {
                    for j in 0..=m {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((gram.get(i, j) - want).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn serde_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = sample_uniform(3, &mut rng);
        let s = serde_json::to_string(&p).unwrap();
        let q: SpherePoint = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<SpherePoint>("[1.0, 1.0, 0.0]").is_err());
    }
}
