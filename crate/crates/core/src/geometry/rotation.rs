use serde::{Deserialize, Serialize};

use super::point::{SpherePoint, MAX_DIM};
use crate::error::{Error, Result};
use crate::linalg::{dot, Mat};

/// An element of SO(m+1) acting on Sᵐ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Rotation {
    matrix: Mat,
}

impl TryFrom<Vec<Vec<f64>>> for Rotation {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = Mat::from_rows(&rows)
            .ok_or_else(|| Error::Parameter("rotation rows are ragged or oversized".into()))?;
        Rotation::from_matrix(m)
    }
}

impl From<Rotation> for Vec<Vec<f64>> {
    fn from(r: Rotation) -> Self {
        r.matrix.to_rows()
    }
}

impl Rotation {
    pub const TOL: f64 = 1e-10;

    pub fn identity(dim: usize) -> Self {
        Self { matrix: Mat::identity(dim + 1) }
    }

    /// Validates orthogonality and unit determinant.
    pub fn from_matrix(matrix: Mat) -> Result<Self> {
        let n = matrix.rows();
        if n != matrix.cols() || !(2..=MAX_DIM + 1).contains(&n) {
            return Err(Error::Parameter(format!(
                "rotation must be square of size 2..=4, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let gram = matrix.mul(&matrix.transpose());
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                if (gram.get(i, j) - want).abs() > Self::TOL {
                    return Err(Error::Parameter("matrix is not orthogonal".into()));
                }
            }
        }
        if (matrix.det() - 1.0).abs() > Self::TOL {
            return Err(Error::Parameter("matrix has determinant != +1".into()));
        }
        Ok(Self { matrix })
    }

    /// Sphere dimension m of the Sᵐ this rotation acts on.
    pub fn dim(&self) -> usize {
        self.matrix.rows() - 1
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn inverse(&self) -> Self {
        Self { matrix: self.matrix.transpose() }
    }

    pub fn then(&self, next: &Rotation) -> Self {
        Self { matrix: next.matrix.mul(&self.matrix) }
    }

    #[inline]
    pub fn apply(&self, x: &SpherePoint) -> SpherePoint {
        debug_assert_eq!(x.dim(), self.dim());
        let mut out = [0.0; MAX_DIM + 1];
        let n = x.dim() + 1;
        self.matrix.mul_vec(x.coords(), &mut out[..n]);
        SpherePoint::from_array(x.dim(), out)
    }

    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.matrix.mul_vec(v, &mut out);
        out
    }
}

/// The rotation carrying `a` to `b` that fixes the orthogonal complement
/// of span{a, b}. For antipodal inputs it turns by π in the plane of `a`
/// and the first standard axis not (nearly) parallel to `a`.
pub fn rotation_taking(a: &SpherePoint, b: &SpherePoint) -> Result<Rotation> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let n = a.dim() + 1;
    let u = a.coords();
    let c = a.dot(b).clamp(-1.0, 1.0);
    let mut w = [0.0; MAX_DIM + 1];
    for i in 0..n {
        w[i] = b.coords()[i] - c * u[i];
    }
    let mut wn = dot(&w[..n], &w[..n]).sqrt();
    let antipodal = wn < 1e-12;
    if antipodal {
        if c > 0.0 {
            return Ok(Rotation::identity(a.dim()));
        }
        let axis = (0..n).find(|&i| u[i].abs() < 0.9).unwrap_or(0);
        w = [0.0; MAX_DIM + 1];
        w[axis] = 1.0;
        let d = u[axis];
        for i in 0..n {
            w[i] -= d * u[i];
        }
        wn = dot(&w[..n], &w[..n]).sqrt();
    }
    for x in w[..n].iter_mut() {
        *x /= wn;
    }
    let (sin_t, cos_t) = if antipodal {
        (0.0, -1.0)
    } else {
        (dot(&w[..n], b.coords()).max(0.0), c)
    };
    let mut m = Mat::identity(n);
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j)
                + sin_t * (w[i] * u[j] - u[i] * w[j])
                + (cos_t - 1.0) * (u[i] * u[j] + w[i] * w[j]);
            m.set(i, j, v);
        }
    }
    Ok(Rotation { matrix: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point::sample_uniform;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_valid(r: &Rotation) {
        Rotation::from_matrix(*r.matrix()).expect("valid rotation");
    }

    #[test]
    fn same_point_is_identity() {
        let a = SpherePoint::basis(3, 2);
        assert_eq!(rotation_taking(&a, &a).unwrap(), Rotation::identity(3));
    }

    #[test]
    fn e1_to_e2() {
        let e1 = SpherePoint::basis(2, 0);
        let e2 = SpherePoint::basis(2, 1);
        let r = rotation_taking(&e1, &e2).unwrap();
        assert!(r.apply(&e1).chord(&e2) < 1e-10);
        let e3 = SpherePoint::basis(2, 2);
        assert!(r.apply(&e3).chord(&e3) < 1e-10);
        assert_valid(&r);
    }

    #[test]
    fn antipodal_uses_fixed_plane() {
        let a = SpherePoint::basis(3, 0);
        let r = rotation_taking(&a, &a.antipode()).unwrap();
        assert!(r.apply(&a).chord(&a.antipode()) < 1e-12);
        assert_valid(&r);
        // first axis with |a_i| < 0.9 is e2, so e3 and e4 are fixed
        for i in 2..4 {
            let e = SpherePoint::basis(3, i);
            assert!(r.apply(&e).chord(&e) < 1e-12);
        }
    }

    #[test]
    fn random_pairs_map_and_fix_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for m in 1..=3 {
            for _ in 0..500 {
                let a = sample_uniform(m, &mut rng);
                let b = sample_uniform(m, &mut rng);
                let r = rotation_taking(&a, &b).unwrap();
                assert!(r.apply(&a).chord(&b) < 1e-10);
                assert_valid(&r);
                // a vector orthogonal to a and b is fixed
                if m >= 2 {
                    let v = sample_uniform(m, &mut rng);
                    let mut w: Vec<f64> = v.coords().to_vec();
                    for basis in gram_schmidt(&[a.coords(), b.coords()]) {
                        let d = dot(&w, &basis);
                        for i in 0..w.len() {
                            w[i] -= d * basis[i];
                        }
                    }
                    let rw = r.apply_vec(&w);
                    let diff: f64 = rw.iter().zip(&w).map(|(x, y)| (x - y).abs()).sum();
                    assert!(diff < 1e-10);
                }
            }
        }
    }

    fn gram_schmidt(vs: &[&[f64]]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for v in vs {
            let mut w = v.to_vec();
            for u in &out {
                let d = dot(&w, u);
                for i in 0..w.len() {
                    w[i] -= d * u[i];
                }
            }
            let n = dot(&w, &w).sqrt();
            if n > 1e-9 {
                out.push(w.iter().map(|x| x / n).collect());
            }
        }
        out
    }

    #[test]
    fn serde_rejects_non_rotation() {
        let bad = "[[1.0, 0.0], [0.0, -1.0]]";
        assert!(serde_json::from_str::<Rotation>(bad).is_err());
        let r = Rotation::identity(2);
        let back: Rotation = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
