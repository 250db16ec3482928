//! Points, balls, rotations, sampling and packings on Sᵐ (m ≤ 3).
//!
//! Angles are radians throughout. Distances between points are either
//! geodesic ([`geodesic_distance`]) or chordal ([`SpherePoint::chord`]).

mod ball;
mod packing;
mod point;
mod rotation;
mod stereo;

pub use ball::{cap_measure, direction_measure, inverse_cap_measure, sphere_measure, GeodesicBall};
pub use packing::{fibonacci_lattice, pack_disjoint_balls, DEFAULT_SAFETY, PACKING_LAMBDA};
pub use point::{geodesic_distance, sample_uniform, SpherePoint, MAX_DIM, UNIT_TOL};
pub use rotation::{rotation_taking, Rotation};
pub use stereo::{stereographic, stereographic_inv, POLE_GUARD};

pub(crate) use point::{offset, sample_tangent_direction};

/// Haar-random rotation of Sᵐ, built from Gram-Schmidt on Gaussian columns.
pub fn random_rotation<R: rand::Rng + ?Sized>(m: usize, rng: &mut R) -> Rotation {
    use crate::linalg::{dot, Mat};
    use rand_distr::StandardNormal;
    let n = m + 1;
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut ok = true;
        for _ in 0..n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            for u in &cols {
                let d = dot(&v, u);
                for i in 0..n {
                    v[i] -= d * u[i];
                }
            }
            let len = dot(&v, &v).sqrt();
            if len < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.iter().map(|x| x / len).collect());
        }
        if !ok {
            continue;
        }
        let mut mat = Mat::zeros(n, n);
        for (j, c) in cols.iter().enumerate() {
            mat.set_column(j, c);
        }
        if mat.det() < 0.0 {
            let flipped: Vec<f64> = cols[0].iter().map(|x| -x).collect();
            mat.set_column(0, &flipped);
        }
        if let Ok(r) = Rotation::from_matrix(mat) {
            return r;
        }
    }
}
