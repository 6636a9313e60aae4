//! Seeded sampling plans. Every suite draws its samples sequentially from a
//! ChaCha stream, so results depend only on the seed.

use std::f64::consts::TAU;

use nalgebra::{Vector3, Vector4};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::projective::{join_oriented, HPoint, OrientedLine};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_s3<R: Rng>(rng: &mut R) -> Vector4<f64> {
    loop {
        let v = Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

pub fn unit_s2<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Uniform oriented line: join of two independent uniform points of S³,
/// rejecting nearly dependent pairs.
pub fn random_oriented_line<R: Rng>(rng: &mut R) -> OrientedLine {
    loop {
        let (x, y) = (unit_s3(rng), unit_s3(rng));
        if x.dot(&y).abs() < 1.0 - 1e-6 {
            if let Ok(l) = join_oriented(&x, &y) {
                return l;
            }
        }
    }
}

/// Random unit quaternion, as a 4-vector.
pub fn random_unit_quaternion<R: Rng>(rng: &mut R) -> crate::clifford::Quaternion {
    crate::clifford::Quaternion::from_vector4(&unit_s3(rng))
}

/// Projective points mixing generic, axis and infinite ones. The kind is
/// picked by `index % 10` so every category is present in any run of 10.
pub fn mixed_point<R: Rng>(rng: &mut R, index: usize) -> HPoint {
    match index % 10 {
        0 => {
            let z: f64 = rng.sample::<f64, _>(StandardNormal) * 3.0;
            HPoint::affine(&Vector3::new(0.0, 0.0, z))
        }
        1 => HPoint::at_infinity(&unit_s2(rng)).expect("unit"),
        2 => {
            let phi = rng.random::<f64>() * TAU;
            HPoint::at_infinity(&Vector3::new(phi.cos(), phi.sin(), 0.0)).expect("unit")
        }
        3 => {
            // Affine point across many scales.
            let scale = 10f64.powf(rng.random_range(-3.0..3.0));
            HPoint::affine(&(unit_s2(rng) * scale))
        }
        _ => HPoint::new(unit_s3(rng)).expect("unit"),
    }
}

/// Spread parameters with `log10 r` uniform on `[lo, hi]`.
pub fn spread_parameters<R: Rng>(rng: &mut R, log10_lo: f64, log10_hi: f64) -> (f64, f64) {
    let r = 10f64.powf(rng.random_range(log10_lo..log10_hi));
    (r, rng.random::<f64>() * TAU)
}

/// Oriented lines mixing generic ones with the special orbit types of the
/// rotation group. The kind is picked by `index % 10`.
pub fn mixed_line<R: Rng>(rng: &mut R, index: usize) -> OrientedLine {
    let affine = |p: Vector3<f64>, u: Vector3<f64>| crate::projective::line_from_point_direction(&p, &u);
    let line = match index % 10 {
        // Through the origin.
        0 => affine(Vector3::zeros(), unit_s2(rng)),
        // In the plane at infinity.
        1 => {
            let (a, b) = (unit_s2(rng), unit_s2(rng));
            join_oriented(&Vector4::new(a.x, a.y, a.z, 0.0), &Vector4::new(b.x, b.y, b.z, 0.0))
        }
        // Very close to the origin, or very far from it.
        2 | 3 => {
            let scale = if index % 10 == 2 { 1e-6 } else { 1e6 };
            let u = unit_s2(rng);
            let w = unit_s2(rng);
            let foot = (w - u * w.dot(&u)).normalize() * scale;
            affine(foot, u)
        }
        // Meeting the z-axis.
        4 => {
            let z: f64 = rng.sample::<f64, _>(StandardNormal) * 2.0;
            affine(Vector3::new(0.0, 0.0, z), unit_s2(rng))
        }
        _ => return random_oriented_line(rng),
    };
    line.unwrap_or_else(|_| random_oriented_line(rng))
}
