//! Rotational spreads assembled from coaxial reguli.
//!
//! The rotation group fixes the z-axis `Z` pointwise and the horizontal line
//! at infinity `V`. Every other member lies on the one-sheeted hyperboloid
//! `x² + y² - (z - b(r))²/a(r)² = r²` and is the line through
//! `(r cos φ, r sin φ, b(r))` with direction `(-sin φ, cos φ, h·a(r))`.
//!
//! `h = +1` is called right-screwed here. Orientation: members are oriented
//! along that direction, `Z⁺` points toward `h·∞` on the z-axis and `V⁺` is
//! `e1 ∧ e2`; both are the limits of the regulus orientations as `r → 0`
//! and `r → ∞`.

mod profile;
mod validate;

pub use profile::{Profile, ProfileSpec};
pub use validate::{validate_profile, ValidationEntry, ValidationPlan, ValidationReport};

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projective::{join_oriented, line_from_point_direction, HPoint, OrientedLine, AT_INFINITY_TOL};
use crate::solve::{bisect_positive, logspace};

/// Screw sense of the reguli.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    pub fn sign(self) -> f64 {
        match self {
            Handedness::Right => 1.0,
            Handedness::Left => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Handedness::Right => Handedness::Left,
            Handedness::Left => Handedness::Right,
        }
    }
}

impl TryFrom<i8> for Handedness {
    type Error = Error;
    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Handedness::Right),
            -1 => Ok(Handedness::Left),
            _ => Err(Error::BadParameter(format!("handedness must be 1 or -1, got {v}"))),
        }
    }
}

impl From<Handedness> for i8 {
    fn from(h: Handedness) -> i8 {
        match h {
            Handedness::Right => 1,
            Handedness::Left => -1,
        }
    }
}

/// Where a point sits in the spread.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Member {
    Axis,
    AtInfinity,
    Regulus { r: f64, phi: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationalSpread {
    profile: Profile,
    handedness: Handedness,
}

/// Number of log-spaced probes used to count sign changes when solving for
/// the hyperbola through a point.
const ROOT_SCAN: usize = 64;

impl RotationalSpread {
    pub fn new(profile: Profile, handedness: Handedness) -> Self {
        Self { profile, handedness }
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn handedness(&self) -> Handedness {
        self.handedness
    }

    /// Effective screw sign `h`, including a profile's own sign.
    pub fn screw(&self) -> f64 {
        self.handedness.sign() * self.profile.screw_sign()
    }

    pub fn z_plus(&self) -> OrientedLine {
        line_from_point_direction(&Vector3::zeros(), &Vector3::new(0.0, 0.0, self.screw())).expect("axis")
    }

    pub fn v_plus(&self) -> OrientedLine {
        join_oriented(&Vector4::x(), &Vector4::y()).expect("horizontal line at infinity")
    }

    /// Point at parameter `t` on the member `(r, φ)`.
    pub fn regulus_point(&self, r: f64, phi: f64, t: f64) -> Vector3<f64> {
        let (s, c) = phi.sin_cos();
        let a = self.profile.a(r);
        Vector3::new(r * c - t * s, r * s + t * c, self.profile.b(r) + t * self.screw() * a)
    }

    /// Unit direction of the member `(r, φ)`.
    pub fn regulus_direction(&self, r: f64, phi: f64) -> Vector3<f64> {
        let (s, c) = phi.sin_cos();
        Vector3::new(-s, c, self.screw() * self.profile.a(r)).normalize()
    }

    /// The member through `(r cos φ, r sin φ, b(r))`; requires `r > 0`.
    pub fn regulus_line(&self, r: f64, phi: f64) -> OrientedLine {
        assert!(r > 0.0, "regulus parameter r must be positive");
        line_from_point_direction(&self.regulus_point(r, phi, 0.0), &self.regulus_direction(r, phi))
            .expect("regulus line")
    }

    /// `x² + y² - (z - b)²/a² - r²` at an affine point.
    pub fn hyperboloid_residual(&self, r: f64, p: &Vector3<f64>) -> f64 {
        let (a, b) = (self.profile.a(r), self.profile.b(r));
        p.x * p.x + p.y * p.y - (p.z - b) * (p.z - b) / (a * a) - r * r
    }

    /// Locates the unique member through `p`.
    pub fn member_through(&self, p: &HPoint) -> Result<Member> {
        match p.to_affine() {
            None => self.member_at_infinity(&p.coords().xyz()),
            Some(q) => self.member_affine(&q),
        }
    }

    /// The unique spread member through `p`, with its spread orientation.
    pub fn containing_line(&self, p: &HPoint) -> Result<OrientedLine> {
        Ok(match self.member_through(p)? {
            Member::Axis => self.z_plus(),
            Member::AtInfinity => self.v_plus(),
            Member::Regulus { r, phi } => self.regulus_line(r, phi),
        })
    }

    fn member_affine(&self, q: &Vector3<f64>) -> Result<Member> {
        let rho = q.x.hypot(q.y);
        if rho <= 1e-15 * (1.0 + q.z.abs()) {
            return Ok(Member::Axis);
        }
        let z = q.z;
        let g = |r: f64| self.profile.branch_x(r, z) - rho;
        // X_r(z) >= r, so the bracket closes just above rho.
        let hi = rho * (1.0 + 1e-12);
        let mut lo = (rho * 1e-3).min(1e-9);
        while !(g(lo) < 0.0) && lo > 1e-300 {
            lo *= 1e-3;
        }
        if !(g(lo) < 0.0) {
            return Err(Error::NoRoot(format!("no hyperbola inside ({}, {z})", rho)));
        }
        let (lo, hi) = single_sign_change(&g, lo, hi)?;
        let (a, b) = bisect_positive(g, lo, hi).map_err(|_| Error::NoRoot(format!("({rho}, {z})")))?;
        let r = 0.5 * (a + b);
        let t = (z - self.profile.b(r)) / (self.screw() * self.profile.a(r));
        let phi = (q.y.atan2(q.x) - t.atan2(r)).rem_euclid(TAU);
        Ok(Member::Regulus { r, phi })
    }

    fn member_at_infinity(&self, u: &Vector3<f64>) -> Result<Member> {
        let u = u.normalize();
        let horiz = u.x.hypot(u.y);
        if u.z.abs() <= AT_INFINITY_TOL {
            return Ok(Member::AtInfinity);
        }
        if horiz <= AT_INFINITY_TOL {
            return Ok(Member::Axis);
        }
        let target = u.z.abs() / horiz;
        let lt = target.ln();
        let g = |r: f64| lt - self.profile.a(r).ln();
        let (mut lo, mut hi) = (1e-9, 1e9);
        while !(g(lo) < 0.0) && lo > 1e-300 {
            lo *= 1e-3;
        }
        while !(g(hi) > 0.0) && hi < 1e300 {
            hi *= 1e3;
        }
        let (lo, hi) = single_sign_change(&g, lo, hi).map_err(|e| {
            if let Error::NotBracketed { .. } = e {
                Error::NoRoot(format!("slope {target}"))
            } else {
                e
            }
        })?;
        let (a, b) = bisect_positive(g, lo, hi).map_err(|_| Error::NoRoot(format!("slope {target}")))?;
        let r = 0.5 * (a + b);
        // (-sin φ, cos φ, h a) = λ u with λ of the sign of h·u_z.
        let lambda = (self.screw() * u.z).signum() / horiz;
        let phi = (-lambda * u.x).atan2(lambda * u.y).rem_euclid(TAU);
        Ok(Member::Regulus { r, phi })
    }

    /// Same profile, opposite screw sense: the image under `(x, y, z) ↦ (x, -y, z)`.
    pub fn mirror(&self) -> Self {
        Self::new(self.profile.clone(), self.handedness.flipped())
    }

    /// Image under `z ↦ -z`: opposite screw sense and `b ↦ -b`.
    pub fn reflect_z(&self) -> Self {
        Self::new(self.profile.negate_b(), self.handedness.flipped())
    }
}

/// Narrows `[lo, hi]` to the single sub-bracket where `g` changes sign,
/// scanning `ROOT_SCAN` log-spaced probes.
fn single_sign_change<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64) -> Result<(f64, f64)> {
    if !(hi > lo) {
        return Ok((lo, hi.max(lo)));
    }
    let xs = logspace(lo, hi, ROOT_SCAN);
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let changes: Vec<usize> = (0..xs.len() - 1).filter(|&k| (vals[k] < 0.0) != (vals[k + 1] < 0.0)).collect();
    match changes.len() {
        0 => Err(Error::NotBracketed { lo, hi }),
        1 => Ok((xs[changes[0]], xs[changes[0] + 1])),
        n => Err(Error::MultipleRoots { count: n }),
    }
}

/// The line of ℝ³ obtained from the 2-subspace `{(v, A v)}` by dividing by
/// `(A v)₁`, i.e. with homogeneous coordinates `(v₁, v₂, (Av)₂, (Av)₁)`.
pub fn graph_line(a: &Matrix2<f64>) -> Result<OrientedLine> {
    let det = a.determinant();
    if !(det.abs() > 1e-12) {
        return Err(Error::SingularMatrix { det });
    }
    let e1 = Vector4::new(1.0, 0.0, a[(1, 0)], a[(0, 0)]);
    let e2 = Vector4::new(0.0, 1.0, a[(1, 1)], a[(0, 1)]);
    join_oriented(&e1, &e2)
}

/// `A(s) = [[s, 0], [s^w c, s^w]]`.
pub fn satz1_matrix(w: f64, c: f64, s: f64) -> Matrix2<f64> {
    let sw = s.powf(w);
    Matrix2::new(s, 0.0, sw * c, sw)
}

/// `A(t) = [[e^t, 0], [t e^t, d e^t]]`.
pub fn satz2_matrix(d: f64, t: f64) -> Matrix2<f64> {
    let e = t.exp();
    Matrix2::new(e, 0.0, t * e, d * e)
}

/// Unoriented distance between the graph line of `A(s)` and the member of
/// the `satz1` spread at `r = 1/s`, `φ = 0`.
pub fn satz1_crosscheck(w: f64, c: f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::BadParameter("s must be positive".into()));
    }
    let spread = RotationalSpread::new(Profile::satz1(w, c)?, Handedness::Right);
    Ok(graph_line(&satz1_matrix(w, c, s))?.unoriented_distance(&spread.regulus_line(1.0 / s, 0.0)))
}

/// Same for `satz2` at `r = e^{-t}`.
pub fn satz2_crosscheck(d: f64, t: f64) -> Result<f64> {
    let spread = RotationalSpread::new(Profile::satz2(d)?, Handedness::Right);
    Ok(graph_line(&satz2_matrix(d, t))?.unoriented_distance(&spread.regulus_line((-t).exp(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{dist_point_line, meet_pairing, Line};
    use crate::sampling::{mixed_point, rng, spread_parameters};
    use nalgebra::Vector6;

    fn regular() -> RotationalSpread {
        RotationalSpread::new(Profile::regular(1.0).unwrap(), Handedness::Right)
    }

    #[test]
    fn regulus_line_example() {
        let l = regular().regulus_line(1.0, 0.0);
        let want = Vector6::new(0.5, 0.5, 0.0, 0.0, -0.5, -0.5);
        assert!((l.pluecker() - want).norm() < 1e-12);
        let p = regular().regulus_point(1.0, 0.0, 1.0);
        assert!((p - Vector3::new(1.0, 1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn regulus_lines_skew_to_axis_and_on_hyperboloid() {
        for spread in [
            regular(),
            RotationalSpread::new(Profile::satz2(1.0).unwrap(), Handedness::Left),
            RotationalSpread::new(Profile::satz1(0.3, 1.0).unwrap(), Handedness::Right),
        ] {
            let z = spread.z_plus();
            for &r in &[1e-6, 1e-2, 0.5, 3.0, 1e3] {
                for &phi in &[0.0, 1.0, 4.0] {
                    let l = spread.regulus_line(r, phi);
                    assert!(meet_pairing(&l, &z).abs() > 0.0);
                    for t in [-3.0, -0.5, 0.0, 1.0, 10.0] {
                        let p = spread.regulus_point(r, phi, t);
                        let scale = 1.0 + p.norm_squared();
                        assert!(spread.hyperboloid_residual(r, &p).abs() <= 1e-9 * scale);
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_equivariance_of_members() {
        let s = RotationalSpread::new(Profile::satz2(1.0).unwrap(), Handedness::Right);
        let psi: f64 = 0.7;
        let rot = nalgebra::Matrix3::new(psi.cos(), -psi.sin(), 0.0, psi.sin(), psi.cos(), 0.0, 0.0, 0.0, 1.0);
        let moved =
            crate::projective::apply_collineation(&crate::projective::affine_linear(&rot), &s.regulus_line(2.0, 0.0))
                .unwrap();
        assert!(moved.angular_distance(&s.regulus_line(2.0, psi)) < 1e-12);
    }

    #[test]
    fn containing_line_examples() {
        let s = regular();
        let l = s.containing_line(&HPoint::affine(&Vector3::new(1.0, 1.0, 1.0))).unwrap();
        assert!(l.angular_distance(&s.regulus_line(1.0, 0.0)) < 1e-9);
        assert_eq!(s.containing_line(&HPoint::affine(&Vector3::new(0.0, 0.0, 5.0))).unwrap(), s.z_plus());
        let inf = HPoint::at_infinity(&Vector3::x()).unwrap();
        assert_eq!(s.containing_line(&inf).unwrap(), s.v_plus());
        let up = HPoint::at_infinity(&Vector3::z()).unwrap();
        assert_eq!(s.containing_line(&up).unwrap(), s.z_plus());
    }

    #[test]
    fn containing_line_passes_through_point() {
        let mut g = rng(11);
        for spread in [
            regular(),
            RotationalSpread::new(Profile::satz2(0.5).unwrap(), Handedness::Right),
            RotationalSpread::new(Profile::satz1(0.75, 1.0).unwrap(), Handedness::Left),
        ] {
            for k in 0..300 {
                let p = mixed_point(&mut g, k);
                let l = spread.containing_line(&p).unwrap();
                assert!(l.incidence_residual(&p) <= 1e-9, "point {:?}", p);
            }
        }
    }

    #[test]
    fn members_pairwise_disjoint() {
        let s = RotationalSpread::new(Profile::satz2(2.0).unwrap(), Handedness::Right);
        let mut g = rng(5);
        for _ in 0..300 {
            let (r1, p1) = spread_parameters(&mut g, -3.0, 3.0);
            let (r2, p2) = spread_parameters(&mut g, -3.0, 3.0);
            let pairing = meet_pairing(&s.regulus_line(r1, p1), &s.regulus_line(r2, p2));
            assert!(pairing.abs() > 1e-9);
        }
    }

    #[test]
    fn tangency_to_d_sphere() {
        let s = RotationalSpread::new(Profile::satz1(0.5, 1.0).unwrap(), Handedness::Right);
        for &r in &[1e-3, 0.1, 1.0, 10.0, 1e3] {
            for &phi in &[0.0, 2.0] {
                let (d, _) = dist_point_line(&Vector3::zeros(), &s.regulus_line(r, phi)).unwrap();
                assert!((d - s.profile().d_of_r(r)).abs() <= 1e-8 * (1.0 + d));
            }
        }
    }

    #[test]
    fn limit_orientations() {
        for spread in [regular(), RotationalSpread::new(Profile::satz2(1.0).unwrap(), Handedness::Left)] {
            for &phi in &[0.0, 1.3, 3.0, 5.5] {
                assert!(spread.regulus_line(1e-8, phi).angular_distance(&spread.z_plus()) < 1e-3);
                assert!(spread.regulus_line(1e8, phi).angular_distance(&spread.v_plus()) < 1e-3);
            }
        }
    }

    #[test]
    fn mirror_and_reflect() {
        let s = RotationalSpread::new(Profile::satz2(1.0).unwrap(), Handedness::Right);
        assert_eq!(s.mirror().mirror(), s);
        assert_eq!(s.mirror().handedness(), Handedness::Left);
        let r = s.reflect_z();
        assert_eq!(r.handedness(), Handedness::Left);
        assert!((r.profile().b(2.0) - 2f64.ln()).abs() < 1e-15);
        // The reflected spread still contains Z and V.
        let zs: Line = s.z_plus().forget_orientation();
        assert!(zs.approx_eq(&r.z_plus().forget_orientation()));
        assert!(s.v_plus().forget_orientation().approx_eq(&r.v_plus().forget_orientation()));
    }

    #[test]
    fn matrix_families_crosscheck() {
        for s in [0.5, 1.0, 2.0] {
            assert!(satz1_crosscheck(0.5, 0.0, s).unwrap() < 1e-12);
            assert!(satz1_crosscheck(0.3, 1.5, s).unwrap() < 1e-12);
        }
        for t in [-1.0, 0.0, 0.7] {
            assert!(satz2_crosscheck(1.0, t).unwrap() < 1e-12);
            assert!(satz2_crosscheck(-0.75, t).unwrap() < 1e-12);
        }
        // A(1), w = 1/2, c = 0 is the identity: line through (1,0,0), direction (0,1,1).
        let l = graph_line(&satz1_matrix(0.5, 0.0, 1.0)).unwrap();
        let want = line_from_point_direction(&Vector3::x(), &Vector3::new(0.0, 1.0, 1.0)).unwrap();
        assert!(l.unoriented_distance(&want) < 1e-12);
        assert!(matches!(graph_line(&Matrix2::zeros()), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn corrupted_profile_has_ambiguous_points() {
        // a rises between r = 1 and r = 2, so neighbouring branches cross.
        let r = vec![0.01, 0.1, 1.0, 2.0, 10.0, 100.0];
        let a = vec![100.0, 10.0, 1.0, 3.0, 0.1, 0.01];
        let p = Profile::table(r, a, vec![0.0; 6]).unwrap();
        let s = RotationalSpread::new(p, Handedness::Right);
        let mut g = rng(3);
        let failures = (0..500).filter(|&k| s.containing_line(&mixed_point(&mut g, k)).is_err()).count();
        assert!(failures > 0);
    }
}
