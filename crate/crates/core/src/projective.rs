//! Points, lines and oriented lines of real projective 3-space.
//!
//! Conventions used everywhere in this crate:
//!
//! * Affine points `(x, y, z)` embed as homogeneous vectors `(x, y, z, 1)`;
//!   the plane at infinity is `x4 = 0`.
//! * The line `x ∧ y` has Plücker coordinates
//!   `(p12, p13, p14, p23, p24, p34)` with `p_ij = x_i y_j - x_j y_i`.
//! * The Klein quadric is `p12 p34 - p13 p24 + p14 p23 = 0`, and two lines
//!   meet iff the associated symmetric pairing vanishes.
//! * An oriented line is a unit Plücker vector whose sign is significant.
//!   Negation reverses the orientation.
//!
//! For an affine line through `P` with direction `D`, the direction part is
//! `-(p14, p24, p34) = D` and the moment part is `(p23, -p13, p12) = P × D`.

use nalgebra::{Matrix4, Matrix6, Vector3, Vector4, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Algebraic identities (quadric residual, unit norm).
pub const QUADRIC_TOL: f64 = 1e-12;
/// Angular tolerance for treating two (oriented) lines as equal.
pub const LINE_EQ_TOL: f64 = 1e-9;
/// A line whose direction part is below this is taken to lie at infinity.
pub const AT_INFINITY_TOL: f64 = 1e-12;

/// Index pairs in Plücker order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn wedge(x: &Vector4<f64>, y: &Vector4<f64>) -> Vector6<f64> {
    Vector6::from_fn(|k, _| {
        let (i, j) = PAIRS[k];
        x[i] * y[j] - x[j] * y[i]
    })
}

/// Angle between two unit vectors, stable near 0 and π.
pub(crate) fn unit_angle<const N: usize>(a: &nalgebra::SVector<f64, N>, b: &nalgebra::SVector<f64, N>) -> f64 {
    2.0 * ((a - b).norm() / 2.0).min(1.0).asin()
}

/// A point of PG(3,ℝ), stored as a unit homogeneous vector whose first
/// nonzero coordinate is positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct HPoint {
    coords: Vector4<f64>,
}

impl HPoint {
    pub fn new(v: Vector4<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::BadParameter("homogeneous point must be a finite nonzero vector".into()));
        }
        let mut c = if (n - 1.0).abs() <= 4.0 * f64::EPSILON { v } else { v / n };
        if let Some(first) = c.iter().find(|x| x.abs() > QUADRIC_TOL) {
            if *first < 0.0 {
                c = -c;
            }
        }
        Ok(Self { coords: c })
    }

    pub fn affine(p: &Vector3<f64>) -> Self {
        Self::new(Vector4::new(p.x, p.y, p.z, 1.0)).expect("affine point is nonzero")
    }

    pub fn at_infinity(direction: &Vector3<f64>) -> Result<Self> {
        Self::new(Vector4::new(direction.x, direction.y, direction.z, 0.0))
    }

    pub fn coords(&self) -> &Vector4<f64> {
        &self.coords
    }

    pub fn is_at_infinity(&self) -> bool {
        self.coords[3].abs() <= AT_INFINITY_TOL
    }

    /// Affine coordinates, or `None` for a point at infinity.
    pub fn to_affine(&self) -> Option<Vector3<f64>> {
        if self.is_at_infinity() {
            None
        } else {
            Some(self.coords.xyz() / self.coords[3])
        }
    }

    /// Projective angle to another point (0 iff equal).
    pub fn angle_to(&self, other: &HPoint) -> f64 {
        let a = unit_angle(&self.coords, &other.coords);
        let b = unit_angle(&self.coords, &(-other.coords));
        a.min(b)
    }
}

/// An oriented line: a unit vector on the Klein quadric, sign significant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 6]", into = "[f64; 6]")]
pub struct OrientedLine {
    p: Vector6<f64>,
}

/// A line without orientation: unit Plücker vector with canonical sign
/// (first coordinate of magnitude above 1e-12 is positive).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 6]", into = "[f64; 6]")]
pub struct Line {
    p: Vector6<f64>,
}

impl TryFrom<[f64; 4]> for HPoint {
    type Error = Error;
    fn try_from(a: [f64; 4]) -> Result<Self> {
        Self::new(Vector4::from(a))
    }
}

impl From<HPoint> for [f64; 4] {
    fn from(p: HPoint) -> Self {
        p.coords.into()
    }
}

impl TryFrom<[f64; 6]> for OrientedLine {
    type Error = Error;
    fn try_from(a: [f64; 6]) -> Result<Self> {
        Self::from_array(a)
    }
}

impl From<OrientedLine> for [f64; 6] {
    fn from(l: OrientedLine) -> Self {
        l.p.into()
    }
}

impl TryFrom<[f64; 6]> for Line {
    type Error = Error;
    fn try_from(a: [f64; 6]) -> Result<Self> {
        Ok(OrientedLine::from_array(a)?.forget_orientation())
    }
}

impl From<Line> for [f64; 6] {
    fn from(l: Line) -> Self {
        l.p.into()
    }
}

/// The pairing `p12 q34 - p13 q24 + p14 q23 + p34 q12 - p24 q13 + p23 q14`.
pub fn meet_pairing(p: &OrientedLine, q: &OrientedLine) -> f64 {
    pairing(&p.p, &q.p)
}

fn pairing(p: &Vector6<f64>, q: &Vector6<f64>) -> f64 {
    p[0] * q[5] - p[1] * q[4] + p[2] * q[3] + p[5] * q[0] - p[4] * q[1] + p[3] * q[2]
}

/// The oriented line `x ∧ y`, normalized to unit norm. Swapping the
/// arguments reverses the orientation.
///
/// Takes raw homogeneous vectors rather than [`HPoint`]s: the orientation
/// depends on the sign of each representative.
pub fn join_oriented(x: &Vector4<f64>, y: &Vector4<f64>) -> Result<OrientedLine> {
    let (nx, ny) = (x.norm(), y.norm());
    if !(nx > 0.0 && ny > 0.0) {
        return Err(Error::DegenerateJoin);
    }
    let w = wedge(&(x / nx), &(y / ny));
    // |x̂ ∧ ŷ| is the sine of the angle between the representatives.
    let n = w.norm();
    if !(n > LINE_EQ_TOL) {
        return Err(Error::DegenerateJoin);
    }
    Ok(OrientedLine { p: w / n })
}

/// Oriented line through the affine point `p` in direction `u`.
pub fn line_from_point_direction(p: &Vector3<f64>, u: &Vector3<f64>) -> Result<OrientedLine> {
    let n = u.norm();
    if !(n > 0.0) {
        return Err(Error::BadParameter("direction must be nonzero".into()));
    }
    let u = u / n;
    join_oriented(&Vector4::new(p.x, p.y, p.z, 1.0), &Vector4::new(u.x, u.y, u.z, 0.0))
}

/// Distance from `c` to the affine part of `line`, with the foot point.
pub fn dist_point_line(c: &Vector3<f64>, line: &OrientedLine) -> Result<(f64, Vector3<f64>)> {
    let d = line.direction();
    let dd = d.norm_squared();
    if dd.sqrt() <= AT_INFINITY_TOL {
        return Err(Error::InfiniteLine);
    }
    let foot0 = d.cross(&line.moment()) / dd;
    let foot = foot0 + d * (d.dot(&(c - foot0)) / dd);
    Ok(((c - foot).norm(), foot))
}

/// Second compound of a 4×4 matrix: the induced action on Plücker vectors.
pub fn second_compound(m: &Matrix4<f64>) -> Matrix6<f64> {
    Matrix6::from_fn(|r, c| {
        let (i, j) = PAIRS[r];
        let (k, l) = PAIRS[c];
        m[(i, k)] * m[(j, l)] - m[(i, l)] * m[(j, k)]
    })
}

/// Image of an oriented line under the collineation induced by `m`
/// (acting on column vectors of homogeneous point coordinates).
pub fn apply_collineation(m: &Matrix4<f64>, line: &OrientedLine) -> Result<OrientedLine> {
    let det = m.determinant();
    if !(det.abs() > QUADRIC_TOL) {
        return Err(Error::SingularMatrix { det });
    }
    let q = second_compound(m) * line.p;
    let n = q.norm();
    Ok(OrientedLine { p: q / n })
}

impl OrientedLine {
    /// Accepts any nonzero vector within 1e-9 (after normalization) of the
    /// Klein quadric.
    pub fn from_pluecker(v: Vector6<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::BadParameter("Plücker vector must be finite and nonzero".into()));
        }
        // Already-unit input is kept bit for bit so stored lines round-trip.
        let p = if (n - 1.0).abs() <= 4.0 * f64::EPSILON { v } else { v / n };
        let res = quadric(&p).abs();
        if res > LINE_EQ_TOL {
            return Err(Error::BadParameter(format!("not on the Klein quadric (residual {res:e})")));
        }
        Ok(Self { p })
    }

    pub fn from_array(a: [f64; 6]) -> Result<Self> {
        Self::from_pluecker(Vector6::from(a))
    }

    pub fn pluecker(&self) -> &Vector6<f64> {
        &self.p
    }

    pub fn to_array(&self) -> [f64; 6] {
        self.p.into()
    }

    pub fn reverse(&self) -> Self {
        Self { p: -self.p }
    }

    pub fn forget_orientation(&self) -> Line {
        Line::from_unit(self.p)
    }

    pub fn quadric_residual(&self) -> f64 {
        quadric(&self.p).abs()
    }

    /// Direction part `-(p14, p24, p34)`; zero iff the line is at infinity.
    pub fn direction(&self) -> Vector3<f64> {
        Vector3::new(-self.p[2], -self.p[4], -self.p[5])
    }

    /// Moment part `(p23, -p13, p12)`, i.e. `P × D`.
    pub fn moment(&self) -> Vector3<f64> {
        Vector3::new(self.p[3], -self.p[1], self.p[0])
    }

    pub fn is_at_infinity(&self) -> bool {
        self.direction().norm() <= AT_INFINITY_TOL
    }

    /// Unit direction of an affine line, in the sense of its orientation.
    pub fn unit_direction(&self) -> Option<Vector3<f64>> {
        let d = self.direction();
        let n = d.norm();
        (n > AT_INFINITY_TOL).then(|| d / n)
    }

    /// An orthonormal pair `(u, v)` in ℝ⁴ with `u ∧ v` equal to this line,
    /// sign included.
    pub fn basis(&self) -> (Vector4<f64>, Vector4<f64>) {
        // P = x yᵀ - y xᵀ; its columns span the plane.
        let mut pm = Matrix4::zeros();
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            pm[(i, j)] = self.p[k];
            pm[(j, i)] = -self.p[k];
        }
        let (best, _) =
            (0..4).map(|c| (c, pm.column(c).norm())).fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let u: Vector4<f64> = pm.column(best).normalize();
        // For orthonormal x, y: P x = -y, so -P u completes an oriented basis.
        let mut v: Vector4<f64> = -(pm * u);
        v -= u * u.dot(&v);
        let v = v.normalize();
        if wedge(&u, &v).dot(&self.p) < 0.0 {
            (u, -v)
        } else {
            (u, v)
        }
    }

    /// Distance of a projective point from this line, as the sine of the
    /// angle between the unit representative and the plane of the line.
    pub fn incidence_residual(&self, x: &HPoint) -> f64 {
        let (u, v) = self.basis();
        let c = x.coords();
        (c - u * c.dot(&u) - v * c.dot(&v)).norm()
    }

    /// Angular distance between unit Plücker vectors (orientation-true).
    pub fn angular_distance(&self, other: &OrientedLine) -> f64 {
        unit_angle(&self.p, &other.p)
    }

    /// Angular distance ignoring orientation.
    pub fn unoriented_distance(&self, other: &OrientedLine) -> f64 {
        self.angular_distance(other).min(self.angular_distance(&other.reverse()))
    }

    pub fn approx_eq(&self, other: &OrientedLine) -> bool {
        self.angular_distance(other) <= LINE_EQ_TOL
    }
}

fn quadric(p: &Vector6<f64>) -> f64 {
    p[0] * p[5] - p[1] * p[4] + p[2] * p[3]
}

impl Line {
    fn from_unit(p: Vector6<f64>) -> Self {
        match p.iter().find(|x| x.abs() > QUADRIC_TOL) {
            Some(first) if *first < 0.0 => Self { p: -p },
            _ => Self { p },
        }
    }

    pub fn pluecker(&self) -> &Vector6<f64> {
        &self.p
    }

    /// The two oriented lines over this line; they differ by global sign.
    pub fn orientations(&self) -> (OrientedLine, OrientedLine) {
        (OrientedLine { p: self.p }, OrientedLine { p: -self.p })
    }

    pub fn angular_distance(&self, other: &Line) -> f64 {
        unit_angle(&self.p, &other.p).min(unit_angle(&self.p, &(-other.p)))
    }

    pub fn approx_eq(&self, other: &Line) -> bool {
        self.angular_distance(other) <= LINE_EQ_TOL
    }
}

/// Block matrix `diag(R, 1)`: a linear map of affine ℝ³ as a collineation.
pub fn affine_linear(r: &nalgebra::Matrix3<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
    m
}
