//! Quaternion model of ℝ⁴ and the Study labels of oriented lines.
//!
//! Homogeneous coordinates `(x1, x2, x3, x4)` are identified with the
//! quaternion `x1 + x2 i + x3 j + x4 k`. For an oriented line with oriented
//! orthonormal basis `(u, v)` the labels are
//!
//! * `left  = conj(u) v`, constant on orbits of `q ↦ a q` (left classes),
//! * `right = v conj(u)`, constant on orbits of `q ↦ q b` (right classes).
//!
//! Both are pure unit quaternions, and the pair determines the line.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::projective::{apply_collineation, join_oriented, unit_angle, OrientedLine, LINE_EQ_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn pure(v: &Vector3<f64>) -> Self {
        Self::new(0.0, v.x, v.y, v.z)
    }

    pub fn from_vector4(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_vector4(&self) -> Vector4<f64> {
        Vector4::new(self.w, self.x, self.y, self.z)
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm(&self) -> f64 {
        self.to_vector4().norm()
    }

    pub fn normalize(&self) -> Self {
        let n = self.norm();
        Self::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Unit quaternion for a rotation by `angle` about `axis`.
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        let a = axis.normalize();
        let (s, c) = (angle / 2.0).sin_cos();
        Self::new(c, a.x * s, a.y * s, a.z * s)
    }

    /// `v ↦ q v q*` as a 3×3 matrix; `q` and `-q` give the same rotation.
    pub fn to_rotation_matrix(&self) -> Matrix3<f64> {
        let q = self.normalize();
        let (w, x, y, z) = (q.w, q.x, q.y, q.z);
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    /// Inverse of [`Self::to_rotation_matrix`] (Shepperd's method), `w ≥ 0`.
    pub fn from_rotation_matrix(m: &Matrix3<f64>) -> Self {
        let tr = m.trace();
        let q = if tr > m[(0, 0)].max(m[(1, 1)]).max(m[(2, 2)]) {
            let s = (1.0 + tr).sqrt() * 2.0;
            Self::new(s / 4.0, (m[(2, 1)] - m[(1, 2)]) / s, (m[(0, 2)] - m[(2, 0)]) / s, (m[(1, 0)] - m[(0, 1)]) / s)
        } else if m[(0, 0)] >= m[(1, 1)] && m[(0, 0)] >= m[(2, 2)] {
            let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
            Self::new((m[(2, 1)] - m[(1, 2)]) / s, s / 4.0, (m[(0, 1)] + m[(1, 0)]) / s, (m[(0, 2)] + m[(2, 0)]) / s)
        } else if m[(1, 1)] >= m[(2, 2)] {
            let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
            Self::new((m[(0, 2)] - m[(2, 0)]) / s, (m[(0, 1)] + m[(1, 0)]) / s, s / 4.0, (m[(1, 2)] + m[(2, 1)]) / s)
        } else {
            let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
            Self::new((m[(1, 0)] - m[(0, 1)]) / s, (m[(0, 2)] + m[(2, 0)]) / s, (m[(1, 2)] + m[(2, 1)]) / s, s / 4.0)
        };
        let q = q.normalize();
        if q.w < 0.0 {
            -q
        } else {
            q
        }
    }

    /// Rotates a 3-vector by conjugation.
    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        (*self * Self::pure(v) * self.conj()).vector()
    }

    /// Matrix of `x ↦ self · x` on ℝ⁴.
    pub fn left_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_columns(&[
            (*self * Self::ONE).to_vector4(),
            (*self * Self::I).to_vector4(),
            (*self * Self::J).to_vector4(),
            (*self * Self::K).to_vector4(),
        ])
    }

    /// Matrix of `x ↦ x · self` on ℝ⁴.
    pub fn right_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_columns(&[
            (Self::ONE * *self).to_vector4(),
            (Self::I * *self).to_vector4(),
            (Self::J * *self).to_vector4(),
            (Self::K * *self).to_vector4(),
        ])
    }

    /// Unit quaternion `q` with `q a q* = b` for pure unit `a`, `b`.
    pub fn rotation_between_pure(a: &Quaternion, b: &Quaternion) -> Quaternion {
        let (a, b) = (a.vector().normalize(), b.vector().normalize());
        let c = a.dot(&b);
        if c > -1.0 + 1e-12 {
            let ax = a.cross(&b);
            Quaternion::new(1.0 + c, ax.x, ax.y, ax.z).normalize()
        } else {
            // Antipodal: any half-turn about an axis perpendicular to a.
            let trial = if a.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
            Quaternion::pure(&a.cross(&trial).normalize())
        }
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Which Clifford parallelism: orbits of `q ↦ a q` or of `q ↦ q b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// The pair of S² labels of an oriented line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyPair {
    pub left: Quaternion,
    pub right: Quaternion,
}

impl StudyPair {
    pub fn side(&self, side: Side) -> Quaternion {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    /// Largest angular distance between corresponding components.
    pub fn distance(&self, other: &StudyPair) -> f64 {
        label_distance(&self.left, &other.left).max(label_distance(&self.right, &other.right))
    }
}

/// Angle between two pure unit quaternions seen as points of S².
pub fn label_distance(a: &Quaternion, b: &Quaternion) -> f64 {
    unit_angle(&a.to_vector4(), &b.to_vector4())
}

pub fn oriented_basis(line: &OrientedLine) -> (Vector4<f64>, Vector4<f64>) {
    line.basis()
}

pub fn study_map(line: &OrientedLine) -> StudyPair {
    let (u, v) = line.basis();
    let (u, v) = (Quaternion::from_vector4(&u), Quaternion::from_vector4(&v));
    StudyPair { left: pure_part(u.conj() * v), right: pure_part(v * u.conj()) }
}

// Re(u* v) vanishes up to rounding for an orthonormal basis.
fn pure_part(q: Quaternion) -> Quaternion {
    Quaternion::new(0.0, q.x, q.y, q.z).normalize()
}

pub fn left_parallel(l: &OrientedLine, m: &OrientedLine) -> bool {
    label_distance(&study_map(l).left, &study_map(m).left) <= LINE_EQ_TOL
}

pub fn right_parallel(l: &OrientedLine, m: &OrientedLine) -> bool {
    label_distance(&study_map(l).right, &study_map(m).right) <= LINE_EQ_TOL
}

/// Image of `line` under `q ↦ a q` (left) or `q ↦ q a` (right).
pub fn clifford_orbit(line: &OrientedLine, a: &Quaternion, side: Side) -> Result<OrientedLine> {
    let m = match side {
        Side::Left => a.normalize().left_matrix(),
        Side::Right => a.normalize().right_matrix(),
    };
    apply_collineation(&m, line)
}

/// The oriented line with the given labels: `⟨u, u·left⟩⁺` for any unit
/// `u` with `u · left · u* = right`.
pub fn line_with_labels(labels: &StudyPair) -> Result<OrientedLine> {
    let u = Quaternion::rotation_between_pure(&labels.left, &labels.right);
    join_oriented(&u.to_vector4(), &(u * labels.left).to_vector4())
}
