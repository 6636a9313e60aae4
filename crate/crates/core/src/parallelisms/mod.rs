//! Parallelisms as orbits of a rotational spread under the rotation group
//! of ℝ³ about the origin.
//!
//! Everything runs in canonical coordinates: the placement `(s, t)` is folded
//! into the profile so the group is always the standard SO(3). A class is
//! labelled by the image of the oriented axis `Z⁺` direction, `R·(0, 0, h)`.

mod compare;

pub use compare::{
    clifford_compare, clifford_side, distinctness_witness, normalizing_scale, partition_failure_witness,
    AcentricWitness, CliffordComparison, DistinctnessWitness, CLIFFORD_SIDE_FOR_RIGHT_SCREW,
};

use nalgebra::{Matrix3, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::clifford::Quaternion;
use crate::error::{Error, Result};
use crate::projective::{affine_linear, apply_collineation, dist_point_line, unit_angle, HPoint, OrientedLine};
use crate::solve::logspace;
use crate::spreads::{Handedness, Profile, RotationalSpread};

/// Classification residuals and class-id agreement.
pub const CLASS_TOL: f64 = 1e-8;

/// Below this distance from the origin a line is treated as passing through it.
const ORIGIN_TOL: f64 = 1e-14;

/// `(x, y, z) ↦ (x, y, s z + t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Placement {
    pub s: f64,
    pub t: f64,
}

impl Default for Placement {
    fn default() -> Self {
        Self { s: 1.0, t: 0.0 }
    }
}

impl Placement {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite() && t.is_finite()) {
            return Err(Error::BadParameter("placement requires s > 0 and finite t".into()));
        }
        Ok(Self { s, t })
    }
}

/// Symmetry group of the base spread used by the construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gamma {
    #[default]
    #[serde(rename = "SO2")]
    So2,
    #[serde(rename = "O2")]
    O2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParallelismSpec {
    pub profile: Profile,
    #[serde(default = "right_handed")]
    pub handedness: Handedness,
    #[serde(default)]
    pub placement: Placement,
    #[serde(default = "yes")]
    pub oriented: bool,
    #[serde(default)]
    pub gamma: Gamma,
}

fn right_handed() -> Handedness {
    Handedness::Right
}

fn yes() -> bool {
    true
}

impl ParallelismSpec {
    pub fn new(profile: Profile) -> Self {
        Self {
            profile,
            handedness: Handedness::Right,
            placement: Placement::default(),
            oriented: true,
            gamma: Gamma::So2,
        }
    }

    pub fn handedness(mut self, h: Handedness) -> Self {
        self.handedness = h;
        self
    }

    pub fn placement(mut self, s: f64, t: f64) -> Self {
        self.placement = Placement { s, t };
        self
    }

    pub fn oriented(mut self, oriented: bool) -> Self {
        self.oriented = oriented;
        self
    }

    pub fn gamma(mut self, gamma: Gamma) -> Self {
        self.gamma = gamma;
        self
    }
}

/// Label of a parallel class: a unit vector, up to sign when unoriented.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassId {
    pub axis: [f64; 3],
    pub oriented: bool,
}

impl ClassId {
    pub fn oriented(v: &Vector3<f64>) -> Self {
        let v = v.normalize();
        Self { axis: [v.x, v.y, v.z], oriented: true }
    }

    /// Sign-canonical: first coordinate above 1e-12 in magnitude is positive.
    pub fn unoriented(v: &Vector3<f64>) -> Self {
        let mut v = v.normalize();
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v = -v;
            }
        }
        Self { axis: [v.x, v.y, v.z], oriented: false }
    }

    pub fn axis(&self) -> Vector3<f64> {
        Vector3::from(self.axis)
    }

    /// Angular distance on S², or on the projective plane when either side
    /// is unoriented.
    pub fn distance(&self, other: &ClassId) -> f64 {
        let (a, b) = (self.axis(), other.axis());
        let d = unit_angle(&a, &b);
        if self.oriented && other.oriented {
            d
        } else {
            d.min(unit_angle(&a, &(-b)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub id: ClassId,
    /// A rotation carrying the base spread onto the class.
    pub rotation: Quaternion,
    /// Angular distance between the line and its reconstruction.
    pub residual: f64,
}

/// Applies `diag(R(q), 1)`.
pub fn rotate_line(q: &Quaternion, line: &OrientedLine) -> OrientedLine {
    apply_collineation(&affine_linear(&q.to_rotation_matrix()), line).expect("rotations are invertible")
}

pub fn rotate_point(q: &Quaternion, p: &HPoint) -> HPoint {
    let c = p.coords();
    let v = q.rotate(&c.xyz());
    HPoint::new(Vector4::new(v.x, v.y, v.z, c[3])).expect("rotation of a nonzero vector")
}

/// The half-turn about the x-axis, `(x, y, z) ↦ (x, -y, -z)`.
pub fn half_turn_x() -> Quaternion {
    Quaternion::I
}

#[derive(Clone, Debug, PartialEq)]
pub struct Parallelism {
    spec: ParallelismSpec,
    spread: RotationalSpread,
    max_abs_b: f64,
    half_turn_symmetric: bool,
}

/// The r-grid used for the acentric test and the half-turn check.
pub fn profile_grid() -> Vec<f64> {
    logspace(1e-2, 1e2, 41)
}

impl Parallelism {
    /// Canonicalizes the placement into the profile.
    pub fn new(spec: ParallelismSpec) -> Result<Self> {
        Placement::new(spec.placement.s, spec.placement.t)?;
        let profile = spec.profile.transform(spec.placement.s, spec.placement.t)?;
        let max_abs_b = profile.max_abs_b(&profile_grid());
        if spec.gamma == Gamma::O2 && max_abs_b > 1e-9 {
            return Err(Error::NotO2Admissible { max_abs_b });
        }
        let spread = RotationalSpread::new(profile, spec.handedness);
        let half_turn_symmetric = half_turn_maps_spread_to_itself(&spread);
        Ok(Self { spec, spread, max_abs_b, half_turn_symmetric })
    }

    pub fn spec(&self) -> &ParallelismSpec {
        &self.spec
    }

    /// The base spread in canonical coordinates.
    pub fn spread(&self) -> &RotationalSpread {
        &self.spread
    }

    pub fn canonical_profile(&self) -> &Profile {
        self.spread.profile()
    }

    pub fn is_oriented(&self) -> bool {
        self.spec.oriented
    }

    /// Canonical `b` not identically zero.
    pub fn is_acentric(&self) -> bool {
        self.max_abs_b > 1e-9
    }

    pub fn max_abs_b(&self) -> f64 {
        self.max_abs_b
    }

    /// Sampled check that the half-turn about the x-axis maps the base
    /// spread onto itself as a set of unoriented lines.
    pub fn is_half_turn_symmetric(&self) -> bool {
        self.half_turn_symmetric
    }

    fn base_axis(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, self.spread.screw())
    }

    fn make_id(&self, v: &Vector3<f64>) -> ClassId {
        if self.spec.oriented {
            ClassId::oriented(v)
        } else {
            ClassId::unoriented(v)
        }
    }

    pub fn class_id_of_rotation(&self, q: &Quaternion) -> ClassId {
        self.make_id(&q.rotate(&self.base_axis()))
    }

    /// A rotation whose class is `id`.
    pub fn class_rotation(&self, id: &ClassId) -> Quaternion {
        Quaternion::rotation_between_pure(&Quaternion::pure(&self.base_axis()), &Quaternion::pure(&id.axis()))
    }

    /// `ω(Z⁺)`, `ω(V⁺)` and `ω(regulus_line(r, φ))` over the grid.
    pub fn class_spread(&self, id: &ClassId, r_grid: &[f64], n_phi: usize) -> Vec<OrientedLine> {
        let q = self.class_rotation(id);
        let mut out = vec![rotate_line(&q, &self.spread.z_plus()), rotate_line(&q, &self.spread.v_plus())];
        for &r in r_grid {
            for k in 0..n_phi {
                let phi = std::f64::consts::TAU * k as f64 / n_phi as f64;
                out.push(rotate_line(&q, &self.spread.regulus_line(r, phi)));
            }
        }
        out
    }

    /// The member of class `id` through `p`.
    pub fn class_member_through(&self, id: &ClassId, p: &HPoint) -> Result<OrientedLine> {
        let q = self.class_rotation(id);
        let base = self.spread.containing_line(&rotate_point(&q.conj(), p))?;
        Ok(rotate_line(&q, &base))
    }

    /// Oriented classification, regardless of the spec's orientation flag.
    pub fn classify_oriented(&self, line: &OrientedLine) -> Result<Classification> {
        let dir = line.direction();
        let dn = dir.norm();
        let m = line.moment();
        let (base, id) = if dn <= crate::projective::AT_INFINITY_TOL {
            // ω(V⁺) has moment part R e3.
            (self.spread.v_plus(), m.normalize() * self.spread.screw())
        } else if m.norm() / dn <= ORIGIN_TOL {
            (self.spread.z_plus(), dir / dn)
        } else {
            let u = dir / dn;
            let foot = u.cross(&m) / dn;
            let r = self.spread.profile().r_of_d(foot.norm()).map_err(|e| match e {
                Error::NotBracketed { .. } => Error::NoRoot(format!("distance {:e}", foot.norm())),
                e => e,
            })?;
            let base = self.spread.regulus_line(r, 0.0);
            let (_, foot0) = dist_point_line(&Vector3::zeros(), &base)?;
            let u0 = base.unit_direction().expect("regulus lines are affine");
            let rot = frame(&foot, &u) * frame(&foot0, &u0).transpose();
            let q = Quaternion::from_rotation_matrix(&rot);
            let residual = line.angular_distance(&rotate_line(&q, &base));
            let id = ClassId::oriented(&q.rotate(&self.base_axis()));
            return Ok(Classification { id, rotation: q, residual });
        };
        let id = ClassId::oriented(&id);
        let q = self.class_rotation(&id);
        let residual = line.angular_distance(&rotate_line(&q, &base));
        Ok(Classification { id, rotation: q, residual })
    }

    /// The class of `line`. In the unoriented case both orientations must
    /// land in antipodal oriented classes identified by the half-turn.
    pub fn parallel_class_of(&self, line: &OrientedLine) -> Result<Classification> {
        let fwd = self.classify_oriented(line)?;
        if self.spec.oriented {
            return Ok(fwd);
        }
        let rev = self.classify_oriented(&line.reverse())?;
        let antipodal = unit_angle(&fwd.id.axis(), &(-rev.id.axis())) <= CLASS_TOL;
        if !(antipodal && self.half_turn_symmetric) {
            return Err(Error::NotAPartition { forward: fwd.id.axis, reverse: rev.id.axis });
        }
        Ok(Classification {
            id: ClassId::unoriented(&fwd.id.axis()),
            rotation: fwd.rotation,
            residual: fwd.residual.max(rev.residual),
        })
    }

    /// Residual of `line` in class `id`, or why it is not a member.
    pub fn class_membership(&self, id: &ClassId, line: &OrientedLine) -> Result<f64> {
        let c = self.parallel_class_of(line)?;
        let gap = c.id.distance(id);
        if gap <= CLASS_TOL {
            return Ok(c.residual);
        }
        if self.spec.oriented {
            let rc = self.classify_oriented(&line.reverse())?;
            if rc.id.distance(id) <= CLASS_TOL {
                return Err(Error::OrientationMismatch);
            }
        }
        Err(Error::NotMember { residual: gap })
    }

    pub fn same_class(&self, l: &OrientedLine, m: &OrientedLine) -> Result<bool> {
        Ok(self.parallel_class_of(l)?.id.distance(&self.parallel_class_of(m)?.id) <= CLASS_TOL)
    }
}

/// Orthonormal frame `[f̂, u, f̂ × u]` from a foot vector and a unit direction.
fn frame(foot: &Vector3<f64>, u: &Vector3<f64>) -> Matrix3<f64> {
    let u = u.normalize();
    let f = (foot - u * foot.dot(&u)).normalize();
    Matrix3::from_columns(&[f, u, f.cross(&u)])
}

fn half_turn_maps_spread_to_itself(spread: &RotationalSpread) -> bool {
    let q = half_turn_x();
    logspace(1e-2, 1e2, 9).into_iter().all(|r| {
        [0.0, 2.0].iter().all(|&phi| {
            let image = rotate_line(&q, &spread.regulus_line(r, phi));
            let (_, foot) = match dist_point_line(&Vector3::zeros(), &image) {
                Ok(v) => v,
                Err(_) => return false,
            };
            spread
                .containing_line(&HPoint::affine(&foot))
                .map(|m| m.unoriented_distance(&image) <= CLASS_TOL)
                .unwrap_or(false)
        })
    })
}
