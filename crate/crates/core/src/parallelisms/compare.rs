//! Comparisons between parallelisms: Clifford agreement, set distinctness,
//! and the failure of the unoriented construction for acentric spreads.

use nalgebra::{Matrix4, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use super::{half_turn_x, profile_grid, rotate_line, ClassId, Parallelism};
use crate::clifford::{clifford_orbit, label_distance, study_map, Quaternion, Side};
use crate::error::{Error, Result};
use crate::projective::{apply_collineation, dist_point_line, HPoint, Line, OrientedLine};
use crate::sampling::{random_oriented_line, random_unit_quaternion, rng};
use crate::solve::logspace;
use crate::spreads::Profile;

/// Clifford side whose classes a right-screwed regular spread reproduces.
/// Found empirically and checked by the unit tests.
pub const CLIFFORD_SIDE_FOR_RIGHT_SCREW: Side = Side::Left;

/// Agreement threshold for label and class comparisons.
pub const COMPARE_TOL: f64 = 1e-6;

pub fn clifford_side(screw: f64) -> Side {
    match (screw > 0.0, CLIFFORD_SIDE_FOR_RIGHT_SCREW) {
        (true, s) => s,
        (false, Side::Left) => Side::Right,
        (false, Side::Right) => Side::Left,
    }
}

/// `1/r₀` where `a(r₀) = 1`. Scaling by it puts the unit-slope hyperbola at
/// `r = 1`, so regular profiles of every `d` become the same spread.
pub fn normalizing_scale(profile: &Profile) -> Result<f64> {
    Ok(1.0 / profile.r_for_slope(1.0)?)
}

fn homothety(lambda: f64) -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(lambda, lambda, lambda, 1.0))
}

fn map(m: &Matrix4<f64>, l: &OrientedLine) -> OrientedLine {
    apply_collineation(m, l).expect("homothety is invertible")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliffordComparison {
    pub profile: String,
    pub side: Side,
    pub scale: f64,
    pub samples: usize,
    pub agreements: usize,
    /// Largest label gap between a line and its class representative.
    pub max_label_deviation: f64,
    /// Largest class gap between a line and its Clifford translate.
    pub max_class_deviation: f64,
    pub first_disagreement: Option<OrientedLine>,
}

impl CliffordComparison {
    pub fn agrees(&self) -> bool {
        self.agreements == self.samples
    }
}

/// Compares the oriented classes with the Clifford classes of the side
/// matching the screw sense, after normalizing the scale.
///
/// For each sampled line `L`: its class representative through the origin
/// must carry the same Study label, and a Clifford translate of `L` on that
/// side must fall in the same class.
pub fn clifford_compare(par: &Parallelism, samples: usize, seed: u64) -> Result<CliffordComparison> {
    let lambda = normalizing_scale(par.canonical_profile())?;
    let inv = homothety(1.0 / lambda);
    let side = clifford_side(par.spread().screw());
    let mut g = rng(seed);
    let draws: Vec<(OrientedLine, Quaternion)> =
        (0..samples).map(|_| (random_oriented_line(&mut g), random_unit_quaternion(&mut g))).collect();
    let z = par.spread().z_plus();
    let results: Vec<(f64, f64, OrientedLine)> = draws
        .par_iter()
        .map(|(l, a)| {
            let c = match par.classify_oriented(&map(&inv, l)) {
                Ok(c) => c,
                Err(_) => return (f64::INFINITY, f64::INFINITY, *l),
            };
            let rep = rotate_line(&c.rotation, &z);
            let dev = label_distance(&study_map(l).side(side), &study_map(&rep).side(side));
            let moved = clifford_orbit(l, a, side).expect("unit quaternion");
            let conv = match par.classify_oriented(&map(&inv, &moved)) {
                Ok(cm) => cm.id.distance(&c.id),
                Err(_) => f64::INFINITY,
            };
            (dev, conv, *l)
        })
        .collect();
    let ok = |(d, c, _): &&(f64, f64, OrientedLine)| *d < COMPARE_TOL && *c < COMPARE_TOL;
    Ok(CliffordComparison {
        profile: par.canonical_profile().label(),
        side,
        scale: lambda,
        samples,
        agreements: results.iter().filter(ok).count(),
        max_label_deviation: results.iter().map(|r| r.0).fold(0.0, f64::max),
        max_class_deviation: results.iter().map(|r| r.1).fold(0.0, f64::max),
        first_disagreement: results.iter().find(|r| !ok(r)).map(|r| r.2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistinctnessWitness {
    /// Probe line, in normalized coordinates.
    pub probe: OrientedLine,
    /// A member of the probe's class in one parallelism that the other
    /// parallelism puts in a different class.
    pub line: OrientedLine,
    /// `"a"` or `"b"`: the parallelism whose class contains `line`.
    pub member_of: String,
    pub separation: f64,
}

/// Searches for a probe whose class differs between the two parallelisms
/// as a set of lines, both taken in normalized coordinates.
pub fn distinctness_witness(
    a: &Parallelism,
    b: &Parallelism,
    probes: usize,
    seed: u64,
) -> Result<Option<DistinctnessWitness>> {
    let (la, lb) = (normalizing_scale(a.canonical_profile())?, normalizing_scale(b.canonical_profile())?);
    let sides = [(a, la, b, lb, "a"), (b, lb, a, la, "b")];
    let grid = logspace(1e-2, 1e2, 9);
    let mut g = rng(seed);
    let lines: Vec<OrientedLine> = (0..probes).map(|_| random_oriented_line(&mut g)).collect();
    for probe in lines {
        for (p, lp, other, lo, tag) in sides {
            let (to_p, from_p, to_o) = (homothety(1.0 / lp), homothety(lp), homothety(1.0 / lo));
            let (cp, co) =
                match (p.classify_oriented(&map(&to_p, &probe)), other.classify_oriented(&map(&to_o, &probe))) {
                    (Ok(x), Ok(y)) => (x, y),
                    _ => continue,
                };
            let members = p.class_spread(&cp.id, &grid, 4);
            let found = members.par_iter().find_map_first(|m| {
                let m = map(&from_p, m);
                let c = other.classify_oriented(&map(&to_o, &m)).ok()?;
                let gap = c.id.distance(&co.id);
                (gap > COMPARE_TOL).then_some((m, gap))
            });
            if let Some((line, separation)) = found {
                return Ok(Some(DistinctnessWitness { probe, line, member_of: tag.to_string(), separation }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcentricWitness {
    /// The axis `Z`, a member of both spreads.
    pub line: Line,
    /// Class of the base spread `C`.
    pub class_a: ClassId,
    /// Class of its half-turn image `ω_x(C)`.
    pub class_b: ClassId,
    /// Unoriented distance between `Z` and `ω_x(Z)`.
    pub axis_gap: f64,
    /// A line of `ω_x(C)` that is not in `C`.
    pub separating_line: OrientedLine,
    pub r: f64,
    /// A point on the separating line and the member of `C` through it.
    pub point: [f64; 3],
    pub spread_member: OrientedLine,
    pub separation: f64,
}

/// The axis lies in two distinct unoriented classes, `C` and `ω_x(C)`,
/// whenever the canonical `b` is not identically zero.
pub fn partition_failure_witness(par: &Parallelism) -> Result<AcentricWitness> {
    if !par.is_acentric() {
        return Err(Error::NotAcentric);
    }
    let spread = par.spread();
    let s = spread.screw();
    let q = half_turn_x();
    let z = spread.z_plus();
    let profile = spread.profile();
    let r = profile_grid()
        .into_iter()
        .fold((1.0, -1.0), |(best, bb), r| {
            let v = profile.b(r).abs();
            if v > bb {
                (r, v)
            } else {
                (best, bb)
            }
        })
        .0;
    let separating_line = rotate_line(&q, &spread.regulus_line(r, 0.0));
    let (_, foot) = dist_point_line(&Vector3::zeros(), &separating_line)?;
    let spread_member = spread.containing_line(&HPoint::affine(&foot))?;
    Ok(AcentricWitness {
        line: z.forget_orientation(),
        class_a: ClassId::oriented(&Vector3::new(0.0, 0.0, s)),
        class_b: ClassId::oriented(&Vector3::new(0.0, 0.0, -s)),
        axis_gap: rotate_line(&q, &z).unoriented_distance(&z),
        separating_line,
        r,
        point: [foot.x, foot.y, foot.z],
        separation: spread_member.unoriented_distance(&separating_line),
        spread_member,
    })
}
