//! Property suites with pass/fail thresholds and JSON reports.
//!
//! Samples are drawn sequentially from the seed, evaluated in parallel, and
//! reduced in sample order, so a report depends only on its inputs.

use std::collections::BTreeMap;

use nalgebra::{Vector3, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::clifford::{clifford_orbit, label_distance, line_with_labels, study_map, Quaternion, Side, StudyPair};
use crate::error::Error;
use crate::parallelisms::{clifford_compare, partition_failure_witness, rotate_line, ClassId, Parallelism};
use crate::projective::{dist_point_line, join_oriented, meet_pairing, unit_angle, HPoint, OrientedLine};
use crate::sampling::{
    mixed_line, mixed_point, random_oriented_line, random_unit_quaternion, rng, spread_parameters, unit_s3,
};
use crate::solve::golden_section_min;
use crate::spreads::{Profile, RotationalSpread};

/// Thresholds used by the suites.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Algebraic identities: quadric, unit norm, orbit identities.
    pub algebraic: f64,
    /// Solver targets: d(r) oracle, incidence, meet pairing floor.
    pub solver: f64,
    /// Classification residuals.
    pub classification: f64,
    /// Round trips through reconstructed class members.
    pub round_trip: f64,
    /// Comparison margins: label gaps, separations.
    pub acceptance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { algebraic: 1e-12, solver: 1e-9, classification: 1e-8, round_trip: 1e-7, acceptance: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub worst_residual: f64,
    pub samples: usize,
    pub seed: u64,
    pub parameters: BTreeMap<String, Value>,
    pub metrics: BTreeMap<String, f64>,
    pub witness: Option<Value>,
}

impl CheckReport {
    fn new(name: &str, samples: usize, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            pass: true,
            worst_residual: 0.0,
            samples,
            seed,
            parameters: BTreeMap::new(),
            metrics: BTreeMap::new(),
            witness: None,
        }
    }

    fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(v).expect("serializable"));
        self
    }

    fn metric(&mut self, key: &str, v: f64) {
        self.metrics.insert(key.to_string(), v);
    }

    fn fail(&mut self, witness: Value) {
        self.pass = false;
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
    }

    /// Deterministic JSON text.
    pub fn to_json(&self) -> String {
        crate::report::to_json(self).expect("reports serialize")
    }
}

fn max(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(0.0, f64::max)
}

fn min(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(f64::INFINITY, f64::min)
}

fn profile_json(p: &Profile) -> Value {
    serde_json::to_value(p).expect("profile serializes")
}

/// Quadric residual and unit norm of joins, regulus lines and rotated lines.
pub fn check_quadric(n: usize, seed: u64, tol: &Tolerances) -> CheckReport {
    let mut rep = CheckReport::new("quadric", n, seed);
    let spreads = [
        RotationalSpread::new(Profile::regular(1.0).expect("valid"), crate::spreads::Handedness::Right),
        RotationalSpread::new(Profile::satz1(0.5, 1.0).expect("valid"), crate::spreads::Handedness::Left),
        RotationalSpread::new(Profile::satz2(1.0).expect("valid"), crate::spreads::Handedness::Right),
    ];
    let mut g = rng(seed);
    let lines: Vec<OrientedLine> = (0..n)
        .map(|k| match k % 3 {
            0 => random_oriented_line(&mut g),
            1 => {
                let (r, phi) = spread_parameters(&mut g, -3.0, 3.0);
                spreads[k % spreads.len()].regulus_line(r, phi)
            }
            _ => {
                let l = random_oriented_line(&mut g);
                rotate_line(&random_unit_quaternion(&mut g), &l)
            }
        })
        .collect();
    let res: Vec<(f64, f64)> =
        lines.par_iter().map(|l| (l.quadric_residual().abs(), (l.pluecker().norm() - 1.0).abs())).collect();
    let (q, u) = (max(res.iter().map(|r| r.0)), max(res.iter().map(|r| r.1)));
    rep.worst_residual = q.max(u);
    rep.metric("max_quadric_residual", q);
    rep.metric("max_norm_error", u);
    if let Some(k) = res.iter().position(|r| r.0 > tol.algebraic || r.1 > tol.algebraic) {
        rep.fail(json!({ "index": k, "line": lines[k] }));
    }
    rep
}

/// `orientations_of ∘ forget_orientation` returns exactly `{L, -L}`.
pub fn check_double_cover(n: usize, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new("double_cover", n, seed);
    let mut g = rng(seed);
    let lines: Vec<OrientedLine> = (0..n).map(|_| random_oriented_line(&mut g)).collect();
    let bad = lines.par_iter().position_first(|l| {
        let (a, b) = l.forget_orientation().orientations();
        let pair_ok = (a == *l && b == l.reverse()) || (b == *l && a == l.reverse());
        !(pair_ok
            && l.reverse().reverse() == *l
            && l.forget_orientation() == l.reverse().forget_orientation()
            && a.pluecker() == &(-b.pluecker()))
    });
    if let Some(k) = bad {
        rep.fail(json!({ "index": k, "line": lines[k] }));
    }
    rep
}

fn labels_from_basis(u: &Vector4<f64>, v: &Vector4<f64>) -> StudyPair {
    let (u, v) = (Quaternion::from_vector4(u), Quaternion::from_vector4(v));
    let pure = |q: Quaternion| Quaternion::new(0.0, q.x, q.y, q.z).normalize();
    StudyPair { left: pure(u.conj() * v), right: pure(v * u.conj()) }
}

fn neg(p: &StudyPair) -> StudyPair {
    StudyPair { left: -p.left, right: -p.right }
}

/// Study map: flip law, basis independence, purity, orbit identities,
/// reconstruction, and separation of distinct lines.
pub fn check_alpha(n: usize, seed: u64, tol: &Tolerances) -> CheckReport {
    let mut rep = CheckReport::new("alpha", n, seed);
    let mut g = rng(seed);
    struct Draw {
        l: OrientedLine,
        m: OrientedLine,
        a: Quaternion,
        theta: f64,
        stretch: f64,
    }
    let draws: Vec<Draw> = (0..n)
        .map(|_| Draw {
            l: random_oriented_line(&mut g),
            m: random_oriented_line(&mut g),
            a: random_unit_quaternion(&mut g),
            theta: unit_s3(&mut g)[0] * std::f64::consts::PI,
            stretch: 0.5 + unit_s3(&mut g)[1].abs(),
        })
        .collect();
    // (flip exact, basis, purity, orbit, reconstruction, separation)
    let res: Vec<(bool, f64, f64, f64, f64, f64)> = draws
        .par_iter()
        .map(|d| {
            let s = study_map(&d.l);
            let flip = study_map(&d.l.reverse()) == neg(&s);
            let (u, v) = d.l.basis();
            // Another positively oriented basis of the same plane.
            let (sn, c) = d.theta.sin_cos();
            let u2 = (u * c + v * sn) * d.stretch;
            let v2 = (v * c - u * sn) + u2 * 0.3;
            let basis =
                labels_from_basis(&u2.normalize(), &(v2 - u2.normalize() * v2.dot(&u2.normalize())).normalize())
                    .distance(&s)
                    .max(study_map(&join_oriented(&u2, &v2).expect("independent")).distance(&s));
            let (qu, qv) = (Quaternion::from_vector4(&u), Quaternion::from_vector4(&v));
            let purity = (qu.conj() * qv).w.abs();
            let left = study_map(&clifford_orbit(&d.l, &d.a, Side::Left).expect("unit"));
            let right = study_map(&clifford_orbit(&d.l, &d.a, Side::Right).expect("unit"));
            let conj = |x: &Quaternion, q: &Quaternion| *q * *x * q.conj();
            let orbit = label_distance(&left.left, &s.left)
                .max(label_distance(&left.right, &conj(&s.right, &d.a)))
                .max(label_distance(&right.right, &s.right))
                .max(label_distance(&right.left, &conj(&s.left, &d.a.conj())));
            let recon = line_with_labels(&s).map(|r| r.angular_distance(&d.l)).unwrap_or(f64::INFINITY);
            let sep = study_map(&d.m).distance(&s);
            (flip, basis, purity, orbit, recon, sep)
        })
        .collect();
    let flips = res.iter().filter(|r| r.0).count();
    let basis = max(res.iter().map(|r| r.1));
    let purity = max(res.iter().map(|r| r.2));
    let orbit = max(res.iter().map(|r| r.3));
    let recon = max(res.iter().map(|r| r.4));
    let sep = min(res.iter().map(|r| r.5));
    rep.metric("flip_law_exact", flips as f64);
    rep.metric("max_basis_dependence", basis);
    rep.metric("max_purity_defect", purity);
    rep.metric("max_orbit_identity_error", orbit);
    rep.metric("max_reconstruction_error", recon);
    rep.metric("min_separation", sep);
    rep.worst_residual = basis.max(orbit).max(recon);
    let bad = res.iter().position(|r| {
        !r.0 || r.1 > tol.solver
            || r.2 > tol.algebraic
            || r.3 > tol.solver
            || r.4 > tol.solver
            || !(r.5 > tol.acceptance)
    });
    if let Some(k) = bad {
        rep.fail(json!({ "index": k, "line": draws[k].l, "other": draws[k].m, "a": draws[k].a }));
    }
    rep
}

/// Closed-form `d(r)` against a grid plus golden-section minimization of
/// `x² + z²` on the branch, injectivity on the grid, and tangency of the
/// regulus lines to the `d`-sphere.
pub fn check_d_function(profile: &Profile, grid: &[f64], tol: &Tolerances) -> CheckReport {
    let mut rep = CheckReport::new("d_function", grid.len(), 0).param("profile", profile_json(profile));
    let spread = RotationalSpread::new(profile.clone(), crate::spreads::Handedness::Right);
    let res: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&r| {
            let closed = profile.d_of_r(r);
            let oracle = min_distance_oracle(profile, r);
            let tangency = [0.0, 1.9, 4.4]
                .iter()
                .map(|&phi| {
                    let (dist, _) = dist_point_line(&Vector3::zeros(), &spread.regulus_line(r, phi)).expect("affine");
                    (dist - closed).abs()
                })
                .fold(0.0, f64::max);
            (closed, (closed - oracle).abs(), tangency)
        })
        .collect();
    let oracle = max(res.iter().map(|r| r.1));
    let tangency = max(res.iter().map(|r| r.2));
    let d: Vec<f64> = res.iter().map(|r| r.0).collect();
    let mut sorted = d.clone();
    sorted.sort_by(f64::total_cmp);
    let min_gap = min(sorted.windows(2).map(|w| w[1] - w[0]));
    rep.metric("max_oracle_gap", oracle);
    rep.metric("max_tangency_gap", tangency);
    rep.metric("min_sorted_gap", min_gap);
    rep.metric("increasing", if d.windows(2).all(|w| w[1] > w[0]) { 1.0 } else { 0.0 });
    rep.worst_residual = oracle.max(tangency);
    if let Some(k) = res.iter().position(|x| x.1 > tol.solver || x.2 > tol.classification) {
        rep.fail(json!({ "r": grid[k], "closed": res[k].0, "oracle_gap": res[k].1, "tangency_gap": res[k].2 }));
    } else if !(min_gap > 0.0) {
        rep.fail(json!({ "reason": "d(r) repeats a value on the grid" }));
    }
    rep
}

/// `min sqrt(x² + z²)` over the branch `x = X_r(z)`: a coarse grid picks
/// the bracket, golden section refines it.
pub fn min_distance_oracle(profile: &Profile, r: f64) -> f64 {
    let b = profile.b(r);
    let f = |z: f64| {
        let x = profile.branch_x(r, z);
        x * x + z * z
    };
    let span = 2.0 * (b.abs() + r) + 1e-300;
    let n = 400;
    let zs: Vec<f64> = (0..=n).map(|k| -span + 2.0 * span * k as f64 / n as f64).collect();
    let k = (0..zs.len()).min_by(|&i, &j| f(zs[i]).total_cmp(&f(zs[j]))).expect("nonempty grid");
    let (lo, hi) = (zs[k.saturating_sub(1)], zs[(k + 1).min(n)]);
    let (_, fmin) = golden_section_min(f, lo, hi, 1e-15);
    fmin.sqrt()
}

/// Covering by mixed projective points and disjointness of sampled pairs.
pub fn check_spread(
    spread: &RotationalSpread,
    n_points: usize,
    n_pairs: usize,
    seed: u64,
    tol: &Tolerances,
) -> CheckReport {
    let mut rep = CheckReport::new("spread", n_points + n_pairs, seed)
        .param("profile", profile_json(spread.profile()))
        .param("handedness", spread.handedness());
    let mut g = rng(seed);
    let points: Vec<HPoint> = (0..n_points).map(|k| mixed_point(&mut g, k)).collect();
    let pick = |g: &mut crate::sampling::SampleRng, k: usize| -> (f64, f64) {
        match k % 50 {
            0 => (0.0, 0.0),
            1 => (f64::INFINITY, 0.0),
            _ => spread_parameters(g, -3.0, 3.0),
        }
    };
    let pairs: Vec<((f64, f64), (f64, f64))> = (0..n_pairs).map(|k| (pick(&mut g, k), pick(&mut g, k + 25))).collect();
    let member = |(r, phi): (f64, f64)| {
        if r == 0.0 {
            spread.z_plus()
        } else if r.is_infinite() {
            spread.v_plus()
        } else {
            spread.regulus_line(r, phi)
        }
    };
    let cover: Vec<Result<f64, Error>> =
        points.par_iter().map(|p| spread.containing_line(p).map(|l| l.incidence_residual(p))).collect();
    let pairing: Vec<f64> = pairs.par_iter().map(|&(a, b)| meet_pairing(&member(a), &member(b)).abs()).collect();
    let worst_cover = max(cover.iter().map(|c| *c.as_ref().unwrap_or(&f64::INFINITY)));
    let min_pair = min(pairing.iter().copied());
    rep.metric("max_incidence_residual", worst_cover);
    rep.metric("min_abs_pairing", min_pair);
    rep.metric(
        "covering_failures",
        cover.iter().filter(|c| !matches!(c, Ok(x) if *x <= tol.classification)).count() as f64,
    );
    rep.worst_residual = worst_cover;
    if let Some(k) = cover.iter().position(|c| !matches!(c, Ok(x) if *x <= tol.classification)) {
        let why = match &cover[k] {
            Ok(x) => format!("incidence residual {x:e}"),
            Err(e) => e.to_string(),
        };
        rep.fail(json!({ "kind": "covering", "point": points[k], "error": why }));
    }
    if let Some(k) = pairing.iter().position(|&x| !(x > tol.solver)) {
        let ((r1, p1), (r2, p2)) = pairs[k];
        rep.fail(json!({ "kind": "disjointness", "a": [r1, p1], "b": [r2, p2], "pairing": pairing[k] }));
    }
    rep
}

/// A point of the line: its foot from the origin, or a point at infinity
/// for lines in the plane at infinity.
fn point_on(line: &OrientedLine) -> HPoint {
    match dist_point_line(&Vector3::zeros(), line) {
        Ok((_, foot)) => HPoint::affine(&foot),
        Err(_) => HPoint::new(line.basis().0).expect("unit basis vector"),
    }
}

/// Each sampled line gets one class, and the class member through a point
/// of the line reproduces it.
pub fn check_parallelism(par: &Parallelism, n_lines: usize, seed: u64, tol: &Tolerances) -> CheckReport {
    let spec = par.spec();
    let mut rep = CheckReport::new("parallelism", n_lines, seed)
        .param("profile", profile_json(&spec.profile))
        .param("handedness", spec.handedness)
        .param("placement", spec.placement)
        .param("gamma", spec.gamma)
        .param("oriented", spec.oriented);
    rep.metric("half_turn_symmetric", if par.is_half_turn_symmetric() { 1.0 } else { 0.0 });
    rep.metric("max_abs_canonical_b", par.max_abs_b());
    let mut g = rng(seed);
    let lines: Vec<OrientedLine> = (0..n_lines).map(|k| mixed_line(&mut g, k)).collect();
    struct Outcome {
        id: Option<ClassId>,
        residual: f64,
        round_trip: f64,
        reverse_distinct: bool,
        error: Option<Error>,
    }
    let outcomes: Vec<Outcome> = lines
        .par_iter()
        .map(|l| {
            let c = match par.parallel_class_of(l) {
                Ok(c) => c,
                Err(e) => {
                    return Outcome {
                        id: None,
                        residual: f64::INFINITY,
                        round_trip: f64::INFINITY,
                        reverse_distinct: false,
                        error: Some(e),
                    }
                }
            };
            let round_trip = match par.class_member_through(&c.id, &point_on(l)) {
                Ok(m) if spec.oriented => m.angular_distance(l),
                Ok(m) => m.unoriented_distance(l),
                Err(_) => f64::INFINITY,
            };
            let reverse_distinct =
                !spec.oriented || matches!(par.class_membership(&c.id, &l.reverse()), Err(Error::OrientationMismatch));
            Outcome { id: Some(c.id), residual: c.residual, round_trip, reverse_distinct, error: None }
        })
        .collect();
    let errors = outcomes.iter().filter(|o| o.error.is_some()).count();
    let residual = max(outcomes.iter().filter(|o| o.id.is_some()).map(|o| o.residual));
    let round_trip = max(outcomes.iter().filter(|o| o.id.is_some()).map(|o| o.round_trip));
    rep.metric("classification_errors", errors as f64);
    rep.metric("max_classification_residual", residual);
    rep.metric("max_round_trip", round_trip);
    rep.metric("reverse_distinct", outcomes.iter().filter(|o| o.reverse_distinct).count() as f64);
    rep.worst_residual = residual.max(round_trip);

    if !spec.oriented && !par.is_half_turn_symmetric() {
        // The designed failure: unoriented classes overlap along the axis.
        rep.pass = false;
        rep.witness = Some(match partition_failure_witness(par) {
            Ok(w) => json!({ "kind": "partition_failure", "acentric": w }),
            Err(e) => json!({ "kind": "partition_failure", "error": e.to_string() }),
        });
        return rep;
    }
    let bad = outcomes.iter().position(|o| {
        o.error.is_some() || o.residual > tol.classification || o.round_trip > tol.round_trip || !o.reverse_distinct
    });
    if let Some(k) = bad {
        let o = &outcomes[k];
        rep.fail(json!({
            "index": k,
            "line": lines[k],
            "error": o.error.as_ref().map(|e| e.to_string()),
            "residual": o.residual,
            "round_trip": o.round_trip,
            "reverse_distinct": o.reverse_distinct,
        }));
    }
    rep
}

/// Oriented classes agree with the Clifford classes of one side.
pub fn check_clifford(par: &Parallelism, n: usize, seed: u64, tol: &Tolerances) -> CheckReport {
    let spec = par.spec();
    let mut rep = CheckReport::new("clifford", n, seed)
        .param("profile", profile_json(&spec.profile))
        .param("handedness", spec.handedness)
        .param("placement", spec.placement);
    match clifford_compare(par, n, seed) {
        Ok(c) => {
            rep.metric("agreements", c.agreements as f64);
            rep.metric("max_label_deviation", c.max_label_deviation);
            rep.metric("max_class_deviation", c.max_class_deviation);
            rep.metric("scale", c.scale);
            rep.worst_residual = c.max_label_deviation.max(c.max_class_deviation);
            rep = rep.param("side", c.side);
            if !(c.agrees() && rep.worst_residual < tol.acceptance) {
                rep.fail(json!({ "comparison": c }));
            }
        }
        Err(e) => rep.fail(json!({ "error": e.to_string() })),
    }
    rep
}

/// The `z ↦ -z` image shares `Z` and `V` with the spread and no sampled
/// regulus line.
pub fn check_reflection(spread: &RotationalSpread, n: usize, seed: u64, tol: &Tolerances) -> CheckReport {
    let mut rep = CheckReport::new("reflection", n, seed)
        .param("profile", profile_json(spread.profile()))
        .param("handedness", spread.handedness());
    let image = spread.reflect_z();
    let z_gap = image.z_plus().unoriented_distance(&spread.z_plus());
    let v_gap = image.v_plus().unoriented_distance(&spread.v_plus());
    let mut g = rng(seed);
    let params: Vec<(f64, f64)> = (0..n).map(|_| spread_parameters(&mut g, -2.0, 2.0)).collect();
    let seps: Vec<f64> = params
        .par_iter()
        .map(|&(r, phi)| {
            let l = image.regulus_line(r, phi);
            match spread.containing_line(&point_on(&l)) {
                Ok(m) => m.unoriented_distance(&l),
                Err(_) => f64::INFINITY,
            }
        })
        .collect();
    let min_sep = min(seps.iter().copied());
    rep.metric("z_gap", z_gap);
    rep.metric("v_gap", v_gap);
    rep.metric("min_separation", min_sep);
    rep.worst_residual = z_gap.max(v_gap);
    if z_gap > tol.solver || v_gap > tol.solver {
        rep.fail(json!({ "reason": "Z or V not shared", "z_gap": z_gap, "v_gap": v_gap }));
    }
    if let Some(k) = seps.iter().position(|&s| !(s > tol.acceptance)) {
        rep.fail(json!({ "reason": "shared regulus line", "r": params[k].0, "phi": params[k].1 }));
    }
    rep
}

/// Angular distance helper re-exported for report consumers.
pub fn axis_distance(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    unit_angle(a, b)
}
