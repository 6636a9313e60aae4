//! Numeric validation of a profile as a spread generator.

use serde::{Deserialize, Serialize};

use super::{Handedness, Profile, RotationalSpread};
use crate::sampling::{mixed_point, rng};
use crate::solve::logspace;

/// Grids and sample counts for `validate_profile`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationPlan {
    pub r_grid: Vec<f64>,
    pub z_grid: Vec<f64>,
    pub covering_points: usize,
    pub seed: u64,
}

impl Default for ValidationPlan {
    fn default() -> Self {
        let half = logspace(1e-3, 1e3, 100);
        let mut z_grid: Vec<f64> = half.iter().rev().map(|z| -z).collect();
        z_grid.push(0.0);
        z_grid.extend(half);
        Self { r_grid: logspace(1e-3, 1e3, 100), z_grid, covering_points: 200, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationEntry {
    pub name: String,
    pub pass: bool,
    /// Worst observed value of the quantity the check bounds.
    pub worst: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub profile: String,
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn entry(&self, name: &str) -> Option<&ValidationEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

fn entry(name: &str, pass: bool, worst: f64, detail: String) -> ValidationEntry {
    ValidationEntry { name: name.to_string(), pass, worst, detail }
}

pub fn validate_profile(profile: &Profile, plan: &ValidationPlan) -> ValidationReport {
    let r = &plan.r_grid;
    let mut entries = Vec::new();

    // a strictly decreasing along the grid.
    let mut worst_step = f64::NEG_INFINITY;
    let mut first_bad = None;
    for w in r.windows(2) {
        let step = profile.a(w[1]) - profile.a(w[0]);
        if step >= 0.0 && first_bad.is_none() {
            first_bad = Some(w[0]);
        }
        worst_step = worst_step.max(step);
    }
    entries.push(entry(
        "a_decreasing",
        first_bad.is_none(),
        worst_step,
        match first_bad {
            None => "a(r) strictly decreasing on the grid".into(),
            Some(x) => format!("a(r) not decreasing after r = {x:e}"),
        },
    ));

    let (a_lo, a_one, a_hi) = (profile.a(1e-6), profile.a(1.0), profile.a(1e6));
    let limits_ok = a_lo >= 10.0 * a_one && a_hi <= a_one / 10.0;
    entries.push(entry(
        "a_limits",
        limits_ok,
        (a_one / a_lo).max(a_hi / a_one),
        format!("a(1e-6) = {a_lo:e}, a(1) = {a_one:e}, a(1e6) = {a_hi:e}"),
    ));

    // Adjacent branches must be strictly nested on the z grid.
    let mut min_gap = f64::INFINITY;
    let mut bad_at = None;
    for w in r.windows(2) {
        for &z in &plan.z_grid {
            let gap = profile.branch_x(w[1], z) - profile.branch_x(w[0], z);
            if gap < min_gap {
                min_gap = gap;
            }
            if !(gap > 0.0) && bad_at.is_none() {
                bad_at = Some((w[0], w[1], z));
            }
        }
    }
    entries.push(entry(
        "branches_disjoint",
        bad_at.is_none(),
        min_gap,
        match bad_at {
            None => "adjacent hyperbola branches strictly nested".into(),
            Some((r1, r2, z)) => format!("branches r = {r1:e} and r = {r2:e} meet or cross at z = {z:e}"),
        },
    ));

    let spread = RotationalSpread::new(profile.clone(), Handedness::Right);
    let mut g = rng(plan.seed);
    let mut worst_res: f64 = 0.0;
    let mut failures = 0usize;
    let mut first_failure = String::new();
    for k in 0..plan.covering_points {
        let p = mixed_point(&mut g, k);
        match spread.containing_line(&p) {
            Ok(l) => {
                let res = l.incidence_residual(&p);
                worst_res = worst_res.max(res);
                if res > 1e-8 {
                    failures += 1;
                }
            }
            Err(e) => {
                if failures == 0 {
                    first_failure = format!("point {:?}: {e}", p.coords().as_slice());
                }
                failures += 1;
            }
        }
    }
    entries.push(entry(
        "covering",
        failures == 0,
        worst_res,
        if failures == 0 {
            format!("{} points each on one member", plan.covering_points)
        } else {
            format!("{failures} of {} points failed; first {first_failure}", plan.covering_points)
        },
    ));

    let d: Vec<f64> = r.iter().map(|&x| profile.d_of_r(x)).collect();
    let increasing = d.windows(2).all(|w| w[1] > w[0]);
    let mut sorted = d.clone();
    sorted.sort_by(f64::total_cmp);
    let min_sep =
        sorted.windows(2).map(|w| (w[1] - w[0]) / w[1].abs().max(f64::MIN_POSITIVE)).fold(f64::INFINITY, f64::min);
    entries.push(entry(
        "d_injective",
        min_sep > 1e-12,
        min_sep,
        format!("d(r) {} on the grid", if increasing { "strictly increasing" } else { "not monotone" }),
    ));

    ValidationReport { profile: profile.label(), entries }
}
