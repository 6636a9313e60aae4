//! Profiles `(a(r), b(r))`: asymptote slope and vertex height of the
//! hyperbola branch `H_r` in the half plane `{(x, 0, z) : x > 0}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solve::invert_increasing;

/// Serializable description of a profile family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `a = d/r`, `b = 0`.
    Regular { d: f64 },
    /// `a = r^-w`, `b = c r^(1-w)`.
    Satz1 { w: f64, c: f64 },
    /// `a = |d|/r`, `b = -ln r`; `d < 0` flips the screw sense.
    Satz2 { d: f64 },
    /// Monotone cubic interpolation of `ln a` and `b` in `ln r`.
    Table { r: Vec<f64>, a: Vec<f64>, b: Vec<f64> },
}

/// A profile with an optional affine change `z ↦ s z + t` folded in:
/// `a(r) = a_scale · base_a(r)`, `b(r) = b_scale · base_b(r) + b_shift`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct Profile {
    spec: ProfileSpec,
    table: Option<Table>,
    a_scale: f64,
    b_scale: f64,
    b_shift: f64,
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    #[serde(flatten)]
    spec: ProfileSpec,
    #[serde(default = "one")]
    a_scale: f64,
    #[serde(default = "one")]
    b_scale: f64,
    #[serde(default)]
    b_shift: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<ProfileRepr> for Profile {
    type Error = Error;
    fn try_from(r: ProfileRepr) -> Result<Self> {
        let mut p = Profile::from_spec(r.spec)?;
        if !(r.a_scale > 0.0) || !r.b_scale.is_finite() || !r.b_shift.is_finite() {
            return Err(Error::BadParameter("profile scales must be finite with a_scale > 0".into()));
        }
        p.a_scale *= r.a_scale;
        p.b_scale *= r.b_scale;
        p.b_shift = r.b_shift;
        Ok(p.folded())
    }
}

impl From<Profile> for ProfileRepr {
    fn from(p: Profile) -> Self {
        ProfileRepr { spec: p.spec, a_scale: p.a_scale, b_scale: p.b_scale, b_shift: p.b_shift }
    }
}

impl Profile {
    pub fn regular(d: f64) -> Result<Self> {
        Self::from_spec(ProfileSpec::Regular { d })
    }

    pub fn satz1(w: f64, c: f64) -> Result<Self> {
        Self::from_spec(ProfileSpec::Satz1 { w, c })
    }

    pub fn satz2(d: f64) -> Result<Self> {
        Self::from_spec(ProfileSpec::Satz2 { d })
    }

    pub fn table(r: Vec<f64>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Self::from_spec(ProfileSpec::Table { r, a, b })
    }

    pub fn from_spec(spec: ProfileSpec) -> Result<Self> {
        let bad = |m: &str| Err(Error::BadParameter(m.to_string()));
        let mut table = None;
        match &spec {
            ProfileSpec::Regular { d } => {
                if !(*d > 0.0 && d.is_finite()) {
                    return bad("regular profile requires d > 0");
                }
            }
            ProfileSpec::Satz1 { w, c } => {
                if !(*w > 0.0 && *w < 1.0) {
                    return bad("satz1 profile requires 0 < w < 1");
                }
                if !c.is_finite() {
                    return bad("satz1 profile requires finite c");
                }
            }
            ProfileSpec::Satz2 { d } => {
                if !(d.abs() >= 0.5 && d.is_finite()) {
                    return bad("satz2 profile requires |d| >= 1/2");
                }
            }
            ProfileSpec::Table { r, a, b } => table = Some(Table::new(r, a, b)?),
        }
        Ok(Self { spec, table, a_scale: 1.0, b_scale: 1.0, b_shift: 0.0 })
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn b_shift(&self) -> f64 {
        self.b_shift
    }

    fn base_a(&self, r: f64) -> f64 {
        match &self.spec {
            ProfileSpec::Regular { d } => d / r,
            ProfileSpec::Satz1 { w, .. } => r.powf(-w),
            ProfileSpec::Satz2 { d } => d.abs() / r,
            ProfileSpec::Table { .. } => self.table.as_ref().expect("table").log_a(r.ln()).exp(),
        }
    }

    fn base_b(&self, r: f64) -> f64 {
        match &self.spec {
            ProfileSpec::Regular { .. } => 0.0,
            ProfileSpec::Satz1 { w, c } => c * r.powf(1.0 - w),
            ProfileSpec::Satz2 { .. } => -r.ln(),
            ProfileSpec::Table { .. } => self.table.as_ref().expect("table").b(r.ln()),
        }
    }

    /// Asymptote slope of `H_r`.
    pub fn a(&self, r: f64) -> f64 {
        self.a_scale * self.base_a(r)
    }

    /// Height of the vertex of `H_r`.
    pub fn b(&self, r: f64) -> f64 {
        let base = self.base_b(r);
        if base == 0.0 {
            self.b_shift
        } else {
            self.b_scale * base + self.b_shift
        }
    }

    /// `-1` for a `satz2` profile with negative `d` (opposite screw sense).
    pub fn screw_sign(&self) -> f64 {
        match self.spec {
            ProfileSpec::Satz2 { d } if d < 0.0 => -1.0,
            _ => 1.0,
        }
    }

    /// Image under `(x, y, z) ↦ (x, y, s z + t)`: `a' = s a`, `b' = s b + t`.
    pub fn transform(&self, s: f64, t: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite() && t.is_finite()) {
            return Err(Error::BadParameter("transform requires s > 0 and finite t".into()));
        }
        let mut p = self.clone();
        p.a_scale *= s;
        p.b_scale *= s;
        p.b_shift = s * p.b_shift + t;
        Ok(p.folded())
    }

    /// Image under `z ↦ -z` (`b ↦ -b`; the caller flips handedness).
    pub fn negate_b(&self) -> Self {
        let mut p = self.clone();
        p.b_scale = -p.b_scale;
        p.b_shift = -p.b_shift;
        p.folded()
    }

    // Absorb scales into the closed form where the family allows it.
    fn folded(mut self) -> Self {
        if let ProfileSpec::Regular { d } = self.spec {
            self.spec = ProfileSpec::Regular { d: d * self.a_scale };
            self.a_scale = 1.0;
            self.b_scale = 1.0;
        }
        self
    }

    /// Distance from the origin to the closest point of `H_r`:
    /// `sqrt(r² + b²/(1 + a²))`.
    pub fn d_of_r(&self, r: f64) -> f64 {
        let (a, b) = (self.a(r), self.b(r));
        (r * r + b * b / (1.0 + a * a)).sqrt()
    }

    /// The `r` with `d(r) = d`, by bracketed bisection.
    pub fn r_of_d(&self, d: f64) -> Result<f64> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::BadParameter("r_of_d requires d > 0".into()));
        }
        invert_increasing(|r| self.d_of_r(r) - d)
    }

    /// `X_r(z) = sqrt(r² + (z - b(r))²/a(r)²)`, the branch of `H_r`.
    pub fn branch_x(&self, r: f64, z: f64) -> f64 {
        let (a, b) = (self.a(r), self.b(r));
        (r * r + (z - b) * (z - b) / (a * a)).sqrt()
    }

    pub fn max_abs_b(&self, grid: &[f64]) -> f64 {
        grid.iter().map(|&r| self.b(r).abs()).fold(0.0, f64::max)
    }

    /// `b` constant on the grid within 1e-9.
    pub fn is_concentric(&self, grid: &[f64]) -> bool {
        let (lo, hi) =
            grid.iter().map(|&r| self.b(r)).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), b| (l.min(b), h.max(b)));
        hi - lo <= 1e-9
    }

    /// Concentric and `r·a(r)` constant (population stdev ≤ 1e-9).
    pub fn is_regular(&self, grid: &[f64]) -> bool {
        if !self.is_concentric(grid) {
            return false;
        }
        let v: Vec<f64> = grid.iter().map(|&r| r * self.a(r)).collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v.len() as f64;
        var.sqrt() <= 1e-9
    }

    /// Whether the profile matches another on a grid, within `tol`.
    pub fn approx_eq_on(&self, other: &Profile, grid: &[f64], tol: f64) -> bool {
        grid.iter().all(|&r| {
            (self.a(r) - other.a(r)).abs() <= tol * (1.0 + self.a(r).abs())
                && (self.b(r) - other.b(r)).abs() <= tol * (1.0 + self.b(r).abs())
        })
    }

    /// The `r` at which `a(r) = target`, assuming `a` decreasing.
    pub fn r_for_slope(&self, target: f64) -> Result<f64> {
        if !(target > 0.0 && target.is_finite()) {
            return Err(Error::BadParameter("slope must be positive".into()));
        }
        let lt = target.ln();
        invert_increasing(|r| lt - self.a(r).ln())
    }

    pub fn label(&self) -> String {
        let base = match &self.spec {
            ProfileSpec::Regular { d } => format!("regular(d={d})"),
            ProfileSpec::Satz1 { w, c } => format!("satz1(w={w}, c={c})"),
            ProfileSpec::Satz2 { d } => format!("satz2(d={d})"),
            ProfileSpec::Table { r, .. } => format!("table({} rows)", r.len()),
        };
        if self.a_scale == 1.0 && self.b_scale == 1.0 && self.b_shift == 0.0 {
            base
        } else {
            format!("{base} with a*{}, b*{}+{}", self.a_scale, self.b_scale, self.b_shift)
        }
    }
}

/// Fritsch-Carlson monotone cubic interpolation of `(ln r, ln a)` and
/// `(ln r, b)`, extended linearly with the end secant slopes.
#[derive(Clone, Debug, PartialEq)]
struct Table {
    x: Vec<f64>,
    log_a: Pchip,
    b: Pchip,
}

impl Table {
    fn new(r: &[f64], a: &[f64], b: &[f64]) -> Result<Self> {
        if r.len() < 2 || r.len() != a.len() || r.len() != b.len() {
            return Err(Error::BadParameter("table needs >= 2 rows of equal-length r, a, b".into()));
        }
        if r.iter().any(|&x| !(x > 0.0 && x.is_finite())) || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadParameter("table r must be positive and strictly increasing".into()));
        }
        if a.iter().any(|&x| !(x > 0.0 && x.is_finite())) || b.iter().any(|x| !x.is_finite()) {
            return Err(Error::BadParameter("table a must be positive and b finite".into()));
        }
        let x: Vec<f64> = r.iter().map(|v| v.ln()).collect();
        let la: Vec<f64> = a.iter().map(|v| v.ln()).collect();
        Ok(Self { log_a: Pchip::new(&x, &la), b: Pchip::new(&x, b), x })
    }

    fn log_a(&self, lx: f64) -> f64 {
        self.log_a.eval(&self.x, lx)
    }

    fn b(&self, lx: f64) -> f64 {
        self.b.eval(&self.x, lx)
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Pchip {
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl Pchip {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut m = vec![0.0; n];
        if n == 2 {
            m[0] = delta[0];
            m[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Self { y: y.to_vec(), slope: m }
    }

    fn eval(&self, x: &[f64], t: f64) -> f64 {
        let n = x.len();
        if t <= x[0] {
            let s = (self.y[1] - self.y[0]) / (x[1] - x[0]);
            return self.y[0] + s * (t - x[0]);
        }
        if t >= x[n - 1] {
            let s = (self.y[n - 1] - self.y[n - 2]) / (x[n - 1] - x[n - 2]);
            return self.y[n - 1] + s * (t - x[n - 1]);
        }
        let k = x.partition_point(|&v| v <= t).saturating_sub(1).min(n - 2);
        let h = x[k + 1] - x[k];
        let s = (t - x[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.slope[k] + h01 * self.y[k + 1] + h11 * h * self.slope[k + 1]
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}
