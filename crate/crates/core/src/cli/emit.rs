//! CSV plot data: header row, 17 significant digits, LF endings.

use nalgebra::Vector3;

use super::config::RunConfig;
use crate::error::Result;
use crate::parallelisms::{ClassId, Parallelism};
use crate::report::format_f64;
use crate::solve::logspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmitKind {
    Curves,
    Dtable,
    Classes,
}

/// Radii of the plotted hyperbola branches.
const CURVE_RADII: usize = 9;
/// Lines listed per class: `Z`, `V` and 3 radii × 4 angles.
const LINES_PER_CLASS: usize = 14;

fn row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|&v| format_f64(v)).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

pub fn emit(kind: EmitKind, cfg: &RunConfig) -> Result<String> {
    let mut out = String::new();
    match kind {
        EmitKind::Curves => {
            let spread = cfg.spread()?;
            let profile = spread.profile();
            let n_z = (cfg.samples / CURVE_RADII).max(2);
            out.push_str("r,z,x\n");
            for r in logspace(1e-2, 1e2, CURVE_RADII) {
                for k in 0..n_z {
                    let z = -5.0 + 10.0 * k as f64 / (n_z - 1) as f64;
                    row(&mut out, &[r, z, profile.branch_x(r, z)]);
                }
            }
        }
        EmitKind::Dtable => {
            let spread = cfg.spread()?;
            out.push_str("r,d\n");
            for r in logspace(1e-3, 1e3, cfg.samples.max(2)) {
                row(&mut out, &[r, spread.profile().d_of_r(r)]);
            }
        }
        EmitKind::Classes => {
            let par = Parallelism::new(cfg.parallelism_spec())?;
            let grid = logspace(1e-1, 1e1, 3);
            out.push_str("class_axis_x,class_axis_y,class_axis_z,p12,p13,p14,p23,p24,p34\n");
            for axis in fibonacci_sphere(cfg.samples.div_ceil(LINES_PER_CLASS).max(1)) {
                let id = if par.is_oriented() { ClassId::oriented(&axis) } else { ClassId::unoriented(&axis) };
                let a = id.axis();
                for line in par.class_spread(&id, &grid, 4) {
                    let p = line.to_array();
                    row(&mut out, &[a.x, a.y, a.z, p[0], p[1], p[2], p[3], p[4], p[5]]);
                }
            }
        }
    }
    Ok(out)
}

/// Near-uniform deterministic points on the unit sphere.
fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let th = golden * k as f64;
            Vector3::new(rho * th.cos(), rho * th.sin(), z)
        })
        .collect()
}

/// Parses emitted CSV back into a header and numeric rows.
pub fn parse_csv(text: &str) -> Option<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.split('\n');
    let header: Vec<String> = lines.next()?.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let r: Vec<f64> = line.split(',').map(|c| c.parse().ok()).collect::<Option<_>>()?;
        if r.len() != header.len() {
            return None;
        }
        rows.push(r);
    }
    Some((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spreads::Profile;

    fn cfg(p: Profile, samples: usize) -> RunConfig {
        let mut c = RunConfig::new(p);
        c.samples = samples;
        c
    }

    #[test]
    fn regular_dtable_is_identity() {
        let text = emit(EmitKind::Dtable, &cfg(Profile::regular(1.0).unwrap(), 50)).unwrap();
        let (header, rows) = parse_csv(&text).unwrap();
        assert_eq!(header, ["r", "d"]);
        assert_eq!(rows.len(), 50);
        for r in rows {
            assert!((r[0] - r[1]).abs() <= 1e-15 * r[0]);
        }
    }

    #[test]
    fn satz2_dtable_closed_form() {
        let p = Profile::satz2(1.0).unwrap();
        assert!((p.d_of_r(1.0) - 1.0).abs() < 1e-15);
        let e = std::f64::consts::E;
        let want = (e.powi(-2) + 1.0 / (1.0 + e * e)).sqrt();
        assert!((p.d_of_r(1.0 / e) - want).abs() < 1e-15);
        let text = emit(EmitKind::Dtable, &cfg(p.clone(), 7)).unwrap();
        let (_, rows) = parse_csv(&text).unwrap();
        assert_eq!(rows[3][0], 1.0);
        assert!((rows[3][1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn curves_lie_on_hyperbolas() {
        let p = Profile::satz1(0.5, 0.0).unwrap();
        let text = emit(EmitKind::Curves, &cfg(p.clone(), 90)).unwrap();
        let (header, rows) = parse_csv(&text).unwrap();
        assert_eq!(header, ["r", "z", "x"]);
        assert_eq!(rows.len(), 90);
        for v in rows {
            let (r, z, x) = (v[0], v[1], v[2]);
            let a = r.powf(-0.5);
            let res = x * x - r * r - z * z / (a * a);
            assert!(res.abs() <= 1e-9 * (1.0 + x * x), "{v:?}");
        }
    }

    #[test]
    fn classes_rows_are_members() {
        let c = cfg(Profile::satz2(1.0).unwrap(), 28);
        let par = Parallelism::new(c.parallelism_spec()).unwrap();
        let text = emit(EmitKind::Classes, &c).unwrap();
        let (header, rows) = parse_csv(&text).unwrap();
        assert_eq!(header.len(), 9);
        assert_eq!(rows.len(), 28);
        for v in rows {
            let id = ClassId::oriented(&Vector3::new(v[0], v[1], v[2]));
            let line = crate::projective::OrientedLine::from_array([v[3], v[4], v[5], v[6], v[7], v[8]]).unwrap();
            assert!(par.class_membership(&id, &line).unwrap() < 1e-8);
        }
    }

    #[test]
    fn output_format() {
        let text = emit(EmitKind::Dtable, &cfg(Profile::regular(1.0).unwrap(), 2)).unwrap();
        assert_eq!(
            text,
            "r,d\n1.0000000000000000e-3,1.0000000000000000e-3\n1.0000000000000000e3,1.0000000000000000e3\n"
        );
    }
}
