//! C ABI over `spreadlab`.
//!
//! Objects cross the boundary as opaque handles created by `sl_*_new` or
//! `sl_*_from_json` and released by the matching `sl_*_free`. Every fallible
//! call returns an [`SlStatus`]; on failure `sl_last_error_message` describes
//! the error for the calling thread. Fixed-size arrays are passed as pointers
//! to `double`: points have 4 homogeneous coordinates, lines 6 Plücker
//! coordinates `(p12, p13, p14, p23, p24, p34)`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::Vector4;
use spreadlab::cli::{execute, RunConfig, Task};
use spreadlab::clifford::study_map;
use spreadlab::parallelisms::Parallelism;
use spreadlab::projective::{join_oriented, meet_pairing, HPoint, OrientedLine};
use spreadlab::spreads::{Handedness, Profile, RotationalSpread};
use spreadlab::Error;

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    Degenerate = 4,
    NoRoot = 5,
    NotAPartition = 6,
    NotMember = 7,
    NotO2Admissible = 8,
    NotAcentric = 9,
    Panic = 10,
}

/// A hyperbola-family profile.
pub struct SlProfile {
    inner: Profile,
}

/// A rotational spread.
pub struct SlSpread {
    inner: RotationalSpread,
}

/// A parallelism in canonical coordinates.
pub struct SlParallelism {
    inner: Parallelism,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::DegenerateJoin | Error::InfiniteLine | Error::SingularMatrix { .. } => SlStatus::Degenerate,
        Error::BadParameter(_) => SlStatus::InvalidArgument,
        Error::Config(_) => SlStatus::InvalidConfig,
        Error::NotBracketed { .. } | Error::NoRoot(_) | Error::MultipleRoots { .. } => SlStatus::NoRoot,
        Error::NotAPartition { .. } => SlStatus::NotAPartition,
        Error::NotMember { .. } | Error::OrientationMismatch => SlStatus::NotMember,
        Error::NotO2Admissible { .. } => SlStatus::NotO2Admissible,
        Error::NotAcentric => SlStatus::NotAcentric,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `body`, recording the error and catching panics.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SlStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SlStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SlStatus::Panic
        }
    }
}

unsafe fn read<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn read_array<const N: usize>(p: *const f64, what: &'static str) -> Result<[f64; N], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    let mut out = [0.0; N];
    ptr::copy_nonoverlapping(p, out.as_mut_ptr(), N);
    Ok(out)
}

unsafe fn write_array<const N: usize>(p: *mut f64, v: [f64; N], what: &'static str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    ptr::copy_nonoverlapping(v.as_ptr(), p, N);
    Ok(())
}

unsafe fn read_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Lib(Error::Config(format!("{what} is not UTF-8"))))
}

unsafe fn read_line(p: *const f64, what: &'static str) -> Result<OrientedLine, Fail> {
    Ok(OrientedLine::from_array(read_array::<6>(p, what)?)?)
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

fn handedness(h: c_int) -> Result<Handedness, Fail> {
    match h {
        1 => Ok(Handedness::Right),
        -1 => Ok(Handedness::Left),
        _ => Err(Fail::Lib(Error::BadParameter(format!("handedness must be 1 or -1, got {h}")))),
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message describing the last call on this thread if it failed, else NULL.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a profile object such as `{"kind": "satz2", "d": 1.0}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_profile_from_json(json: *const c_char, out: *mut *mut SlProfile) -> SlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let cfg = RunConfig::from_json(read_str(json, "json")?)?;
        *out = Box::into_raw(Box::new(SlProfile { inner: cfg.profile }));
        Ok(())
    })
}

/// # Safety
/// `p` must come from `sl_profile_from_json` or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sl_profile_free(p: *mut SlProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Asymptote slope `a(r)` and vertex height `b(r)`.
///
/// # Safety
/// `p` valid; `out_a`, `out_b` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_profile_eval(p: *const SlProfile, r: f64, out_a: *mut f64, out_b: *mut f64) -> SlStatus {
    guard(|| {
        let p = &read(p, "profile")?.inner;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::BadParameter("r must be positive".into()).into());
        }
        *out_ptr(out_a, "out_a")? = p.a(r);
        *out_ptr(out_b, "out_b")? = p.b(r);
        Ok(())
    })
}

/// Distance from the origin to the hyperbola of radius `r`.
///
/// # Safety
/// `p` valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_profile_d_of_r(p: *const SlProfile, r: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let p = &read(p, "profile")?.inner;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::BadParameter("r must be positive".into()).into());
        }
        *out_ptr(out, "out")? = p.d_of_r(r);
        Ok(())
    })
}

/// Inverse of `sl_profile_d_of_r`.
///
/// # Safety
/// `p` valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_profile_r_of_d(p: *const SlProfile, d: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let p = &read(p, "profile")?.inner;
        *out_ptr(out, "out")? = p.r_of_d(d)?;
        Ok(())
    })
}

/// Spread of `profile` under `z ↦ s z + t`; `handedness` is 1 or -1.
///
/// # Safety
/// `profile` valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_spread_new(
    profile: *const SlProfile,
    handedness_sign: c_int,
    s: f64,
    t: f64,
    out: *mut *mut SlSpread,
) -> SlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let p = read(profile, "profile")?.inner.transform(s, t)?;
        let spread = RotationalSpread::new(p, handedness(handedness_sign)?);
        *out = Box::into_raw(Box::new(SlSpread { inner: spread }));
        Ok(())
    })
}

/// # Safety
/// `s` must come from `sl_spread_new` or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sl_spread_free(s: *mut SlSpread) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// The oriented spread line through a homogeneous point.
///
/// # Safety
/// `s` valid; `point` holds 4 doubles; `out_line` has room for 6.
#[no_mangle]
pub unsafe extern "C" fn sl_spread_containing_line(
    s: *const SlSpread,
    point: *const f64,
    out_line: *mut f64,
) -> SlStatus {
    guard(|| {
        let s = &read(s, "spread")?.inner;
        let x = HPoint::new(Vector4::from(read_array::<4>(point, "point")?))?;
        write_array(out_line, s.containing_line(&x)?.to_array(), "out_line")
    })
}

/// The regulus line at radius `r` and angle `phi`.
///
/// # Safety
/// `s` valid; `out_line` has room for 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_spread_regulus_line(s: *const SlSpread, r: f64, phi: f64, out_line: *mut f64) -> SlStatus {
    guard(|| {
        let s = &read(s, "spread")?.inner;
        if !(r > 0.0 && r.is_finite() && phi.is_finite()) {
            return Err(Error::BadParameter("need r > 0 and finite phi".into()).into());
        }
        write_array(out_line, s.regulus_line(r, phi).to_array(), "out_line")
    })
}

/// Parallelism from a configuration in the CLI schema (or a bare profile).
///
/// # Safety
/// `json` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_parallelism_from_json(json: *const c_char, out: *mut *mut SlParallelism) -> SlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let cfg = RunConfig::from_json(read_str(json, "json")?)?;
        let par = Parallelism::new(cfg.parallelism_spec())?;
        *out = Box::into_raw(Box::new(SlParallelism { inner: par }));
        Ok(())
    })
}

/// # Safety
/// `p` must come from `sl_parallelism_from_json` or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sl_parallelism_free(p: *mut SlParallelism) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Class axis of a line and the residual of the reconstructed member. An
/// unoriented parallelism whose classes do not partition the lines returns
/// `NotAPartition`.
///
/// # Safety
/// `p` valid; `line` holds 6 doubles; `out_axis` room for 3; `out_residual`
/// writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn sl_parallelism_classify(
    p: *const SlParallelism,
    line: *const f64,
    out_axis: *mut f64,
    out_residual: *mut f64,
) -> SlStatus {
    guard(|| {
        let p = &read(p, "parallelism")?.inner;
        let c = p.parallel_class_of(&read_line(line, "line")?)?;
        write_array(out_axis, c.id.axis, "out_axis")?;
        if let Some(r) = out_residual.as_mut() {
            *r = c.residual;
        }
        Ok(())
    })
}

/// Oriented join of two homogeneous points.
///
/// # Safety
/// `x`, `y` hold 4 doubles; `out_line` room for 6.
#[no_mangle]
pub unsafe extern "C" fn sl_join(x: *const f64, y: *const f64, out_line: *mut f64) -> SlStatus {
    guard(|| {
        let (x, y) = (read_array::<4>(x, "x")?, read_array::<4>(y, "y")?);
        let l = join_oriented(&Vector4::from(x), &Vector4::from(y))?;
        write_array(out_line, l.to_array(), "out_line")
    })
}

/// Bilinear meet form; zero iff the lines meet.
///
/// # Safety
/// `a`, `b` hold 6 doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_meet_pairing(a: *const f64, b: *const f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let (a, b) = (read_line(a, "a")?, read_line(b, "b")?);
        *out_ptr(out, "out")? = meet_pairing(&a, &b);
        Ok(())
    })
}

/// Left and right Study labels of an oriented line, as unit 3-vectors.
///
/// # Safety
/// `line` holds 6 doubles; `out_left`, `out_right` room for 3.
#[no_mangle]
pub unsafe extern "C" fn sl_study_map(line: *const f64, out_left: *mut f64, out_right: *mut f64) -> SlStatus {
    guard(|| {
        let s = study_map(&read_line(line, "line")?);
        let v = |q: spreadlab::clifford::Quaternion| [q.x, q.y, q.z];
        write_array(out_left, v(s.left), "out_left")?;
        write_array(out_right, v(s.right), "out_right")
    })
}

/// Runs the command named in a configuration (the CLI `run` schema) and
/// returns its JSON or CSV output in `out_text`, to be released with
/// `sl_string_free`. `out_pass` receives 1 if every check passed, else 0.
///
/// # Safety
/// `config_json` NUL-terminated; `out_text` and `out_pass` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_run(
    config_json: *const c_char,
    out_text: *mut *mut c_char,
    out_pass: *mut c_int,
) -> SlStatus {
    guard(|| {
        let out_text = out_ptr(out_text, "out_text")?;
        let out_pass = out_ptr(out_pass, "out_pass")?;
        let cfg = RunConfig::from_json(read_str(config_json, "config_json")?)?;
        let command = cfg.command.as_deref().ok_or_else(|| Error::Config("configuration has no command".into()))?;
        let outcome = execute(&Task::parse(command)?, &cfg)?;
        *out_text = CString::new(outcome.text).expect("reports contain no NUL").into_raw();
        *out_pass = c_int::from(outcome.pass);
        Ok(())
    })
}
