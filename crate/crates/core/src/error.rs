use thiserror::Error;

/// Errors raised by geometric constructions, solvers and classification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("points are projectively equal; their join is undefined")]
    DegenerateJoin,

    #[error("line lies in the plane at infinity")]
    InfiniteLine,

    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("no sign change of the target function on [{lo:e}, {hi:e}]")]
    NotBracketed { lo: f64, hi: f64 },

    #[error("no spread member through the point ({0})")]
    NoRoot(String),

    #[error("{count} candidate spread members through one point")]
    MultipleRoots { count: usize },

    #[error("profile is not O2-admissible: canonical b(r) is not identically 0 (max |b| = {max_abs_b:e})")]
    NotO2Admissible { max_abs_b: f64 },

    #[error("line belongs to the class only with reversed orientation")]
    OrientationMismatch,

    #[error("line is not a member of the class (residual {residual:e})")]
    NotMember { residual: f64 },

    #[error("both orientations of the line lie in distinct unoriented classes")]
    NotAPartition { forward: [f64; 3], reverse: [f64; 3] },

    #[error("canonical b(r) vanishes identically; the non-oriented parallelism is valid")]
    NotAcentric,

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
