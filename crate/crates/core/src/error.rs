use thiserror::Error;

/// Errors raised by grid construction, field operations and experiment runs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid axis length {0} is not a power of two >= 4")]
    BadGridSize(usize),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("operator {op} incompatible with a {components}-component field")]
    BadOperator { op: &'static str, components: usize },

    #[error("H^-1 norm requested on a field with nonzero mean (|mean| = {0:.3e})")]
    NonZeroMean(f64),

    #[error("shell q={q} exceeds Nyquist coverage (q_max = {q_max})")]
    ShellBeyondNyquist { q: usize, q_max: usize },

    #[error("Bernstein check requires r >= s, got r={r}, s={s}")]
    BadExponentPair { r: f64, s: f64 },

    #[error("frequency {freq} not resolvable on an n={n} grid (dealias cutoff {cutoff})")]
    Unresolvable { freq: f64, n: usize, cutoff: usize },

    #[error(
        "invalid time schedule for m={m}: t_1^m = {t1:.6} < 0 \
         (lambda_1*a_1 = {la1:.6}, tau_m = {tau:.6}); a_1 = {a1:.6} is too small"
    )]
    InvalidSchedule { m: usize, t1: f64, la1: f64, tau: f64, a1: f64 },

    #[error("weight sequence fails the class-T membership test: {0}")]
    NotClassT(String),

    #[error("CFL collapse at t={t:.6}: max speed {speed:.3e} gives dt {dt:.3e} < {floor:.3e}")]
    CflCollapse { t: f64, speed: f64, dt: f64, floor: f64 },

    #[error(
        "spectral resolution loss at t={t:.6}: top-octave energy fraction {fraction:.3e} > {limit:.3e}"
    )]
    ResolutionLoss { t: f64, fraction: f64, limit: f64 },

    #[error("root-find for {what} did not converge: {detail}")]
    RootFind { what: &'static str, detail: String },

    #[error("cutoff calibration failed: {0}")]
    Calibration(String),

    #[error("bad config: {0}")]
    BadConfig(String),

    #[error("storage: {0}")]
    Storage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI contract: bad config 2, numerical abort 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BadConfig(_) | Error::NotClassT(_) => 2,
            Error::InvalidSchedule { .. } => 2,
            _ => 3,
        }
    }

    /// Machine-readable error record.
    pub fn record(&self) -> serde_json::Value {
        serde_json::json!({
            "error": format!("{self}"),
            "kind": self.kind(),
            "exit_code": self.exit_code(),
        })
    }

    fn kind(&self) -> &'static str {
        match self {
            Error::BadGridSize(_) => "bad_grid_size",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::BadOperator { .. } => "bad_operator",
            Error::NonZeroMean(_) => "non_zero_mean",
            Error::ShellBeyondNyquist { .. } => "shell_beyond_nyquist",
            Error::BadExponentPair { .. } => "bad_exponent_pair",
            Error::Unresolvable { .. } => "unresolvable",
            Error::InvalidSchedule { .. } => "invalid_schedule",
            Error::NotClassT(_) => "not_class_t",
            Error::CflCollapse { .. } => "cfl_collapse",
            Error::ResolutionLoss { .. } => "resolution_loss",
            Error::RootFind { .. } => "root_find",
            Error::Calibration(_) => "calibration",
            Error::BadConfig(_) => "bad_config",
            Error::Storage(_) => "storage",
            Error::Io(_) => "io",
        }
    }
}
