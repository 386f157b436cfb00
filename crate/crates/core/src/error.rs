use thiserror::Error;

/// Failure classes surfaced by the library.
///
/// The CLI maps these onto exit codes: input problems are usage errors,
/// violated gap hypotheses are preflight failures and everything else is
/// numerical.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("support blowup: {atoms} atoms exceeds cap {cap}")]
    SupportBlowup { atoms: usize, cap: usize },
    #[error("empty truncation: no atom with |v(g)| <= {0}")]
    EmptyTruncation(f64),
    #[error("no unique fixed point (condition number {0:.3e})")]
    NoUniqueFixedPoint(f64),
    #[error("measure is not centered: mean translation {0:.3e}")]
    NotCentered(f64),
    #[error("measure is not symmetric")]
    NotSymmetric,
    #[error("assumption (1) fails: rotation gap {0:.3e}")]
    NoRotationGap(f64),
    #[error("assumption (2) fails: common fixed point at {0:?}")]
    CommonFixedPoint([f64; 3]),
    #[error("radii differ: |a| = {0}, |b| = {1}")]
    RadiiDiffer(f64, f64),
    #[error("norm not converged (residual {0:.3e})")]
    NormNotConverged(f64),
    #[error("region escapes basis domain: {0}")]
    RegionEscapes(String),
    #[error("mass matrix singular (condition number {0:.3e})")]
    MassMatrixSingular(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, used in error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidIsometry(_) => "invalid-isometry",
            Error::InvalidMeasure(_) => "invalid-measure",
            Error::SupportBlowup { .. } => "support-blowup",
            Error::EmptyTruncation(_) => "empty-truncation",
            Error::NoUniqueFixedPoint(_) => "no-unique-fixed-point",
            Error::NotCentered(_) => "not-centered",
            Error::NotSymmetric => "not-symmetric",
            Error::NoRotationGap(_) => "assumption-1",
            Error::CommonFixedPoint(_) => "assumption-2",
            Error::RadiiDiffer(..) => "radii-differ",
            Error::NormNotConverged(_) => "norm-not-converged",
            Error::RegionEscapes(_) => "region-escapes",
            Error::MassMatrixSingular(_) => "mass-matrix-singular",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }

    /// Whether the error reports a violated gap hypothesis.
    pub fn is_preflight(&self) -> bool {
        matches!(
            self,
            Error::NoRotationGap(_) | Error::CommonFixedPoint(_) | Error::NotCentered(_) | Error::NotSymmetric
        )
    }

    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidIsometry(_)
                | Error::InvalidMeasure(_)
                | Error::InvalidArgument(_)
                | Error::Io(_)
                | Error::Parse(_)
                | Error::RadiiDiffer(..)
                | Error::RegionEscapes(_)
                | Error::EmptyTruncation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
