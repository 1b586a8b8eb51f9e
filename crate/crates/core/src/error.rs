use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("{0}: expected a univariate polynomial")]
    NotUnivariate(&'static str),

    #[error("{0}: zero polynomial not allowed")]
    ZeroPolynomial(&'static str),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed column set {0:?}")]
    MalformedColumns(Vec<usize>),

    #[error("non-generic matrix: minor on columns {columns:?} vanishes (|minor| = {modulus:.3e})")]
    NonGeneric { columns: Vec<usize>, modulus: f64 },

    #[error("outside configured convergence region: max |x| = {max_abs} >= radius {radius}")]
    OutsideDomain { max_abs: f64, radius: f64 },

    #[error("series not converging: shell {degree} norm {last:.3e} >= shell {} norm {previous:.3e}", degree - 1)]
    NotConverging {
        degree: usize,
        last: f64,
        previous: f64,
    },

    #[error("degenerate: discriminant-type denominator vanishes (T^2 - 4S^3 = {0:.3e})")]
    DegenerateDiscriminant(f64),

    #[error("branch collision at J = {re} + {im}i: repeated roots")]
    BranchCollision { re: f64, im: f64 },

    #[error("all branches outside convergence region")]
    NoBranchInDomain,

    #[error("prefactor radical inconsistency: {0}")]
    RadicalInconsistency(String),

    #[error("unsupported base ring: {0}")]
    UnsupportedBaseRing(String),

    #[error("ambiguous factor; candidates: {0:?}")]
    AmbiguousFactor(Vec<String>),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("invariant derivation failed: kernel dimension at degree {degree} is {dimension}, expected 1")]
    KernelDimension { degree: usize, dimension: usize },

    #[error("invariant derivation failed: restriction at degree {degree} is not proportional to the reference polynomial")]
    RestrictionMismatch { degree: usize },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the input lying outside an operation's domain, as
    /// opposed to internal faults.
    pub fn is_domain_error(&self) -> bool {
        !matches!(
            self,
            Error::KernelDimension { .. }
                | Error::RestrictionMismatch { .. }
                | Error::RadicalInconsistency(_)
                | Error::NonConvergence(_)
                | Error::Cache(_)
                | Error::Io(_)
        )
    }

    /// Short machine-readable tag used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::NotUnivariate(_) => "not_univariate",
            Error::ZeroPolynomial(_) => "zero_polynomial",
            Error::Parse(_) => "parse",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::MalformedColumns(_) => "malformed_columns",
            Error::NonGeneric { .. } => "non_generic",
            Error::OutsideDomain { .. } => "outside_domain",
            Error::NotConverging { .. } => "not_converging",
            Error::DegenerateDiscriminant(_) => "degenerate",
            Error::BranchCollision { .. } => "branch_collision",
            Error::NoBranchInDomain => "no_branch_in_domain",
            Error::RadicalInconsistency(_) => "radical_inconsistency",
            Error::UnsupportedBaseRing(_) => "unsupported_base_ring",
            Error::AmbiguousFactor(_) => "ambiguous_factor",
            Error::NonConvergence(_) => "non_convergence",
            Error::KernelDimension { .. } => "kernel_dimension",
            Error::RestrictionMismatch { .. } => "restriction_mismatch",
            Error::Evaluation(_) => "evaluation",
            Error::Cache(_) => "cache",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
