use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("structure constants are not antisymmetric at ({i},{j},{k})")]
    NotAntisymmetric { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails with residual {residual:e}")]
    Jacobi { residual: f64 },
    #[error("image of basis vector {index} is not a derivation (residual {residual:e})")]
    NotDerivation { index: usize, residual: f64 },
    #[error("map is not a Lie algebra homomorphism (residual {residual:e})")]
    NotHomomorphism { residual: f64 },
    #[error("subspace is not closed under the bracket (residual {residual:e})")]
    NotSubalgebra { residual: f64 },
    #[error("decomposition is not reductive: {0}")]
    NotReductive(String),
    #[error("matrix is not positive-definite")]
    NotPositiveDefinite,
    #[error("matrix is singular")]
    Singular,
    #[error("inner product is not Ad(K)-invariant (residual {residual:e})")]
    NotInvariant { residual: f64 },
    #[error("algebra is not unimodular")]
    NotUnimodular,
    #[error("direction is not fixed by the isotropy (residual {residual:e})")]
    NotIsotropyFixed { residual: f64 },
    #[error("[H, x] does not vanish (residual {residual:e})")]
    NotCentralized { residual: f64 },
    #[error("orthogonal complement is not a codimension-one ideal containing H and k: {0}")]
    NotIdeal(String),
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("operators do not commute (residual {residual:e})")]
    NonCommuting { residual: f64 },
    #[error("unknown catalog entry \"{name}\"{}", suggestion_text(.suggestions))]
    UnknownCase { name: String, suggestions: Vec<String> },
    #[error("parameter constraint violated: {0}")]
    ParamConstraint(String),
    #[error("premise violated: {0}")]
    Premise(String),
    #[error("empty parameter space")]
    EmptyParameterSpace,
    #[error("every start left the positive-definite cone")]
    AllStartsLeftCone,
    #[error("no positive-definite invariant inner product found")]
    NoInvariantInnerProduct,
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("recipe step {step} ({name}) failed: {source}")]
    Recipe { step: usize, name: String, source: Box<Error> },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

fn suggestion_text(s: &[String]) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!("; did you mean: {}?", s.join(", "))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json {
            line: e.line(),
            column: e.column(),
            message: match e.to_string().split_once(" at line ") {
                Some((head, _)) => head.to_string(),
                None => e.to_string(),
            },
        }
    }
}
