use thiserror::Error;

pub type Result<T> = std::result::Result<T, QmatError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QmatError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid dimension n={0}; need n >= 2")]
    InvalidDimension(usize),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("dimension mismatch: expected n={expected}, found n={found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("element is not a single monomial")]
    NotAMonomial,
    #[error("element is not central: {0}")]
    NotCentral(String),
    #[error("exponent vector {0} is not in the lattice spanned by the Delta exponents")]
    NotInLattice(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("pivot at step {0} is not a single monomial")]
    PivotNotMonomial(String),
    #[error("resource limit exceeded: {what} grew past {limit} terms")]
    ResourceLimit { what: String, limit: usize },
    #[error("not in span: {0}")]
    NotInSpan(String),
    #[error("not a derivation: relation {0} fails")]
    NotADerivation(String),
    #[error("inconsistent torus derivation: {0}")]
    Inconsistent(String),
    #[error("z-dictionary consistency violated: {0}")]
    ConditionViolated(String),
    #[error("coefficient is not a polynomial in det_q: {0}")]
    NotPolynomial(String),
    #[error("parse error: {0}")]
    Parse(String),
}
