use thiserror::Error;

use crate::graded3::LiftObstruction;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("expected {expected} images, got {found}")]
    ImageCountMismatch { expected: usize, found: usize },
    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("unsupported arity {0}")]
    UnsupportedArity(usize),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("constant polynomial")]
    ConstantPolynomial,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("wrong grading kind: {0}")]
    WrongGradingKind(&'static str),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("map is not graded")]
    NotGraded,
    #[error("map does not preserve the origin")]
    OriginNotPreserved,
    #[error("edge analysis has the wrong shape for this step")]
    WrongShape,
    #[error("empty polygon sequence")]
    EmptySequence,
    #[error("gcd precondition violated: {0}")]
    GcdPrecondition(String),
    #[error("third coordinate is not a scalar multiple of z")]
    ThirdCoordinateNotScalar,
    #[error("map does not fix z")]
    NotInE,
    #[error("plane map is not graded by the residue grading")]
    NotGradedPlane,
    #[error("plane map does not lift: {0}")]
    NotLiftable(LiftObstruction),
    #[error("grading does not admit graded-wild automorphisms")]
    NotWildAdmitting,
    #[error("q-hat is {0}, expected 1")]
    QHatNotOne(i64),
    #[error("chain factor {0} is not a graded linear or elementary map")]
    NotGradedChain(usize),
    #[error("lift failure: {0}")]
    LiftFailure(String),
    #[error("wild-admitting grading, undecided: {0}")]
    WildAdmittingUndecided(String),
    #[error("unknown example name `{0}`")]
    UnknownName(String),
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("unknown variable `{name}` at {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
