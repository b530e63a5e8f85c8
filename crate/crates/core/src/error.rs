use thiserror::Error;

/// Every failure the library can report. The variant name doubles as the
/// machine-readable error code printed by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size {0} exceeds the configured bound")]
    SizeExceeded(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    ContextMismatch,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("zero input")]
    ZeroInput,
    #[error("polynomial is not separable")]
    NotSeparable,
    #[error("polynomial is constant")]
    ConstantInput,
    #[error("wrong characteristic: {0}")]
    WrongCharacteristic(String),
    #[error("unknown family: {0}")]
    UnknownFamily(String),
    #[error("curve does not match the family model: {0}")]
    ModelMismatch(String),
    #[error("map is not an automorphism of the curve")]
    NotAutomorphism,
    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(String),
    #[error("operation needs an odd-characteristic degree-5 model")]
    WrongModel,
    #[error("no rational points found")]
    NoRationalPoints,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("point counts are inconsistent")]
    InconsistentCounts,
    #[error("no table row matches: {0}")]
    RowNotFound(String),
    #[error("shape has non-integral 2-rank")]
    NonIntegerRank,
    #[error("curve is not supersingular")]
    NotSupersingular,
    #[error("candidate ambiguity unresolved")]
    AmbiguityUnresolved,
    #[error("isogeny class not recognised")]
    UnknownClass,
    #[error("automorphism order relation not classified")]
    UnclassifiedOrder,
    #[error("invalid order {0}")]
    InvalidOrder(u64),
    #[error("class is not simple or not covered by the exponent table")]
    NotSimpleOrUncovered,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("no parameter found: {0}")]
    NoParameterFound(String),
    #[error("row not applicable: {0}")]
    RowNotApplicable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
}

impl Error {
    /// Variant name, used as a stable error code.
    pub fn name(&self) -> &'static str {
        use Error::*;
        match self {
            NotPrime(_) => "NotPrime",
            SizeExceeded(_) => "SizeExceeded",
            DivisionByZero => "DivisionByZero",
            ContextMismatch => "ContextMismatch",
            DegreeMismatch(_) => "DegreeMismatch",
            ZeroInput => "ZeroInput",
            NotSeparable => "NotSeparable",
            ConstantInput => "ConstantInput",
            WrongCharacteristic(_) => "WrongCharacteristic",
            UnknownFamily(_) => "UnknownFamily",
            ModelMismatch(_) => "ModelMismatch",
            NotAutomorphism => "NotAutomorphism",
            SearchBudgetExceeded(_) => "SearchBudgetExceeded",
            WrongModel => "WrongModel",
            NoRationalPoints => "NoRationalPoints",
            BudgetExceeded(_) => "BudgetExceeded",
            InconsistentCounts => "InconsistentCounts",
            RowNotFound(_) => "RowNotFound",
            NonIntegerRank => "NonIntegerRank",
            NotSupersingular => "NotSupersingular",
            AmbiguityUnresolved => "AmbiguityUnresolved",
            UnknownClass => "UnknownClass",
            UnclassifiedOrder => "UnclassifiedOrder",
            InvalidOrder(_) => "InvalidOrder",
            NotSimpleOrUncovered => "NotSimpleOrUncovered",
            VerificationFailed(_) => "VerificationFailed",
            NoParameterFound(_) => "NoParameterFound",
            RowNotApplicable(_) => "RowNotApplicable",
            Parse(_) => "Parse",
            InvalidCurve(_) => "InvalidCurve",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
