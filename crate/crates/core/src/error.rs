use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("operands live over different alphabets")]
    AlphabetMismatch,
    #[error("truncation degree mismatch ({left} vs {right})")]
    DegreeMismatch { left: usize, right: usize },
    #[error("letter index {index} out of range for an alphabet of {len} letters")]
    LetterOutOfRange { index: usize, len: usize },
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("the zero polynomial has no leading monomial")]
    ZeroPolynomial,
    #[error("multiplier is not homogeneous of degree 1")]
    NotHomogeneous,
    #[error("coefficient ring carries no derivation")]
    NoDerivation,

    #[error("no numeric value declared for symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("symbol `{0}` already declared with a different value")]
    SymbolRedeclared(String),
    #[error("point {re}+{im}i lies on a branch cut")]
    OnBranchCut { re: f64, im: f64 },
    #[error("evaluation overflowed")]
    Overflow,

    #[error("multiplier coefficient for letter {0} is outside the monoid subring")]
    NotInMonoidRing(usize),
    #[error("multiplier coefficient for letter {0} is zero")]
    ZeroMultiplier(usize),
    #[error("Wronskian candidate f2 must be nonzero")]
    ZeroCandidate,
    #[error("exponent must carry an irrational symbol")]
    RationalExponent,
    #[error("{points} sample points cannot certify {funcs} functions")]
    TooFewSamples { points: usize, funcs: usize },
    #[error("function {index} failed to evaluate at a sample point")]
    EvaluationFailed { index: usize },
    #[error("no recurrence within bounds (best n = {best_n}, defect = {defect})")]
    NoRecurrence { best_n: u64, defect: f64 },

    #[error("matrix dimension mismatch")]
    DimensionMismatch,
    #[error("Picard iteration did not converge after {iters} iterations (last diff {diff})")]
    NonConvergence { iters: usize, diff: f64 },
    #[error("Magnus step rejected down to h = {step}")]
    StepRejected { step: f64 },
    #[error("path is not at the identity at t = 0 (distance {distance})")]
    NotNearIdentity { distance: f64 },
    #[error("generator is not in the Lie algebra (defect {defect})")]
    NotInAlgebra { defect: f64 },
    #[error("log series needs |g - I| < 1, got {norm}")]
    LogOutOfRange { norm: f64 },
    #[error("local solutions {piece} and {next} disagree on their overlap by {mismatch}")]
    OverlapMismatch { piece: usize, next: usize, mismatch: f64 },
    #[error("interval [{t0}, {t1}] is outside the domain of the matrix function")]
    OutsideDomain { t0: f64, t1: f64 },

    #[error("exponential needs a series without constant term")]
    NonzeroConstantTerm,

    #[error("word must end in x1 for the nested-sum representation")]
    WordNotConvergent,
    #[error("nested sums need |z| <= 0.6, got {modulus}")]
    DivergentRegion { modulus: f64 },
    #[error("transport path passes within {distance} of a singular point")]
    PathTooClose { distance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
