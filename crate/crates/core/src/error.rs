use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("n must be at least 1 (got {0})")]
    InvalidN(usize),
    #[error("n = {0} is not supported by this pipeline")]
    UnsupportedN(usize),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("index {index} out of range for {dim} index values")]
    IndexOutOfRange { index: u8, dim: u8 },
    #[error("algebra has no deformation parameter to contract")]
    MissingDeformation,
    #[error("coset split is not reductive: {0}")]
    NotReductive(String),
    #[error("tensor rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("forms belong to different algebras ({0} vs {1})")]
    AlgebraMismatch(String, String),
    #[error("expected a {expected}-form, got degree {got}")]
    DegreeMismatch { expected: u32, got: u32 },
    #[error("coset scalar has components outside the coset directions")]
    NotCoset,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("bad integral: {0}")]
    BadIntegral(String),
    #[error("identity failed: {0}")]
    IdentityFailed(String),
    #[error("atom {0} has no jet assignment")]
    UncoveredAtom(String),
    #[error("base dimension {base} is below the form degree {degree}")]
    BaseDimTooSmall { base: usize, degree: u32 },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("json: {0}")]
    Json(String),
}
