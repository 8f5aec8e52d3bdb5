use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not an odd prime")]
    BadPrime(u32),
    #[error("composite of consecutive differentials is nonzero")]
    CompositionNonzero,
    #[error("operator is not p-nilpotent")]
    NotNilpotent,
    #[error("horizontal and vertical differentials do not commute")]
    NonCommutingDifferentials,
    #[error("bimodules live over different rings")]
    RingMismatch,
    #[error("generator index {0} out of range for {1} strands")]
    IndexOutOfRange(i32, usize),
    #[error("bad crossing index {0}")]
    BadIndex(usize),
    #[error("braid word parse error: {0}")]
    ParseError(String),
    #[error("homology representatives were not retained")]
    RepresentativesMissing,
    #[error("result did not stabilize under truncation window doubling")]
    TruncationUnstable,
    #[error("degree window too small to cover the support")]
    WindowTooSmall,
    #[error("state sum limited to 16 crossings, got {0}")]
    TooManyCrossings(usize),
}
