use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation M = {truncation} is smaller than the potential bandwidth {bandwidth}")]
    TruncationTooSmall { truncation: usize, bandwidth: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error(
        "QR iteration did not converge after {iterations} sweeps; stuck deflation block rows {block_start}..={block_end}"
    )]
    NoConvergence {
        block_start: usize,
        block_end: usize,
        iterations: usize,
    },

    #[error("at k = {k}: {source}")]
    AtMomentum {
        k: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("gauge angle is undefined: t_- = 0 (coupling vanishes)")]
    UndefinedGauge,

    #[error("potential is not eligible for a gauge equivalence: {0}")]
    Ineligible(String),

    #[error("unsupported bandwidth {0}: only harmonics |m| <= 2 are handled")]
    UnsupportedBandwidth(usize),

    #[error("zero vector")]
    ZeroVector,

    #[error("fit refused: {0}")]
    FitRefused(String),

    #[error("loop tracking lost continuity (floor {floor:.4}) near step {step} of {steps}")]
    LoopDiscontinuity {
        floor: f64,
        step: usize,
        steps: usize,
    },

    #[error("tracked states {start:?} ended as {end:?}: the loop mixes them with other states")]
    LoopEscaped { start: Vec<usize>, end: Vec<usize> },

    #[error("band pair ({0}, {1}) out of range for a {2}-dimensional matrix")]
    BandOutOfRange(usize, usize, usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_k(self, k: f64) -> Self {
        Error::AtMomentum {
            k,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
