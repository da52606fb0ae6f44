use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient instruments: k_x = {k_x} exceeds p_z = {p_z}")]
    InsufficientInstruments { k_x: usize, p_z: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("error covariance is not positive definite")]
    NotPositiveDefinite,

    #[error("degenerate instrument: column {0} has zero variance")]
    DegenerateInstrument(usize),

    #[error("too few observations: n = {n} is below {n_folds} folds")]
    TooFewObservations { n: usize, n_folds: usize },

    #[error("cross-validation failed: every candidate lambda was excluded")]
    CvExhausted,

    #[error("degenerate degrees of freedom: selected {selected} of n = {n}")]
    DegenerateDof { selected: usize, n: usize },

    #[error("singular selected Gram matrix (condition estimate {0:.3e})")]
    SingularGram(f64),

    #[error("truth unavailable: operation requires a simulated dataset")]
    TruthUnavailable,

    #[error("empty score list")]
    EmptyScores,

    #[error("schema error in {path}: {detail}")]
    Schema { path: String, detail: String },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Wraps an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Short category tag used by the CLI for its error line.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InsufficientInstruments { .. }
            | Error::InvalidConfig(_)
            | Error::TooFewObservations { .. } => "config",
            Error::NotPositiveDefinite | Error::DegenerateInstrument(_) => "data",
            Error::CvExhausted | Error::DegenerateDof { .. } | Error::SingularGram(_) => {
                "numeric"
            }
            Error::TruthUnavailable | Error::EmptyScores => "usage",
            Error::Schema { .. } => "schema",
            Error::Stage { source, .. } => source.category(),
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
