use thiserror::Error;

/// Errors produced by the solver library and the network simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical operation failed (non-finite input, factorization breakdown,
    /// inconsistent linear system).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A finite SNR was requested for a node whose noiseless observation is zero.
    #[error("degenerate SNR: {0}")]
    DegenerateSnr(String),

    /// Random topology generation exhausted its retry budget.
    #[error("topology generation failed: {0}")]
    TopologyGeneration(String),

    /// Node failures left the network unable to reach consensus.
    #[error("consensus impossible: {0}")]
    ConsensusImpossible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
