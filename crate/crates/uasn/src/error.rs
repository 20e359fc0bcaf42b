//! Error types shared across the crate.

use thiserror::Error;

/// Node identifier. Dense, zero-based; the surface buoy is always id 0.
pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument is outside the domain of the model.
    #[error("domain error: {0}")]
    Domain(String),

    /// The deployment itself is malformed (ids, kinds, positions, energies).
    #[error("invalid deployment: {0}")]
    InvalidDeployment(String),

    /// No multi-hop route exists from some sensor to the surface buoy.
    #[error("node {node} cannot reach the surface buoy within comm range")]
    Disconnected { node: NodeId },

    /// Routing cannot place the required flow without exceeding link capacity.
    #[error("link capacity saturated at node {node}; cannot route flow from node {origin}")]
    CapacitySaturated { node: NodeId, origin: NodeId },

    /// A rate array fails one of its structural invariants.
    #[error("invalid rate array: {0}")]
    InvalidRateArray(String),

    /// Relay placement (or a selection subset) admits no feasible point.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Exhaustive search was asked for a grid too large to enumerate.
    #[error("search grid too large: {points} points exceeds cap {cap}")]
    GridTooLarge { points: u128, cap: u128 },

    /// Generation retries exhausted without a connected deployment.
    #[error("could not generate a connected deployment after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for infeasibility, 3 for bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Infeasible(_)
            | Error::CapacitySaturated { .. }
            | Error::Disconnected { .. }
            | Error::GenerationFailed { .. } => 2,
            Error::Domain(_)
            | Error::InvalidDeployment(_)
            | Error::InvalidRateArray(_)
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 3,
            _ => 1,
        }
    }
}
