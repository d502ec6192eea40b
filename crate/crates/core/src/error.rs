use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("s = 0 has a single spin-down state; use lll_energy / LevelKey::Lll instead")]
    LowestLevel,

    #[error(
        "kappa is singular (denominator {denominator:e}): a_tilde = 0 with xi_tilde < 0, \
         use the decoupled a_tilde = 0 spinors"
    )]
    DegenerateKappa { denominator: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid spacing {h} too coarse for finite differences, need h <= {required}")]
    GridTooCoarse { h: f64, required: f64 },

    #[error("unsupported stencil order {0} (use 2, 4 or 6)")]
    StencilOrder(usize),

    #[error("superposition weights are all zero")]
    ZeroWeights,

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config file: {0}")]
    Toml(#[from] toml::de::Error),
}
