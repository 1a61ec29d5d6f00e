use std::path::PathBuf;

use crate::fuel::FuelType;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("no fuel parameters for {0}")]
    UnknownFuel(FuelType),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty merit order")]
    EmptyMeritOrder,

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("missing input: {0}")]
    Missing(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
