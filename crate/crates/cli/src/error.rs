use std::path::PathBuf;

use trustroute::sim::SimError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A config file that does not parse or fails validation.
    #[error("{}{}: {message}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    Config {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("seed {seed}: {source}")]
    Simulation {
        seed: u64,
        #[source]
        source: SimError,
    },
    #[error("metric `{metric}` not found in {}", path.display())]
    MissingMetric { metric: String, path: PathBuf },
    #[error("invalid seed list: {0}")]
    Seeds(String),
}

impl Error {
    /// Process exit status: 2 for filesystem trouble, 1 for everything the
    /// user can fix in their input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Csv { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> Self {
        let path = path.into();
        move |source| Error::Csv { path, source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
