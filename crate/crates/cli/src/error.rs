use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{stage}: {}", path.display())]
    Io {
        stage: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed input or a schema violation; `origin` is a path or a
    /// description of the input.
    #[error("{origin}: {msg}")]
    Parse { origin: String, msg: String },
    #[error(transparent)]
    Core(#[from] meshtopo_core::Error),
    #[error(transparent)]
    Sim(#[from] meshtopo_sim::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(origin: &str, msg: impl Into<String>) -> Error {
    Error::Parse {
        origin: origin.to_string(),
        msg: msg.into(),
    }
}

pub(crate) fn read(stage: &'static str, path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        stage,
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write(stage: &'static str, path: &std::path::Path, data: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            stage,
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, data).map_err(|source| Error::Io {
        stage,
        path: path.to_path_buf(),
        source,
    })
}
