use std::path::{Path, PathBuf};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}{}{message}", line_prefix(*.line), key_prefix(.key))]
    Config {
        key: Option<String>,
        line: Option<usize>,
        message: String,
    },

    #[error("{}{}{message}", file_prefix(.path), line_prefix(*.line))]
    Parse {
        path: Option<PathBuf>,
        line: Option<usize>,
        message: String,
    },

    #[error(transparent)]
    Model(#[from] cyclesmooth_core::Error),

    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

fn file_prefix(path: &Option<PathBuf>) -> String {
    path.as_ref()
        .map(|p| format!("{}: ", p.display()))
        .unwrap_or_default()
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

fn key_prefix(key: &Option<String>) -> String {
    key.as_ref().map(|k| format!("`{k}`: ")).unwrap_or_default()
}

impl Error {
    /// Process exit status for this error: 2 usage, 3 input, 4 divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Model(e) if e.is_divergence() => 4,
            Error::InFile { source, .. } => source.exit_code(),
            _ => 3,
        }
    }

    /// Attaches the file the error came from.
    pub fn in_file(self, path: &Path) -> Error {
        match self {
            Error::Parse { path: None, line, message } => Error::Parse {
                path: Some(path.to_path_buf()),
                line,
                message,
            },
            e @ (Error::Config { .. } | Error::Model(_)) => Error::InFile {
                path: path.to_path_buf(),
                source: Box::new(e),
            },
            e => e,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}
