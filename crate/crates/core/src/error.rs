use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("signal of {len} samples is shorter than one {win_len}-sample analysis window")]
    EmptySpectrogram { len: usize, win_len: usize },

    #[error("track too short: {0}")]
    TooShort(String),

    #[error("no interior silent region of at least {min_ms} ms")]
    NoSilence { min_ms: f64 },

    #[error("SNR is undefined for a silent track")]
    UndefinedSnr,

    #[error("corpus exhausted: needed {needed} usable {what}, found {available}")]
    CorpusExhausted {
        what: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("{path}: malformed WAV in `{chunk}` chunk: {msg}")]
    Wav {
        path: PathBuf,
        chunk: &'static str,
        msg: String,
    },

    #[error("{path}: invalid segment labels: {msg}")]
    Labels { path: PathBuf, msg: String },

    #[error("{path}: invalid manifest: {msg}")]
    Manifest { path: PathBuf, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
