use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("mask dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("placement of sprite {sprite_index} ({label}) failed after {retries} retries: transformed size {w}x{h} does not fit canvas {canvas_w}x{canvas_h}")]
    PlacementRetriesExhausted {
        sprite_index: usize,
        label: String,
        retries: u32,
        w: u32,
        h: u32,
        canvas_w: u32,
        canvas_h: u32,
    },

    #[error("background {path}: {w}x{h} is smaller than canvas {canvas_w}x{canvas_h}")]
    BackgroundTooSmall {
        path: PathBuf,
        w: u32,
        h: u32,
        canvas_w: u32,
        canvas_h: u32,
    },

    #[error("annotation format error: {0}")]
    Annotation(String),

    #[error("dangling reference: {0}")]
    DanglingReference(String),

    #[error("duplicate id: {0}")]
    DuplicateId(String),

    #[error("{context}: value out of bounds: {detail}")]
    OutOfBounds { context: String, detail: String },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
