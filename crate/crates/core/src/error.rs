use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph is not connected ({components} components)")]
    Disconnected { components: usize },

    #[error("need at least {needed} usable snapshots, found {found}")]
    TooFewSnapshots { needed: usize, found: usize },

    #[error("series too short: length {len}, need more than {needed}")]
    SeriesTooShort { len: usize, needed: usize },

    #[error("cluster labels tied for {0}")]
    LabelTie(String),

    #[error("infeasible generator spec: {0}")]
    Infeasible(String),

    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the caller's data rather than a failing stage.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::Parse { .. } | Error::Empty(_) | Error::Io(_) | Error::Json(_) => true,
            Error::Stage { source, .. } => source.is_data_error(),
            _ => false,
        }
    }

    pub fn in_stage(stage: &str) -> impl FnOnce(Error) -> Error {
        let stage = stage.to_string();
        move |e| match e {
            Error::Stage { .. } => e,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
