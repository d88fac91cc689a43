use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("depth mismatch: {0} vs {1}")]
    DepthMismatch(u32, u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("unsupported space or system id {0:?}")]
    UnsupportedSpace(String),

    #[error("point is not covered by the partition")]
    Uncovered,

    #[error("tabulated maps are defined on different domain nets")]
    NetMismatch,

    #[error("point lies outside the domain: {0}")]
    Domain(String),

    #[error("cannot find {needed} separated points inside a single atom (found {found})")]
    TooFewPoints { needed: usize, found: usize },

    #[error("tracing left the sampled region: {0}")]
    TracingLeftRegion(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str) -> Self {
        Error::Parse {
            what,
            input: input.to_owned(),
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
