use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Taper angle is zero, so the intermediate contact length is singular.
    #[error("untapered pouch geometry (l4 == l5): intermediate contact length is undefined")]
    Untapered,

    #[error("integration error: {0}")]
    Integration(String),

    #[error("no -3 dB crossing in the supplied response")]
    NoCrossing,

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, printed by the CLI on stderr.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "E_DOMAIN",
            Error::DegenerateGeometry(_) => "E_GEOMETRY",
            Error::Untapered => "E_UNTAPERED",
            Error::Integration(_) => "E_INTEGRATION",
            Error::NoCrossing => "E_NO_CROSSING",
            Error::Infeasible(_) => "E_INFEASIBLE",
            Error::Config(_) => "E_CONFIG",
            Error::Parse(_) => "E_PARSE",
            Error::Io(_) => "E_IO",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
