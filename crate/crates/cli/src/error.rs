use std::fmt;

use serde::Serialize;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Usage,
    Config,
    Ineligible,
    Numerical,
    Io,
    Internal,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Internal => 1,
            Kind::Usage => 2,
            Kind::Config => 3,
            Kind::Ineligible => 4,
            Kind::Numerical => 5,
            Kind::Io => 6,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Kind::Config, message)
    }

    /// Single-line JSON document for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind,
                "code": self.kind.exit_code(),
                "message": self.message,
            }
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn classify(e: &nhbloch::Error) -> Kind {
    use nhbloch::Error as E;
    match e {
        E::AtMomentum { source, .. } => classify(source),
        E::Ineligible(_) | E::UndefinedGauge | E::UnsupportedBandwidth(_) => Kind::Ineligible,
        E::NoConvergence { .. }
        | E::LoopDiscontinuity { .. }
        | E::LoopEscaped { .. }
        | E::FitRefused(_)
        | E::ZeroVector => Kind::Numerical,
        E::Io(_) => Kind::Io,
        E::Json(_) => Kind::Internal,
        _ => Kind::Config,
    }
}

impl From<nhbloch::Error> for CliError {
    fn from(e: nhbloch::Error) -> Self {
        Self::new(classify(&e), e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(Kind::Io, e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::new(Kind::Internal, e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
