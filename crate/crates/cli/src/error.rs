use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("missing artifact {}", .0.display())]
    MissingArtifact(PathBuf),
    #[error("malformed artifact {}: {message}", .path.display())]
    MalformedArtifact { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] rdm_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

/// Flat, serializable view of an error for `stderr`.
#[derive(Debug, Serialize)]
struct ErrorRecord<'a> {
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
}

#[derive(Serialize)]
struct Wrapper<'a> {
    error: ErrorRecord<'a>,
}

impl HarnessError {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Parse { .. } => "parse",
            Self::Validation { .. } => "validation",
            Self::MissingArtifact(_) => "missing_artifact",
            Self::MalformedArtifact { .. } => "malformed_artifact",
            Self::Core(_) => "core",
            Self::Io(_) => "io",
        }
    }

    /// Field path of a validation error.
    pub fn field(&self) -> Option<&str> {
        match self {
            Self::Validation { field, .. } => Some(field),
            _ => None,
        }
    }

    /// TOML document with a single `[error]` table.
    pub fn to_toml(&self) -> String {
        let (line, column) = match self {
            Self::Parse { line, column, .. } => (Some(*line), Some(*column)),
            _ => (None, None),
        };
        let record = ErrorRecord {
            kind: self.kind(),
            message: self.to_string(),
            field: self.field(),
            line,
            column,
        };
        toml::to_string(&Wrapper { error: record }).unwrap_or_else(|_| format!("[error]\nkind = \"{}\"\n", self.kind()))
    }
}
