//! Coded, span-anchored errors and warnings.
//!
//! Every diagnostic carries a code from a closed registry. `E` codes are
//! compile-time language errors, `T` codes are template slot errors and `R`
//! codes are runtime errors raised by the interpreter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    /// Redeclaration.
    E001,
    /// Assignment or operand type mismatch.
    E002,
    /// Illegal identifier.
    E003,
    /// Undeclared identifier.
    E004,
    /// Syntax error.
    E005,
    /// Reserved word used as identifier.
    E006,
    /// Non-literal or wrong-typed Select case label.
    E007,
    /// Missing required template slot.
    T001,
    /// Slot value fails slot-kind validation.
    T002,
    /// Division or remainder by zero, or a non-finite result.
    R101,
    /// Array index out of bounds or not an integer.
    R102,
    /// Input text not convertible to Number.
    R103,
    /// Repeat count negative or not an integer.
    R104,
    /// Step limit exceeded.
    R105,
}

impl Code {
    pub const ALL: [Code; 14] = [
        Code::E001,
        Code::E002,
        Code::E003,
        Code::E004,
        Code::E005,
        Code::E006,
        Code::E007,
        Code::T001,
        Code::T002,
        Code::R101,
        Code::R102,
        Code::R103,
        Code::R104,
        Code::R105,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::E001 => "E001",
            Code::E002 => "E002",
            Code::E003 => "E003",
            Code::E004 => "E004",
            Code::E005 => "E005",
            Code::E006 => "E006",
            Code::E007 => "E007",
            Code::T001 => "T001",
            Code::T002 => "T002",
            Code::R101 => "R101",
            Code::R102 => "R102",
            Code::R103 => "R103",
            Code::R104 => "R104",
            Code::R105 => "R105",
        }
    }

    pub fn is_runtime(self) -> bool {
        self.as_str().starts_with('R')
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown diagnostic code '{0}'")]
pub struct UnknownCode(pub String);

impl FromStr for Code {
    type Err = UnknownCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Code::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCode(s.to_string()))
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Code {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub span: SourceSpan,
    /// Human-readable text without a trailing period.
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub related_name: Option<String>,
}

impl Diagnostic {
    pub fn error(code: Code, span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            code,
            severity: Severity::Error,
            span,
            message: message.into(),
            related_name: None,
        }
    }

    pub fn warning(code: Code, span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            ..Self::error(code, span, message)
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.related_name = Some(name.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        };
        write!(
            f,
            "{level} {} at {}:{}: {}.",
            self.code, self.span.line, self.span.column, self.message
        )
    }
}

/// `ERROR <code> at <line>:<column>: <message>.`
pub fn format_diagnostic(d: &Diagnostic) -> String {
    d.to_string()
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}
