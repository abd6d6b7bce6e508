//! Parse and resolution diagnostics with source positions.

use std::fmt;

/// A diagnostic tied to a line and column of the input text. Parsing never
/// panics; every failure is reported as one of these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: u32,
    pub col: u32,
    pub message: String,
    /// Token kinds the parser would have accepted at this point.
    pub expected: Vec<&'static str>,
}

impl Diagnostic {
    pub fn new(line: u32, col: u32, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            col,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    pub fn expecting(mut self, expected: Vec<&'static str>) -> Self {
        self.expected = expected;
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" | "))?;
        }
        Ok(())
    }
}
