use std::fmt;

use thiserror::Error;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("lex error at {pos}: {message}")]
    Lex { pos: Position, message: String },

    #[error("parse error at {pos}: expected {expected}, found {found}")]
    Parse {
        pos: Position,
        expected: String,
        found: String,
    },

    #[error("unsupported construct at {pos}: {construct}")]
    Unsupported { pos: Position, construct: String },
}

impl FrontendError {
    /// Short machine-readable tag, used in skip listings.
    pub fn kind(&self) -> &'static str {
        match self {
            FrontendError::Lex { .. } => "LexError",
            FrontendError::Parse { .. } => "ParseError",
            FrontendError::Unsupported { .. } => "UnsupportedConstruct",
        }
    }

    pub fn position(&self) -> Position {
        match self {
            FrontendError::Lex { pos, .. }
            | FrontendError::Parse { pos, .. }
            | FrontendError::Unsupported { pos, .. } => *pos,
        }
    }
}
