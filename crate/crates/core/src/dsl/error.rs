use std::fmt;

/// Distinct failure classes of the `.kova` front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    UndeclaredIdentifier,
    DuplicateEquation,
    NonPolynomial,
    DivisionByZero,
    InvalidDirective,
    /// Decimal literal outside float mode.
    InexactLiteral,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Lexical => "lexical error",
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UndeclaredIdentifier => "undeclared identifier",
            ParseErrorKind::DuplicateEquation => "duplicate equation",
            ParseErrorKind::NonPolynomial => "non-polynomial expression",
            ParseErrorKind::DivisionByZero => "division by zero",
            ParseErrorKind::InvalidDirective => "invalid directive",
            ParseErrorKind::InexactLiteral => "inexact literal",
        };
        f.write_str(s)
    }
}

/// A front-end error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }
}

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}
