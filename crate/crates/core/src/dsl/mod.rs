//! The `.kova` text format for systems and tensors.
//!
//! A system file holds one `name' = expr` line per variable, in the order
//! that fixes the coordinate indices. Optional directives: a
//! `params { a = 1, b = 7/10 }` block, `weights = [1, 1, 1]` and
//! `degree = 2`. `#` starts a comment.

mod ast;
mod error;
mod lexer;
mod parser;
mod tensor;

pub use ast::{Expr, ExprKind, Number};
pub use error::{ParseError, ParseErrorKind, Pos};
pub use parser::{parse_system, parse_system_with, SystemSpec};
pub use tensor::parse_tensor;
