//! Solidity front end: tokenizer, parser and syntax tree.

pub mod ast;
mod error;
pub mod lexer;
mod parser;
pub mod pretty;

pub use ast::*;
pub use error::{FrontendError, Position};
pub use lexer::{tokenize, LiteralKind, Token, TokenKind};
pub use parser::parse;
pub use pretty::{erase_positions, print_source_unit};
