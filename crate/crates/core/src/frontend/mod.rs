//! Surface syntax: lexing, parsing, printing and the file driver.

pub mod driver;
pub mod lexer;
pub mod parser;
pub mod print;

pub use driver::{Diagnostic, Report, Session, Severity, Status};
pub use parser::{parse_ctx_in, parse_items, parse_term, parse_term_in, Item, ItemKind, ParseError};
