//! Surface syntax for signatures: a lexer and parser for the concrete
//! `.elf` notation, an elaborator that reconstructs implicit arguments and
//! produces kernel declarations, and a printer that round-trips elaborated
//! signatures back to text.

pub mod ast;
pub mod elaborate;
pub mod lex;
pub mod parse;
pub mod print;

pub use ast::{ModeDecl, OrderSpec, Polarity, SDecl, STerm, SourceFile, TotalDecl};
pub use elaborate::{
    elaborate_file, elaborate_query, resolve_total, ElabError, Elaborated, ExplicitOrder, Query,
    ResolvedTotal,
};
pub use lex::Span;
pub use parse::{parse_file, parse_term, ParseError};
pub use print::{print_signature, PrintError, PrintStyle};

use thiserror::Error;

/// Any failure while turning source text into a checked signature.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum SurfaceError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Elab(#[from] ElabError),
}

/// Parse and elaborate a whole source file in one step.
pub fn load_signature(text: &str) -> Result<Elaborated, SurfaceError> {
    let file = parse_file(text)?;
    Ok(elaborate_file(&file)?)
}
