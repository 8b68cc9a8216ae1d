//! Semantics workbench for higher-order logic programs with negation:
//! well-founded and perfect models, and extensional equality of their
//! predicate denotations over finite Herbrand universes.

pub mod ast;
pub mod parser;
pub mod typecheck;
pub mod grounder;
pub mod interp;
pub mod wfs;
pub mod perfect;
pub mod ext;
pub mod demos;
#[cfg(feature = "testkit")]
pub mod testkit;

use thiserror::Error;

/// Any failure on the way from source text to a model.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ast(#[from] ast::AstError),
    #[error(transparent)]
    Parse(#[from] parser::ParseError),
    #[error(transparent)]
    Check(#[from] typecheck::CheckErrors),
    #[error(transparent)]
    Ground(#[from] grounder::GroundError),
    #[error(transparent)]
    Interp(#[from] interp::InterpError),
    #[error(transparent)]
    Perfect(#[from] perfect::PerfectError),
    #[error(transparent)]
    Ext(#[from] ext::ExtError),
}
