//! Text-format front end for the cofinite graph toolkit: a small definition
//! language with positioned diagnostics, a canonical printer, JSON and DOT
//! exporters, and the command dispatcher behind the `cofinite` binary.

pub mod commands;
pub mod diag;
pub mod document;
pub mod dot;
pub mod json;
pub mod lexer;
pub mod parser;
pub mod printer;
