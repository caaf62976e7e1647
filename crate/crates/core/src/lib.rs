//! Interpreter toolkit for a linear-algebraic λ-calculus: exact scalars,
//! terms modulo AC, the restricted rewrite system, a parser and printer,
//! a prelude of quantum encodings and randomized checking harnesses.

pub mod harness;
pub mod parser;
pub mod rewrite;
pub mod scalar;
pub mod stdlib;
pub mod term;
