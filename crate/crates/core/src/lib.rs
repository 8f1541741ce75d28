//! SCJ-Circus front end: parsing, static checks, translation to Circus Time
//! framework networks, a timed simulator and bounded refinement checks.

pub mod ast;
pub mod checker;
pub mod diag;
pub mod frameworks;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod refine;
pub mod sim;
pub mod translate;
