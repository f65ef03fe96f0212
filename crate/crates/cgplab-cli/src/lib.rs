//! Command-line front end for the coherence generating power toolkit:
//! JSON in, JSON (or CSV) out, deterministic bytes for fixed inputs.

mod commands;
pub mod io;

pub use commands::run;
