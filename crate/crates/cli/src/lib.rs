//! Expression language, emitters and command dispatch for the gwzw tools.

pub mod emit;
pub mod parse;
pub mod run;

pub use emit::{decode_json, emit_json, Format};
pub use parse::{parse_algebra, parse_expr};
pub use run::run_command;
