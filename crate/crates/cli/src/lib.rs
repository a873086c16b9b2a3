//! Library side of the `ea` command-line tool: the `.ea` document format,
//! reports, DOT export and command dispatch.

pub mod commands;
pub mod dot;
pub mod dsl;
pub mod report;
