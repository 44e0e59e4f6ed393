//! Command-line front end for the `madplan` library: the `.mks`
//! structure-document format, DOT export, and the subcommand
//! implementations used by the `madplan` binary.

pub mod commands;
pub mod doc;
pub mod dot;
