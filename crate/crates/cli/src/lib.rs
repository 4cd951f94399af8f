//! Batch front end: an S-expression workspace of presentations,
//! morphisms, covers and models, plus the commands that run the kernel's
//! checks on them.

pub mod ast;
pub mod report;
pub mod session;

pub use ast::{parse_form, parse_source, Command, Form, COMMANDS};
pub use report::{Format, Outcome, Report, SessionReport};
pub use session::{CliError, Overrides, Workspace};
