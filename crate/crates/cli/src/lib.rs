//! Definition-file front end for the Poisson engine: lexer, parser,
//! resolver, embedded example library, commands and reports.

pub mod ast;
pub mod commands;
pub mod error;
pub mod lexer;
pub mod library;
pub mod parser;
pub mod report;
pub mod resolve;

pub use commands::{run, Command, Options};
pub use error::{CliError, Diagnostic, Result};
pub use library::{load, Workspace};
pub use report::{Report, Verdict};

/// Exit code for errors in the input (files, names, arguments).
pub const EXIT_INPUT: i32 = 2;
/// Exit code when a zero test could not decide.
pub const EXIT_INCONCLUSIVE: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core {
                source: poisson_core::Error::Inconclusive { .. },
                ..
            } => EXIT_INCONCLUSIVE,
            _ => EXIT_INPUT,
        }
    }
}
