use std::fmt;

use patchforce::Error;

/// Exit codes: 0 success, 1 usage or configuration error, 2 numerical
/// non-convergence, 3 I/O error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError { code: EXIT_NUMERICAL, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { code: EXIT_IO, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Quadrature { .. } | Error::Matsubara { .. } | Error::OutOfRange(_) => EXIT_NUMERICAL,
            Error::Io { .. } => EXIT_IO,
            Error::Invalid { .. } | Error::Realizations { .. } | Error::UnknownStrategy { .. } | Error::Parse { .. } => {
                EXIT_USAGE
            }
        };
        CliError { code, message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
