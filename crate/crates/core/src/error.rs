use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside an operation's domain or violating a type invariant.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    /// Quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: {context} (last partial sums {previous:e}, {last:e}; error estimate {error:e})")]
    Quadrature {
        context: String,
        previous: f64,
        last: f64,
        error: f64,
    },

    /// Matsubara sum truncated before the stopping rule was met.
    #[error("Matsubara sum not converged after {terms} terms (last term {last_term:e}, total {total:e})")]
    Matsubara {
        terms: usize,
        last_term: f64,
        total: f64,
    },

    /// A curve was evaluated outside the range where it is defined.
    #[error("prediction unavailable at {} point(s): {}", .0.len(), format_points(.0))]
    OutOfRange(Vec<(usize, f64)>),

    #[error("insufficient realizations: have {have}, need about {need} for the requested precision")]
    Realizations { have: usize, need: usize },

    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

fn format_points(points: &[(usize, f64)]) -> String {
    points
        .iter()
        .map(|(i, d)| format!("#{i} (D = {d:e} m)"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            reason: err.to_string(),
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
