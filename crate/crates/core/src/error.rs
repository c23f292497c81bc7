use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no steady root on the {branch} branch (C1={c1}, C2={c2}, z={z})")]
    NoSteadyRoot {
        branch: &'static str,
        c1: f64,
        c2: f64,
        z: f64,
    },

    #[error("non-positive water height {value:e} in cell {cell} ({variable}) at t={time}")]
    Positivity {
        cell: usize,
        time: f64,
        variable: &'static str,
        value: f64,
    },

    #[error("singular banded system at row {row}")]
    SingularBand { row: usize },

    #[error("field layouts differ: {0}")]
    GridMismatch(String),

    #[error("config error{}: {message}", at_line(*line))]
    Config { line: usize, message: String },

    #[error("parse error{}: {message}", at_line(*line))]
    Parse { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach the simulation time to a positivity failure raised deep inside a substep.
    pub(crate) fn at_time(self, t: f64) -> Self {
        match self {
            Error::Positivity {
                cell,
                variable,
                value,
                ..
            } => Error::Positivity {
                cell,
                time: t,
                variable,
                value,
            },
            other => other,
        }
    }
}

/// Line numbers start at 1; 0 marks input that did not come from a file.
fn at_line(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" at line {line}")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
