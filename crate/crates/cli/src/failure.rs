//! Mapping from failures to process exit codes.

use mindisk_core::Error;

pub const OK: u8 = 0;
/// A verification ran and at least one check failed.
pub const CHECK_FAILED: u8 = 1;
pub const NON_CONVERGENCE: u8 = 2;
pub const USAGE: u8 = 64;
pub const HYPOTHESIS: u8 = 65;
/// Output could not be written.
pub const IO: u8 = 74;

/// Malformed command line, configuration or input file.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Usage(pub String);

impl Usage {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }

    pub fn wrap(e: anyhow::Error) -> anyhow::Error {
        Usage(format!("{e:#}")).into()
    }
}

/// Failure while writing outputs.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct OutputError(pub String);

pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return USAGE;
    }
    if err.downcast_ref::<OutputError>().is_some() {
        return IO;
    }
    match err.downcast_ref::<Error>() {
        Some(e) => core_code(e),
        None => USAGE,
    }
}

fn core_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. } | Error::EigenNonConvergence { .. } | Error::LinearSolve(_) | Error::Numeric(_) => {
            NON_CONVERGENCE
        }
        Error::Hypothesis(_)
        | Error::CurvatureTooSmall { .. }
        | Error::BallEscape { .. }
        | Error::NonGraph { .. }
        | Error::NoOverlap(_)
        | Error::UndefinedHandedness { .. }
        | Error::RadiusMismatch { .. }
        | Error::FitUndefined(_) => HYPOTHESIS,
        _ => USAGE,
    }
}
