//! Verification harness: subcommand reports and the acceptance criteria.

pub mod commands;
pub mod report;
pub mod suite;

use framelab::Error;

/// Exit code for a library error: 3 for oversized instances, 2 for bad input, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InstanceTooLarge(_) => 3,
        Error::InvalidParameter(_)
        | Error::UnsupportedSize(_)
        | Error::NotPrimePower(_)
        | Error::UnknownStrategy { .. }
        | Error::InvalidRadicalDim { .. } => 2,
        _ => 1,
    }
}
