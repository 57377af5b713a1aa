//! Command-line front end for `polynotope-core`.

pub mod args;
mod commands;
pub mod emit;

pub use commands::execute;

/// Exit status for an error: `2` for a numeric blow-up, `1` otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<polynotope_core::Error>() {
        Some(polynotope_core::Error::NumericAbort { .. }) => 2,
        _ => 1,
    }
}
