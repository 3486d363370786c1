//! Library half of the `knads` binary: run configuration and the subcommands.

pub mod commands;
pub mod config;

pub use commands::{Format, Output};
pub use config::RunConfig;

/// Process exit status for a finished command.
pub fn exit_code(r: &knads_core::Result<Output>) -> i32 {
    match r {
        Ok(_) => 0,
        Err(e) if e.is_validation() => 2,
        Err(_) => 3,
    }
}
