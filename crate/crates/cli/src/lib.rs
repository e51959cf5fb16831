//! Command line and HTTP front end shared by the `splitfuzz` binary and its
//! integration tests.

pub mod args;
pub mod commands;
pub mod run;
pub mod service;

/// Bad input from the user; the binary exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const OUT_DIR_ENV: &str = "SPLITFUZZ_OUT_DIR";
