//! Command-line tools, JSON documents and seeded verification suites for
//! [`compensa_core`].

pub mod cli;
pub mod format;
pub mod suite;
