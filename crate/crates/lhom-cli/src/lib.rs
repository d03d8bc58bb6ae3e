//! File formats shared between the `lhom` binary and its test suites.

pub mod format;
