//! Config schema and experiment drivers behind the `onebit-amp` binary,
//! exposed as a library so integration tests can call the runners directly.

pub mod config;
pub mod runner;
