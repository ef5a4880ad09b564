//! Prover-side tooling: register and log in against a verifier, derive key
//! material offline, and run completeness/soundness experiments.

pub mod client;
pub mod commands;
pub mod selftest;
pub mod simulate;

pub use client::{run_remote_session, Client, ClientError, RemoteVerdict};
pub use commands::{exit, CliError};
