//! Machine-readable report envelope shared by all subcommands.
//!
//! Reports are a pure function of the command flags (seeds included, clocks
//! excluded), so identical invocations emit identical payloads. The schema
//! is stable: fields may be added, never removed or renamed, without a
//! version bump.

use serde::Serialize;

pub const TOOL_NAME: &str = "madtest";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Report<P: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub params: P,
    pub results: R,
}

impl<P: Serialize, R: Serialize> Report<P, R> {
    pub fn new(command: &'static str, params: P, results: R) -> Self {
        Report {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command,
            params,
            results,
        }
    }

    pub fn print_json(&self) {
        println!(
            "{}",
            serde_json::to_string_pretty(self).expect("report serializes")
        );
    }
}
