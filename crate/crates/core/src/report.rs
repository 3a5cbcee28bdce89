//! Machine-readable run reports.

use serde::Serialize;
use std::time::Duration;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExitStatus {
    Pass,
    Parse,
    InvalidAlgebra,
    VerificationFailed,
    CatalogRegression,
    FamilyMismatch,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::Parse => 1,
            ExitStatus::InvalidAlgebra => 2,
            ExitStatus::VerificationFailed => 3,
            ExitStatus::CatalogRegression => 4,
            ExitStatus::FamilyMismatch => 5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub version: &'static str,
    pub seed: u64,
    pub status: ExitStatus,
    pub result: serde_json::Value,
    /// The only field that varies between identical runs.
    pub wall_time_ms: u128,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: u64, status: ExitStatus, result: serde_json::Value) -> Self {
        RunReport { command, version: VERSION, seed, status, result, wall_time_ms: 0 }
    }

    pub fn with_time(mut self, elapsed: Duration) -> Self {
        self.wall_time_ms = elapsed.as_millis();
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.status.code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The report with the wall time zeroed, for reproducibility checks.
    pub fn canonical(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v["wall_time_ms"] = 0.into();
        v
    }
}
