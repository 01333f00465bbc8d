use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const TOOL: &str = "kds";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub passed: bool,
}

/// Record of one invocation. Feeding it back through `--config` repeats the
/// run; everything except the two timestamps is then reproduced exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: RunConfig,
    pub started_at: String,
    pub finished_at: String,
    pub exit_code: i32,
    pub verdicts: Vec<Verdict>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    /// The manifest with both timestamps blanked, for comparisons.
    pub fn without_timestamps(&self) -> RunManifest {
        RunManifest {
            started_at: String::new(),
            finished_at: String::new(),
            ..self.clone()
        }
    }
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
