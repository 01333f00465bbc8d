pub mod certify;
pub mod params;
pub mod qnm;
pub mod trap;

use kds_core::geometry::{FrameChoice, Spacetime, SpacetimeConfig};

use crate::error::CliError;
use crate::manifest::Verdict;

/// What a command hands back besides the files it wrote.
#[derive(Debug, Default)]
pub struct CommandReport {
    pub verdicts: Vec<Verdict>,
    /// Lines for standard output.
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
    /// Set when the command finished but the run must exit nonzero.
    pub failure: Option<CliError>,
}

impl CommandReport {
    pub fn verdict(&mut self, claim: impl Into<String>, passed: bool) {
        self.verdicts.push(Verdict {
            claim: claim.into(),
            passed,
        });
    }

    pub fn failed_claims(&self) -> Vec<String> {
        self.verdicts
            .iter()
            .filter(|v| !v.passed)
            .map(|v| v.claim.clone())
            .collect()
    }
}

pub fn frame_label(choice: &FrameChoice) -> String {
    match choice {
        FrameChoice::EventHorizon => "event_horizon".into(),
        FrameChoice::CosmologicalHorizon => "cosmological_horizon".into(),
        FrameChoice::Midpoint => "midpoint".into(),
        FrameChoice::MuPrimeCritical => "mu_prime_critical".into(),
        FrameChoice::Radius(r) => format!("radius_{r}"),
    }
}

pub fn build_spacetime(config: &SpacetimeConfig) -> Result<Spacetime, CliError> {
    Ok(config.build()?)
}

pub fn with_rotation(config: &SpacetimeConfig, a: f64) -> SpacetimeConfig {
    SpacetimeConfig {
        a,
        ..config.clone()
    }
}
