//! Run configuration. One file drives every command; each command reads its
//! own section and ignores the others.

use std::path::Path;

use kds_core::flow::FlowConfig;
use kds_core::geometry::{FrameChoice, SpacetimeConfig};
use kds_core::qnm::{GridSpec, Potential, QnmConfig, Window};
use kds_core::trapping::{CensusConfig, ConvexityOptions, EscapeGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 1;

fn all_frames() -> Vec<FrameChoice> {
    vec![
        FrameChoice::EventHorizon,
        FrameChoice::Midpoint,
        FrameChoice::MuPrimeCritical,
        FrameChoice::CosmologicalHorizon,
    ]
}

fn default_spacetime() -> SpacetimeConfig {
    SpacetimeConfig {
        lambda: 0.06,
        a: 0.3,
        mass: 1.0,
        delta_request: kds_core::geometry::DEFAULT_DELTA_REQUEST,
        gauge: Default::default(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_spacetime")]
    pub spacetime: SpacetimeConfig,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trap: TrapSection,
    #[serde(default)]
    pub qnm: QnmSection,
    #[serde(default)]
    pub certify: CertifySection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spacetime: default_spacetime(),
            seed: None,
            trap: TrapSection::default(),
            qnm: QnmSection::default(),
            certify: CertifySection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContrastSection {
    pub count: usize,
    /// Relative radial offset from the photon orbits.
    pub offset: f64,
    pub max_parameter: f64,
}

impl Default for ContrastSection {
    fn default() -> Self {
        ContrastSection {
            count: 200,
            offset: 0.0,
            max_parameter: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSection {
    pub frames: Vec<FrameChoice>,
    /// Run the T-orthogonal census for each frame.
    pub orthogonal: bool,
    pub census: CensusConfig,
    pub contrast: Option<ContrastSection>,
}

impl Default for TrapSection {
    fn default() -> Self {
        TrapSection {
            frames: all_frames(),
            orthogonal: true,
            census: CensusConfig::default(),
            contrast: Some(ContrastSection::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QnmSection {
    pub frame: FrameChoice,
    pub m: i32,
    pub potential: Potential,
    pub grid: GridSpec,
    pub window: Option<Window>,
    /// Working regularity s for the admissibility annotation.
    pub regularity: f64,
    pub residual_tol: f64,
    pub doubling_tol: f64,
    pub check_doubling: bool,
    pub assemble_in_frame: bool,
    /// Also write eigenfunction values on the base grid as CSV.
    pub eigenfunctions: bool,
}

impl Default for QnmSection {
    fn default() -> Self {
        let base = QnmConfig::default();
        QnmSection {
            frame: FrameChoice::Midpoint,
            m: 0,
            potential: Potential::Zero,
            grid: base.grid,
            window: None,
            regularity: 0.5,
            residual_tol: base.residual_tol,
            doubling_tol: base.doubling_tol,
            check_doubling: base.check_doubling,
            assemble_in_frame: base.assemble_in_frame,
            eigenfunctions: false,
        }
    }
}

impl QnmSection {
    pub fn solver_config(&self) -> QnmConfig {
        QnmConfig {
            grid: self.grid,
            window: self.window,
            residual_tol: self.residual_tol,
            doubling_tol: self.doubling_tol,
            check_doubling: self.check_doubling,
            assemble_in_frame: self.assemble_in_frame,
            ..QnmConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifySection {
    /// Rotation values of the parameter matrix; Λ and m come from `spacetime`.
    pub a_values: Vec<f64>,
    pub frames: Vec<FrameChoice>,
    pub convexity_samples: usize,
    pub convexity: ConvexityOptions,
    /// Largest accepted relative mismatch between closed form and flow.
    pub convexity_tol: f64,
    pub escape_grid: EscapeGrid,
    pub radial_thetas: usize,
    pub ergo_nr: usize,
    pub ergo_ntheta: usize,
    pub degeneracy_samples: usize,
    /// Trajectories per (a, frame) followed for Σ± invariance.
    pub split_trajectories: usize,
    pub flow: FlowConfig,
}

impl Default for CertifySection {
    fn default() -> Self {
        CertifySection {
            a_values: vec![0.0, 0.15, 0.3],
            frames: all_frames(),
            convexity_samples: 1000,
            convexity: ConvexityOptions::standard(),
            convexity_tol: 1e-6,
            escape_grid: EscapeGrid::default(),
            radial_thetas: 32,
            ergo_nr: 400,
            ergo_ntheta: 64,
            degeneracy_samples: 4000,
            split_trajectories: 20,
            flow: FlowConfig::default(),
        }
    }
}

/// Either a bare configuration or a manifest from an earlier run, in which
/// case its configuration and seed are reused.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub seed: u64,
}

fn parse_error(path: &Path, e: serde_json::Error) -> CliError {
    // serde_json already appends "at line L column C" when it knows them.
    CliError::Usage(format!("{}: {e}", path.display()))
}

pub fn load(path: &Path, seed_override: Option<u64>) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| parse_error(path, e))?;
    let is_manifest = value.get("tool").is_some() && value.get("config").is_some();
    let (config, manifest_seed) = if is_manifest {
        let config: RunConfig =
            serde_json::from_value(value["config"].clone()).map_err(|e| parse_error(path, e))?;
        (config, value.get("seed").and_then(|s| s.as_u64()))
    } else {
        // Parse from text so errors keep their position.
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| parse_error(path, e))?;
        (config, None)
    };
    let seed = seed_override
        .or(manifest_seed)
        .or(config.seed)
        .unwrap_or(DEFAULT_SEED);
    Ok(LoadedConfig { config, seed })
}
