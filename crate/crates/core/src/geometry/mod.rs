//! Closed-form subextremal Kerr–de Sitter geometry.

mod ergo;
mod frame;
mod gauge;
mod horizons;
pub mod metric;
mod params;
pub mod quadrature;
pub mod roots;
mod threshold;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ergo::{ergoregion_map, CausalLabel, ErgoregionMap, TimelikeCollar, NULL_THRESHOLD};
pub use frame::{t_norm, t_norm_radial_derivative, FrameChoice, StationaryFrame};
pub use gauge::{GaugeConfig, GaugeFunction, GaugeKind, PHI_QUADRATURE_TOL};
pub use horizons::{
    horizon_structure, radial_level_set_is_spacelike, surface_gravity, Horizon, HorizonStructure,
    MAX_DELTA_HALVINGS,
};
pub use metric::{Chart, MetricSample};
pub use params::{mu_eval, mu_polynomial, RawParams, SpacetimeParams, ROOT_SEPARATION_TOL};
pub use threshold::{beta_threshold, fredholm_window};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not subextremal: mu has {real_roots} distinct real roots (discriminant {discriminant:e}); {detail}")]
    NotSubextremal {
        real_roots: usize,
        discriminant: f64,
        detail: String,
    },
    #[error("no spacelike chart boundary found: requested delta {requested}, last tried {last_tried}")]
    DeltaSelection { requested: f64, last_tried: f64 },
    #[error("gauge rejected: {0}")]
    GaugeInvalid(String),
    #[error("outside chart domain: {0}")]
    ChartDomain(String),
    #[error("frame radius r0 = {r0} is outside [{r_e}, {r_c}]")]
    FrameOutOfRange { r0: f64, r_e: f64, r_c: f64 },
    #[error("frame radius r0 = {r0} does not sit on the requested horizon r = {expected}")]
    FrameMismatch { r0: f64, expected: f64 },
}

/// Default requested half-width of the chart extension past each horizon.
pub const DEFAULT_DELTA_REQUEST: f64 = 0.1;

/// Parameter block `{lambda, a, mass, delta_request, gauge}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeConfig {
    pub lambda: f64,
    pub a: f64,
    pub mass: f64,
    #[serde(default = "default_delta")]
    pub delta_request: f64,
    #[serde(default)]
    pub gauge: GaugeConfig,
}

fn default_delta() -> f64 {
    DEFAULT_DELTA_REQUEST
}

impl SpacetimeConfig {
    pub fn build(&self) -> Result<Spacetime, GeometryError> {
        let params = SpacetimeParams::new(self.lambda, self.a, self.mass)?;
        Spacetime::new(params, self.delta_request, self.gauge.clone())
    }
}

/// Parameters, horizons and gauge bundled together; immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Spacetime {
    pub params: SpacetimeParams,
    pub horizons: HorizonStructure,
    pub gauge: GaugeFunction,
}

impl Spacetime {
    pub fn new(
        params: SpacetimeParams,
        delta_request: f64,
        gauge: GaugeConfig,
    ) -> Result<Self, GeometryError> {
        let horizons = horizon_structure(&params, delta_request)?;
        let gauge = GaugeFunction::new(&params, &horizons, gauge)?;
        Ok(Spacetime {
            params,
            horizons,
            gauge,
        })
    }

    /// Λ = 0.06, m = 1 with the given rotation, affine gauge, δ = 0.1.
    pub fn reference(a: f64) -> Result<Self, GeometryError> {
        Spacetime::new(
            SpacetimeParams::new(0.06, a, 1.0)?,
            DEFAULT_DELTA_REQUEST,
            GaugeConfig::default(),
        )
    }

    pub fn frame(&self, choice: FrameChoice) -> Result<StationaryFrame, GeometryError> {
        StationaryFrame::from_choice(&self.params, choice)
    }

    pub fn t_norm(&self, frame: &StationaryFrame, r: f64, theta: f64) -> f64 {
        t_norm(&self.params, frame, r, theta)
    }

    pub fn beta(&self) -> f64 {
        beta_threshold(&self.params, &self.horizons)
    }

    pub fn ergoregion_map(&self, frame: &StationaryFrame, nr: usize, ntheta: usize) -> ErgoregionMap {
        ergoregion_map(&self.params, &self.horizons, frame, nr, ntheta)
    }
}
