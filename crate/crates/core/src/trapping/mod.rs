//! Certificates for the dynamics of T-orthogonal null bicharacteristics.

pub mod census;
pub mod convexity;
pub mod escape;
pub mod radial;
pub mod radial_fn;

use serde::Serialize;
use thiserror::Error;

use crate::flow::FlowError;
use crate::geometry::{GeometryError, StationaryFrame};

pub use census::{contrast_scan, photon_orbit_seeds, trapping_scan, Census, CensusConfig};
pub use convexity::{
    convexity_check, hq2_r, hq2_r_flow, hq2_r_turning, hq_r, turning_point_samples,
    ConvexityOptions, ConvexityReport,
};
pub use escape::{
    escape_constant_search, escape_monotonicity, EscapeCertificate, EscapeFunction, EscapeGrid,
    C_MAX, C_START,
};
pub use radial::{
    dt_pairing, radial_point_check, sigma_changes, sigma_degeneracy_scan, sigma_split,
    BranchFlow, DegeneracyScan, RadialPointReport, SigmaClass,
};
pub use radial_fn::{f_critical_scan, f_function, f_prime, x_term};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrappingError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid sample: {0}")]
    SampleInvalid(String),
    #[error("no escape constant up to C = {c_max:e} certifies the grid")]
    SearchExhausted { c_max: f64 },
    #[error("G*(dt*, xi) = {value:e} is degenerate at scale {scale:e}")]
    Degenerate { value: f64, scale: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Momentum constants (ξ_t, ξ_φ) with ξ(T) = ξ_t + ω ξ_φ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalityDatum {
    pub frame: StationaryFrame,
    pub xi_t: f64,
    pub xi_phi: f64,
}

impl OrthogonalityDatum {
    pub fn new(frame: StationaryFrame, xi_phi: f64) -> Self {
        OrthogonalityDatum {
            frame,
            xi_t: -frame.omega() * xi_phi,
            xi_phi,
        }
    }
}
