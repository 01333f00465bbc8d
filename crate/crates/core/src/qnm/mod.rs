//! Quasinormal-mode spectra of P = □_g + A with respect to the stationary
//! Killing field T, computed on a horizon-penetrating slice.

pub mod grid;
pub mod operator;
pub mod pencil;
pub mod solve;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use grid::{AngularGrid, ChebyshevGrid, Parity};
pub use operator::{assemble_wave_operator, Potential, WaveCoefficients, WaveOperatorSpec};
pub use pencil::{discretize, GridSpec, OperatorPencil};
pub use solve::{
    build_pencil, companion_eigen, mode_residual, polish, shift_frame, solve_qnm, Mode, QnmConfig,
    QnmResult, Window,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QnmError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("grid too coarse: nr = {nr}, ntheta = {ntheta} (need nr >= 8 and an even ntheta >= 4)")]
    GridTooCoarse { nr: usize, ntheta: usize },
    #[error("invalid operator specification: {0}")]
    InvalidSpec(String),
    #[error("eigensolve failed: {0}")]
    EigensolveFailure(String),
    #[error("no converged modes in the window")]
    EmptyWindow,
    #[error("zero or non-finite vector")]
    ZeroVector,
}
