//! Subextremal Kerr–de Sitter spacetimes: closed-form geometry, the null
//! bicharacteristic flow, certificates for the absence of trapping among
//! null geodesics orthogonal to a stationary Killing field, and
//! quasinormal-mode spectra computed with respect to that field.

pub mod flow;
pub mod geometry;
pub mod qnm;
pub mod trapping;
