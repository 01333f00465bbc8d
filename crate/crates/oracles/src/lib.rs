//! Reference computations that share no code with `kds-core`.
//!
//! `radial` solves the separated wave equation on Schwarzschild–de Sitter by
//! Frobenius series plus shooting; `metric` rebuilds the starred metric from
//! Boyer–Lindquist form by an explicit coordinate change.

pub mod metric;
pub mod radial;
