//! Null bicharacteristics of the rescaled Hamiltonian q in T*M.

pub mod hamiltonian;
mod integrator;
mod sampling;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Chart, GeometryError, Spacetime};

pub use hamiltonian::{carter, gradient, phase_velocity, solve_xi_r, solve_xi_theta, Gradient};
pub use integrator::{
    integrate, Band, DriftReport, FlowConfig, TerminalStatus, Trajectory, TrajectorySample,
};
pub use sampling::{orthogonal_null_at, sample_orthogonal_null, Branch, SampleSet, SampledPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("initial datum is not null: |q| = {q:e} exceeds {tol:e}")]
    NotNull { q: f64, tol: f64 },
    #[error("step size underflow at s = {s}, r = {r} (h = {h:e})")]
    StepFailure { s: f64, r: f64, h: f64 },
    #[error("step budget of {0} exhausted")]
    StepBudget(usize),
    #[error("no null covector with the imposed constraint exists at r = {r}, theta = {theta}")]
    EmptyCharacteristic { r: f64, theta: f64 },
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
}

/// A covector over a base point: x = (t, r, φ, θ) in the given chart (t*, φ*
/// in the starred chart) and ξ = (ξ_t, ξ_r, ξ_φ, ξ_θ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub chart: Chart,
    pub x: [f64; 4],
    pub xi: [f64; 4],
}

impl PhasePoint {
    pub fn new(chart: Chart, x: [f64; 4], xi: [f64; 4]) -> Self {
        PhasePoint { chart, x, xi }
    }

    pub fn t(&self) -> f64 {
        self.x[0]
    }

    pub fn r(&self) -> f64 {
        self.x[1]
    }

    pub fn phi(&self) -> f64 {
        self.x[2]
    }

    pub fn theta(&self) -> f64 {
        self.x[3]
    }

    /// max_i ξ_i², the normalisation for null and drift tolerances.
    pub fn scale(&self) -> f64 {
        self.xi.iter().map(|v| v * v).fold(0.0, f64::max)
    }

    pub fn state(&self) -> [f64; 8] {
        let mut y = [0.0; 8];
        y[..4].copy_from_slice(&self.x);
        y[4..].copy_from_slice(&self.xi);
        y
    }

    pub fn from_state(chart: Chart, y: &[f64; 8]) -> Self {
        PhasePoint {
            chart,
            x: [y[0], y[1], y[2], y[3]],
            xi: [y[4], y[5], y[6], y[7]],
        }
    }

    /// Same point with φ reduced into [0, 2π).
    pub fn reduced(mut self) -> Self {
        self.x[2] = self.x[2].rem_euclid(std::f64::consts::TAU);
        self
    }

    pub fn negated(mut self) -> Self {
        for v in &mut self.xi {
            *v = -*v;
        }
        self
    }
}

/// The quantities conserved along H_q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedSet {
    pub q_value: f64,
    pub xi_t: f64,
    pub xi_phi: f64,
    pub carter: f64,
}

impl ConservedSet {
    pub fn at(st: &Spacetime, p: &PhasePoint) -> Self {
        ConservedSet {
            q_value: gradient(st, p.chart, p.r(), p.theta(), &p.xi).q,
            xi_t: p.xi[0],
            xi_phi: p.xi[2],
            carter: carter(st, p.theta(), &p.xi),
        }
    }

    /// Largest member-wise difference, divided by `scale`.
    pub fn drift_from(&self, other: &ConservedSet, scale: f64) -> DriftReport {
        DriftReport {
            q_value: (self.q_value - other.q_value).abs() / scale,
            xi_t: (self.xi_t - other.xi_t).abs() / scale.sqrt(),
            xi_phi: (self.xi_phi - other.xi_phi).abs() / scale.sqrt(),
            carter: (self.carter - other.carter).abs() / scale,
        }
    }
}

impl Spacetime {
    /// BL point to the starred chart: t* = t − Φ(r), φ* = φ − Ψ(r),
    /// ξ*_r = ξ_r + Φ′ξ_t + Ψ′ξ_φ.
    pub fn to_starred(&self, p: &PhasePoint) -> Result<PhasePoint, FlowError> {
        if p.chart == Chart::Starred {
            return Ok(*p);
        }
        let r = p.r();
        let g = &self.gauge;
        let mut out = *p;
        out.chart = Chart::Starred;
        out.x[0] = p.x[0] - g.phi(r)?;
        out.x[2] = p.x[2] - g.psi(r)?;
        out.xi[1] = p.xi[1] + g.phi_prime(r) * p.xi[0] + g.psi_prime(r) * p.xi[2];
        Ok(out)
    }

    pub fn to_boyer_lindquist(&self, p: &PhasePoint) -> Result<PhasePoint, FlowError> {
        if p.chart == Chart::BoyerLindquist {
            return Ok(*p);
        }
        let r = p.r();
        self.check_chart(Chart::BoyerLindquist, r, p.theta())?;
        let g = &self.gauge;
        let mut out = *p;
        out.chart = Chart::BoyerLindquist;
        out.x[0] = p.x[0] + g.phi(r)?;
        out.x[2] = p.x[2] + g.psi(r)?;
        out.xi[1] = p.xi[1] - g.phi_prime(r) * p.xi[0] - g.psi_prime(r) * p.xi[2];
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_change_preserves_q_and_round_trips() {
        let st = Spacetime::reference(0.3).unwrap();
        let p = PhasePoint::new(Chart::BoyerLindquist, [1.0, 2.6, 0.4, 1.1], [-0.1, 0.8, 1.0, 0.3]);
        let s = st.to_starred(&p).unwrap();
        let q0 = st.hamiltonian_q(&p).unwrap();
        let q1 = st.hamiltonian_q(&s).unwrap();
        assert!((q0 - q1).abs() < 1e-12 * q0.abs().max(1.0));
        let back = st.to_boyer_lindquist(&s).unwrap();
        for k in 0..4 {
            assert!((back.x[k] - p.x[k]).abs() < 1e-12);
            assert!((back.xi[k] - p.xi[k]).abs() < 1e-12);
        }
    }
}
