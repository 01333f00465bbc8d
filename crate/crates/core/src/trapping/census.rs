//! Escape censuses: T-orthogonal null data, and non-orthogonal contrast data
//! seeded on spherical photon orbits.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flow::{
    integrate, sample_orthogonal_null, solve_xi_theta, Band, DriftReport, FlowConfig, PhasePoint,
    TerminalStatus,
};
use crate::geometry::{Chart, Spacetime, StationaryFrame};

use super::radial_fn::f_critical_scan;
use super::TrappingError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CensusConfig {
    pub count: usize,
    pub flow: FlowConfig,
    /// Base-point budget for the rejection sampler, per requested point.
    pub attempts_per_point: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            count: 1000,
            flow: FlowConfig {
                record_every: 0,
                ..FlowConfig::default()
            },
            attempts_per_point: 20_000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub requested: usize,
    pub integrated: usize,
    pub escaped_low: usize,
    pub escaped_high: usize,
    pub trapped: usize,
    pub pole_guard: usize,
    pub errors: usize,
    pub first_error: Option<String>,
    pub sampler_attempts: usize,
    pub sampler_rejections: usize,
    /// No admissible initial data exist (the sampler found none).
    pub vacuous: bool,
    pub max_drift: DriftReport,
    /// Largest |s| at which an escaping trajectory left the band.
    pub max_escape_parameter: f64,
    pub band: Option<Band>,
    pub max_parameter: f64,
}

impl Census {
    fn tally(&mut self, outcomes: Vec<Result<(TerminalStatus, f64, DriftReport), String>>) {
        for o in outcomes {
            match o {
                Ok((status, s_end, drift)) => {
                    self.integrated += 1;
                    match status {
                        TerminalStatus::ExitedLow => self.escaped_low += 1,
                        TerminalStatus::ExitedHigh => self.escaped_high += 1,
                        TerminalStatus::MaxParameter => self.trapped += 1,
                        TerminalStatus::PoleGuard => self.pole_guard += 1,
                    }
                    if status.escaped() {
                        self.max_escape_parameter = self.max_escape_parameter.max(s_end.abs());
                    }
                    self.max_drift.q_value = self.max_drift.q_value.max(drift.q_value);
                    self.max_drift.xi_t = self.max_drift.xi_t.max(drift.xi_t);
                    self.max_drift.xi_phi = self.max_drift.xi_phi.max(drift.xi_phi);
                    self.max_drift.carter = self.max_drift.carter.max(drift.carter);
                }
                Err(e) => {
                    self.errors += 1;
                    if self.first_error.is_none() {
                        self.first_error = Some(e);
                    }
                }
            }
        }
    }

    /// Every integrated trajectory left the band and nothing failed.
    pub fn all_escaped(&self) -> bool {
        self.trapped == 0 && self.pole_guard == 0 && self.errors == 0
    }
}

fn run(st: &Spacetime, points: &[PhasePoint], flow: &FlowConfig) -> Vec<Result<(TerminalStatus, f64, DriftReport), String>> {
    points
        .par_iter()
        .map(|p| {
            integrate(st, p, flow)
                .map(|t| (t.status, t.s_end, t.max_drift))
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// Integrates `count` sampled T-orthogonal null points.
pub fn trapping_scan(
    st: &Spacetime,
    frame: &StationaryFrame,
    seed: u64,
    config: &CensusConfig,
) -> Result<Census, TrappingError> {
    if config.count == 0 {
        return Err(TrappingError::InvalidInput("count must be at least 1".into()));
    }
    let band = config.flow.band(st);
    let set = sample_orthogonal_null(
        st,
        frame,
        seed,
        config.count,
        band,
        config.flow.pole_guard,
        config.attempts_per_point.saturating_mul(config.count),
    )?;
    let points: Vec<PhasePoint> = set.points.iter().map(|s| s.point).collect();
    let mut census = Census {
        requested: config.count,
        sampler_attempts: set.attempts,
        sampler_rejections: set.rejected,
        vacuous: points.is_empty(),
        band: Some(band),
        max_parameter: config.flow.max_parameter,
        ..Census::default()
    };
    census.tally(run(st, &points, &config.flow));
    Ok(census)
}

/// Non-orthogonal null data on (or a relative `offset` away from) spherical
/// photon orbits: ξ_t = −1, ξ_φ uniform in [−φ_max, φ_max], r at the
/// critical point of F, ξ_r = 0 and ξ_θ from q = 0,
/// all rescaled to max |ξ_i| = 1.
pub fn photon_orbit_seeds(
    st: &Spacetime,
    seed: u64,
    count: usize,
    offset: f64,
    pole_guard: f64,
) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = &st.params;
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let xt = -1.0;
        let xp = 3.0 * (2.0 * rng.random::<f64>() - 1.0);
        let crit = f_critical_scan(p, xt, xp, 1000);
        if crit.len() != 1 {
            continue;
        }
        let r = crit[0] * (1.0 + offset * (2.0 * rng.random::<f64>() - 1.0));
        let zmax = pole_guard.cos() * 0.9;
        let theta = (zmax * (2.0 * rng.random::<f64>() - 1.0)).acos();
        let xi = [xt, 0.0, xp, 0.0];
        let Some(xth) = solve_xi_theta(st, Chart::BoyerLindquist, r, theta, &xi) else {
            continue;
        };
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        // q is homogeneous of degree 2, so rescaling to max |ξ_i| = 1 keeps it null.
        let k = 1.0 / xth.max(1.0);
        out.push(PhasePoint::new(
            Chart::BoyerLindquist,
            [0.0, r, 0.0, theta],
            [k * xt, 0.0, k * xp, k * sign * xth],
        ));
    }
    out
}

/// Contrast census over photon-orbit seeds; expected to find trapped members.
pub fn contrast_scan(
    st: &Spacetime,
    seed: u64,
    count: usize,
    offset: f64,
    flow: &FlowConfig,
) -> Result<Census, TrappingError> {
    if count == 0 {
        return Err(TrappingError::InvalidInput("count must be at least 1".into()));
    }
    let points = photon_orbit_seeds(st, seed, count, offset, flow.pole_guard);
    let mut census = Census {
        requested: count,
        sampler_attempts: points.len(),
        vacuous: points.is_empty(),
        band: Some(flow.band(st)),
        max_parameter: flow.max_parameter,
        ..Census::default()
    };
    census.tally(run(st, &points, flow));
    Ok(census)
}
