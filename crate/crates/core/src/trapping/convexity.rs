//! Second derivative of r along H_q at radial turning points.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flow::{gradient, integrate, solve_xi_theta, Band, FlowConfig, PhasePoint};
use crate::geometry::{Chart, Spacetime, StationaryFrame};

use super::radial_fn::f_prime;
use super::TrappingError;

/// H_q r = 2μ ξ_r in the Boyer–Lindquist chart.
pub fn hq_r(st: &Spacetime, p: &PhasePoint) -> f64 {
    2.0 * st.params.mu(p.r()) * p.xi[1]
}

/// H_q² r = 2μ′ξ_r H_q r − 2μ ∂_r q, valid for any BL covector.
pub fn hq2_r(st: &Spacetime, p: &PhasePoint) -> f64 {
    let r = p.r();
    let mu = st.params.mu(r);
    let g = gradient(st, Chart::BoyerLindquist, r, p.theta(), &p.xi);
    4.0 * mu * st.params.mu_prime(r) * p.xi[1] * p.xi[1] - 2.0 * mu * g.dx[1]
}

/// H_q² r = 2μ b² F′(r) at a turning point ξ_r = 0.
pub fn hq2_r_turning(st: &Spacetime, p: &PhasePoint) -> f64 {
    let b = st.params.b();
    2.0 * st.params.mu(p.r()) * b * b * f_prime(&st.params, p.xi[0], p.xi[2], p.r())
}

/// T-orthogonal characteristic points with ξ_r = 0: ξ_φ = ±1, ξ_t = −ωξ_φ,
/// ξ_θ (random sign) solved from q = 0; base uniform in (r, cos θ, φ) over
/// the band. Points with no real ξ_θ are skipped.
pub fn turning_point_samples(
    st: &Spacetime,
    frame: &StationaryFrame,
    seed: u64,
    count: usize,
    band: Band,
    pole_guard: f64,
    max_attempts: usize,
) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = frame.omega();
    let zmax = pole_guard.cos();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < max_attempts {
        attempts += 1;
        let r = band.lo + (band.hi - band.lo) * rng.random::<f64>();
        let theta = (zmax * (2.0 * rng.random::<f64>() - 1.0)).acos();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let sign_phi = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let sign_theta = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let xi = [-w * sign_phi, 0.0, sign_phi, 0.0];
        let Some(xth) = solve_xi_theta(st, Chart::BoyerLindquist, r, theta, &xi) else {
            continue;
        };
        // Normalise to max |ξ_i| = 1, then re-solve so q = 0 holds exactly.
        let k = 1.0 / xth.max(1.0).max(w);
        let xi = [-w * sign_phi * k, 0.0, sign_phi * k, 0.0];
        let Some(xth) = solve_xi_theta(st, Chart::BoyerLindquist, r, theta, &xi) else {
            continue;
        };
        out.push(PhasePoint::new(
            Chart::BoyerLindquist,
            [0.0, r, phi, theta],
            [xi[0], 0.0, xi[2], sign_theta * xth],
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvexityOptions {
    /// Flow step for the central differences of r(s).
    pub fd_step: f64,
    /// Fault injection: evaluate the closed form with −μ.
    pub corrupt_mu_sign: bool,
}

impl ConvexityOptions {
    pub fn standard() -> Self {
        ConvexityOptions {
            fd_step: 2e-2,
            corrupt_mu_sign: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub samples: usize,
    pub sign_violations: usize,
    /// max |closed − flow| / max(|closed|, |flow|).
    pub max_relative_mismatch: f64,
    pub min_abs_closed_form: f64,
    pub frame_r0: f64,
}

impl ConvexityReport {
    pub fn passed(&self, mismatch_tol: f64) -> bool {
        self.samples > 0 && self.sign_violations == 0 && self.max_relative_mismatch < mismatch_tol
    }
}

/// r(s) at s = ±η, ±η/2 by short high-accuracy integrations; returns the
/// Richardson-extrapolated second difference.
pub fn hq2_r_flow(st: &Spacetime, p: &PhasePoint, eta: f64) -> Result<f64, TrappingError> {
    let r_at = |s: f64| -> Result<f64, TrappingError> {
        let cfg = FlowConfig {
            rtol: 1e-13,
            atol: 1e-13,
            max_parameter: s.abs(),
            reverse: s < 0.0,
            record_every: 0,
            drift_tol: 1e-6,
            epsilon: 1e-10,
            handoff: false,
            ..FlowConfig::default()
        };
        let t = integrate(st, p, &cfg)?;
        if t.status != crate::flow::TerminalStatus::MaxParameter {
            return Err(TrappingError::SampleInvalid(format!(
                "flow left the band within s = {s} of r = {}",
                p.r()
            )));
        }
        Ok(t.end.r())
    };
    let r0 = p.r();
    let d = |h: f64| -> Result<f64, TrappingError> { Ok((r_at(h)? - 2.0 * r0 + r_at(-h)?) / (h * h)) };
    let coarse = d(eta)?;
    let fine = d(0.5 * eta)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Sign of H_q² r against sign(r − r0) and closed form against the flow.
pub fn convexity_check(
    st: &Spacetime,
    frame: &StationaryFrame,
    samples: &[PhasePoint],
    options: &ConvexityOptions,
) -> Result<ConvexityReport, TrappingError> {
    let w = frame.omega();
    for p in samples {
        if p.chart != Chart::BoyerLindquist || p.xi[1] != 0.0 {
            return Err(TrappingError::SampleInvalid(format!(
                "sample at r = {} is not a BL turning point",
                p.r()
            )));
        }
        let defect = (p.xi[0] + w * p.xi[2]).abs();
        if defect > 1e-12 * p.scale().sqrt() {
            return Err(TrappingError::SampleInvalid(format!(
                "orthogonality violated by {defect:e} at r = {}",
                p.r()
            )));
        }
        if p.r() == frame.r0() {
            return Err(TrappingError::SampleInvalid("sample sits on r0".into()));
        }
    }
    let eta = if options.fd_step > 0.0 { options.fd_step } else { 2e-2 };
    let rows: Vec<Result<(f64, f64, f64), TrappingError>> = samples
        .par_iter()
        .map(|p| {
            let mut closed = hq2_r_turning(st, p);
            if options.corrupt_mu_sign {
                closed = -closed;
            }
            // Keep the excursion ½|H_q²r|η² well inside the distance to the horizons.
            let dist = (p.r() - st.horizons.r_e).min(st.horizons.r_c - p.r());
            let h2 = hq2_r_turning(st, p).abs().max(1e-300);
            let eta = eta.min((0.01 * dist / h2).sqrt());
            let flow = hq2_r_flow(st, p, eta)?;
            Ok((p.r() - frame.r0(), closed, flow))
        })
        .collect();
    let mut report = ConvexityReport {
        samples: samples.len(),
        sign_violations: 0,
        max_relative_mismatch: 0.0,
        min_abs_closed_form: f64::INFINITY,
        frame_r0: frame.r0(),
    };
    for row in rows {
        let (offset, closed, flow) = row?;
        if closed.signum() != offset.signum() || closed == 0.0 {
            report.sign_violations += 1;
        }
        let rel = (closed - flow).abs() / closed.abs().max(flow.abs()).max(f64::MIN_POSITIVE);
        report.max_relative_mismatch = report.max_relative_mismatch.max(rel);
        report.min_abs_closed_form = report.min_abs_closed_form.min(closed.abs());
    }
    Ok(report)
}
