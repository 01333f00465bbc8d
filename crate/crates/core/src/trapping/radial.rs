//! Σ± splitting of the characteristic set and the structure of the flow at
//! the conormal bundles of the horizons.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::flow::{gradient, integrate, solve_xi_theta, FlowConfig, PhasePoint, Trajectory};
use crate::geometry::metric::{starred_dual, T};
use crate::geometry::{Chart, GeometryError, Horizon, Spacetime, StationaryFrame};

use super::TrappingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaClass {
    Plus,
    Minus,
}

fn rho2(st: &Spacetime, r: f64, theta: f64) -> f64 {
    let a = st.params.a();
    let c = theta.cos();
    r * r + a * a * c * c
}

/// G*(dt*, ξ) for a starred-chart covector.
pub fn dt_pairing(st: &Spacetime, p: &PhasePoint) -> f64 {
    let g = gradient(st, Chart::Starred, p.r(), p.theta(), &p.xi);
    0.5 * g.dxi[0] / rho2(st, p.r(), p.theta())
}

/// Σ+ when G*(dt*, ξ) > 0, Σ− when < 0. BL points are converted first.
pub fn sigma_split(st: &Spacetime, p: &PhasePoint) -> Result<SigmaClass, TrappingError> {
    let p = st.to_starred(p)?;
    let v = dt_pairing(st, &p);
    let scale = p.scale().sqrt();
    if v.abs() < 1e-12 * scale {
        return Err(TrappingError::Degenerate { value: v, scale });
    }
    Ok(if v > 0.0 { SigmaClass::Plus } else { SigmaClass::Minus })
}

/// Number of recorded samples whose class differs from the first one.
pub fn sigma_changes(st: &Spacetime, traj: &Trajectory) -> Result<usize, TrappingError> {
    let mut first = None;
    let mut changes = 0;
    for s in &traj.samples {
        let class = sigma_split(st, &s.point)?;
        match first {
            None => first = Some(class),
            Some(c) if c != class => changes += 1,
            _ => {}
        }
    }
    Ok(changes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyScan {
    pub samples: usize,
    /// Covectors with G*(dt*, ξ) = 0 and G*(ξ, ξ) ≤ 0.
    pub null_hits: usize,
    /// min over samples of G*(ξ, ξ) / |ξ|² on the G*-orthogonal complement of dt*.
    pub min_ratio: f64,
    /// max over samples of G*(dt*, dt*).
    pub max_dt_norm: f64,
}

/// Random base points over the starred chart interval and random covectors
/// projected onto the G*-orthogonal complement of dt*; a null covector with
/// G*(dt*, ξ) = 0 would show up as a non-positive G*(ξ, ξ).
pub fn sigma_degeneracy_scan(st: &Spacetime, seed: u64, count: usize, pole_guard: f64) -> DegeneracyScan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = st.horizons.chart_interval();
    let zmax = pole_guard.cos();
    let mut out = DegeneracyScan {
        samples: count,
        null_hits: 0,
        min_ratio: f64::INFINITY,
        max_dt_norm: f64::NEG_INFINITY,
    };
    for _ in 0..count {
        let r = lo + (hi - lo) * rng.random::<f64>();
        let theta = (zmax * (2.0 * rng.random::<f64>() - 1.0)).acos();
        let g = starred_dual(st, r, theta);
        let mut xi = [0.0; 4];
        for v in &mut xi {
            *v = 2.0 * rng.random::<f64>() - 1.0;
        }
        let pair = |u: &[f64; 4], w: &[f64; 4]| -> f64 {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += g[i][j] * u[i] * w[j];
                }
            }
            s
        };
        let mut dt = [0.0; 4];
        dt[T] = 1.0;
        let tt = pair(&dt, &dt);
        out.max_dt_norm = out.max_dt_norm.max(tt);
        let k = pair(&dt, &xi) / tt;
        xi[T] -= k;
        let norm2: f64 = xi.iter().map(|v| v * v).sum();
        let ratio = pair(&xi, &xi) / norm2;
        if ratio <= 0.0 {
            out.null_hits += 1;
        }
        out.min_ratio = out.min_ratio.min(ratio);
    }
    out
}

/// Fate of short integrations seeded just past a horizon near its conormal
/// bundle, one per sign of ξ_r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchFlow {
    pub xi_r_sign: f64,
    /// Distance |r − r_h| + max(|ξ_t|, |ξ_φ|, |ξ_θ|)/|ξ_r| at the start and end.
    pub distance_start: f64,
    pub distance_end: f64,
    pub parameter: f64,
    /// Recedes from the conormal bundle in forward parameter.
    pub source: bool,
    /// Expected source/sink role from sign(ξ_r μ′(r_h)).
    pub expected_source: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPointReport {
    pub horizon: Horizon,
    pub horizon_radius: f64,
    pub frame_r0: f64,
    pub frame_on_horizon: bool,
    pub theta_samples: usize,
    /// max |p_σ| / ξ_r² on N*{r = r_h}.
    pub symbol_residual: f64,
    /// max abs over all Hamiltonian components except ∂_{ξ_r}, per ξ_r².
    pub transverse_max: f64,
    /// max |−∂_r p_σ − μ′(r_h) ξ_r²/ρ²| / ξ_r².
    pub coefficient_mismatch: f64,
    pub branches: Vec<BranchFlow>,
}

impl RadialPointReport {
    pub fn passed(&self) -> bool {
        let flow_ok = self.branches.iter().all(|b| b.source == b.expected_source);
        let exact_ok = !self.frame_on_horizon
            || (self.transverse_max < 1e-12 && self.coefficient_mismatch < 1e-10);
        self.symbol_residual < 1e-12 && exact_ok && flow_ok
    }
}

/// The spectral-family symbol p_σ = −G* with ξ(T) = 0 imposed, as a function
/// of (r, θ; ξ_r, ξ_φ, ξ_θ). Returns p and the components of its Hamiltonian
/// vector field (∂_{ξ_r}, ∂_{ξ_φ}, ∂_{ξ_θ}, −∂_r, −∂_θ).
fn symbol_and_field(st: &Spacetime, omega: f64, r: f64, theta: f64, xi_r: f64) -> (f64, [f64; 5]) {
    let xi = [0.0, xi_r, 0.0, 0.0];
    let g = gradient(st, Chart::Starred, r, theta, &xi);
    let rho2 = rho2(st, r, theta);
    let a = st.params.a();
    let drho2_dr = 2.0 * r;
    let drho2_dth = -2.0 * a * a * theta.sin() * theta.cos();
    // p = −q/ρ²; quotient rule for the base derivatives.
    let p = -g.q / rho2;
    let d_xr = -g.dxi[1] / rho2;
    let d_xp = -(g.dxi[2] - omega * g.dxi[0]) / rho2;
    let d_xth = -g.dxi[3] / rho2;
    let d_r = -(g.dx[1] * rho2 - g.q * drho2_dr) / (rho2 * rho2);
    let d_th = -(g.dx[3] * rho2 - g.q * drho2_dth) / (rho2 * rho2);
    (p, [d_xr, d_xp, d_xth, -d_r, -d_th])
}

/// Conormal checks at the given horizon over `thetas`, plus the source/sink
/// flow test. With `require_exact`, a frame off the horizon is an error.
pub fn radial_point_check(
    st: &Spacetime,
    frame: &StationaryFrame,
    horizon: Horizon,
    thetas: &[f64],
    require_exact: bool,
) -> Result<RadialPointReport, TrappingError> {
    let rh = st.horizons.radius(horizon);
    let on = (frame.r0() - rh).abs() <= 1e-14 * rh;
    if require_exact && !on {
        return Err(GeometryError::FrameMismatch {
            r0: frame.r0(),
            expected: rh,
        }
        .into());
    }
    if thetas.is_empty() {
        return Err(TrappingError::InvalidInput("no theta samples".into()));
    }
    let w = frame.omega();
    let dmu = st.params.mu_prime(rh);
    let mut report = RadialPointReport {
        horizon,
        horizon_radius: rh,
        frame_r0: frame.r0(),
        frame_on_horizon: on,
        theta_samples: thetas.len(),
        symbol_residual: 0.0,
        transverse_max: 0.0,
        coefficient_mismatch: 0.0,
        branches: Vec::new(),
    };
    for &theta in thetas {
        for xi_r in [1.0, -1.0, 3.5] {
            let (p, h) = symbol_and_field(st, w, rh, theta, xi_r);
            let x2 = xi_r * xi_r;
            report.symbol_residual = report.symbol_residual.max(p.abs() / x2);
            let trans = h[..3].iter().chain(std::iter::once(&h[4])).fold(0.0f64, |m, v| m.max(v.abs()));
            report.transverse_max = report.transverse_max.max(trans / x2);
            let expected = dmu * x2 / rho2(st, rh, theta);
            report.coefficient_mismatch = report.coefficient_mismatch.max((h[3] - expected).abs() / x2);
        }
    }
    for sign in [1.0, -1.0] {
        report.branches.push(branch_flow(st, w, rh, sign)?);
    }
    Ok(report)
}

/// Seed just beyond the horizon (where μ < 0), ξ_r = ±1, small ξ_φ with
/// ξ(T) = 0, ξ_θ from q = 0; integrate forward for s = 0.5/|μ′(r_h)|.
fn branch_flow(st: &Spacetime, omega: f64, rh: f64, sign: f64) -> Result<BranchFlow, TrappingError> {
    let dmu = st.params.mu_prime(rh);
    // μ′ > 0 at r_e: μ < 0 just inside; μ′ < 0 at r_c: μ < 0 just outside.
    let r = rh - 1e-4 * dmu.signum();
    let theta = 1.1;
    let xi_phi = 1e-6;
    let xi = [-omega * xi_phi, sign, xi_phi, 0.0];
    let xth = solve_xi_theta(st, Chart::Starred, r, theta, &xi).ok_or(
        TrappingError::InvalidInput(format!("no null seed near the conormal at r = {r}")),
    )?;
    let start = PhasePoint::new(Chart::Starred, [0.0, r, 0.0, theta], [xi[0], sign, xi_phi, xth]);
    let s = 0.5 / dmu.abs();
    let cfg = FlowConfig {
        max_parameter: s,
        cross_horizons: true,
        record_every: 0,
        ..FlowConfig::default()
    };
    let traj = integrate(st, &start, &cfg)?;
    let dist = |p: &PhasePoint| -> f64 {
        let ang = p.xi[0].abs().max(p.xi[2].abs()).max(p.xi[3].abs());
        (p.r() - rh).abs() + ang / p.xi[1].abs()
    };
    let end = st.to_starred(&traj.end)?;
    let (d0, d1) = (dist(&start), dist(&end));
    Ok(BranchFlow {
        xi_r_sign: sign,
        distance_start: d0,
        distance_end: d1,
        parameter: traj.s_end,
        source: d1 > d0,
        expected_source: sign * dmu > 0.0,
    })
}
