//! Escape function E = exp(C (r − r0)²) H_q r on the T-orthogonal
//! characteristic set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flow::{gradient, Band, PhasePoint, Trajectory};
use crate::geometry::{Chart, Spacetime, StationaryFrame};

use super::convexity::{hq2_r, hq_r};
use super::TrappingError;

/// Largest constant tried by the doubling search.
pub const C_MAX: f64 = 1_099_511_627_776.0; // 2^40
/// First constant tried by the doubling search.
pub const C_START: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeFunction {
    pub c: f64,
    pub r0: f64,
}

impl EscapeFunction {
    pub fn value(&self, st: &Spacetime, p: &PhasePoint) -> f64 {
        let d = p.r() - self.r0;
        (self.c * d * d).exp() * hq_r(st, p)
    }

    /// H_q E = exp(C (r − r0)²) (2C (r − r0) (H_q r)² + H_q² r).
    pub fn derivative(&self, st: &Spacetime, p: &PhasePoint) -> f64 {
        let d = p.r() - self.r0;
        let v = hq_r(st, p);
        (self.c * d * d).exp() * self.bracket(d, v, hq2_r(st, p))
    }

    fn bracket(&self, d: f64, hr: f64, h2r: f64) -> f64 {
        2.0 * self.c * d * hr * hr + h2r
    }
}

/// Tensor grid over the T-orthogonal characteristic set. With ξ_φ = 1 and
/// ξ_t = −ω, q = 0 reads μξ_r² + cξ_θ² = W(r, θ); cells with W > 0 carry the
/// ellipse ξ_r = √(W/μ) cos ψ, ξ_θ = √(W/c) sin ψ. The bracket in H_q E is
/// even in ξ, so ξ_φ = −1 adds nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeGrid {
    pub nr: usize,
    pub ntheta: usize,
    pub npsi: usize,
}

impl Default for EscapeGrid {
    fn default() -> Self {
        EscapeGrid {
            nr: 200,
            ntheta: 32,
            npsi: 32,
        }
    }
}

impl EscapeGrid {
    /// Ten times the radial resolution.
    pub fn refined(&self) -> Self {
        EscapeGrid {
            nr: 10 * self.nr,
            ..*self
        }
    }
}

/// Radial intervals inside the band where T is spacelike for some θ; the
/// T-orthogonal characteristic set lives over these and is empty elsewhere.
pub fn spacelike_intervals(st: &Spacetime, frame: &StationaryFrame, band: Band, pole_guard: f64) -> Vec<(f64, f64)> {
    const NR: usize = 4000;
    const NTH: usize = 64;
    let spacelike = |r: f64| {
        (0..=NTH).any(|j| {
            let th = pole_guard + j as f64 * (std::f64::consts::PI - 2.0 * pole_guard) / NTH as f64;
            st.t_norm(frame, r, th) > 0.0
        })
    };
    let dr = (band.hi - band.lo) / NR as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<f64> = None;
    for i in 0..=NR {
        let r = band.lo + i as f64 * dr;
        match (spacelike(r), open) {
            (true, None) => open = Some((r - dr).max(band.lo)),
            (false, Some(lo)) => {
                out.push((lo, r));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(lo) = open {
        out.push((lo, band.hi));
    }
    out
}

/// (r − r0, H_q r, H_q² r) over the grid.
fn grid_values(
    st: &Spacetime,
    frame: &StationaryFrame,
    grid: &EscapeGrid,
    band: Band,
    pole_guard: f64,
) -> Vec<(f64, f64, f64)> {
    let w = frame.omega();
    let th_lo = pole_guard;
    let th_hi = std::f64::consts::PI - pole_guard;
    // nr cells spread over the spacelike intervals in proportion to length.
    let ivs = spacelike_intervals(st, frame, band, pole_guard);
    let total: f64 = ivs.iter().map(|(lo, hi)| hi - lo).sum();
    let radii: Vec<f64> = ivs
        .iter()
        .flat_map(|&(lo, hi)| {
            let n = ((grid.nr as f64 * (hi - lo) / total).round() as usize).max(1);
            (0..n).map(move |i| lo + (i as f64 + 0.5) * (hi - lo) / n as f64)
        })
        .collect();
    radii
        .into_par_iter()
        .flat_map_iter(|r| {
            let mu = st.params.mu(r);
            let mut rows = Vec::new();
            for j in 0..grid.ntheta {
                let theta = th_lo + (j as f64 + 0.5) * (th_hi - th_lo) / grid.ntheta as f64;
                let xi = [-w, 0.0, 1.0, 0.0];
                let wv = -gradient(st, Chart::BoyerLindquist, r, theta, &xi).q;
                if wv <= 0.0 {
                    continue;
                }
                let c = st.params.c_theta(theta);
                for k in 0..grid.npsi {
                    let psi = std::f64::consts::TAU * (k as f64 + 0.5) / grid.npsi as f64;
                    let xr = (wv / mu).sqrt() * psi.cos();
                    let xth = (wv / c).sqrt() * psi.sin();
                    let pt = PhasePoint::new(Chart::BoyerLindquist, [0.0, r, 0.0, theta], [-w, xr, 1.0, xth]);
                    rows.push((r - frame.r0(), hq_r(st, &pt), hq2_r(st, &pt)));
                }
            }
            rows
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeCertificate {
    pub function: EscapeFunction,
    pub grid: EscapeGrid,
    pub grid_points: usize,
    pub doublings: u32,
    pub refined_points: usize,
    pub refined_violations: usize,
}

fn violations(e: &EscapeFunction, rows: &[(f64, f64, f64)]) -> usize {
    rows.iter()
        .filter(|(d, hr, h2r)| {
            let v = e.bracket(*d, *hr, *h2r);
            !(v != 0.0 && v.signum() == d.signum())
        })
        .count()
}

/// Smallest C = C_START · 2^k for which H_q E has the sign of (r − r0) at
/// every grid point, followed by a re-check on the refined grid.
pub fn escape_constant_search(
    st: &Spacetime,
    frame: &StationaryFrame,
    grid: &EscapeGrid,
    band: Band,
    pole_guard: f64,
) -> Result<EscapeCertificate, TrappingError> {
    let rows = grid_values(st, frame, grid, band, pole_guard);
    let mut c = C_START;
    let mut doublings = 0;
    loop {
        let e = EscapeFunction { c, r0: frame.r0() };
        if violations(&e, &rows) == 0 {
            let fine = grid_values(st, frame, &grid.refined(), band, pole_guard);
            return Ok(EscapeCertificate {
                function: e,
                grid: *grid,
                grid_points: rows.len(),
                doublings,
                refined_points: fine.len(),
                refined_violations: violations(&e, &fine),
            });
        }
        if c >= C_MAX {
            return Err(TrappingError::SearchExhausted { c_max: C_MAX });
        }
        c *= 2.0;
        doublings += 1;
    }
}

/// Along a recorded trajectory: sign changes of H_q E and of E.
pub fn escape_monotonicity(st: &Spacetime, e: &EscapeFunction, traj: &Trajectory) -> (usize, usize) {
    let mut d_changes = 0;
    let mut e_changes = 0;
    let mut last: Option<(f64, f64)> = None;
    for s in &traj.samples {
        let Ok(p) = st.to_boyer_lindquist(&s.point) else { continue };
        let (ev, dv) = (e.value(st, &p), e.derivative(st, &p));
        if let Some((le, ld)) = last {
            if le * ev < 0.0 {
                e_changes += 1;
            }
            if ld * dv < 0.0 {
                d_changes += 1;
            }
        }
        last = Some((ev, dv));
    }
    (d_changes, e_changes)
}
