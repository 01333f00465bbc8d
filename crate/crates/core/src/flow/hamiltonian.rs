//! The conformally rescaled Hamiltonian q = ρ² G(ξ, ξ) and its Hamilton
//! equations, in either chart.
//!
//! Both charts share one formula,
//!
//! q = μ ξ_r² − 2b f X ξ_r − b² h X² + b² Y² / (c sin²θ) + c ξ_θ²,
//!
//! with X = (r² + a²) ξ_t + a ξ_φ and Y = a sin²θ ξ_t + ξ_φ. The
//! Boyer–Lindquist chart is f = 0, h = 1/μ; the starred chart uses the gauge
//! f and h = (1 − f²)/μ.

use crate::geometry::{Chart, Spacetime};

use super::{FlowError, PhasePoint};

/// Radial gauge data (f, f′, h, h′) at one radius.
#[derive(Debug, Clone, Copy)]
struct RadialGauge {
    f: f64,
    df: f64,
    h: f64,
    dh: f64,
}

fn radial_gauge(st: &Spacetime, chart: Chart, r: f64) -> RadialGauge {
    match chart {
        Chart::BoyerLindquist => {
            let mu = st.params.mu(r);
            RadialGauge {
                f: 0.0,
                df: 0.0,
                h: 1.0 / mu,
                dh: -st.params.mu_prime(r) / (mu * mu),
            }
        }
        Chart::Starred => RadialGauge {
            f: st.gauge.f(r),
            df: st.gauge.f_prime(r),
            h: st.gauge.h(r),
            dh: st.gauge.h_prime(r),
        },
    }
}

/// All first partial derivatives of q at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub q: f64,
    /// ∂q/∂(t, r, φ, θ)
    pub dx: [f64; 4],
    /// ∂q/∂(ξ_t, ξ_r, ξ_φ, ξ_θ)
    pub dxi: [f64; 4],
}

/// q and its gradient; no domain checks.
pub fn gradient(st: &Spacetime, chart: Chart, r: f64, theta: f64, xi: &[f64; 4]) -> Gradient {
    let p = &st.params;
    let a = p.a();
    let b = p.b();
    let b2 = b * b;
    let alpha = p.alpha();
    let [xt, xr, xp, xth] = *xi;

    let (sn, cs) = theta.sin_cos();
    let s2 = sn * sn;
    let ds2 = 2.0 * sn * cs;
    let c = 1.0 + alpha * cs * cs;
    let dc = -alpha * ds2;
    let cs2 = c * s2;
    let dcs2 = dc * s2 + c * ds2;

    let mu = p.mu(r);
    let dmu = p.mu_prime(r);
    let g = radial_gauge(st, chart, r);
    let ra = r * r + a * a;
    let x = ra * xt + a * xp;
    let dx_dr = 2.0 * r * xt;
    let y = a * s2 * xt + xp;
    let dy_dth = a * ds2 * xt;

    let q = mu * xr * xr - 2.0 * b * g.f * x * xr - b2 * g.h * x * x + b2 * y * y / cs2 + c * xth * xth;

    let dq_dr = dmu * xr * xr
        - 2.0 * b * (g.df * x + g.f * dx_dr) * xr
        - b2 * (g.dh * x * x + 2.0 * g.h * x * dx_dr);
    let dq_dth = b2 * (2.0 * y * dy_dth / cs2 - y * y * dcs2 / (cs2 * cs2)) + dc * xth * xth;

    let dq_dxt = -2.0 * b * g.f * ra * xr - 2.0 * b2 * g.h * x * ra + 2.0 * b2 * a * y / c;
    let dq_dxr = 2.0 * mu * xr - 2.0 * b * g.f * x;
    let dq_dxp = -2.0 * b * g.f * a * xr - 2.0 * b2 * g.h * x * a + 2.0 * b2 * y / cs2;
    let dq_dxth = 2.0 * c * xth;

    Gradient {
        q,
        dx: [0.0, dq_dr, 0.0, dq_dth],
        dxi: [dq_dxt, dq_dxr, dq_dxp, dq_dxth],
    }
}

/// Carter-type constant K = c ξ_θ² + b² Y² / (c sin²θ), the θ-separated part of q.
pub fn carter(st: &Spacetime, theta: f64, xi: &[f64; 4]) -> f64 {
    let p = &st.params;
    let (sn, _) = theta.sin_cos();
    let s2 = sn * sn;
    let c = p.c_theta(theta);
    let y = p.a() * s2 * xi[0] + xi[2];
    c * xi[3] * xi[3] + p.b() * p.b() * y * y / (c * s2)
}

/// The radial part q − K = μ ξ_r² − 2b f X ξ_r − b² h X².
pub fn radial_part(st: &Spacetime, chart: Chart, r: f64, xi: &[f64; 4]) -> (f64, f64, f64) {
    let p = &st.params;
    let a = p.a();
    let g = radial_gauge(st, chart, r);
    let x = (r * r + a * a) * xi[0] + a * xi[2];
    let b = p.b();
    (p.mu(r), -2.0 * b * g.f * x, -b * b * g.h * x * x)
}

impl Spacetime {
    pub fn hamiltonian_q(&self, point: &PhasePoint) -> Result<f64, FlowError> {
        self.check_chart(point.chart, point.r(), point.theta())?;
        Ok(gradient(self, point.chart, point.r(), point.theta(), &point.xi).q)
    }

    /// Phase velocity (ṫ, ṙ, φ̇, θ̇, ξ̇_t, ξ̇_r, ξ̇_φ, ξ̇_θ) of H_q.
    pub fn hamilton_equations(&self, point: &PhasePoint) -> Result<[f64; 8], FlowError> {
        self.check_chart(point.chart, point.r(), point.theta())?;
        Ok(phase_velocity(self, point.chart, &point.state()))
    }
}

/// H_q applied to a packed state (x, ξ).
pub fn phase_velocity(st: &Spacetime, chart: Chart, y: &[f64; 8]) -> [f64; 8] {
    let xi = [y[4], y[5], y[6], y[7]];
    let g = gradient(st, chart, y[1], y[3], &xi);
    [
        g.dxi[0], g.dxi[1], g.dxi[2], g.dxi[3], -g.dx[0], -g.dx[1], -g.dx[2], -g.dx[3],
    ]
}

/// Solves q = 0 for ξ_r with the other momenta fixed. Returns the two
/// roots (+ branch first) or None when no real root exists.
pub fn solve_xi_r(st: &Spacetime, chart: Chart, r: f64, theta: f64, xi: &[f64; 4]) -> Option<(f64, f64)> {
    let (quad, lin, rad0) = radial_part(st, chart, r, xi);
    let k = carter(st, theta, xi);
    let c0 = rad0 + k;
    if quad == 0.0 {
        if lin == 0.0 {
            return None;
        }
        let v = -c0 / lin;
        return Some((v, v));
    }
    let disc = lin * lin - 4.0 * quad * c0;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // numerically stable pair
    let t = -0.5 * (lin + lin.signum() * sq);
    let (r1, r2) = if t == 0.0 {
        (0.0, 0.0)
    } else {
        (t / quad, c0 / t)
    };
    Some((r1.max(r2), r1.min(r2)))
}

/// Solves q = 0 for ξ_θ (non-negative root) with the other momenta fixed.
pub fn solve_xi_theta(st: &Spacetime, chart: Chart, r: f64, theta: f64, xi: &[f64; 4]) -> Option<f64> {
    let mut probe = *xi;
    probe[3] = 0.0;
    let rest = gradient(st, chart, r, theta, &probe).q;
    let c = st.params.c_theta(theta);
    let v = -rest / c;
    (v >= 0.0).then(|| v.sqrt())
}
