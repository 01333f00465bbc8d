//! Metric components in the Boyer–Lindquist chart (t, r, φ, θ) and in the
//! horizon-penetrating chart (t*, r, φ*, θ). Index order is always
//! (time, r, azimuth, θ).

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::{GeometryError, Spacetime, SpacetimeParams};

pub const T: usize = 0;
pub const R: usize = 1;
pub const PHI: usize = 2;
pub const TH: usize = 3;

pub type Sym4 = [[f64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    BoyerLindquist,
    Starred,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSample {
    pub chart: Chart,
    pub point: [f64; 4],
    pub g: Sym4,
    pub g_inv: Sym4,
    /// √|det g| from the numerically computed determinant.
    pub sqrt_det: f64,
}

impl MetricSample {
    pub fn determinant(&self) -> f64 {
        to_matrix(&self.g).determinant()
    }

    /// Count of (negative, positive) eigenvalues of g.
    pub fn signature(&self) -> (usize, usize) {
        let eig = to_matrix(&self.g).symmetric_eigen();
        let neg = eig.eigenvalues.iter().filter(|&&v| v < 0.0).count();
        let pos = eig.eigenvalues.iter().filter(|&&v| v > 0.0).count();
        (neg, pos)
    }

    /// max |(g g⁻¹ − I)_ij|.
    pub fn duality_defect(&self) -> f64 {
        let prod = to_matrix(&self.g) * to_matrix(&self.g_inv);
        (prod - Matrix4::identity()).abs().max()
    }
}

pub fn to_matrix(m: &Sym4) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| m[i][j])
}

/// Common θ-dependent factors: (ρ², sin²θ, c(θ)).
fn angular(params: &SpacetimeParams, r: f64, theta: f64) -> (f64, f64, f64) {
    let ct = theta.cos();
    let st = theta.sin();
    let a2 = params.a() * params.a();
    (r * r + a2 * ct * ct, st * st, params.c_theta(theta))
}

/// The (t, φ) block shared by both charts.
fn stationary_block(params: &SpacetimeParams, r: f64, theta: f64, g: &mut Sym4) {
    let a = params.a();
    let b2 = params.b() * params.b();
    let (rho2, s2, c) = angular(params, r, theta);
    let mu = params.mu(r);
    let ra = r * r + a * a;
    let k = b2 * rho2;
    g[T][T] = (a * a * c * s2 - mu) / k;
    g[T][PHI] = a * s2 * (mu - c * ra) / k;
    g[PHI][T] = g[T][PHI];
    g[PHI][PHI] = s2 * (c * ra * ra - mu * a * a * s2) / k;
    g[TH][TH] = rho2 / c;
}

pub fn bl_metric(params: &SpacetimeParams, r: f64, theta: f64) -> Sym4 {
    let mut g = [[0.0; 4]; 4];
    stationary_block(params, r, theta, &mut g);
    let (rho2, _, _) = angular(params, r, theta);
    g[R][R] = rho2 / params.mu(r);
    g
}

/// Inverse metric ρ⁻² [μ ∂_r² + b²/(c sin²θ)(a sin²θ ∂_t + ∂_φ)² − b²/μ((r²+a²)∂_t + a∂_φ)² + c ∂_θ²].
pub fn bl_dual(params: &SpacetimeParams, r: f64, theta: f64) -> Sym4 {
    dual_with(params, r, theta, 0.0, 1.0 / params.mu(r))
}

pub fn starred_metric(st: &Spacetime, r: f64, theta: f64) -> Sym4 {
    let params = &st.params;
    let mut g = [[0.0; 4]; 4];
    stationary_block(params, r, theta, &mut g);
    let (rho2, s2, _) = angular(params, r, theta);
    let f = st.gauge.f(r);
    let b = params.b();
    g[R][R] = rho2 * st.gauge.h(r);
    g[T][R] = -f / b;
    g[R][T] = g[T][R];
    g[PHI][R] = params.a() * s2 * f / b;
    g[R][PHI] = g[PHI][R];
    g
}

pub fn starred_dual(st: &Spacetime, r: f64, theta: f64) -> Sym4 {
    dual_with(&st.params, r, theta, st.gauge.f(r), st.gauge.h(r))
}

/// Dual metric for gauge value `f` and `h` = (1 − f²)/μ. The Boyer–Lindquist
/// chart is the case f = 0, h = 1/μ.
fn dual_with(params: &SpacetimeParams, r: f64, theta: f64, f: f64, h: f64) -> Sym4 {
    let a = params.a();
    let b = params.b();
    let b2 = b * b;
    let (rho2, s2, c) = angular(params, r, theta);
    let ra = r * r + a * a;
    let mut g = [[0.0; 4]; 4];
    g[R][R] = params.mu(r) / rho2;
    g[T][R] = -b * f * ra / rho2;
    g[R][T] = g[T][R];
    g[PHI][R] = -b * f * a / rho2;
    g[R][PHI] = g[PHI][R];
    g[T][T] = (-b2 * h * ra * ra + b2 * a * a * s2 / c) / rho2;
    g[T][PHI] = (-b2 * h * a * ra + b2 * a / c) / rho2;
    g[PHI][T] = g[T][PHI];
    g[PHI][PHI] = (-b2 * h * a * a + b2 / (c * s2)) / rho2;
    g[TH][TH] = c / rho2;
    g
}

/// √|det g| = ρ² sinθ / b², identical in both charts.
pub fn sqrt_det_closed_form(params: &SpacetimeParams, r: f64, theta: f64) -> f64 {
    let (rho2, _, _) = angular(params, r, theta);
    rho2 * theta.sin().abs() / (params.b() * params.b())
}

impl Spacetime {
    pub fn metric_at(&self, chart: Chart, point: [f64; 4]) -> Result<MetricSample, GeometryError> {
        let r = point[R];
        let theta = point[TH];
        self.check_chart(chart, r, theta)?;
        let (g, g_inv) = match chart {
            Chart::BoyerLindquist => (bl_metric(&self.params, r, theta), bl_dual(&self.params, r, theta)),
            Chart::Starred => (starred_metric(self, r, theta), starred_dual(self, r, theta)),
        };
        let det = to_matrix(&g).determinant();
        Ok(MetricSample {
            chart,
            point,
            g,
            g_inv,
            sqrt_det: det.abs().sqrt(),
        })
    }

    pub fn check_chart(&self, chart: Chart, r: f64, theta: f64) -> Result<(), GeometryError> {
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(GeometryError::ChartDomain(format!(
                "theta = {theta} is on or beyond a pole"
            )));
        }
        let (lo, hi) = match chart {
            Chart::BoyerLindquist => (self.horizons.r_e, self.horizons.r_c),
            Chart::Starred => self.horizons.chart_interval(),
        };
        if r > lo && r < hi {
            Ok(())
        } else {
            Err(GeometryError::ChartDomain(format!(
                "r = {r} outside the {chart:?} chart ({lo}, {hi})"
            )))
        }
    }
}
