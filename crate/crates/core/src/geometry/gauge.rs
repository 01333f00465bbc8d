//! The radial gauge function f that defines the horizon-penetrating chart
//! t* = t − Φ(r), φ* = φ − Ψ(r).
//!
//! Profiles are written in the normalised coordinate s = (r − r_e)/(r_c − r_e)
//! as f = 2s − 1 + s(1 − s) p(s) for a polynomial p (p = 0 is the affine
//! default). This pins f(r_e) = −1 and f(r_c) = 1 exactly, and factoring
//! 1 − f² against μ gives the closed form
//!
//! (1 − f²)/μ = 3 (2 + (1 − s)p)(2 − s p) / (Λ (r_c − r_e)² (r − r₋)(r − r_C)),
//!
//! which is analytic across both horizons.

use serde::{Deserialize, Serialize};

use super::quadrature;
use super::{GeometryError, HorizonStructure, SpacetimeParams};

/// Quadrature tolerance for Φ and Ψ.
pub const PHI_QUADRATURE_TOL: f64 = 1.0e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeKind {
    Affine,
    Polynomial,
}

/// JSON form `{kind, coefficients}`; coefficients are those of p(s),
/// lowest degree first, and are ignored for the affine profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeConfig {
    pub kind: GaugeKind,
    #[serde(default)]
    pub coefficients: Vec<f64>,
}

impl Default for GaugeConfig {
    fn default() -> Self {
        GaugeConfig {
            kind: GaugeKind::Affine,
            coefficients: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction {
    config: GaugeConfig,
    p: Vec<f64>,
    r_e: f64,
    r_c: f64,
    r_neg: f64,
    r_cauchy: f64,
    params: SpacetimeParams,
}

impl GaugeFunction {
    /// Builds the gauge and checks that every {t* = const} slice of the chart
    /// is spacelike.
    pub fn new(
        params: &SpacetimeParams,
        horizons: &HorizonStructure,
        config: GaugeConfig,
    ) -> Result<Self, GeometryError> {
        if config.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::GaugeInvalid(
                "non-finite gauge coefficient".into(),
            ));
        }
        let gauge = GaugeFunction::unchecked(params, horizons, config);
        gauge.validate_spacelike_slices(horizons)?;
        Ok(gauge)
    }

    /// Skips the slice validation.
    pub fn unchecked(
        params: &SpacetimeParams,
        horizons: &HorizonStructure,
        config: GaugeConfig,
    ) -> Self {
        let p = match config.kind {
            GaugeKind::Affine => Vec::new(),
            GaugeKind::Polynomial => config.coefficients.clone(),
        };
        GaugeFunction {
            config,
            p,
            r_e: horizons.r_e,
            r_c: horizons.r_c,
            r_neg: horizons.r_neg,
            r_cauchy: horizons.r_cauchy,
            params: *params,
        }
    }

    pub fn config(&self) -> &GaugeConfig {
        &self.config
    }

    fn width(&self) -> f64 {
        self.r_c - self.r_e
    }

    fn s(&self, r: f64) -> f64 {
        (r - self.r_e) / self.width()
    }

    fn p_and_derivative(&self, s: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for &c in self.p.iter().rev() {
            d = d * s + v;
            v = v * s + c;
        }
        (v, d)
    }

    pub fn f(&self, r: f64) -> f64 {
        let s = self.s(r);
        let (p, _) = self.p_and_derivative(s);
        2.0 * s - 1.0 + s * (1.0 - s) * p
    }

    pub fn f_prime(&self, r: f64) -> f64 {
        let s = self.s(r);
        let (p, dp) = self.p_and_derivative(s);
        (2.0 + (1.0 - 2.0 * s) * p + s * (1.0 - s) * dp) / self.width()
    }

    fn numerator(&self, s: f64) -> (f64, f64) {
        let (p, dp) = self.p_and_derivative(s);
        let u = 2.0 + (1.0 - s) * p;
        let v = 2.0 - s * p;
        let du = -p + (1.0 - s) * dp;
        let dv = -p - s * dp;
        (3.0 * u * v, 3.0 * (du * v + u * dv))
    }

    fn denominator(&self, r: f64) -> (f64, f64) {
        let k = self.params.lambda() * self.width() * self.width();
        (
            k * (r - self.r_neg) * (r - self.r_cauchy),
            k * (2.0 * r - self.r_neg - self.r_cauchy),
        )
    }

    /// (1 − f²)/μ, evaluated through its closed form so it is exact at the horizons.
    pub fn h(&self, r: f64) -> f64 {
        let (n, _) = self.numerator(self.s(r));
        let (d, _) = self.denominator(r);
        n / d
    }

    pub fn h_prime(&self, r: f64) -> f64 {
        let (n, dn) = self.numerator(self.s(r));
        let (d, dd) = self.denominator(r);
        dn / (self.width() * d) - n * dd / (d * d)
    }

    /// Φ′(r) = b (r² + a²) f / μ.
    pub fn phi_prime(&self, r: f64) -> f64 {
        self.params.b() * (r * r + self.params.a() * self.params.a()) * self.f(r) / self.params.mu(r)
    }

    /// Ψ′(r) = b a f / μ.
    pub fn psi_prime(&self, r: f64) -> f64 {
        self.params.b() * self.params.a() * self.f(r) / self.params.mu(r)
    }

    /// Reference radius where Φ = Ψ = 0.
    pub fn reference_radius(&self) -> f64 {
        0.5 * (self.r_e + self.r_c)
    }

    /// Φ(r) on the exterior, normalised to vanish at the midpoint between the horizons.
    pub fn phi(&self, r: f64) -> Result<f64, GeometryError> {
        self.check_exterior(r)?;
        Ok(quadrature::integrate(
            |x| self.phi_prime(x),
            self.reference_radius(),
            r,
            PHI_QUADRATURE_TOL,
        ))
    }

    pub fn psi(&self, r: f64) -> Result<f64, GeometryError> {
        self.check_exterior(r)?;
        Ok(quadrature::integrate(
            |x| self.psi_prime(x),
            self.reference_radius(),
            r,
            PHI_QUADRATURE_TOL,
        ))
    }

    fn check_exterior(&self, r: f64) -> Result<(), GeometryError> {
        if r > self.r_e && r < self.r_c {
            Ok(())
        } else {
            Err(GeometryError::ChartDomain(format!(
                "Φ, Ψ are only defined for r in ({}, {}), got {r}",
                self.r_e, self.r_c
            )))
        }
    }

    /// ρ² G*(dt*, dt*) = −b² h (r²+a²)² + b² a² sin²θ / c(θ).
    pub fn slice_normal_norm(&self, r: f64, theta: f64) -> f64 {
        let a2 = self.params.a() * self.params.a();
        let st = theta.sin();
        let c = self.params.c_theta(theta);
        let b2 = self.params.b() * self.params.b();
        -b2 * self.h(r) * (r * r + a2).powi(2) + b2 * a2 * st * st / c
    }

    fn validate_spacelike_slices(&self, horizons: &HorizonStructure) -> Result<(), GeometryError> {
        let (lo, hi) = horizons.chart_interval();
        const NR: usize = 2001;
        const NT: usize = 181;
        for i in 0..NR {
            let r = lo + (hi - lo) * i as f64 / (NR - 1) as f64;
            if !(self.h(r) > 0.0) {
                return Err(GeometryError::GaugeInvalid(format!(
                    "(1 - f^2)/mu = {} is not positive at r = {r}",
                    self.h(r)
                )));
            }
            for j in 0..NT {
                let theta = std::f64::consts::PI * j as f64 / (NT - 1) as f64;
                let v = self.slice_normal_norm(r, theta);
                if !(v < 0.0) {
                    return Err(GeometryError::GaugeInvalid(format!(
                        "t* level set is not spacelike at r = {r}, theta = {theta}: rho^2 G*(dt*, dt*) = {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::horizon_structure;

    fn setup(a: f64) -> (SpacetimeParams, HorizonStructure) {
        let p = SpacetimeParams::new(0.06, a, 1.0).unwrap();
        let h = horizon_structure(&p, 0.2).unwrap();
        (p, h)
    }

    #[test]
    fn endpoints_pinned_exactly() {
        let (p, h) = setup(0.3);
        for cfg in [
            GaugeConfig::default(),
            GaugeConfig {
                kind: GaugeKind::Polynomial,
                coefficients: vec![0.3, -0.2],
            },
        ] {
            let g = GaugeFunction::new(&p, &h, cfg).unwrap();
            assert_eq!(g.f(h.r_e), -1.0);
            assert_eq!(g.f(h.r_c), 1.0);
        }
    }

    #[test]
    fn closed_form_matches_quotient_away_from_horizons() {
        let (p, h) = setup(0.3);
        let g = GaugeFunction::new(
            &p,
            &h,
            GaugeConfig {
                kind: GaugeKind::Polynomial,
                coefficients: vec![0.5, 0.1, -0.3],
            },
        )
        .unwrap();
        for k in 1..20 {
            let r = h.r_e + (h.r_c - h.r_e) * k as f64 / 20.0;
            let f = g.f(r);
            let direct = (1.0 - f * f) / p.mu(r);
            assert!((g.h(r) - direct).abs() < 1e-11 * direct.abs());
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let (p, h) = setup(0.15);
        let g = GaugeFunction::new(
            &p,
            &h,
            GaugeConfig {
                kind: GaugeKind::Polynomial,
                coefficients: vec![0.2, 0.4],
            },
        )
        .unwrap();
        let e = 1e-5;
        for k in 0..=10 {
            let r = h.r_e - 0.1 + (h.r_c - h.r_e + 0.2) * k as f64 / 10.0;
            let fd_f = (g.f(r + e) - g.f(r - e)) / (2.0 * e);
            let fd_h = (g.h(r + e) - g.h(r - e)) / (2.0 * e);
            assert!((g.f_prime(r) - fd_f).abs() < 1e-8);
            assert!((g.h_prime(r) - fd_h).abs() < 1e-7 * g.h_prime(r).abs().max(1.0));
        }
    }

    #[test]
    fn level_sets_spacelike_over_whole_chart() {
        let (p, h) = setup(0.3);
        let g = GaugeFunction::new(&p, &h, GaugeConfig::default()).unwrap();
        let (lo, hi) = h.chart_interval();
        for i in 0..=50 {
            let r = lo + (hi - lo) * i as f64 / 50.0;
            assert!(g.slice_normal_norm(r, std::f64::consts::FRAC_PI_2) < 0.0);
        }
    }

    #[test]
    fn wild_profile_rejected() {
        let (p, h) = setup(0.3);
        let err = GaugeFunction::new(
            &p,
            &h,
            GaugeConfig {
                kind: GaugeKind::Polynomial,
                coefficients: vec![40.0],
            },
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::GaugeInvalid(_)));
    }

    #[test]
    fn phi_outside_exterior_is_a_chart_error() {
        let (p, h) = setup(0.3);
        let g = GaugeFunction::new(&p, &h, GaugeConfig::default()).unwrap();
        assert!(g.phi(h.r_e - 0.01).is_err());
        assert_eq!(g.phi(g.reference_radius()).unwrap(), 0.0);
    }
}
