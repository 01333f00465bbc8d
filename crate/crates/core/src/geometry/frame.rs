use serde::{Deserialize, Serialize};

use super::{GeometryError, Horizon, HorizonStructure, SpacetimeParams};

/// The Killing field T = ∂_t + ω ∂_φ with ω = a/(r0² + a²), r0 ∈ [r_e, r_c].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryFrame {
    r0: f64,
    omega: f64,
}

/// Named choices of r0 used throughout the test matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum FrameChoice {
    EventHorizon,
    CosmologicalHorizon,
    Midpoint,
    /// The zero of μ′ between the horizons.
    MuPrimeCritical,
    Radius(f64),
}

impl StationaryFrame {
    pub fn new(params: &SpacetimeParams, r0: f64) -> Result<Self, GeometryError> {
        let (r_e, r_c) = (params.r_event(), params.r_cosmo());
        if !(r0 >= r_e && r0 <= r_c) {
            return Err(GeometryError::FrameOutOfRange { r0, r_e, r_c });
        }
        let a = params.a();
        Ok(StationaryFrame {
            r0,
            omega: a / (r0 * r0 + a * a),
        })
    }

    pub fn from_choice(params: &SpacetimeParams, choice: FrameChoice) -> Result<Self, GeometryError> {
        let r0 = match choice {
            FrameChoice::EventHorizon => params.r_event(),
            FrameChoice::CosmologicalHorizon => params.r_cosmo(),
            FrameChoice::Midpoint => 0.5 * (params.r_event() + params.r_cosmo()),
            FrameChoice::MuPrimeCritical => params.mu_prime_root(),
            FrameChoice::Radius(r) => r,
        };
        StationaryFrame::new(params, r0)
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The horizon this frame sits on, if any.
    pub fn horizon(&self, horizons: &HorizonStructure) -> Option<Horizon> {
        if self.r0 == horizons.r_e {
            Some(Horizon::Event)
        } else if self.r0 == horizons.r_c {
            Some(Horizon::Cosmological)
        } else {
            None
        }
    }
}

/// g(T, T) at (r, θ), valid in either chart since the (t, φ) block is shared:
///
/// [c sin²θ a² (r0² − r²)² − μ(r) (r0² + a² cos²θ)²] / (b² ρ² (r0² + a²)²).
pub fn t_norm(params: &SpacetimeParams, frame: &StationaryFrame, r: f64, theta: f64) -> f64 {
    let a = params.a();
    let a2 = a * a;
    let r0 = frame.r0;
    let ct = theta.cos();
    let st = theta.sin();
    let rho2 = r * r + a2 * ct * ct;
    let b2 = params.b() * params.b();
    let spin = params.c_theta(theta) * st * st * a2 * (r0 * r0 - r * r).powi(2);
    let lapse = params.mu(r) * (r0 * r0 + a2 * ct * ct).powi(2);
    (spin - lapse) / (b2 * rho2 * (r0 * r0 + a2).powi(2))
}

/// ∂_r g(T, T) at the horizon the frame sits on:
/// −μ′(r0)(r0² + a² cos²θ) / (b² (r0² + a²)²).
pub fn t_norm_radial_derivative(
    params: &SpacetimeParams,
    horizons: &HorizonStructure,
    frame: &StationaryFrame,
    horizon: Horizon,
    theta: f64,
) -> Result<f64, GeometryError> {
    let rh = horizons.radius(horizon);
    if frame.r0 != rh {
        return Err(GeometryError::FrameMismatch {
            r0: frame.r0,
            expected: rh,
        });
    }
    let a2 = params.a() * params.a();
    let ct = theta.cos();
    let b2 = params.b() * params.b();
    Ok(-params.mu_prime(rh) * (rh * rh + a2 * ct * ct) / (b2 * (rh * rh + a2).powi(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::horizon_structure;
    use crate::geometry::metric::{bl_metric, PHI, T};

    #[test]
    fn omega_consistent_with_r0() {
        let p = SpacetimeParams::new(0.06, 0.3, 1.0).unwrap();
        let f = StationaryFrame::from_choice(&p, FrameChoice::Midpoint).unwrap();
        assert_eq!(f.omega(), 0.3 / (f.r0() * f.r0() + 0.09));
        assert!(StationaryFrame::new(&p, p.r_cosmo() + 1e-9).is_err());
    }

    #[test]
    fn factored_form_matches_metric_contraction() {
        let p = SpacetimeParams::new(0.06, 0.3, 1.0).unwrap();
        let f = StationaryFrame::from_choice(&p, FrameChoice::MuPrimeCritical).unwrap();
        let w = f.omega();
        for &(r, th) in &[(2.5, 0.4), (3.7, 1.3), (5.2, 2.9)] {
            let g = bl_metric(&p, r, th);
            let direct = g[T][T] + 2.0 * w * g[T][PHI] + w * w * g[PHI][PHI];
            assert!((t_norm(&p, &f, r, th) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn vanishes_on_own_horizon() {
        let p = SpacetimeParams::new(0.06, 0.3, 1.0).unwrap();
        let f = StationaryFrame::from_choice(&p, FrameChoice::EventHorizon).unwrap();
        for k in 0..=10 {
            let th = std::f64::consts::PI * k as f64 / 10.0;
            assert!(t_norm(&p, &f, p.r_event(), th).abs() < 1e-15);
        }
    }

    #[test]
    fn radial_derivative_requires_matching_frame() {
        let p = SpacetimeParams::new(0.06, 0.3, 1.0).unwrap();
        let h = horizon_structure(&p, 0.1).unwrap();
        let mid = StationaryFrame::from_choice(&p, FrameChoice::Midpoint).unwrap();
        assert!(matches!(
            t_norm_radial_derivative(&p, &h, &mid, Horizon::Event, 1.0),
            Err(GeometryError::FrameMismatch { .. })
        ));
    }
}
