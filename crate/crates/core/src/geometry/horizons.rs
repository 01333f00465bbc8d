use serde::Serialize;

use super::{GeometryError, SpacetimeParams};

/// Maximum number of times the requested chart extension is halved.
pub const MAX_DELTA_HALVINGS: u32 = 20;

/// Which of the two horizons bounding the domain of outer communication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Event,
    Cosmological,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorizonStructure {
    pub r_neg: f64,
    pub r_cauchy: f64,
    pub r_e: f64,
    pub r_c: f64,
    pub kappa_e: f64,
    pub kappa_c: f64,
    /// Half-width of the chart extension past each horizon.
    pub delta: f64,
    /// How many halvings of the requested δ were needed.
    pub delta_halvings: u32,
}

impl HorizonStructure {
    pub fn radius(&self, horizon: Horizon) -> f64 {
        match horizon {
            Horizon::Event => self.r_e,
            Horizon::Cosmological => self.r_c,
        }
    }

    pub fn kappa(&self, horizon: Horizon) -> f64 {
        match horizon {
            Horizon::Event => self.kappa_e,
            Horizon::Cosmological => self.kappa_c,
        }
    }

    pub fn kappa_min(&self) -> f64 {
        self.kappa_e.min(self.kappa_c)
    }

    /// Radial extent of the horizon-penetrating chart.
    pub fn chart_interval(&self) -> (f64, f64) {
        (self.r_e - self.delta, self.r_c + self.delta)
    }
}

/// |μ′(r)| / (2b(r² + a²)).
pub fn surface_gravity(params: &SpacetimeParams, r: f64) -> f64 {
    params.mu_prime(r).abs() / (2.0 * params.b() * (r * r + params.a() * params.a()))
}

/// The level set {r = const} is spacelike exactly when dr is timelike,
/// i.e. when G(dr, dr) = μ(r)/ρ² is negative. The sign does not depend on θ.
pub fn radial_level_set_is_spacelike(params: &SpacetimeParams, r: f64) -> bool {
    let a2 = params.a() * params.a();
    let rho2 = r * r + a2; // equatorial ρ²; any θ gives the same sign
    params.mu(r) / rho2 < 0.0
}

pub fn horizon_structure(
    params: &SpacetimeParams,
    delta_request: f64,
) -> Result<HorizonStructure, GeometryError> {
    if !(delta_request > 0.0 && delta_request.is_finite()) {
        return Err(GeometryError::InvalidParameter(format!(
            "delta_request must be positive, got {delta_request}"
        )));
    }
    let [r_neg, r_cauchy, r_e, r_c] = params.roots();
    let mut delta = delta_request;
    let mut halvings = 0;
    loop {
        let lo = r_e - delta;
        let hi = r_c + delta;
        // lo must also stay above r_C, where the chart degenerates
        if lo > r_cauchy
            && radial_level_set_is_spacelike(params, lo)
            && radial_level_set_is_spacelike(params, hi)
        {
            break;
        }
        if halvings == MAX_DELTA_HALVINGS {
            return Err(GeometryError::DeltaSelection {
                requested: delta_request,
                last_tried: delta,
            });
        }
        delta *= 0.5;
        halvings += 1;
    }
    Ok(HorizonStructure {
        r_neg,
        r_cauchy,
        r_e,
        r_c,
        kappa_e: surface_gravity(params, r_e),
        kappa_c: surface_gravity(params, r_c),
        delta,
        delta_halvings: halvings,
    })
}
