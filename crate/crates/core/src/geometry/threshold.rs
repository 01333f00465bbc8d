use super::{GeometryError, HorizonStructure, SpacetimeParams};

/// β = 2b max_{r ∈ {r_e, r_c}} (r² + a²)/|μ′(r)|.
pub fn beta_threshold(params: &SpacetimeParams, horizons: &HorizonStructure) -> f64 {
    let a2 = params.a() * params.a();
    let term = |r: f64| (r * r + a2) / params.mu_prime(r).abs();
    2.0 * params.b() * term(horizons.r_e).max(term(horizons.r_c))
}

/// Lower bound (1 − 2s)/(2β) of the half-plane Im σ > · on which the
/// stationary family is Fredholm at regularity s ≥ 1/2.
pub fn fredholm_window(beta: f64, s: f64) -> Result<f64, GeometryError> {
    if !(s >= 0.5) {
        return Err(GeometryError::InvalidParameter(format!(
            "regularity s must be at least 1/2, got {s}"
        )));
    }
    Ok((1.0 - 2.0 * s) / (2.0 * beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::horizon_structure;

    #[test]
    fn half_regularity_gives_real_axis() {
        assert_eq!(fredholm_window(3.7, 0.5).unwrap(), 0.0);
        assert!(fredholm_window(3.7, 0.4).is_err());
        assert!(fredholm_window(2.0, 1.5).unwrap() < 0.0);
    }

    #[test]
    fn beta_is_inverse_minimal_surface_gravity() {
        for a in [0.0, 0.15, 0.3] {
            let p = SpacetimeParams::new(0.06, a, 1.0).unwrap();
            let h = horizon_structure(&p, 0.1).unwrap();
            let beta = beta_threshold(&p, &h);
            assert!((beta * h.kappa_min() - 1.0).abs() < 1e-12);
        }
    }
}
