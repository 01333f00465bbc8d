use serde::{Deserialize, Serialize};

use super::roots::{quartic_discriminant_no_cubic, real_roots, Polynomial};
use super::GeometryError;

/// Relative separation below which two roots of μ count as merged.
pub const ROOT_SEPARATION_TOL: f64 = 1.0e-8;

/// The black-hole parameters (Λ, a, m) together with the constants derived
/// from them. Construction fails unless μ has four distinct real roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacetimeParams {
    lambda: f64,
    a: f64,
    mass: f64,
    b: f64,
    roots: [f64; 4],
}

impl SpacetimeParams {
    pub fn new(lambda: f64, a: f64, mass: f64) -> Result<Self, GeometryError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(GeometryError::InvalidParameter(format!(
                "cosmological constant must be positive, got {lambda}"
            )));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(GeometryError::InvalidParameter(format!(
                "mass must be positive, got {mass}"
            )));
        }
        if !a.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "angular momentum must be finite, got {a}"
            )));
        }
        let poly = mu_polynomial(lambda, a, mass);
        let roots = real_roots(&poly, 1.0e-9);
        let c = poly.coeffs();
        let discriminant = quartic_discriminant_no_cubic(c[4], c[2], c[1], c[0]);
        if roots.len() != 4 {
            return Err(GeometryError::NotSubextremal {
                real_roots: roots.len(),
                discriminant,
                detail: format!("real roots of mu: {roots:?}"),
            });
        }
        let scale = roots.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        for w in roots.windows(2) {
            if w[1] - w[0] <= ROOT_SEPARATION_TOL * scale {
                return Err(GeometryError::NotSubextremal {
                    real_roots: 4,
                    discriminant,
                    detail: format!("roots {} and {} are not distinct", w[0], w[1]),
                });
            }
        }
        Ok(SpacetimeParams {
            lambda,
            a,
            mass,
            b: 1.0 + lambda * a * a / 3.0,
            roots: [roots[0], roots[1], roots[2], roots[3]],
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// b = 1 + Λa²/3.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Λa²/3, the amplitude of the angular factor c(θ) − 1.
    pub fn alpha(&self) -> f64 {
        self.lambda * self.a * self.a / 3.0
    }

    /// c(θ) = 1 + (Λa²/3) cos²θ.
    pub fn c_theta(&self, theta: f64) -> f64 {
        let ct = theta.cos();
        1.0 + self.alpha() * ct * ct
    }

    /// The four roots r₋ < r_C < r_e < r_c.
    pub fn roots(&self) -> [f64; 4] {
        self.roots
    }

    pub fn r_event(&self) -> f64 {
        self.roots[2]
    }

    pub fn r_cosmo(&self) -> f64 {
        self.roots[3]
    }

    /// μ(r) = −Λr⁴/3 + (1 − Λa²/3) r² − 2mr + a².
    pub fn mu(&self, r: f64) -> f64 {
        mu_eval(self.lambda, self.a, self.mass, r)
    }

    pub fn mu_prime(&self, r: f64) -> f64 {
        -4.0 * self.lambda * r.powi(3) / 3.0 + 2.0 * (1.0 - self.alpha()) * r - 2.0 * self.mass
    }

    pub fn mu_second(&self, r: f64) -> f64 {
        -4.0 * self.lambda * r * r + 2.0 * (1.0 - self.alpha())
    }

    /// The unique zero of μ′ between the horizons.
    pub fn mu_prime_root(&self) -> f64 {
        let (mut lo, mut hi) = (self.r_event(), self.r_cosmo());
        // μ′ > 0 at r_e and < 0 at r_c; μ″ < 0 on the exterior keeps this root unique.
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.mu_prime(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1.0e-16 * hi {
                break;
            }
        }
        let mut r = 0.5 * (lo + hi);
        for _ in 0..3 {
            let d2 = self.mu_second(r);
            if d2 == 0.0 {
                break;
            }
            r -= self.mu_prime(r) / d2;
        }
        r
    }

    /// Same physical spacetime measured in units rescaled by `k`:
    /// (Λ, a, m) → (Λ/k², k a, k m).
    pub fn rescaled(&self, k: f64) -> Result<Self, GeometryError> {
        SpacetimeParams::new(self.lambda / (k * k), self.a * k, self.mass * k)
    }
}

/// μ(r) for raw parameters, without the subextremality check.
pub fn mu_eval(lambda: f64, a: f64, mass: f64, r: f64) -> f64 {
    mu_polynomial(lambda, a, mass).eval(r)
}

/// Coefficients of μ, lowest degree first.
pub fn mu_polynomial(lambda: f64, a: f64, mass: f64) -> Polynomial {
    Polynomial::new(vec![
        a * a,
        -2.0 * mass,
        1.0 - lambda * a * a / 3.0,
        0.0,
        -lambda / 3.0,
    ])
}

/// Unchecked parameter triple as it appears in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub lambda: f64,
    pub a: f64,
    pub mass: f64,
}

impl TryFrom<RawParams> for SpacetimeParams {
    type Error = GeometryError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        SpacetimeParams::new(raw.lambda, raw.a, raw.mass)
    }
}
