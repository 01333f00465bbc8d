//! Coefficients of ρ² P_σ acting on ψ = (1 − x²)^{|m|/2} w(r, x), x = cos θ,
//! for u = e^{−iσ t*} e^{i m φ_T} ψ with φ_T = φ* − ω t*.
//!
//! With R = r² + a², κ = (Rω − a)m and λ = (aω(1 − x²) − 1)m the operator is
//! σ² P2 + σ P1 + P0 where
//!
//! P2 = b²hR² − b²a²(1 − x²)/c
//! P1 = ib(2fR ∂_r + (fR)′) + 2b²hRκ − 2b²aλ/c
//! P0 = μ∂_r² + μ′∂_r + ib(2fκ ∂_r + (fκ)′) + b²hκ² + Ang + b²m²(2aω − a²ω²(1 − x²))/c + ρ²A
//!
//! and Ang = c(1 − x²)∂_x² + (2αx(1 − x²) − 2xc(1 + 2k))∂_x − 2k(1 + 3αx²) − m²Q/c,
//! k = |m|/2, Q = α²x⁴ + (α² + 2α)x² + (1 + α)².

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::geometry::{Spacetime, StationaryFrame};

use super::QnmError;

/// The potential A(r, θ) in P = □ + A.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Zero,
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// Values on a tensor grid, `re[i][j]` at (r[i], theta[j]); bilinear
    /// interpolation, clamped outside the table.
    Tabulated {
        r: Vec<f64>,
        theta: Vec<f64>,
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Vec<Vec<f64>>,
    },
}

impl Default for Potential {
    fn default() -> Self {
        Potential::Zero
    }
}

fn bracket(grid: &[f64], v: f64) -> (usize, f64) {
    if grid.len() == 1 || v <= grid[0] {
        return (0, 0.0);
    }
    let last = grid.len() - 1;
    if v >= grid[last] {
        return (last - 1, 1.0);
    }
    let i = grid.partition_point(|g| *g <= v) - 1;
    (i, (v - grid[i]) / (grid[i + 1] - grid[i]))
}

impl Potential {
    pub fn validate(&self) -> Result<(), QnmError> {
        match self {
            Potential::Zero => Ok(()),
            Potential::Constant { re, im } => {
                if re.is_finite() && im.is_finite() {
                    Ok(())
                } else {
                    Err(QnmError::InvalidSpec("non-finite constant potential".into()))
                }
            }
            Potential::Tabulated { r, theta, re, im } => {
                let inc = |g: &[f64]| !g.is_empty() && g.windows(2).all(|w| w[0] < w[1]);
                if !inc(r) || !inc(theta) {
                    return Err(QnmError::InvalidSpec(
                        "tabulated grids must be non-empty and strictly increasing".into(),
                    ));
                }
                let shape_ok = |t: &Vec<Vec<f64>>| {
                    t.len() == r.len() && t.iter().all(|row| row.len() == theta.len())
                };
                if !shape_ok(re) || !(im.is_empty() || shape_ok(im)) {
                    return Err(QnmError::InvalidSpec("tabulated values have the wrong shape".into()));
                }
                if re.iter().chain(im.iter()).flatten().any(|v| !v.is_finite()) {
                    return Err(QnmError::InvalidSpec("non-finite tabulated value".into()));
                }
                Ok(())
            }
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Constant { im, .. } => *im == 0.0,
            Potential::Tabulated { im, .. } => im.iter().flatten().all(|v| *v == 0.0),
        }
    }

    pub fn at(&self, r: f64, theta: f64) -> C64 {
        match self {
            Potential::Zero => C64::new(0.0, 0.0),
            Potential::Constant { re, im } => C64::new(*re, *im),
            Potential::Tabulated { r: rg, theta: tg, re, im } => {
                let (i, u) = bracket(rg, r);
                let (j, v) = bracket(tg, theta);
                let i1 = (i + 1).min(rg.len() - 1);
                let j1 = (j + 1).min(tg.len() - 1);
                let lerp = |t: &Vec<Vec<f64>>| {
                    if t.is_empty() {
                        return 0.0;
                    }
                    (1.0 - u) * ((1.0 - v) * t[i][j] + v * t[i][j1]) + u * ((1.0 - v) * t[i1][j] + v * t[i1][j1])
                };
                C64::new(lerp(re), lerp(im))
            }
        }
    }
}

/// Potential, frame and azimuthal number.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveOperatorSpec {
    pub potential: Potential,
    pub frame: StationaryFrame,
    pub m: i32,
}

/// Radial coefficient functions at one r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCoefficients {
    pub p0_d2: f64,
    pub p0_d1: C64,
    pub p0_d0: C64,
    pub p1_d1: C64,
    pub p1_d0: C64,
    pub p2: f64,
}

/// Angular coefficient functions at one x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularCoefficients {
    pub d2: f64,
    pub d1: f64,
    pub d0: f64,
    pub p1: f64,
    pub p2: f64,
}

/// The separated coefficients of ρ²P_σ for frequencies measured against
/// ∂_{t*} + ω ∂_{φ*}; ω = 0 is the ∂_{t*} frame.
#[derive(Debug, Clone)]
pub struct WaveCoefficients<'a> {
    pub st: &'a Spacetime,
    pub potential: &'a Potential,
    pub m: i32,
    pub omega: f64,
}

pub fn assemble_wave_operator<'a>(
    st: &'a Spacetime,
    potential: &'a Potential,
    m: i32,
    omega: f64,
) -> Result<WaveCoefficients<'a>, QnmError> {
    potential.validate()?;
    if !omega.is_finite() {
        return Err(QnmError::InvalidSpec("non-finite frame velocity".into()));
    }
    Ok(WaveCoefficients { st, potential, m, omega })
}

impl WaveCoefficients<'_> {
    pub fn radial(&self, r: f64) -> RadialCoefficients {
        let p = &self.st.params;
        let g = &self.st.gauge;
        let (a, b) = (p.a(), p.b());
        let b2 = b * b;
        let m = self.m as f64;
        let w = self.omega;
        let i = C64::new(0.0, 1.0);
        let rr = r * r + a * a;
        let drr = 2.0 * r;
        let kap = (rr * w - a) * m;
        let dkap = drr * w * m;
        let (f, df, h) = (g.f(r), g.f_prime(r), g.h(r));
        RadialCoefficients {
            p0_d2: p.mu(r),
            p0_d1: p.mu_prime(r) + i * b * 2.0 * f * kap,
            p0_d0: i * b * (df * kap + f * dkap) + b2 * h * kap * kap,
            p1_d1: i * b * 2.0 * f * rr,
            p1_d0: i * b * (df * rr + f * drr) + 2.0 * b2 * h * rr * kap,
            p2: b2 * h * rr * rr,
        }
    }

    pub fn angular(&self, x: f64) -> AngularCoefficients {
        let p = &self.st.params;
        let (a, b, al) = (p.a(), p.b(), p.alpha());
        let b2 = b * b;
        let m = self.m as f64;
        let k = 0.5 * m.abs();
        let w = self.omega;
        let x2 = x * x;
        let s2 = 1.0 - x2;
        let c = 1.0 + al * x2;
        let q = al * al * x2 * x2 + (al * al + 2.0 * al) * x2 + (1.0 + al) * (1.0 + al);
        let lam = (a * w * s2 - 1.0) * m;
        AngularCoefficients {
            d2: c * s2,
            d1: 2.0 * al * x * s2 - 2.0 * x * c * (1.0 + 2.0 * k),
            d0: -2.0 * k * (1.0 + 3.0 * al * x2) - m * m * q / c
                + b2 * m * m * (2.0 * a * w - a * a * w * w * s2) / c,
            p1: -2.0 * b2 * a * lam / c,
            p2: -b2 * a * a * s2 / c,
        }
    }

    /// ρ² A(r, θ).
    pub fn potential_term(&self, r: f64, x: f64) -> C64 {
        let a = self.st.params.a();
        (r * r + a * a * x * x) * self.potential.at(r, x.clamp(-1.0, 1.0).acos())
    }
}
