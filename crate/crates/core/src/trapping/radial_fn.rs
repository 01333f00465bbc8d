//! F(r) = ((r² + a²) ξ_t + a ξ_φ)² / μ(r) and its critical points.

use crate::geometry::SpacetimeParams;

/// X(r) = (r² + a²) ξ_t + a ξ_φ.
pub fn x_term(params: &SpacetimeParams, xi_t: f64, xi_phi: f64, r: f64) -> f64 {
    let a = params.a();
    (r * r + a * a) * xi_t + a * xi_phi
}

pub fn f_function(params: &SpacetimeParams, xi_t: f64, xi_phi: f64, r: f64) -> f64 {
    let x = x_term(params, xi_t, xi_phi, r);
    x * x / params.mu(r)
}

/// F′ = X (2X′μ − Xμ′) / μ² with X′ = 2r ξ_t.
pub fn f_prime(params: &SpacetimeParams, xi_t: f64, xi_phi: f64, r: f64) -> f64 {
    let x = x_term(params, xi_t, xi_phi, r);
    let mu = params.mu(r);
    x * (4.0 * r * xi_t * mu - x * params.mu_prime(r)) / (mu * mu)
}

/// Interior zeros of F′ on (r_e, r_c): sign changes on `n` uniform cells,
/// refined by bisection to machine resolution.
pub fn f_critical_scan(params: &SpacetimeParams, xi_t: f64, xi_phi: f64, n: usize) -> Vec<f64> {
    let (r_e, r_c) = (params.r_event(), params.r_cosmo());
    let n = n.max(1000);
    let dr = (r_c - r_e) / n as f64;
    let g = |r: f64| f_prime(params, xi_t, xi_phi, r);
    let mut out: Vec<f64> = Vec::new();
    let mut lo = r_e + 0.5 * dr;
    let mut g_lo = g(lo);
    for i in 1..n {
        let hi = r_e + (i as f64 + 0.5) * dr;
        let g_hi = g(hi);
        if g_lo == 0.0 {
            out.push(lo);
        } else if g_lo * g_hi < 0.0 {
            let (mut a, mut b, mut ga) = (lo, hi, g_lo);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m == a || m == b {
                    break;
                }
                let gm = g(m);
                if gm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if ga * gm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
            }
            out.push(0.5 * (a + b));
        }
        lo = hi;
        g_lo = g_hi;
    }
    out.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * r_c);
    out
}
