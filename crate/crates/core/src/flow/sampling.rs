//! Reproducible sampling of null covectors orthogonal to T.
//!
//! Base points are uniform in (r, cos θ, φ) over the band; the momentum
//! direction (u_r, u_φ, u_θ) is uniform on the unit sphere. The constraint
//! ξ_t = −ω ξ_φ is imposed, u_r is discarded and ξ_r is re-solved from q = 0,
//! both roots being emitted. Covectors are normalised to max_i |ξ_i| = 1.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Chart, Spacetime, StationaryFrame};

use super::hamiltonian::solve_xi_r;
use super::{Band, FlowError, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledPoint {
    pub point: PhasePoint,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub points: Vec<SampledPoint>,
    pub attempts: usize,
    pub rejected: usize,
    /// The attempt budget ran out before `count` points were found.
    pub exhausted: bool,
}

/// Both T-orthogonal null covectors over (r, θ, φ) with the given (ξ_φ, ξ_θ)
/// direction, normalised to max_i |ξ_i| = 1.
pub fn orthogonal_null_at(
    st: &Spacetime,
    frame: &StationaryFrame,
    r: f64,
    theta: f64,
    phi: f64,
    xi_phi: f64,
    xi_theta: f64,
) -> Result<[PhasePoint; 2], FlowError> {
    st.check_chart(Chart::BoyerLindquist, r, theta)?;
    let w = frame.omega();
    let empty = FlowError::EmptyCharacteristic { r, theta };
    let probe = [-w * xi_phi, 0.0, xi_phi, xi_theta];
    let (p, m) = solve_xi_r(st, Chart::BoyerLindquist, r, theta, &probe).ok_or(empty.clone())?;
    let k = 1.0 / probe.iter().chain([p, m].iter()).fold(0.0_f64, |a, v| a.max(v.abs()));
    if !k.is_finite() {
        return Err(empty);
    }
    let (xp, xth) = (k * xi_phi, k * xi_theta);
    let xi = [-w * xp, 0.0, xp, xth];
    let (p, m) = solve_xi_r(st, Chart::BoyerLindquist, r, theta, &xi).ok_or(empty)?;
    let x = [0.0, r, phi, theta];
    Ok([
        PhasePoint::new(Chart::BoyerLindquist, x, [xi[0], p, xi[2], xi[3]]),
        PhasePoint::new(Chart::BoyerLindquist, x, [xi[0], m, xi[2], xi[3]]),
    ])
}

/// Draws `count` T-orthogonal null points (emitted in ± pairs) from the
/// seeded stream, giving up after `max_attempts` base points.
pub fn sample_orthogonal_null(
    st: &Spacetime,
    frame: &StationaryFrame,
    seed: u64,
    count: usize,
    band: Band,
    pole_guard: f64,
    max_attempts: usize,
) -> Result<SampleSet, FlowError> {
    if count == 0 {
        return Err(FlowError::InvalidConfig("count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SampleSet {
        points: Vec::with_capacity(count),
        attempts: 0,
        rejected: 0,
        exhausted: false,
    };
    let zmax = pole_guard.cos();
    while out.points.len() < count {
        if out.attempts >= max_attempts {
            out.exhausted = true;
            break;
        }
        out.attempts += 1;
        let r = band.lo + (band.hi - band.lo) * rng.random::<f64>();
        let theta = (zmax * (2.0 * rng.random::<f64>() - 1.0)).acos();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let u = unit_vector(&mut rng);
        match orthogonal_null_at(st, frame, r, theta, phi, u[1], u[2]) {
            Ok([p, m]) => {
                out.points.push(SampledPoint {
                    point: p,
                    branch: Branch::Plus,
                });
                if out.points.len() < count {
                    out.points.push(SampledPoint {
                        point: m,
                        branch: Branch::Minus,
                    });
                }
            }
            Err(FlowError::EmptyCharacteristic { .. }) => out.rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Uniform direction on S² by normalised Gaussians (Box–Muller).
pub(crate) fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let mut v = [0.0; 3];
        for x in &mut v {
            let u1: f64 = rng.random::<f64>();
            let u2: f64 = rng.random::<f64>();
            *x = (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        }
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::FlowConfig;
    use crate::geometry::FrameChoice;

    #[test]
    fn emitted_points_are_orthogonal_and_null() {
        let st = Spacetime::reference(0.3).unwrap();
        let frame = st.frame(FrameChoice::EventHorizon).unwrap();
        let band = FlowConfig::default().band(&st);
        let set = sample_orthogonal_null(&st, &frame, 7, 40, band, 1e-3, 1_000_000).unwrap();
        assert_eq!(set.points.len(), 40);
        assert!(set.rejected > 0);
        for sp in &set.points {
            let p = sp.point;
            assert_eq!(p.xi[0] + frame.omega() * p.xi[2], 0.0);
            assert!(st.hamiltonian_q(&p).unwrap().abs() <= 1e-10 * p.scale());
            assert!(st.t_norm(&frame, p.r(), p.theta()) > 0.0);
        }
    }

    #[test]
    fn same_seed_same_points() {
        let st = Spacetime::reference(0.3).unwrap();
        let frame = st.frame(FrameChoice::Midpoint).unwrap();
        let band = FlowConfig::default().band(&st);
        let a = sample_orthogonal_null(&st, &frame, 11, 10, band, 1e-3, 1_000_000).unwrap();
        let b = sample_orthogonal_null(&st, &frame, 11, 10, band, 1e-3, 1_000_000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn static_case_has_no_orthogonal_null_covectors() {
        let st = Spacetime::reference(0.0).unwrap();
        let frame = st.frame(FrameChoice::Midpoint).unwrap();
        let band = FlowConfig::default().band(&st);
        let set = sample_orthogonal_null(&st, &frame, 1, 10, band, 1e-3, 10_000).unwrap();
        assert!(set.points.is_empty());
        assert!(set.exhausted);
        assert_eq!(set.rejected, 10_000);
    }
}
