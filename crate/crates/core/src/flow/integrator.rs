//! Dormand–Prince 5(4) integration of H_q with a PI step controller.

use serde::{Deserialize, Serialize};

use crate::geometry::{Chart, Spacetime};

use super::hamiltonian::phase_velocity;
use super::{ConservedSet, FlowError, PhasePoint};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const PI_ALPHA: f64 = 0.7 / 5.0;
const PI_BETA: f64 = 0.4 / 5.0;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Exit band margin: the flow stops once r leaves [r_e + ε, r_c − ε].
    pub epsilon: f64,
    /// Cap on |s|; reaching it is the operational meaning of "trapped".
    pub max_parameter: f64,
    pub pole_guard: f64,
    /// Largest tolerated drift of q and K, relative to max_i ξ_i² at the start.
    pub drift_tol: f64,
    /// Largest tolerated |q| at the start, relative to the same scale.
    pub null_tol: f64,
    pub initial_step: Option<f64>,
    pub min_step: f64,
    pub max_steps: usize,
    /// Keep every n-th accepted step; 0 keeps only the endpoints.
    pub record_every: usize,
    /// Integrate towards decreasing s.
    pub reverse: bool,
    /// Switch to the starred chart within `handoff_margin` of a horizon.
    pub handoff: bool,
    pub handoff_margin: f64,
    /// Follow the flow across the horizons to the middle of the chart
    /// extension instead of stopping at the ε band. Needs `handoff`.
    pub cross_horizons: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            rtol: 1e-10,
            atol: 1e-10,
            epsilon: 1e-3,
            max_parameter: 1e5,
            pole_guard: 1e-3,
            drift_tol: 1e-8,
            null_tol: 1e-10,
            initial_step: None,
            min_step: 1e-14,
            max_steps: 5_000_000,
            record_every: 1,
            reverse: false,
            handoff: true,
            handoff_margin: 0.05,
            cross_horizons: false,
        }
    }
}

/// Radial exit band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn contains(&self, r: f64) -> bool {
        r > self.lo && r < self.hi
    }
}

impl FlowConfig {
    /// Exit band for a flow currently in `chart`: the ε band, widened into
    /// the chart extension when crossing is enabled and the flow is starred.
    pub fn band_in(&self, st: &Spacetime, chart: Chart) -> Band {
        let h = &st.horizons;
        if self.cross_horizons && chart == Chart::Starred {
            Band {
                lo: h.r_e - 0.5 * h.delta,
                hi: h.r_c + 0.5 * h.delta,
            }
        } else {
            Band {
                lo: h.r_e + self.epsilon,
                hi: h.r_c - self.epsilon,
            }
        }
    }

    /// The ε band [r_e + ε, r_c − ε].
    pub fn band(&self, st: &Spacetime) -> Band {
        self.band_in(st, Chart::BoyerLindquist)
    }

    fn validate(&self, st: &Spacetime) -> Result<(), FlowError> {
        let positive = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("epsilon", self.epsilon),
            ("max_parameter", self.max_parameter),
            ("pole_guard", self.pole_guard),
            ("drift_tol", self.drift_tol),
            ("null_tol", self.null_tol),
            ("min_step", self.min_step),
            ("handoff_margin", self.handoff_margin),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlowError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        let width = st.horizons.r_c - st.horizons.r_e;
        if 2.0 * self.epsilon >= width {
            return Err(FlowError::InvalidConfig(format!(
                "epsilon {} leaves an empty band",
                self.epsilon
            )));
        }
        if self.cross_horizons && !self.handoff {
            return Err(FlowError::InvalidConfig(
                "cross_horizons needs handoff".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    ExitedLow,
    ExitedHigh,
    MaxParameter,
    PoleGuard,
}

impl TerminalStatus {
    pub fn escaped(&self) -> bool {
        matches!(self, TerminalStatus::ExitedLow | TerminalStatus::ExitedHigh)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TerminalStatus::ExitedLow => "exited_low",
            TerminalStatus::ExitedHigh => "exited_high",
            TerminalStatus::MaxParameter => "max_parameter",
            TerminalStatus::PoleGuard => "pole_guard",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub q_value: f64,
    pub xi_t: f64,
    pub xi_phi: f64,
    pub carter: f64,
}

impl DriftReport {
    pub fn max(&self) -> f64 {
        self.q_value.max(self.xi_t).max(self.xi_phi).max(self.carter)
    }

    fn merge(&mut self, other: &DriftReport) {
        self.q_value = self.q_value.max(other.q_value);
        self.xi_t = self.xi_t.max(other.xi_t);
        self.xi_phi = self.xi_phi.max(other.xi_phi);
        self.carter = self.carter.max(other.carter);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub s: f64,
    /// φ reduced into [0, 2π).
    pub point: PhasePoint,
    pub q: f64,
    pub carter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub status: TerminalStatus,
    /// Unreduced final point (φ not wrapped).
    pub end: PhasePoint,
    pub s_end: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub drift_rejections: usize,
    pub max_drift: DriftReport,
    pub r_min: f64,
    pub r_max: f64,
    /// Affine parameter at which the flow switched to the starred chart.
    pub handoff_at: Option<f64>,
    pub band: Band,
    pub max_parameter: f64,
}

struct Stepper<'a> {
    st: &'a Spacetime,
    chart: Chart,
}

impl Stepper<'_> {
    fn f(&self, y: &[f64; 8]) -> [f64; 8] {
        phase_velocity(self.st, self.chart, y)
    }

    /// One DOPRI5 step from (y, k1); returns (y_new, error vector, f(y_new)).
    fn step(&self, y: &[f64; 8], k1: &[f64; 8], h: f64) -> ([f64; 8], [f64; 8], [f64; 8]) {
        let mut k = [[0.0; 8]; 7];
        k[0] = *k1;
        for stage in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..8 {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[stage] = self.f(&ys);
        }
        // The seventh stage is evaluated at the fifth-order solution.
        let mut y_new = *y;
        let mut err = [0.0; 8];
        for j in 0..7 {
            for i in 0..8 {
                if j < 6 {
                    y_new[i] += h * A[6][j] * k[j][i];
                }
                err[i] += h * E[j] * k[j][i];
            }
        }
        (y_new, err, k[6])
    }

    fn in_domain(&self, y: &[f64; 8]) -> bool {
        if !y.iter().all(|v| v.is_finite()) {
            return false;
        }
        let (lo, hi) = match self.chart {
            Chart::BoyerLindquist => (self.st.horizons.r_e, self.st.horizons.r_c),
            Chart::Starred => self.st.horizons.chart_interval(),
        };
        y[1] > lo && y[1] < hi && y[3] > 0.0 && y[3] < std::f64::consts::PI
    }
}

fn error_norm(y: &[f64; 8], y_new: &[f64; 8], err: &[f64; 8], atol: f64, rtol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..8 {
        let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / 8.0).sqrt()
}

fn conserved(st: &Spacetime, chart: Chart, y: &[f64; 8]) -> ConservedSet {
    ConservedSet::at(st, &PhasePoint::from_state(chart, y))
}

/// (t, φ, ξ_t, ξ_φ) ↦ −(t, φ, ξ_t, ξ_φ): an isometry lifted to a symplectic
/// map commuting with H_q. It swaps rays bound for the past and the future
/// horizons.
fn reflect(y: &[f64; 8]) -> [f64; 8] {
    let mut out = *y;
    for i in [0, 2, 4, 6] {
        out[i] = -out[i];
    }
    out
}

/// Integrates the flow of H_q from a null starting point.
pub fn integrate(st: &Spacetime, start: &PhasePoint, config: &FlowConfig) -> Result<Trajectory, FlowError> {
    config.validate(st)?;
    st.check_chart(start.chart, start.r(), start.theta())?;
    let guard = config.pole_guard;
    if start.theta() < guard || start.theta() > std::f64::consts::PI - guard {
        return Err(FlowError::InvalidConfig(format!(
            "starting theta {} lies in the pole guard band",
            start.theta()
        )));
    }
    let scale = start.scale();
    if scale == 0.0 {
        return Err(FlowError::InvalidConfig("zero covector".into()));
    }
    let q0 = st.hamiltonian_q(start)?;
    if q0.abs() > config.null_tol * scale {
        return Err(FlowError::NotNull {
            q: q0,
            tol: config.null_tol * scale,
        });
    }

    let mut band = config.band_in(st, start.chart);
    let dir = if config.reverse { -1.0 } else { 1.0 };
    let cap = config.max_parameter;
    let mut reference = ConservedSet::at(st, start);
    // True while integrating the reflected ray in the starred chart.
    let mut reflected = false;

    let mut stepper = Stepper {
        st,
        chart: start.chart,
    };
    let mut y = start.state();
    let mut s = 0.0_f64;
    let mut k1 = stepper.f(&y);
    let speed = k1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut h = config
        .initial_step
        .unwrap_or_else(|| 1e-3 * (st.horizons.r_c - st.horizons.r_e) / speed.max(1e-300))
        .min(cap);
    let mut err_prev = 1.0_f64;
    // Local tolerances are tightened each time the drift budget bites.
    let mut tighten = 1.0_f64;

    let mut traj = Trajectory {
        samples: Vec::new(),
        status: TerminalStatus::MaxParameter,
        end: *start,
        s_end: 0.0,
        accepted: 0,
        rejected: 0,
        drift_rejections: 0,
        max_drift: DriftReport::default(),
        r_min: start.r(),
        r_max: start.r(),
        handoff_at: None,
        band,
        max_parameter: cap,
    };
    // The state as a point of the original ray.
    let physical = |chart: Chart, reflected: bool, y: &[f64; 8]| -> Result<PhasePoint, FlowError> {
        let p = PhasePoint::from_state(chart, y);
        if !reflected {
            return Ok(p);
        }
        let bl = st.to_boyer_lindquist(&p)?;
        Ok(PhasePoint::from_state(Chart::BoyerLindquist, &reflect(&bl.state())))
    };
    let record = |traj: &mut Trajectory, s: f64, p: PhasePoint| {
        let c = ConservedSet::at(st, &p);
        traj.samples.push(TrajectorySample {
            s,
            point: p.reduced(),
            q: c.q_value,
            carter: c.carter,
        });
    };
    record(&mut traj, s, *start);

    if !band.contains(y[1]) {
        traj.status = if y[1] <= band.lo {
            TerminalStatus::ExitedLow
        } else {
            TerminalStatus::ExitedHigh
        };
        return Ok(traj);
    }

    let status = loop {
        if traj.accepted + traj.rejected >= config.max_steps {
            return Err(FlowError::StepBudget(config.max_steps));
        }
        let remaining = cap - s;
        if remaining <= 0.0 {
            break TerminalStatus::MaxParameter;
        }
        let h_try = h.min(remaining);
        if h_try < config.min_step {
            return Err(FlowError::StepFailure { s: dir * s, r: y[1], h: h_try });
        }
        let (y_new, err, k_new) = stepper.step(&y, &k1, dir * h_try);
        if !stepper.in_domain(&y_new) {
            traj.rejected += 1;
            h = 0.25 * h_try;
            continue;
        }
        let en = error_norm(&y, &y_new, &err, tighten * config.atol, tighten * config.rtol);
        if !(en <= 1.0) {
            traj.rejected += 1;
            let factor = if en.is_finite() {
                (SAFETY * en.powf(-1.0 / 5.0)).max(MIN_FACTOR)
            } else {
                MIN_FACTOR
            };
            h = h_try * factor;
            continue;
        }
        let drift = conserved(st, stepper.chart, &y_new).drift_from(&reference, scale);
        if drift.max() > config.drift_tol {
            traj.rejected += 1;
            traj.drift_rejections += 1;
            tighten = (0.1 * tighten).max(1e-4);
            h = 0.5 * h_try;
            continue;
        }

        // Accepted.
        let mut factor = SAFETY * en.max(1e-10).powf(-PI_ALPHA) * err_prev.powf(PI_BETA);
        factor = factor.clamp(MIN_FACTOR, MAX_FACTOR);
        err_prev = en.max(1e-4);

        // Land exactly on the exit boundary when the band is crossed.
        let crossed = if y_new[1] <= band.lo {
            Some((band.lo, TerminalStatus::ExitedLow))
        } else if y_new[1] >= band.hi {
            Some((band.hi, TerminalStatus::ExitedHigh))
        } else {
            None
        };
        if let Some((edge, status)) = crossed {
            let (h_hit, y_hit) = locate_crossing(&stepper, &y, &k1, dir, h_try, edge);
            let d = conserved(st, stepper.chart, &y_hit).drift_from(&reference, scale);
            if d.max() > config.drift_tol || !stepper.in_domain(&y_hit) {
                traj.rejected += 1;
                traj.drift_rejections += 1;
                tighten = (0.1 * tighten).max(1e-4);
                h = 0.5 * h_try;
                continue;
            }
            s += h_hit;
            y = y_hit;
            traj.accepted += 1;
            traj.max_drift.merge(&d);
            traj.r_min = traj.r_min.min(y[1]);
            traj.r_max = traj.r_max.max(y[1]);
            break status;
        }

        s += h_try;
        y = y_new;
        k1 = k_new;
        h = h_try * factor;
        traj.accepted += 1;
        traj.max_drift.merge(&drift);
        traj.r_min = traj.r_min.min(y[1]);
        traj.r_max = traj.r_max.max(y[1]);

        if y[3] < guard || y[3] > std::f64::consts::PI - guard {
            break TerminalStatus::PoleGuard;
        }

        if config.handoff && stepper.chart == Chart::BoyerLindquist {
            let h_ = &st.horizons;
            let near = y[1] - h_.r_e < config.handoff_margin || h_.r_c - y[1] < config.handoff_margin;
            // Switch only when the starred chart is better conditioned, i.e.
            // the ray heads for a future horizon. Rays bound for a past
            // horizon are reflected first when the exit band allows it.
            let (pp, sp) = (st.gauge.phi_prime(y[1]), st.gauge.psi_prime(y[1]));
            let direct = (y[5] + pp * y[4] + sp * y[6]).abs();
            let mirrored = (y[5] - pp * y[4] - sp * y[6]).abs();
            let bl = y[5].abs();
            let choice = if !near {
                None
            } else if direct <= bl && direct <= mirrored {
                Some(false)
            } else if mirrored <= bl && !config.cross_horizons {
                Some(true)
            } else {
                None
            };
            if let Some(mirror) = choice {
                let base = if mirror { reflect(&y) } else { y };
                let p = st.to_starred(&PhasePoint::from_state(Chart::BoyerLindquist, &base))?;
                stepper.chart = Chart::Starred;
                y = p.state();
                k1 = stepper.f(&y);
                reflected = mirror;
                if mirror {
                    reference.xi_t = -reference.xi_t;
                    reference.xi_phi = -reference.xi_phi;
                }
                traj.handoff_at = Some(dir * s);
                band = config.band_in(st, Chart::Starred);
                traj.band = band;
            }
        }

        if config.record_every > 0 && traj.accepted % config.record_every == 0 {
            record(&mut traj, dir * s, physical(stepper.chart, reflected, &y)?);
        }
    };

    let last_recorded = traj.samples.last().map(|p| p.s);
    let end = physical(stepper.chart, reflected, &y)?;
    if last_recorded != Some(dir * s) {
        record(&mut traj, dir * s, end);
    }
    traj.status = status;
    traj.end = end;
    traj.s_end = dir * s;
    Ok(traj)
}

/// Secant iteration on the step length so the step ends on r = edge.
fn locate_crossing(
    stepper: &Stepper<'_>,
    y: &[f64; 8],
    k1: &[f64; 8],
    dir: f64,
    h_full: f64,
    edge: f64,
) -> (f64, [f64; 8]) {
    let r_at = |h: f64| -> ([f64; 8], f64) {
        let (yn, _, _) = stepper.step(y, k1, dir * h);
        (yn, yn[1] - edge)
    };
    let (mut h0, mut g0) = (0.0, y[1] - edge);
    let (mut yb, mut g1) = r_at(h_full);
    let mut h1 = h_full;
    for _ in 0..60 {
        if g1.abs() <= 1e-13 * edge.abs().max(1.0) || g1 == g0 {
            break;
        }
        let mut hn = h1 - g1 * (h1 - h0) / (g1 - g0);
        if !(hn > 0.0 && hn <= h_full) {
            hn = 0.5 * (h0 + h1);
        }
        let (yn, gn) = r_at(hn);
        h0 = h1;
        g0 = g1;
        h1 = hn;
        g1 = gn;
        yb = yn;
        if !stepper.in_domain(&yb) {
            break;
        }
    }
    (h1, yb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::solve_xi_r;

    fn st(a: f64) -> Spacetime {
        Spacetime::reference(a).unwrap()
    }

    fn null_point(s: &Spacetime, r: f64, th: f64, xt: f64, xp: f64, xth: f64, plus: bool) -> PhasePoint {
        let xi = [xt, 0.0, xp, xth];
        let (p, m) = solve_xi_r(s, Chart::BoyerLindquist, r, th, &xi).unwrap();
        PhasePoint::new(Chart::BoyerLindquist, [0.0, r, 0.0, th], [xt, if plus { p } else { m }, xp, xth])
    }

    #[test]
    fn ingoing_radial_ray_exits_low_monotonically() {
        let s = st(0.0);
        let p = null_point(&s, 3.5, 1.2, -1.0, 0.0, 0.0, false);
        assert!(p.xi[1] < 0.0);
        let t = integrate(&s, &p, &FlowConfig::default()).unwrap();
        assert_eq!(t.status, TerminalStatus::ExitedLow);
        for w in t.samples.windows(2) {
            assert!(w[1].point.r() < w[0].point.r());
            assert!(w[1].s > w[0].s);
        }
        assert!((t.end.r() - t.band.lo).abs() < 1e-9);
        assert!(t.max_drift.max() < 1e-8);
    }

    #[test]
    fn photon_sphere_holds_for_moderate_parameter() {
        let s = st(0.0);
        let xp = 1.0;
        // ξ_r = 0 at r = 3 fixes ξ_t from q = 0.
        let r = 3.0;
        let mu = s.params.mu(r);
        let b = s.params.b();
        let xt = -(mu.sqrt() / (b * r * r)) * b * xp;
        let p = PhasePoint::new(Chart::BoyerLindquist, [0.0, r, 0.0, std::f64::consts::FRAC_PI_2], [xt, 0.0, xp, 0.0]);
        assert!(s.hamiltonian_q(&p).unwrap().abs() < 1e-14);
        let cfg = FlowConfig {
            max_parameter: 3.0,
            ..FlowConfig::default()
        };
        let t = integrate(&s, &p, &cfg).unwrap();
        assert_eq!(t.status, TerminalStatus::MaxParameter);
        assert!(t.samples.iter().all(|x| (x.point.r() - 3.0).abs() < 1e-6));
    }

    #[test]
    fn crossing_horizon_hands_off_to_starred_chart() {
        let s = st(0.3);
        let p = null_point(&s, 3.0, 1.0, -1.0, 0.5, 0.2, false);
        let cfg = FlowConfig {
            cross_horizons: true,
            ..FlowConfig::default()
        };
        let t = integrate(&s, &p, &cfg).unwrap();
        assert!(t.handoff_at.is_some());
        assert_eq!(t.status, TerminalStatus::ExitedLow);
        assert!(t.end.r() < s.horizons.r_e);
        assert_eq!(t.end.chart, Chart::Starred);
        assert!(t.max_drift.max() < 1e-8, "{:?}", t.max_drift);
    }

    #[test]
    fn rejects_non_null_start() {
        let s = st(0.3);
        let p = PhasePoint::new(Chart::BoyerLindquist, [0.0, 3.0, 0.0, 1.0], [0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            integrate(&s, &p, &FlowConfig::default()),
            Err(FlowError::NotNull { .. })
        ));
    }
}
