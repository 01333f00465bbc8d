//! Companion linearisation, Newton polishing, doubling filter and frame shifts.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Spacetime, StationaryFrame};

use super::grid::Parity;
use super::operator::{assemble_wave_operator, WaveOperatorSpec};
use super::pencil::{discretize, GridSpec, OperatorPencil};
use super::QnmError;

/// Rectangle |Re σ| ≤ re_max, im_min ≤ Im σ ≤ im_max in the T-frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    /// |Re σ| ≤ 2/m, −3κ_min ≤ Im σ ≤ 1/m.
    pub fn default_for(st: &Spacetime) -> Self {
        let mass = st.params.mass();
        Window {
            re_max: 2.0 / mass,
            im_min: -3.0 * st.horizons.kappa_min(),
            im_max: 1.0 / mass,
        }
    }

    pub fn contains(&self, s: c64) -> bool {
        s.re.abs() <= self.re_max && s.im >= self.im_min && s.im <= self.im_max
    }

    pub fn validate(&self) -> Result<(), QnmError> {
        let ok = self.re_max.is_finite()
            && self.im_min.is_finite()
            && self.im_max.is_finite()
            && self.re_max > 0.0
            && self.im_min < self.im_max;
        if ok {
            Ok(())
        } else {
            Err(QnmError::InvalidSpec(format!("degenerate window {self:?}")))
        }
    }

    /// Smallest regularity s with the whole window above Im σ = (1 − 2s)/(2β).
    pub fn required_regularity(&self, beta: f64) -> f64 {
        (0.5 - beta * self.im_min).max(0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QnmConfig {
    pub grid: GridSpec,
    pub window: Option<Window>,
    pub residual_tol: f64,
    pub doubling_tol: f64,
    /// Relative radius used to group raw eigenvalues into clusters.
    pub cluster_tol: f64,
    pub newton_iterations: usize,
    pub check_doubling: bool,
    /// Assemble directly in the T-frame instead of shifting from ∂_{t*}.
    pub assemble_in_frame: bool,
}

impl Default for QnmConfig {
    fn default() -> Self {
        QnmConfig {
            grid: GridSpec::default(),
            window: None,
            residual_tol: 1e-8,
            doubling_tol: 1e-6,
            cluster_tol: 1e-6,
            newton_iterations: 20,
            check_doubling: true,
            assemble_in_frame: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// Frequency with respect to T.
    pub sigma: c64,
    /// Frequency with respect to ∂_{t*}.
    pub sigma_coordinate: c64,
    pub parity: Parity,
    pub multiplicity: usize,
    pub residual: f64,
    /// |σ(2N) − σ(N)| after polishing on the doubled grid.
    pub doubling_shift: Option<f64>,
    pub converged: bool,
    /// w(r_i, x_j) at index i·nx + j on the base grid, max-normalised.
    #[serde(skip)]
    pub eigenfunction: Vec<c64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QnmResult {
    pub r0: f64,
    pub omega: f64,
    pub m: i32,
    pub grid: GridSpec,
    pub window: Window,
    pub beta: f64,
    pub required_regularity: f64,
    pub modes: Vec<Mode>,
    /// Window candidates that failed the residual or doubling filter.
    pub unconverged: Vec<Mode>,
    pub r_nodes: Vec<f64>,
    pub x_nodes: Vec<f64>,
}

impl QnmResult {
    pub fn require_modes(&self) -> Result<(), QnmError> {
        if self.modes.is_empty() {
            Err(QnmError::EmptyWindow)
        } else {
            Ok(())
        }
    }
}

fn norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖P_σ v‖ / ‖v‖ in the Euclidean norm of grid values.
pub fn mode_residual(pencil: &OperatorPencil, sigma: c64, v: &[c64]) -> Result<f64, QnmError> {
    let nv = norm(v);
    if v.len() != pencil.dim() || nv == 0.0 || !nv.is_finite() {
        return Err(QnmError::ZeroVector);
    }
    Ok(norm(&pencil.apply(sigma, v)) / nv)
}

/// Eigenvalues and eigenvectors (first block) of the companion form
/// [[0, I], [−P2⁻¹P0, −P2⁻¹P1]].
pub fn companion_eigen(pencil: &OperatorPencil) -> Result<Vec<(c64, Vec<c64>)>, QnmError> {
    let n = pencil.dim();
    let zero = c64::new(0.0, 0.0);
    let one = c64::new(1.0, 0.0);
    if pencil.p2.iter().any(|d| d.norm() == 0.0) {
        return Err(QnmError::EigensolveFailure("singular leading coefficient".into()));
    }
    let comp = Mat::<c64>::from_fn(2 * n, 2 * n, |i, j| {
        if i < n {
            if j == i + n {
                one
            } else {
                zero
            }
        } else {
            let r = i - n;
            let d = pencil.p2[r];
            if j < n {
                -pencil.p0[(r, j)] / d
            } else {
                -pencil.p1[(r, j - n)] / d
            }
        }
    });
    let eig = comp
        .eigen()
        .map_err(|e| QnmError::EigensolveFailure(format!("{e:?}")))?;
    let s = eig.S();
    let u = eig.U();
    Ok((0..2 * n)
        .map(|k| (s[k], (0..n).map(|i| u[(i, k)]).collect()))
        .collect())
}

fn normalise(v: &mut [c64]) {
    let k = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(c64::new(1.0, 0.0));
    if k.norm() > 0.0 {
        for z in v.iter_mut() {
            *z /= k;
        }
    }
}

/// Newton's method on (P_σ v = 0, uᴴv = 1). Without a starting vector one
/// inverse-iteration step from σ0 supplies it.
pub fn polish(
    pencil: &OperatorPencil,
    sigma0: c64,
    v0: Option<&[c64]>,
    iterations: usize,
) -> Result<(c64, Vec<c64>), QnmError> {
    let n = pencil.dim();
    let mut v: Vec<c64> = match v0 {
        Some(v) => v.to_vec(),
        None => {
            let lu = pencil.matrix_at(sigma0).partial_piv_lu();
            let rhs = Mat::<c64>::from_fn(n, 1, |i, _| c64::new(1.0 + 0.1 * (i % 7) as f64, 0.3));
            let x = lu.solve(&rhs);
            (0..n).map(|i| x[(i, 0)]).collect()
        }
    };
    if !norm(&v).is_finite() || norm(&v) == 0.0 {
        return Err(QnmError::ZeroVector);
    }
    normalise(&mut v);
    let u: Vec<c64> = v.clone();
    let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let mut sigma = sigma0;
    let mut last_step = f64::INFINITY;
    for _ in 0..iterations {
        let l = pencil.matrix_at(sigma);
        let dl = pencil.derivative_at(sigma);
        let lv: Vec<c64> = (0..n).map(|i| (0..n).map(|j| l[(i, j)] * v[j]).sum()).collect();
        let dlv: Vec<c64> = (0..n).map(|i| (0..n).map(|j| dl[(i, j)] * v[j]).sum()).collect();
        let uv: c64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        let jac = Mat::<c64>::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => l[(i, j)],
            (true, false) => dlv[i],
            (false, true) => u[j].conj() / uu,
            (false, false) => c64::new(0.0, 0.0),
        });
        let rhs = Mat::<c64>::from_fn(n + 1, 1, |i, _| if i < n { -lv[i] } else { (c64::new(uu, 0.0) - uv) / uu });
        let dx = jac.partial_piv_lu().solve(&rhs);
        for i in 0..n {
            v[i] += dx[(i, 0)];
        }
        let ds = dx[(n, 0)];
        sigma += ds;
        if !sigma.re.is_finite() || !sigma.im.is_finite() {
            return Err(QnmError::EigensolveFailure("Newton diverged".into()));
        }
        // Stop at convergence or once rounding noise stops the contraction.
        let step = ds.norm();
        if step <= 1e-13 * sigma.norm().max(1.0) || (step > 0.5 * last_step && step < 1e-9) {
            break;
        }
        last_step = step;
    }
    normalise(&mut v);
    Ok((sigma, v))
}

/// Builds the ∂_{t*}-frame (or T-frame) pencil for one parity.
pub fn build_pencil(
    st: &Spacetime,
    spec: &WaveOperatorSpec,
    grid: &GridSpec,
    parity: Parity,
    in_frame: bool,
) -> Result<OperatorPencil, QnmError> {
    let omega = if in_frame { spec.frame.omega() } else { 0.0 };
    let coeffs = assemble_wave_operator(st, &spec.potential, spec.m, omega)?;
    discretize(&coeffs, grid, parity)
}

struct Candidate {
    raw: c64,
    vector: Vec<c64>,
}

pub fn solve_qnm(st: &Spacetime, spec: &WaveOperatorSpec, config: &QnmConfig) -> Result<QnmResult, QnmError> {
    config.grid.validate()?;
    let window = config.window.unwrap_or_else(|| Window::default_for(st));
    window.validate()?;
    let frame_omega = spec.frame.omega();
    let m = spec.m as f64;
    // Frame offset between the pencil's σ and σ_T.
    let offset = if config.assemble_in_frame { 0.0 } else { m * frame_omega };
    let beta = st.beta();
    let mut modes = Vec::new();
    let mut unconverged = Vec::new();
    let mut r_nodes = Vec::new();
    let mut x_nodes = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let pencil = build_pencil(st, spec, &config.grid, parity, config.assemble_in_frame)?;
        r_nodes = pencil.r_nodes.clone();
        x_nodes = pencil.x_nodes.clone();
        let raw = companion_eigen(&pencil)?;
        let raw_values: Vec<c64> = raw.iter().map(|(s, _)| *s).collect();
        let cands: Vec<Candidate> = raw
            .into_iter()
            .filter(|(s, _)| s.re.is_finite() && s.im.is_finite() && window.contains(*s - offset))
            .map(|(raw, vector)| Candidate { raw, vector })
            .collect();
        let polished: Vec<Option<(c64, Vec<c64>, f64)>> = cands
            .par_iter()
            .map(|c| {
                let (s, v) = polish(&pencil, c.raw, Some(&c.vector), config.newton_iterations).ok()?;
                let res = mode_residual(&pencil, s, &v).ok()?;
                ((s - c.raw).norm() < 1e-3 * c.raw.norm().max(1.0)).then_some((s, v, res))
            })
            .collect();
        // Merge candidates that polished onto the same eigenvalue.
        let mut merged: Vec<(c64, Vec<c64>, f64)> = Vec::new();
        for (p, c) in polished.into_iter().zip(&cands) {
            let (s, v, res) = match p {
                Some(x) => x,
                None => {
                    let mut v = c.vector.clone();
                    normalise(&mut v);
                    let res = mode_residual(&pencil, c.raw, &v).unwrap_or(f64::INFINITY);
                    (c.raw, v, res)
                }
            };
            let tol = config.cluster_tol * s.norm().max(1.0);
            if let Some(e) = merged.iter_mut().find(|e| (e.0 - s).norm() < tol) {
                if res < e.2 {
                    *e = (s, v, res);
                }
            } else {
                merged.push((s, v, res));
            }
        }
        let fine = if config.check_doubling && !merged.is_empty() {
            Some(build_pencil(st, spec, &config.grid.doubled(), parity, config.assemble_in_frame)?)
        } else {
            None
        };
        let checked: Vec<Mode> = merged
            .into_par_iter()
            .map(|(s, v, res)| {
                let tol = config.cluster_tol * s.norm().max(1.0);
                let multiplicity = raw_values.iter().filter(|z| (**z - s).norm() < tol).count().max(1);
                let shift = fine.as_ref().and_then(|f| {
                    let (sf, vf) = polish(f, s, None, config.newton_iterations).ok()?;
                    let rf = mode_residual(f, sf, &vf).ok()?;
                    (rf < config.residual_tol).then(|| (sf - s).norm())
                });
                let converged = res < config.residual_tol
                    && match (config.check_doubling, shift) {
                        (false, _) => true,
                        (true, Some(d)) => d < config.doubling_tol,
                        (true, None) => false,
                    };
                Mode {
                    sigma: s - offset,
                    sigma_coordinate: s - offset + m * frame_omega,
                    parity,
                    multiplicity,
                    residual: res,
                    doubling_shift: shift,
                    converged,
                    eigenfunction: v,
                }
            })
            .collect();
        for md in checked {
            if md.converged && window.contains(md.sigma) {
                modes.push(md);
            } else {
                unconverged.push(md);
            }
        }
    }
    let key = |a: &Mode, b: &Mode| {
        b.sigma
            .im
            .total_cmp(&a.sigma.im)
            .then(a.sigma.re.total_cmp(&b.sigma.re))
    };
    modes.sort_by(key);
    unconverged.sort_by(key);
    Ok(QnmResult {
        r0: spec.frame.r0(),
        omega: frame_omega,
        m: spec.m,
        grid: config.grid,
        window,
        beta,
        required_regularity: window.required_regularity(beta),
        modes,
        unconverged,
        r_nodes,
        x_nodes,
    })
}

/// Relabels frequencies for the frame at `new_frame`:
/// σ_T′ = σ_T + m(ω − ω′). The eigenfunctions on {t* = 0} are unchanged.
pub fn shift_frame(result: &QnmResult, new_frame: &StationaryFrame) -> QnmResult {
    let m = result.m as f64;
    let d = m * (result.omega - new_frame.omega());
    let shift = |md: &Mode| Mode {
        sigma: md.sigma + d,
        ..md.clone()
    };
    QnmResult {
        r0: new_frame.r0(),
        omega: new_frame.omega(),
        modes: result.modes.iter().map(shift).collect(),
        unconverged: result.unconverged.iter().map(shift).collect(),
        ..result.clone()
    }
}
