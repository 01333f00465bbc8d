use kds_core::geometry::fredholm_window;
use kds_core::qnm::{solve_qnm, GridSpec, Mode, Parity, QnmError, WaveOperatorSpec, Window};
use serde::Serialize;

use super::{build_spacetime, frame_label, CommandReport};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::VERSION;
use crate::output::OutputDir;

#[derive(Debug, Clone, Copy, Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

impl From<num_complex::Complex64> for Complex {
    fn from(z: num_complex::Complex64) -> Self {
        Complex { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
struct ModeOut {
    /// Frequency with respect to T.
    sigma: Complex,
    /// Frequency with respect to ∂_{t*}.
    sigma_coordinate: Complex,
    parity: Parity,
    multiplicity: usize,
    residual: f64,
    doubling_shift: Option<f64>,
    converged: bool,
}

impl From<&Mode> for ModeOut {
    fn from(m: &Mode) -> Self {
        ModeOut {
            sigma: m.sigma.into(),
            sigma_coordinate: m.sigma_coordinate.into(),
            parity: m.parity,
            multiplicity: m.multiplicity,
            residual: m.residual,
            doubling_shift: m.doubling_shift,
            converged: m.converged,
        }
    }
}

#[derive(Debug, Serialize)]
struct QnmOutput {
    version: &'static str,
    a: f64,
    m: i32,
    frame: String,
    r0: f64,
    omega: f64,
    grid: GridSpec,
    window: Window,
    beta: f64,
    regularity: f64,
    /// Im σ = (1 − 2s)/(2β) for the working s.
    admissibility_line: f64,
    /// Smallest s whose admissible half-plane contains the whole window.
    required_regularity: f64,
    warnings: Vec<String>,
    modes: Vec<ModeOut>,
    unconverged: Vec<ModeOut>,
}

#[derive(Debug, Serialize)]
struct EigenRow {
    mode: usize,
    parity: Parity,
    r: f64,
    x: f64,
    re: f64,
    im: f64,
}

fn map_error(e: QnmError) -> CliError {
    match e {
        QnmError::Geometry(g) => g.into(),
        QnmError::GridTooCoarse { .. } | QnmError::InvalidSpec(_) => CliError::Usage(e.to_string()),
        QnmError::EigensolveFailure(_) | QnmError::ZeroVector | QnmError::EmptyWindow => {
            CliError::Numerical(e.to_string())
        }
    }
}

pub fn run(config: &RunConfig, out: &mut OutputDir) -> Result<CommandReport, CliError> {
    let st = build_spacetime(&config.spacetime)?;
    let sec = &config.qnm;
    let frame = st.frame(sec.frame)?;
    let solver = sec.solver_config();
    if let Some(w) = &solver.window {
        w.validate().map_err(map_error)?;
    }
    let beta = st.beta();
    let line = fredholm_window(beta, sec.regularity)?;
    let spec = WaveOperatorSpec {
        potential: sec.potential.clone(),
        frame,
        m: sec.m,
    };
    let result = solve_qnm(&st, &spec, &solver).map_err(map_error)?;
    let mut report = CommandReport::default();
    let w = result.window;
    let below = w.im_max <= line;
    if below {
        report.warnings.push(format!(
            "window lies entirely below the admissibility line Im sigma = {line} for s = {}; raise s to at least {}",
            sec.regularity, result.required_regularity
        ));
    } else if w.im_min < line {
        report.warnings.push(format!(
            "window dips below Im sigma = {line}; modes there need s >= {} (beta = {beta})",
            result.required_regularity
        ));
    }
    for m in &result.modes {
        report.summary.push(format!(
            "{:?} sigma_T = {:+.10} {:+.10}i  residual {:.1e}",
            m.parity, m.sigma.re, m.sigma.im, m.residual
        ));
    }
    report.summary.push(format!(
        "{} converged, {} rejected",
        result.modes.len(),
        result.unconverged.len()
    ));
    let output = QnmOutput {
        version: VERSION,
        a: st.params.a(),
        m: sec.m,
        frame: frame_label(&sec.frame),
        r0: result.r0,
        omega: result.omega,
        grid: result.grid,
        window: w,
        beta,
        regularity: sec.regularity,
        admissibility_line: line,
        required_regularity: result.required_regularity,
        warnings: report.warnings.clone(),
        modes: result.modes.iter().map(ModeOut::from).collect(),
        unconverged: result.unconverged.iter().map(ModeOut::from).collect(),
    };
    out.write_json("qnm.json", &output)?;
    if sec.eigenfunctions {
        let nx = result.x_nodes.len();
        let mut rows = Vec::new();
        for (k, m) in result.modes.iter().enumerate() {
            for (idx, v) in m.eigenfunction.iter().enumerate() {
                rows.push(EigenRow {
                    mode: k,
                    parity: m.parity,
                    r: result.r_nodes[idx / nx],
                    x: result.x_nodes[idx % nx],
                    re: v.re,
                    im: v.im,
                });
            }
        }
        out.write_csv("eigenfunctions.csv", &rows)?;
    }
    report.verdict("converged_modes", !result.modes.is_empty() || below);
    if result.modes.is_empty() && !below {
        report.failure = Some(map_error(QnmError::EmptyWindow));
    }
    Ok(report)
}
