use kds_core::flow::FlowConfig;
use kds_core::trapping::{contrast_scan, trapping_scan, Census, TrappingError};
use serde::Serialize;

use super::{build_spacetime, frame_label, CommandReport};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::VERSION;
use crate::output::OutputDir;

#[derive(Debug, Serialize)]
struct FrameCensus {
    frame: String,
    r0: f64,
    census: Census,
}

#[derive(Debug, Serialize)]
struct TrapOutput {
    version: &'static str,
    a: f64,
    seed: u64,
    orthogonal: Vec<FrameCensus>,
    contrast: Option<Census>,
    verdict: &'static str,
}

#[derive(Debug, Serialize)]
struct Row<'a> {
    kind: &'a str,
    frame: &'a str,
    r0: Option<f64>,
    requested: usize,
    integrated: usize,
    escaped_low: usize,
    escaped_high: usize,
    trapped: usize,
    pole_guard: usize,
    errors: usize,
    vacuous: bool,
    max_drift: f64,
    max_escape_parameter: f64,
}

fn row<'a>(kind: &'a str, frame: &'a str, r0: Option<f64>, c: &Census) -> Row<'a> {
    Row {
        kind,
        frame,
        r0,
        requested: c.requested,
        integrated: c.integrated,
        escaped_low: c.escaped_low,
        escaped_high: c.escaped_high,
        trapped: c.trapped,
        pole_guard: c.pole_guard,
        errors: c.errors,
        vacuous: c.vacuous,
        max_drift: c.max_drift.max(),
        max_escape_parameter: c.max_escape_parameter,
    }
}

fn usage(e: TrappingError) -> CliError {
    match e {
        TrappingError::InvalidInput(_) | TrappingError::Geometry(_) => CliError::Usage(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    }
}

pub fn run(config: &RunConfig, seed: u64, out: &mut OutputDir) -> Result<CommandReport, CliError> {
    let st = build_spacetime(&config.spacetime)?;
    let sec = &config.trap;
    if sec.census.count == 0 {
        return Err(CliError::Usage("trap.census.count must be at least 1".into()));
    }
    if !sec.orthogonal && sec.contrast.is_none() {
        return Err(CliError::Usage("nothing to run: orthogonal is off and no contrast section".into()));
    }
    let frames = sec
        .frames
        .iter()
        .map(|c| st.frame(*c).map(|f| (frame_label(c), f)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = CommandReport::default();
    let mut errors = 0;
    let mut orthogonal = Vec::new();
    if sec.orthogonal {
        for (label, frame) in &frames {
            let c = trapping_scan(&st, frame, seed, &sec.census).map_err(usage)?;
            errors += c.errors;
            let passed = c.all_escaped() && c.max_drift.max() < sec.census.flow.drift_tol;
            report.summary.push(format!(
                "orthogonal {label}: {} integrated, {} trapped, {} errors{}",
                c.integrated,
                c.trapped,
                c.errors,
                if c.vacuous { " (vacuous: no T-orthogonal null covectors)" } else { "" }
            ));
            report.verdict(format!("orthogonal_escape/{label}"), passed);
            orthogonal.push(FrameCensus {
                frame: label.clone(),
                r0: frame.r0(),
                census: c,
            });
        }
    }
    let contrast = match &sec.contrast {
        Some(cs) => {
            if cs.count == 0 {
                return Err(CliError::Usage("trap.contrast.count must be at least 1".into()));
            }
            let flow = FlowConfig {
                max_parameter: cs.max_parameter,
                ..sec.census.flow.clone()
            };
            let c = contrast_scan(&st, seed, cs.count, cs.offset, &flow).map_err(usage)?;
            errors += c.errors;
            report.summary.push(format!(
                "contrast: {} integrated, {} trapped up to s = {}",
                c.integrated, c.trapped, cs.max_parameter
            ));
            report.verdict("contrast_trapping", c.trapped > 0);
            Some(c)
        }
        None => None,
    };
    let passed = report.verdicts.iter().all(|v| v.passed);
    let mut rows: Vec<Row> = orthogonal
        .iter()
        .map(|fc| row("orthogonal", &fc.frame, Some(fc.r0), &fc.census))
        .collect();
    if let Some(c) = &contrast {
        rows.push(row("contrast", "", None, c));
    }
    out.write_csv("census.csv", &rows)?;
    out.write_json(
        "trap.json",
        &TrapOutput {
            version: VERSION,
            a: st.params.a(),
            seed,
            orthogonal,
            contrast,
            verdict: if passed && errors == 0 { "PASS" } else { "FAIL" },
        },
    )?;
    if errors > 0 {
        report.failure = Some(CliError::Numerical(format!("{errors} integrations failed")));
    } else if !passed {
        report.failure = Some(CliError::ClaimFailure(report.failed_claims()));
    }
    Ok(report)
}
