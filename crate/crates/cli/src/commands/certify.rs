use kds_core::flow::{integrate, sample_orthogonal_null, FlowConfig, PhasePoint};
use kds_core::geometry::{
    fredholm_window, Horizon, Spacetime, StationaryFrame, NULL_THRESHOLD,
};
use kds_core::trapping::{
    convexity_check, escape_constant_search, photon_orbit_seeds, radial_point_check,
    sigma_changes, sigma_degeneracy_scan, turning_point_samples, TrappingError,
};
use serde::Serialize;

use super::{build_spacetime, frame_label, with_rotation, CommandReport};
use crate::config::{CertifySection, RunConfig};
use crate::error::CliError;
use crate::manifest::VERSION;
use crate::output::OutputDir;

#[derive(Debug, Clone, Serialize)]
pub struct ClaimRow {
    pub claim: String,
    pub a: f64,
    pub frame: String,
    pub r0: Option<f64>,
    pub passed: bool,
    /// Passed because the tested set is empty.
    pub vacuous: bool,
    /// The headline number behind the verdict.
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Serialize)]
struct CertifyOutput {
    version: &'static str,
    seed: u64,
    lambda: f64,
    mass: f64,
    claims: Vec<ClaimRow>,
    verdict: &'static str,
}

struct Ctx<'a> {
    a: f64,
    frame: String,
    r0: Option<f64>,
    rows: &'a mut Vec<ClaimRow>,
}

impl Ctx<'_> {
    fn push(&mut self, claim: &str, passed: bool, vacuous: bool, value: f64, detail: String) {
        self.rows.push(ClaimRow {
            claim: claim.into(),
            a: self.a,
            frame: self.frame.clone(),
            r0: self.r0,
            passed,
            vacuous,
            value,
            detail,
        });
    }

    fn error(&mut self, claim: &str, e: &dyn std::fmt::Display) {
        self.push(claim, false, false, f64::NAN, e.to_string());
    }
}

fn spacetime_claims(st: &Spacetime, sec: &CertifySection, seed: u64, ctx: &mut Ctx) {
    let beta = st.beta();
    let dev = (beta * st.horizons.kappa_min() - 1.0).abs();
    let line = fredholm_window(beta, 0.5).unwrap_or(f64::NAN);
    ctx.push(
        "beta_threshold",
        dev < 1e-12 && line == 0.0,
        false,
        dev,
        format!("beta = {beta}, line at s = 1/2: {line}"),
    );
    let scan = sigma_degeneracy_scan(st, seed, sec.degeneracy_samples, sec.flow.pole_guard);
    ctx.push(
        "sigma_nondegenerate",
        scan.samples > 0 && scan.null_hits == 0 && scan.min_ratio > 0.0,
        false,
        scan.min_ratio,
        format!("{} samples, {} null hits, max G*(dt*,dt*) = {}", scan.samples, scan.null_hits, scan.max_dt_norm),
    );
}

fn ergoregion_claim(st: &Spacetime, frame: &StationaryFrame, sec: &CertifySection, ctx: &mut Ctx) {
    let map = st.ergoregion_map(frame, sec.ergo_nr, sec.ergo_ntheta);
    let horizon = frame.horizon(&st.horizons);
    let expected = match (st.params.a() == 0.0, horizon) {
        (true, _) => 0,
        (false, Some(_)) => 1,
        (false, None) => 2,
    };
    // g(T, T) at r0 over θ: zero on a horizon, negative inside.
    let thetas: Vec<f64> = (1..sec.ergo_ntheta).map(|j| j as f64 * std::f64::consts::PI / sec.ergo_ntheta as f64).collect();
    let at_r0 = thetas.iter().map(|&th| st.t_norm(frame, frame.r0(), th));
    let (at_r0_ok, worst) = match horizon {
        Some(_) => {
            let w = at_r0.fold(0.0_f64, |m, v| m.max(v.abs()));
            (w <= NULL_THRESHOLD, w)
        }
        None => {
            let w = at_r0.fold(f64::NEG_INFINITY, f64::max);
            (w < 0.0, w)
        }
    };
    ctx.push(
        "ergoregion",
        map.spacelike_components == expected && at_r0_ok,
        false,
        map.spacelike_components as f64,
        format!("{} components (expected {expected}); g(T,T) at r0: {worst:e}", map.spacelike_components),
    );
}

fn convexity_claim(st: &Spacetime, frame: &StationaryFrame, sec: &CertifySection, seed: u64, ctx: &mut Ctx) {
    let band = sec.flow.band(st);
    let samples = turning_point_samples(st, frame, seed, sec.convexity_samples, band, sec.flow.pole_guard, 20_000 * sec.convexity_samples.max(1));
    if samples.is_empty() {
        ctx.push("convexity", true, true, 0.0, "no T-orthogonal turning points".into());
        return;
    }
    match convexity_check(st, frame, &samples, &sec.convexity) {
        Ok(rep) => ctx.push(
            "convexity",
            rep.passed(sec.convexity_tol),
            false,
            rep.max_relative_mismatch,
            format!("{} samples, {} sign violations", rep.samples, rep.sign_violations),
        ),
        Err(e) => ctx.error("convexity", &e),
    }
}

fn escape_claim(st: &Spacetime, frame: &StationaryFrame, sec: &CertifySection, ctx: &mut Ctx) {
    match escape_constant_search(st, frame, &sec.escape_grid, sec.flow.band(st), sec.flow.pole_guard) {
        Ok(cert) if cert.grid_points == 0 => {
            ctx.push("escape_function", true, true, 0.0, "no T-orthogonal null points on the grid".into())
        }
        Ok(cert) => ctx.push(
            "escape_function",
            cert.refined_violations == 0,
            false,
            cert.function.c,
            format!(
                "C = {} on {} points; {} violations on {} refined points",
                cert.function.c, cert.grid_points, cert.refined_violations, cert.refined_points
            ),
        ),
        Err(e) => ctx.error("escape_function", &e),
    }
}

fn radial_claim(st: &Spacetime, frame: &StationaryFrame, sec: &CertifySection, ctx: &mut Ctx) {
    let n = sec.radial_thetas.max(1);
    let thetas: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) * std::f64::consts::PI / n as f64).collect();
    let on = frame.horizon(&st.horizons);
    let mut worst = 0.0_f64;
    let mut details = Vec::new();
    let mut passed = true;
    for horizon in [Horizon::Event, Horizon::Cosmological] {
        let exact = on == Some(horizon);
        match radial_point_check(st, frame, horizon, &thetas, exact) {
            Ok(rep) => {
                passed &= rep.passed();
                worst = worst.max(rep.symbol_residual);
                details.push(format!(
                    "{horizon:?}: residual {:e}, transverse {:e}, coefficient {:e}{}",
                    rep.symbol_residual,
                    rep.transverse_max,
                    rep.coefficient_mismatch,
                    if exact { " (exact)" } else { "" }
                ));
            }
            Err(e) => {
                passed = false;
                details.push(format!("{horizon:?}: {e}"));
            }
        }
    }
    ctx.push("radial_points", passed, false, worst, details.join("; "));
}

fn split_claim(st: &Spacetime, frame: &StationaryFrame, sec: &CertifySection, seed: u64, ctx: &mut Ctx) {
    let n = sec.split_trajectories;
    let flow = FlowConfig {
        record_every: 1,
        max_parameter: sec.flow.max_parameter.min(50.0),
        ..sec.flow.clone()
    };
    let mut points: Vec<PhasePoint> = photon_orbit_seeds(st, seed, n, 1e-3, flow.pole_guard);
    if let Ok(set) = sample_orthogonal_null(st, frame, seed, n, flow.band(st), flow.pole_guard, 20_000 * n.max(1)) {
        points.extend(set.points.iter().map(|s| s.point));
    }
    let mut changes = 0;
    let mut failures = 0;
    for p in &points {
        let r: Result<usize, TrappingError> = integrate(st, p, &flow)
            .map_err(TrappingError::from)
            .and_then(|t| sigma_changes(st, &t));
        match r {
            Ok(c) => changes += c,
            Err(_) => failures += 1,
        }
    }
    ctx.push(
        "sigma_invariance",
        changes == 0 && failures == 0 && !points.is_empty(),
        false,
        changes as f64,
        format!("{} trajectories, {changes} class changes, {failures} failed", points.len()),
    );
}

pub fn run(config: &RunConfig, seed: u64, out: &mut OutputDir) -> Result<CommandReport, CliError> {
    let sec = &config.certify;
    if sec.a_values.is_empty() || sec.frames.is_empty() {
        return Err(CliError::Usage("certify needs at least one rotation and one frame".into()));
    }
    // Validate the whole matrix before running anything.
    let mut cases = Vec::new();
    for &a in &sec.a_values {
        let st = build_spacetime(&with_rotation(&config.spacetime, a))?;
        let frames = sec
            .frames
            .iter()
            .map(|c| st.frame(*c).map(|f| (frame_label(c), f)))
            .collect::<Result<Vec<_>, _>>()?;
        cases.push((a, st, frames));
    }
    let mut rows = Vec::new();
    for (a, st, frames) in &cases {
        let mut ctx = Ctx { a: *a, frame: String::new(), r0: None, rows: &mut rows };
        spacetime_claims(st, sec, seed, &mut ctx);
        for (k, (label, frame)) in frames.iter().enumerate() {
            let mut ctx = Ctx { a: *a, frame: label.clone(), r0: Some(frame.r0()), rows: &mut rows };
            let s = seed.wrapping_add(k as u64);
            ergoregion_claim(st, frame, sec, &mut ctx);
            convexity_claim(st, frame, sec, s, &mut ctx);
            escape_claim(st, frame, sec, &mut ctx);
            radial_claim(st, frame, sec, &mut ctx);
            split_claim(st, frame, sec, s, &mut ctx);
        }
    }
    let mut report = CommandReport::default();
    for r in &rows {
        let name = if r.frame.is_empty() {
            format!("{}/a={}", r.claim, r.a)
        } else {
            format!("{}/a={}/{}", r.claim, r.a, r.frame)
        };
        report.summary.push(format!(
            "{} {name}{}",
            if r.passed { "PASS" } else { "FAIL" },
            if r.vacuous { " (vacuous)" } else { "" }
        ));
        report.verdict(name, r.passed);
    }
    let passed = rows.iter().all(|r| r.passed);
    out.write_csv("certify.csv", &rows)?;
    out.write_json(
        "certify.json",
        &CertifyOutput {
            version: VERSION,
            seed,
            lambda: config.spacetime.lambda,
            mass: config.spacetime.mass,
            claims: rows,
            verdict: if passed { "PASS" } else { "FAIL" },
        },
    )?;
    if !passed {
        report.failure = Some(CliError::ClaimFailure(report.failed_claims()));
    }
    Ok(report)
}
