//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Tolerances are pinned below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use kds_core::flow::FlowConfig;
use kds_core::geometry::metric::{bl_metric, starred_metric};
use kds_core::geometry::{fredholm_window, Chart, FrameChoice, Horizon, Spacetime, NULL_THRESHOLD};
use kds_core::qnm::{solve_qnm, GridSpec, Mode, Potential, QnmConfig, WaveOperatorSpec};
use kds_core::trapping::{
    contrast_scan, convexity_check, escape_constant_search, radial_point_check, trapping_scan,
    turning_point_samples, CensusConfig, ConvexityOptions, EscapeGrid,
};
use kds_oracles::metric::determinant;
use kds_oracles::radial::REFERENCE_MODES;
use num_complex::Complex64 as C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SPINS: [f64; 3] = [0.0, 0.15, 0.3];
const FRAMES: [FrameChoice; 4] = [
    FrameChoice::EventHorizon,
    FrameChoice::Midpoint,
    FrameChoice::MuPrimeCritical,
    FrameChoice::CosmologicalHorizon,
];

const DUALITY_TOL: f64 = 1e-12;
const DET_TOL: f64 = 1e-10;
const CHART_TOL: f64 = 1e-10;
const DRIFT_TOL: f64 = 1e-8;
const CONVEXITY_MISMATCH_TOL: f64 = 1e-6;
const RADIAL_SYMBOL_TOL: f64 = 1e-12;
const RADIAL_TRANSVERSE_TOL: f64 = 1e-12;
const RADIAL_COEFF_TOL: f64 = 1e-10;
const BETA_TOL: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-6;
const DEGENERACY_TOL: f64 = 1e-6;
const SHIFT_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-8;
const DOUBLING_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reference(a: f64) -> Spacetime {
    Spacetime::reference(a).expect("reference spacetime")
}

fn random_points(lo: f64, hi: f64, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = lo + (hi - lo) * rng.random_range(1e-6..1.0 - 1e-6);
            let th = rng.random_range(1e-3..std::f64::consts::PI - 1e-3);
            (r, th)
        })
        .collect()
}

fn geometry_identities() -> Outcome {
    let (mut duality, mut det_err, mut chart_err) = (0.0f64, 0.0f64, 0.0f64);
    for (k, a) in SPINS.into_iter().enumerate() {
        let st = reference(a);
        let (lo, hi) = st.horizons.chart_interval();
        let b = st.params.b();
        for (r, th) in random_points(lo, hi, 10_000, 100 + k as u64) {
            let s = st
                .metric_at(Chart::Starred, [0.0, r, 0.0, th])
                .map_err(|e| e.to_string())?;
            duality = duality.max(s.duality_defect());
            let rho2 = r * r + a * a * th.cos().powi(2);
            let closed = -(rho2 * th.sin() / (b * b)).powi(2);
            det_err = det_err.max((determinant(&s.g) - closed).abs() / closed.abs());
        }
        // Chart compatibility: pulling the Boyer–Lindquist metric back
        // through the coordinate change reproduces the starred metric.
        for (r, th) in random_points(st.horizons.r_e, st.horizons.r_c, 10_000, 200 + k as u64) {
            if st.params.mu(r).abs() < 0.05 {
                continue;
            }
            let g = bl_metric(&st.params, r, th);
            let gs = starred_metric(&st, r, th);
            let (dp, dq) = (st.gauge.phi_prime(r), st.gauge.psi_prime(r));
            let mut j = [[0.0; 4]; 4];
            j[0][0] = 1.0;
            j[0][1] = dp;
            j[1][1] = 1.0;
            j[2][1] = dq;
            j[2][2] = 1.0;
            j[3][3] = 1.0;
            let scale = g.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())) * (1.0 + dp.abs()).powi(2);
            for p in 0..4 {
                for q in 0..4 {
                    let mut s = 0.0;
                    for c in 0..4 {
                        for d in 0..4 {
                            s += j[c][p] * j[d][q] * g[c][d];
                        }
                    }
                    chart_err = chart_err.max((s - gs[p][q]).abs() / scale);
                }
            }
        }
    }
    ensure(duality < DUALITY_TOL, || format!("g·g⁻¹ defect {duality:.2e}"))?;
    ensure(det_err < DET_TOL, || format!("determinant error {det_err:.2e}"))?;
    ensure(chart_err < CHART_TOL, || format!("chart mismatch {chart_err:.2e}"))?;
    Ok(format!(
        "identity defect {duality:.1e}, det {det_err:.1e}, chart {chart_err:.1e}"
    ))
}

fn causal_character() -> Outcome {
    let thetas: Vec<f64> = (1..64).map(|k| k as f64 * std::f64::consts::PI / 64.0).collect();
    let mut counts = Vec::new();
    for a in SPINS {
        let st = reference(a);
        for choice in FRAMES {
            let frame = st.frame(choice).map_err(|e| e.to_string())?;
            let r0 = frame.r0();
            let on_horizon = matches!(choice, FrameChoice::EventHorizon | FrameChoice::CosmologicalHorizon);
            for &th in &thetas {
                let v = st.t_norm(&frame, r0, th);
                if on_horizon {
                    ensure(v.abs() <= NULL_THRESHOLD, || format!("a={a} {choice:?}: g(T,T) = {v:e} at θ={th}"))?;
                } else {
                    ensure(v < 0.0, || format!("a={a} {choice:?}: g(T,T) = {v:e} at r0"))?;
                }
            }
            let n = st.ergoregion_map(&frame, 400, 64).spacelike_components;
            let expected = if a == 0.0 {
                0
            } else if on_horizon {
                1
            } else {
                2
            };
            ensure(n == expected, || format!("a={a} {choice:?}: {n} ergoregions, expected {expected}"))?;
            counts.push(n);
        }
    }
    Ok(format!("ergoregion counts {counts:?}"))
}

fn orthogonal_census() -> Outcome {
    let cfg = CensusConfig {
        count: 1000,
        ..CensusConfig::default()
    };
    let mut drift = 0.0f64;
    let mut escaped = 0;
    let mut vacuous = 0;
    let mut trapped_contrast = Vec::new();
    for a in SPINS {
        let st = reference(a);
        for choice in FRAMES {
            let frame = st.frame(choice).map_err(|e| e.to_string())?;
            let c = trapping_scan(&st, &frame, 42, &cfg).map_err(|e| e.to_string())?;
            if c.vacuous {
                // No T-orthogonal null covectors exist when T is timelike
                // everywhere; only possible without rotation.
                ensure(a == 0.0, || format!("a={a} {choice:?}: sampler found no data"))?;
                vacuous += 1;
                continue;
            }
            ensure(c.integrated == 1000, || format!("a={a} {choice:?}: {} integrated", c.integrated))?;
            ensure(c.all_escaped(), || format!("a={a} {choice:?}: {c:?}"))?;
            drift = drift.max(c.max_drift.max());
            escaped += c.escaped_low + c.escaped_high;
        }
        let flow = FlowConfig {
            max_parameter: 10.0,
            record_every: 0,
            ..FlowConfig::default()
        };
        let c = contrast_scan(&st, 42, 200, 0.0, &flow).map_err(|e| e.to_string())?;
        ensure(c.trapped >= 1, || format!("a={a}: no trapped contrast seed"))?;
        trapped_contrast.push(c.trapped);
    }
    ensure(drift < DRIFT_TOL, || format!("drift {drift:.2e}"))?;
    Ok(format!(
        "{escaped} escaped, {vacuous} vacuous frames, drift {drift:.1e}, contrast trapped {trapped_contrast:?}"
    ))
}

fn convexity_and_escape() -> Outcome {
    let flow = FlowConfig::default();
    let (mut mismatch, mut samples, mut vacuous, mut refined) = (0.0f64, 0, 0, 0);
    for a in SPINS {
        let st = reference(a);
        let band = flow.band(&st);
        for choice in FRAMES {
            let frame = st.frame(choice).map_err(|e| e.to_string())?;
            let pts = turning_point_samples(&st, &frame, 17, 1000, band, flow.pole_guard, 10_000_000);
            if pts.is_empty() {
                ensure(a == 0.0, || format!("a={a} {choice:?}: no turning points"))?;
                vacuous += 1;
            } else {
                ensure(pts.len() == 1000, || format!("a={a} {choice:?}: {} samples", pts.len()))?;
                let rep = convexity_check(&st, &frame, &pts, &ConvexityOptions::standard())
                    .map_err(|e| e.to_string())?;
                ensure(rep.sign_violations == 0, || format!("a={a} {choice:?}: {} sign violations", rep.sign_violations))?;
                ensure(rep.max_relative_mismatch < CONVEXITY_MISMATCH_TOL, || {
                    format!("a={a} {choice:?}: mismatch {:.2e}", rep.max_relative_mismatch)
                })?;
                mismatch = mismatch.max(rep.max_relative_mismatch);
                samples += rep.samples;
            }
            let cert = escape_constant_search(&st, &frame, &EscapeGrid::default(), band, flow.pole_guard)
                .map_err(|e| e.to_string())?;
            ensure(cert.refined_violations == 0, || {
                format!("a={a} {choice:?}: {} violations on the refined grid", cert.refined_violations)
            })?;
            refined += cert.refined_points;
        }
    }
    Ok(format!(
        "{samples} turning points, mismatch {mismatch:.1e}, {vacuous} vacuous frames, {refined} refined escape points"
    ))
}

fn radial_points() -> Outcome {
    let thetas: Vec<f64> = (1..32).map(|k| k as f64 * std::f64::consts::PI / 32.0).collect();
    let (mut symbol, mut transverse, mut coeff) = (0.0f64, 0.0f64, 0.0f64);
    for a in SPINS {
        let st = reference(a);
        for choice in FRAMES {
            let frame = st.frame(choice).map_err(|e| e.to_string())?;
            for horizon in [Horizon::Event, Horizon::Cosmological] {
                let exact = matches!(
                    (choice, horizon),
                    (FrameChoice::EventHorizon, Horizon::Event) | (FrameChoice::CosmologicalHorizon, Horizon::Cosmological)
                );
                let rep = radial_point_check(&st, &frame, horizon, &thetas, exact).map_err(|e| e.to_string())?;
                ensure(rep.symbol_residual < RADIAL_SYMBOL_TOL, || {
                    format!("a={a} {choice:?} {horizon:?}: symbol {:.2e}", rep.symbol_residual)
                })?;
                symbol = symbol.max(rep.symbol_residual);
                if exact {
                    ensure(rep.transverse_max < RADIAL_TRANSVERSE_TOL, || {
                        format!("a={a} {horizon:?}: transverse {:.2e}", rep.transverse_max)
                    })?;
                    ensure(rep.coefficient_mismatch < RADIAL_COEFF_TOL, || {
                        format!("a={a} {horizon:?}: coefficient {:.2e}", rep.coefficient_mismatch)
                    })?;
                    transverse = transverse.max(rep.transverse_max);
                    coeff = coeff.max(rep.coefficient_mismatch);
                }
            }
        }
    }
    Ok(format!("symbol {symbol:.1e}, transverse {transverse:.1e}, coefficient {coeff:.1e}"))
}

fn threshold() -> Outcome {
    let mut worst = 0.0f64;
    for a in SPINS {
        let st = reference(a);
        let h = &st.horizons;
        let beta = st.beta();
        let kappa = h.kappa_e.min(h.kappa_c);
        let err = (beta - 1.0 / kappa).abs() / beta;
        ensure(err < BETA_TOL, || format!("a={a}: β = {beta}, 1/κ = {}", 1.0 / kappa))?;
        worst = worst.max(err);
        let line = fredholm_window(beta, 0.5).map_err(|e| e.to_string())?;
        ensure(line == 0.0, || format!("a={a}: boundary at Im σ = {line:e}"))?;
    }
    Ok(format!("β·κ_min − 1 ≤ {worst:.1e}, boundary Im σ = 0"))
}

fn near(modes: &[Mode], s: C64, tol: f64) -> Option<&Mode> {
    modes
        .iter()
        .filter(|m| (m.sigma - s).norm() < tol)
        .min_by(|x, y| (x.sigma - s).norm().total_cmp(&(y.sigma - s).norm()))
}

fn check_converged(modes: &[Mode], label: &str) -> Result<(), String> {
    for md in modes {
        ensure(md.residual < RESIDUAL_TOL, || format!("{label}: residual {:.2e} at {}", md.residual, md.sigma))?;
        let d = md.doubling_shift.unwrap_or(f64::INFINITY);
        ensure(d <= DOUBLING_TOL, || format!("{label}: doubling shift {d:.2e} at {}", md.sigma))?;
    }
    Ok(())
}

fn qnm_cross_validation() -> Outcome {
    let spec = |st: &Spacetime, m: i32, choice: FrameChoice| -> Result<WaveOperatorSpec, String> {
        Ok(WaveOperatorSpec {
            potential: Potential::Zero,
            frame: st.frame(choice).map_err(|e| e.to_string())?,
            m,
        })
    };
    // Non-rotating: compare with the separated radial solver.
    let st = reference(0.0);
    let config = QnmConfig {
        grid: GridSpec { nr: 40, ntheta: 8 },
        ..QnmConfig::default()
    };
    let m0 = solve_qnm(&st, &spec(&st, 0, FrameChoice::Midpoint)?, &config).map_err(|e| e.to_string())?;
    let m1 = solve_qnm(&st, &spec(&st, 1, FrameChoice::Midpoint)?, &config).map_err(|e| e.to_string())?;
    check_converged(&m0.modes, "a=0 m=0")?;
    check_converged(&m1.modes, "a=0 m=1")?;
    let mut oracle_err = 0.0f64;
    let mut degeneracy = 0.0f64;
    for (l, re, im) in REFERENCE_MODES {
        let s = C64::new(re, im);
        let a = near(&m0.modes, s, ORACLE_TOL).ok_or_else(|| format!("l={l} ({s}) missing at m=0"))?;
        oracle_err = oracle_err.max((a.sigma - s).norm());
        if l >= 1 {
            let b = near(&m1.modes, s, ORACLE_TOL).ok_or_else(|| format!("l={l} ({s}) missing at m=1"))?;
            oracle_err = oracle_err.max((b.sigma - s).norm());
            degeneracy = degeneracy.max((a.sigma - b.sigma).norm());
        }
    }
    ensure(degeneracy < DEGENERACY_TOL, || format!("m-degeneracy {degeneracy:.2e}"))?;

    // Rotating: assemble directly in each frame and undo the shift.
    let st = reference(0.3);
    let m = 1;
    let frames = [FrameChoice::EventHorizon, FrameChoice::Midpoint, FrameChoice::CosmologicalHorizon];
    let config = QnmConfig {
        grid: GridSpec { nr: 40, ntheta: 12 },
        assemble_in_frame: true,
        ..QnmConfig::default()
    };
    let mut spectra = Vec::new();
    for choice in frames {
        let sp = spec(&st, m, choice)?;
        let omega = sp.frame.omega();
        let res = solve_qnm(&st, &sp, &config).map_err(|e| e.to_string())?;
        check_converged(&res.modes, &format!("a=0.3 {choice:?}"))?;
        let shifted: Vec<C64> = res.modes.iter().map(|md| md.sigma + m as f64 * omega).collect();
        spectra.push(shifted);
    }
    // Compare away from the window edges, which move with the frame.
    let w = config.window.unwrap_or_else(|| kds_core::qnm::Window::default_for(&st));
    let interior = |s: &C64| s.re.abs() < w.re_max - 0.1 && s.im > w.im_min + 0.02 && s.im < w.im_max - 0.1;
    let mut shift_err = 0.0f64;
    let mut compared = 0;
    for s in spectra[1].iter().filter(|s| interior(s)) {
        for (k, other) in [&spectra[0], &spectra[2]].into_iter().enumerate() {
            let d = other
                .iter()
                .map(|z| (z - s).norm())
                .fold(f64::INFINITY, f64::min);
            ensure(d < SHIFT_TOL, || format!("mode {s} moves by {d:.2e} in frame {}", if k == 0 { "r_e" } else { "r_c" }))?;
            shift_err = shift_err.max(d);
        }
        compared += 1;
    }
    ensure(compared > 0, || "no rotating modes to compare".into())?;
    Ok(format!(
        "oracle {oracle_err:.1e}, m-degeneracy {degeneracy:.1e}, {compared} modes frame-invariant to {shift_err:.1e}"
    ))
}

fn strip_timestamps(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let obj = v.as_object_mut().unwrap();
    obj.remove("started_at");
    obj.remove("finished_at");
    v
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, r#"{"spacetime": {"lambda": 0.06, "a": 0.3, "mass": 1.0}, "seed": 2024}"#)
        .map_err(|e| e.to_string())?;
    let run = |config: &Path, out: &Path| -> Result<(), String> {
        let status = Command::new(env!("CARGO_BIN_EXE_kds"))
            .arg("certify")
            .arg("--config")
            .arg(config)
            .arg("--out")
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || {
            format!("certify exited {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr))
        })
    };
    let seed_run = dir.path().join("seed");
    run(&cfg, &seed_run)?;
    let manifest = seed_run.join("manifest.json");
    let (first, second) = (dir.path().join("first"), dir.path().join("second"));
    run(&manifest, &first)?;
    run(&manifest, &second)?;
    for name in ["certify.json", "certify.csv"] {
        let a = std::fs::read(first.join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(second.join(name)).map_err(|e| e.to_string())?;
        let c = std::fs::read(seed_run.join(name)).map_err(|e| e.to_string())?;
        ensure(a == b && a == c, || format!("{name} differs between runs"))?;
    }
    ensure(
        strip_timestamps(&first.join("manifest.json")) == strip_timestamps(&second.join("manifest.json")),
        || "manifests differ beyond timestamps".into(),
    )?;
    Ok("certify.json, certify.csv byte-identical across 3 runs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("geometry identities", geometry_identities, Duration::from_secs(10)),
        ("causal character of T", causal_character, Duration::from_secs(30)),
        ("orthogonal trapping census", orthogonal_census, Duration::from_secs(600)),
        ("convexity and escape", convexity_and_escape, Duration::from_secs(300)),
        ("radial points", radial_points, Duration::from_secs(10)),
        ("threshold β", threshold, Duration::from_secs(1)),
        ("QNM cross-validation", qnm_cross_validation, Duration::from_secs(900)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget ({:.1?} > {budget:?})", elapsed)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({elapsed:.1?}) {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({elapsed:.1?}) {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
