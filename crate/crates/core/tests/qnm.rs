use faer::c64;
use kds_core::geometry::metric::{sqrt_det_closed_form, starred_dual};
use kds_core::geometry::{FrameChoice, Spacetime};
use kds_core::qnm::*;
use kds_oracles::radial::REFERENCE_MODES;
use rand::{RngExt, SeedableRng};

fn spec(st: &Spacetime, m: i32, choice: FrameChoice) -> WaveOperatorSpec {
    WaveOperatorSpec {
        potential: Potential::Zero,
        frame: st.frame(choice).unwrap(),
        m,
    }
}

/// Test profile w(r, x) with its r and x derivatives.
fn profile(parity: Parity, r: f64, x: f64) -> (f64, f64, f64) {
    match parity {
        Parity::Even => (
            (r - 3.0).powi(3) + 2.0 * x * x * r + 0.5 * x.powi(4),
            3.0 * (r - 3.0).powi(2) + 2.0 * x * x,
            4.0 * x * r + 2.0 * x.powi(3),
        ),
        Parity::Odd => (x * (r * r + x * x), 2.0 * x * r, r * r + 3.0 * x * x),
    }
}

/// ρ² □u / (e^{−iσt*} e^{imφ*} sin^{|m|}θ) for u = e^{−iσt*} e^{imφ*} sin^{|m|}θ w, by
/// finite differences of √g g^{ab} ∂_b u.
fn box_by_differences(st: &Spacetime, m: i32, parity: Parity, sigma: c64, r: f64, x: f64) -> c64 {
    let i = c64::new(0.0, 1.0);
    let k = m.unsigned_abs() as i32;
    let mf = m as f64;
    let psi = |r: f64, th: f64| {
        let (s, c) = th.sin_cos();
        let (w, wr, wx) = profile(parity, r, c);
        let sk = s.powi(k);
        let dth = if k == 0 { 0.0 } else { k as f64 * s.powi(k - 1) * c * w } - sk * s * wx;
        (sk * w, sk * wr, dth)
    };
    // √g V^a with V^a = g^{ab} ∂_b u (phase stripped).
    let flux = |r: f64, th: f64| {
        let g = starred_dual(st, r, th);
        let sg = sqrt_det_closed_form(&st.params, r, th);
        let (p, pr, pth) = psi(r, th);
        let du = [-i * sigma * p, c64::new(pr, 0.0), i * mf * p, c64::new(pth, 0.0)];
        let v: Vec<c64> = (0..4).map(|a| (0..4).map(|b| du[b] * g[a][b]).sum()).collect();
        (sg, v)
    };
    let th = x.acos();
    let h = 1e-3;
    let d5 = |f: &dyn Fn(f64) -> c64, z: f64| {
        (f(z - 2.0 * h) - 8.0 * f(z - h) + 8.0 * f(z + h) - f(z + 2.0 * h)) / (12.0 * h)
    };
    let dr = d5(&|rr| { let (sg, v) = flux(rr, th); v[1] * sg }, r);
    let dth = d5(&|tt| { let (sg, v) = flux(r, tt); v[3] * sg }, th);
    let (sg, v) = flux(r, th);
    let boxu = (dr + dth) / sg + (-i * sigma) * v[0] + (i * mf) * v[2];
    let a = st.params.a();
    boxu * (r * r + a * a * x * x) / th.sin().powi(k)
}

#[test]
fn pencil_matches_direct_wave_operator() {
    let st = Spacetime::reference(0.3).unwrap();
    let grid = GridSpec { nr: 16, ntheta: 8 };
    let sigma = c64::new(0.37, -0.11);
    for m in [0, 1, -2] {
        for parity in [Parity::Even, Parity::Odd] {
            let sp = spec(&st, m, FrameChoice::Midpoint);
            let pencil = build_pencil(&st, &sp, &grid, parity, false).unwrap();
            let nx = pencil.nx();
            let v: Vec<c64> = pencil
                .r_nodes
                .iter()
                .flat_map(|&r| pencil.x_nodes.iter().map(move |&x| c64::new(profile(parity, r, x).0, 0.0)))
                .collect();
            let out = pencil.apply(sigma, &v);
            let scale = out.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (ir, &r) in pencil.r_nodes.iter().enumerate() {
                for (jx, &x) in pencil.x_nodes.iter().enumerate() {
                    let direct = box_by_differences(&st, m, parity, sigma, r, x);
                    let err = (out[ir * nx + jx] - direct).norm();
                    assert!(err < 1e-8 * scale, "m={m} {parity:?} r={r} x={x}: {err:e}");
                }
            }
        }
    }
}

#[test]
fn constants_are_annihilated_at_zero_frequency() {
    let st = Spacetime::reference(0.15).unwrap();
    let pencil = build_pencil(&st, &spec(&st, 0, FrameChoice::Midpoint), &GridSpec { nr: 12, ntheta: 6 }, Parity::Even, false).unwrap();
    assert_eq!(pencil.dim(), 12 * 3);
    let ones = vec![c64::new(1.0, 0.0); pencil.dim()];
    let out = pencil.apply(c64::new(0.0, 0.0), &ones);
    assert!(out.iter().all(|z| z.norm() < 1e-11));
}

#[test]
fn frame_assembly_is_the_shifted_pencil() {
    let st = Spacetime::reference(0.3).unwrap();
    let grid = GridSpec { nr: 10, ntheta: 4 };
    let sp = spec(&st, 2, FrameChoice::EventHorizon);
    let w = sp.frame.omega();
    let base = build_pencil(&st, &sp, &grid, Parity::Odd, false).unwrap();
    let framed = build_pencil(&st, &sp, &grid, Parity::Odd, true).unwrap();
    let s = c64::new(0.2, -0.05);
    let a = framed.matrix_at(s);
    let b = base.matrix_at(s + 2.0 * w);
    let mut worst: f64 = 0.0;
    for i in 0..base.dim() {
        for j in 0..base.dim() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    assert!(worst < 1e-10, "{worst:e}");
}

#[test]
fn grid_validation() {
    assert!(matches!(GridSpec { nr: 4, ntheta: 8 }.validate(), Err(QnmError::GridTooCoarse { .. })));
    assert!(GridSpec { nr: 16, ntheta: 7 }.validate().is_err());
    assert_eq!(GridSpec { nr: 16, ntheta: 8 }.doubled(), GridSpec { nr: 32, ntheta: 16 });
}

#[test]
fn invalid_potentials_are_rejected() {
    let bad = Potential::Tabulated {
        r: vec![3.0, 2.0],
        theta: vec![0.0, 1.0],
        re: vec![vec![0.0; 2]; 2],
        im: vec![],
    };
    assert!(bad.validate().is_err());
    let ok = Potential::Tabulated {
        r: vec![2.0, 3.0],
        theta: vec![0.0, 1.0],
        re: vec![vec![0.0, 1.0], vec![2.0, 3.0]],
        im: vec![],
    };
    assert!((ok.at(2.5, 0.5).re - 1.5).abs() < 1e-15);
    assert!((ok.at(9.0, 9.0).re - 3.0).abs() < 1e-15);
}

fn near(modes: &[Mode], s: c64, tol: f64) -> Option<&Mode> {
    modes.iter().find(|md| (md.sigma - s).norm() < tol)
}

#[test]
fn a_zero_spectrum_matches_separated_solver() {
    let st = Spacetime::reference(0.0).unwrap();
    let config = QnmConfig {
        grid: GridSpec { nr: 40, ntheta: 8 },
        ..QnmConfig::default()
    };
    let m0 = solve_qnm(&st, &spec(&st, 0, FrameChoice::Midpoint), &config).unwrap();
    let m1 = solve_qnm(&st, &spec(&st, 1, FrameChoice::Midpoint), &config).unwrap();
    assert!(near(&m0.modes, c64::new(0.0, 0.0), 1e-8).is_some());
    for (l, re, im) in REFERENCE_MODES {
        let s = c64::new(re, im);
        let a = near(&m0.modes, s, 1e-6).unwrap_or_else(|| panic!("l={l} missing at m=0"));
        assert_eq!(a.parity, if l % 2 == 0 { Parity::Even } else { Parity::Odd });
        if l >= 1 {
            let b = near(&m1.modes, s, 1e-6).unwrap_or_else(|| panic!("l={l} missing at m=1"));
            assert_ne!(a.parity, b.parity);
        }
    }
    for md in m0.modes.iter().chain(&m1.modes) {
        assert!(md.residual < 1e-8);
        assert!(md.doubling_shift.unwrap() < 1e-6);
    }
    // a = 0: no frame dependence, and m = 0 is never shifted.
    let moved = shift_frame(&m1, &st.frame(FrameChoice::EventHorizon).unwrap());
    assert_eq!(moved.modes, m1.modes);
}

#[test]
fn residual_behaviour() {
    let st = Spacetime::reference(0.15).unwrap();
    let config = QnmConfig {
        grid: GridSpec { nr: 24, ntheta: 6 },
        check_doubling: false,
        ..QnmConfig::default()
    };
    let sp = spec(&st, 0, FrameChoice::Midpoint);
    let res = solve_qnm(&st, &sp, &config).unwrap();
    let md = res.modes.iter().find(|md| md.sigma.norm() > 0.05).unwrap();
    let pencil = build_pencil(&st, &sp, &config.grid, md.parity, false).unwrap();
    let base = mode_residual(&pencil, md.sigma_coordinate, &md.eigenfunction).unwrap();
    let off = mode_residual(&pencil, md.sigma_coordinate + 1e-3, &md.eigenfunction).unwrap();
    assert!(base < 1e-8 && off > 10.0 * base);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let v: Vec<c64> = (0..pencil.dim()).map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let r = mode_residual(&pencil, c64::new(0.3, -0.02), &v).unwrap();
    assert!(r > 1e-2);
    assert!(matches!(mode_residual(&pencil, md.sigma, &vec![c64::new(0.0, 0.0); pencil.dim()]), Err(QnmError::ZeroVector)));
    // Real potential: the m = 0 spectrum is symmetric under σ ↦ −σ̄.
    for md in &res.modes {
        let mirror = c64::new(-md.sigma.re, md.sigma.im);
        assert!(near(&res.modes, mirror, 1e-7).is_some(), "{}", md.sigma);
    }
    assert_eq!(shift_frame(&res, &st.frame(FrameChoice::EventHorizon).unwrap()).modes, res.modes);
}

#[test]
fn empty_window_is_reported() {
    let st = Spacetime::reference(0.0).unwrap();
    let config = QnmConfig {
        grid: GridSpec { nr: 12, ntheta: 4 },
        window: Some(Window { re_max: 0.01, im_min: 5.0, im_max: 6.0 }),
        ..QnmConfig::default()
    };
    let res = solve_qnm(&st, &spec(&st, 0, FrameChoice::Midpoint), &config).unwrap();
    assert_eq!(res.require_modes(), Err(QnmError::EmptyWindow));
    assert_eq!(res.required_regularity, 0.5);
}
