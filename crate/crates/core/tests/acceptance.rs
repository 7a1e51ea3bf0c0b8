//! One test per acceptance criterion; each prints a single PASS/FAIL line.

use std::f64::consts::PI;
use std::fs;

use nalgebra::DMatrix;
use skyrlab::cli::{run_with, Command};
use skyrlab::geometry::ConfinementPotential;
use skyrlab::helicity::{self, RotorParams, Sector};
use skyrlab::lindblad::{self, evolve, DensityMatrix2, QubitModel};
use skyrlab::micromag::{self, DiodeLlgRun, SizeSweep};
use skyrlab::params::{derive_scales, ExperimentConfig, MaterialParams, Section, Value};
use skyrlab::thiele::{classify_diode, Direction, OutcomeClass, ThieleSetup};
use skyrlab::transmon::{self, TransmonParams};

fn report(n: u32, name: &str, checks: &[(&str, bool)]) {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if failed.is_empty() {
        println!("criterion {n} ({name}): PASS");
    } else {
        println!("criterion {n} ({name}): FAIL [{}]", failed.join("; "));
    }
    assert!(failed.is_empty(), "criterion {n} failed: {failed:?}");
}

#[test]
fn criterion_1_derived_scales() {
    let base = MaterialParams::baseline();
    let l_ex = derive_scales(&base).unwrap().l_ex;
    println!("  l_ex = {:.4} nm", l_ex * 1e9);
    let mut in_band = true;
    for i in 0..=70 {
        let ku = 0.8e6 + 0.7e6 * i as f64 / 70.0;
        let d = derive_scales(&base.with_ku(ku)).unwrap().delta_dw * 1e9;
        in_band &= (3.16 - 5e-3..=4.33 + 5e-3).contains(&d);
    }
    let d_lo = derive_scales(&base.with_ku(1.5e6)).unwrap().delta_dw * 1e9;
    let d_hi = derive_scales(&base.with_ku(0.8e6)).unwrap().delta_dw * 1e9;
    println!("  delta_dw from {d_lo:.3} to {d_hi:.3} nm");
    report(1, "derived scales", &[
        ("l_ex within 1% of 8.4 nm", (l_ex * 1e9 / 8.4 - 1.0).abs() <= 0.01),
        ("delta_dw in [3.16, 4.33] nm over Ku in [0.8, 1.5] MJ/m^3", in_band),
    ]);
}

#[test]
fn criterion_2_thiele_diode() {
    let s = ThieleSetup::from_config(&ExperimentConfig::default()).unwrap();
    let fwd = classify_diode(&s.params, &s.potential, &s.geometry, Direction::Forward, &s.run).unwrap();
    let rev = classify_diode(&s.params, &s.potential, &s.geometry, Direction::Reverse, &s.run).unwrap();
    println!("  forward {:?} at {:?} s, reverse {:?} at {:?} s", fwd.class, fwd.time, rev.class, rev.time);

    let mg = s.geometry.mirrored();
    let mpot = ConfinementPotential::build(&mg, s.potential.u0, s.potential.lambda);
    let mir = classify_diode(&s.params.mirrored(), &mpot, &mg, Direction::Forward, &s.run).unwrap();
    let w = s.geometry.width();
    let same_path = mir.trajectory.len() == rev.trajectory.len()
        && mir.trajectory.iter().zip(&rev.trajectory).all(|(a, b)| {
            a.t == b.t && ((w - a.x) - b.x).abs() < 1e-9 * w && (a.y - b.y).abs() < 1e-9 * w
        });
    let finite = |t: Option<f64>| t.is_some_and(|t| t > 0.0 && t < 20e-9);
    report(2, "Thiele nonreciprocity", &[
        ("forward Transmitted", fwd.class == OutcomeClass::Transmitted),
        ("reverse Reflected", rev.class == OutcomeClass::Reflected),
        ("mirrored forward reproduces reverse class and time", mir.class == rev.class && mir.time == rev.time),
        ("mirrored trajectory is the mirror image", same_path),
        ("times finite and < 20 ns", finite(fwd.time) && finite(rev.time)),
    ]);
}

#[test]
fn criterion_3_llg_diode() {
    let run = DiodeLlgRun::from_config(&ExperimentConfig::default()).unwrap();
    let (fwd, rev) = rayon::join(
        || micromag::run_diode_llg(&run, Direction::Forward).unwrap(),
        || micromag::run_diode_llg(&run, Direction::Reverse).unwrap(),
    );
    for r in [&fwd, &rev] {
        let end = r.outcome.trajectory.last().unwrap();
        println!(
            "  {} {:?} at {:?} s, end ({:.1}, {:.1}) nm, Q in [{:.4}, {:.4}]",
            r.outcome.direction.as_str(),
            r.outcome.class,
            r.outcome.time,
            end.x * 1e9,
            end.y * 1e9,
            r.charge_range.0,
            r.charge_range.1
        );
    }
    let q_ok = |r: &micromag::LlgDiodeResult| {
        r.outcome.class == OutcomeClass::Annihilated
            || r.outcome.trajectory.iter().all(|s| (s.q + 1.0).abs() <= 0.05)
    };
    report(3, "LLG nonreciprocity", &[
        ("forward Transmitted", fwd.outcome.class == OutcomeClass::Transmitted),
        ("reverse Reflected", rev.outcome.class == OutcomeClass::Reflected),
        ("Q within 0.05 of -1 throughout", q_ok(&fwd) && q_ok(&rev)),
    ]);
}

#[test]
fn criterion_4_size_trend() {
    let sweep = SizeSweep::from_config(&ExperimentConfig::default());
    let pts = micromag::size_sweep(&sweep).unwrap();
    let d: Vec<f64> = pts.iter().map(|p| p.observables.diameter * 1e9).collect();
    for p in &pts {
        println!("  Ku {:.2e}: diameter {:.2} nm, Q {:.4}", p.ku, p.observables.diameter * 1e9, p.observables.charge);
    }
    let ku: Vec<f64> = pts.iter().map(|p| p.ku).collect();
    report(4, "skyrmion size trend", &[
        ("Ku grid is 0.8, 1.0, 1.2, 1.5 MJ/m^3", ku == [0.8e6, 1.0e6, 1.2e6, 1.5e6]),
        ("diameter strictly decreasing", d.windows(2).all(|w| w[1] < w[0])),
        ("0.8 MJ/m^3 within 50% of 20 nm", (10.0..=30.0).contains(&d[0])),
        ("1.5 MJ/m^3 within 50% of 3 nm", (1.5..=4.5).contains(&d[3])),
        ("every relaxed state keeps Q = -1", pts.iter().all(|p| (p.observables.charge + 1.0).abs() < 0.05)),
    ]);
}

#[test]
fn criterion_5_fidelity_maps() {
    let sec = ExperimentConfig::default().lindblad();
    let maps = lindblad::fidelity_maps(&sec).unwrap();
    let j = sec.j;
    let mut rabi_err = 0.0f64;
    for (k, &tj) in maps.t_over_j.iter().enumerate() {
        let want = tj.sin().powi(2);
        rabi_err = rabi_err.max((maps.forward[0][k] - want).abs()).max((maps.reverse[0][k] - want).abs());
    }
    let decay = QubitModel { j: 0.0, delta: 0.0, gamma_max: sec.gamma_max, eta: 1.0 };
    let t: Vec<f64> = maps.t_over_j.clone();
    let rho = evolve(&decay, DensityMatrix2::excited(), &t).unwrap();
    let decay_err = rho
        .iter()
        .zip(&t)
        .map(|(r, &t)| (r.p1 - (-decay.gamma() * t).exp()).abs())
        .fold(0.0, f64::max);
    let at = |t: f64, rho0: DensityMatrix2, fwd: bool| -> Vec<f64> {
        maps.eta
            .iter()
            .map(|&eta| {
                let r = evolve(&QubitModel::from_section(&sec, eta), rho0, &[0.0, t]).unwrap()[1];
                if fwd { r.p1 } else { r.p0 }
            })
            .collect()
    };
    let f_fwd = at(PI / (2.0 * j), DensityMatrix2::ground(), true);
    let f_rev = at(10.0 / j, DensityMatrix2::excited(), false);
    println!("  Rabi error {rabi_err:.2e}, decay error {decay_err:.2e}, trace error {:.2e}", maps.trace_error);
    println!("  F_fwd(pi/2J): {:.4} -> {:.4}, F_rev(10/J): {:.4} -> {:.4}", f_fwd[0], f_fwd[f_fwd.len() - 1], f_rev[0], f_rev[f_rev.len() - 1]);
    report(5, "fidelity maps", &[
        ("grid is 41 x 400", maps.eta.len() == 41 && maps.t_over_j.len() == 400),
        ("eta = 0 columns match sin^2(Jt) to 1e-6", rabi_err < 1e-6),
        ("J = 0 decay matches exp(-gamma t) to 1e-6", decay_err < 1e-6),
        ("forward F at pi/(2J) strictly decreasing in eta", f_fwd.windows(2).all(|w| w[1] < w[0])),
        ("reverse F at 10/J strictly increasing in eta", f_rev.windows(2).all(|w| w[1] > w[0])),
        ("trace error < 1e-9", maps.trace_error < 1e-9),
    ]);
}

fn dense_eigenvalues(p: &RotorParams) -> Vec<f64> {
    let h = helicity::build_hamiltonian(p);
    let n = h.dim();
    let m = DMatrix::from_fn(n, n, |i, j| h.get(i, j));
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn criterion_6_rotor_spectra() {
    let free = helicity::spectrum(&RotorParams::free(40), 5).unwrap();
    let free_ok = free.energies.iter().zip([0.0, 1.0, 1.0, 4.0, 4.0]).all(|(e, w)| (e - w).abs() < 1e-10);

    let deep = RotorParams { kappa_z: 1.0, h_z: 0.0, k2: 50.0, e_z: 0.0, eta: 1.0, m_max: 40 };
    let w01 = helicity::sector_spectrum(&deep, 3, Sector::Even).unwrap().omega01();
    let w_h = deep.harmonic_omega();

    let cfg = RotorParams::from_section(&ExperimentConfig::default().rotor());
    let n = 6;
    let a = helicity::spectrum(&cfg, n).unwrap();
    let b = helicity::spectrum(&RotorParams { m_max: cfg.m_max + 10, ..cfg }, n).unwrap();
    let trunc = a
        .energies
        .iter()
        .zip(&b.energies)
        .map(|(x, y)| (x - y).abs() / x.abs().max(cfg.kappa_z))
        .fold(0.0, f64::max);

    let small = RotorParams { kappa_z: 0.7, h_z: 0.3, k2: 2.5, e_z: 0.8, eta: 0.6, m_max: 4 };
    let brute = dense_eigenvalues(&small);
    // the production eigensolver on the same matrix (the truncation guard
    // rejects m_max = 4, so call it directly)
    let ours = skyrlab::linalg::jacobi_eigh(&helicity::build_hamiltonian(&small)).values;
    let brute_err = ours.iter().zip(&brute).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let sw = helicity::anharmonicity_sweep(&cfg, &[0.0, 1.0], 3).unwrap();
    let (d0, d1) = (sw[0].1.anharmonicity(), sw[1].1.anharmonicity());
    println!("  deep-well omega01 {w01:.4} vs {w_h:.4}; truncation shift {trunc:.1e}; brute-force error {brute_err:.1e}");
    println!("  delta_omega(eta=0) {d0:.6}, delta_omega(eta=1) {d1:.6}");
    report(6, "rotor spectra", &[
        ("free rotor {0,1,1,4,4} to 1e-10", free_ok),
        ("deep-well omega01 within 10% of 2 sqrt(2 kappa K2_eff)", (w01 - w_h).abs() < 0.1 * w_h),
        ("m_max + 10 shift < 1e-8 relative", trunc < 1e-8),
        ("brute-force agreement < 1e-10", ours.len() == brute.len() && brute_err < 1e-10),
        ("delta_omega(1) != delta_omega(0)", (d1 - d0).abs() > 1e-9),
    ]);
}

#[test]
fn criterion_7_transmon() {
    let p = TransmonParams { ej_sigma: 50.0, ec: 0.2, epsilon: 0.0, phi_e: 0.0 };
    let d = transmon::duffing_levels(&p, 3).unwrap();
    let want = (8.0f64 * 0.2 * 50.0).sqrt() - 0.2;
    let (ec, ej) = (0.2, 50.0);
    let ex = transmon::exact_levels(ec, ej, 2, transmon::min_cutoff(ec, ej)).unwrap();
    let f_exact = ex[1] - ex[0];
    let mut sec = ExperimentConfig::default().transmon();
    sec.epsilon = 0.3;
    let mut sym = 0.0f64;
    for i in 0..=200 {
        let phi = 0.5 * i as f64 / 200.0;
        for eps in [0.0, 0.1, 0.3, 0.7] {
            let a = transmon::ej_eff(&TransmonParams { ej_sigma: 50.0, ec: 0.2, epsilon: eps, phi_e: 0.5 - phi });
            let b = transmon::ej_eff(&TransmonParams { ej_sigma: 50.0, ec: 0.2, epsilon: eps, phi_e: 0.5 + phi });
            sym = sym.max((a - b).abs());
        }
    }
    println!("  f01 {:.12} GHz (8.744 to 3 decimals), exact {f_exact:.6} GHz, symmetry error {sym:.1e}", d.f01);
    report(7, "transmon", &[
        ("f01(0, 0) = sqrt(80) - 0.2 = 8.744 GHz to 1e-9", (d.f01 - want).abs() < 1e-9 && (d.f01 - 8.744).abs() < 5e-4),
        ("Duffing anharmonicity exactly -0.2 GHz", d.anharmonicity == -0.2),
        ("exact f01 within 1% of Duffing at EJ/EC = 250", (f_exact / d.f01 - 1.0).abs() < 0.01),
        ("map symmetric about phi_e = 0.5 to 1e-12", sym < 1e-12),
    ]);
}

#[test]
fn criterion_8_dipole() {
    let s = ExperimentConfig::default().transmon();
    let b = |z: f64| transmon::dipole_estimate(s.dipole_ms, s.dipole_volume, z, s.loop_side).unwrap().bz;
    let formula = |z: f64| 1e-7 * 2.0 * s.dipole_ms * s.dipole_volume / (z * z * z);
    let (b20, b50) = (b(20e-9), b(50e-9));
    let scaling = [10e-9, 20e-9, 35e-9, 50e-9, 100e-9]
        .iter()
        .map(|&z| (b(z) * z.powi(3) / (b20 * 20e-9f64.powi(3)) - 1.0).abs())
        .fold(0.0, f64::max);
    println!("  Bz(20 nm) = {:.4} mT, Bz(50 nm) = {:.4} mT, z^3 error {scaling:.1e}", b20 * 1e3, b50 * 1e3);
    report(8, "dipole estimate", &[
        ("Bz(20 nm) = 200 mT within 0.5% of formula", (b20 / formula(20e-9) - 1.0).abs() < 0.005 && (b20 - 0.2).abs() < 1e-3),
        ("Bz(50 nm) within x1.5 of 10 mT", (b50 / 10e-3) < 1.5 && (b50 / 10e-3) > 1.0 / 1.5),
        ("z^3 scaling to 1e-12", scaling < 1e-12),
    ]);
}

#[test]
fn criterion_9_reproducibility() {
    let base = ExperimentConfig::default();
    // keep the LLG pass short; determinism does not depend on run length
    let llg = base
        .with(Section::Drive, "timeout", Value::Float(0.02e-9))
        .unwrap()
        .with(Section::Output, "snapshot_stride", Value::Int(1))
        .unwrap();
    let cases = [
        (Command::Relax, base.clone()),
        (Command::DiodeLlg, llg),
        (Command::DiodeThiele, base.clone()),
        (Command::SweepWindow, base.clone()),
        (Command::FidelityMap, base.clone()),
        (Command::RotorSpectrum, base.clone()),
        (Command::Anharmonicity, base.clone()),
        (Command::TransmonMap, base.clone()),
        (Command::Dipole, base.clone()),
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut checks = Vec::new();
    for (cmd, cfg) in &cases {
        let a = dir.path().join(format!("{}-1", cmd.name()));
        let b = dir.path().join(format!("{}-4", cmd.name()));
        let ma = run_with(*cmd, cfg, &a, true, Some(1)).unwrap();
        let mb = run_with(*cmd, cfg, &b, true, Some(4)).unwrap();
        let csvs: Vec<&str> = ma.outputs.iter().map(|o| o.file.as_str()).filter(|f| f.ends_with(".csv")).collect();
        let same = !csvs.is_empty()
            && ma.outputs.len() == mb.outputs.len()
            && csvs.iter().all(|f| fs::read(a.join(f)).unwrap() == fs::read(b.join(f)).unwrap());
        let manifest = a.join("manifest.json").exists() && ma.config_hash == cfg.canonical_hash();
        println!("  {}: {} csv file(s), identical {same}", cmd.name(), csvs.len());
        checks.push((cmd.name(), same && manifest));
    }
    let fid = fs::read_to_string(dir.path().join("fidelity-map-1/fidelity.csv")).unwrap();
    checks.push(("fidelity.csv has 41 x 400 rows", fid.lines().count() == 1 + 41 * 400 && !fid.contains('\r')));
    report(9, "reproducibility", &checks);
}
