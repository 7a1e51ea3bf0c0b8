use super::*;
use crate::geometry::build_patch;
use crate::params::MaterialParams;
use crate::thiele::RadialProfile;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn patch(size: f64, cell: f64, m: MaterialParams) -> Micromag {
    let sc = derive_scales(&m).unwrap();
    Micromag::new(build_patch(size, size, cell, &sc).unwrap(), m, [0.0; 3]).unwrap()
}

fn random_field(model: &Micromag, seed: u64) -> MagnetizationField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = model.uniform([0.0, 0.0, 1.0]);
    for c in model.cells() {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        f.m[c] = crate::vec3::normalize(v);
    }
    f
}

fn skyrmion(model: &Micromag) -> MagnetizationField {
    let sc = derive_scales(&model.material).unwrap();
    let mut f = model.uniform([0.0, 0.0, 1.0]);
    let c = (model.geom.width() / 2.0, model.geom.height() / 2.0);
    seed_skyrmion(model, &mut f, c, &RadialProfile { radius: 2.0 * sc.delta_dw, width: sc.delta_dw });
    f
}

/// ⟨m_∥ · r̂⟩ weighted by sin θ: > 0 for outward Néel, < 0 for inward.
fn radial_helicity(model: &Micromag, f: &MagnetizationField) -> f64 {
    let (cx, cy) = (model.geom.width() / 2.0, model.geom.height() / 2.0);
    let mut s = 0.0;
    for c in model.cells() {
        let (x, y) = model.geom.center(c);
        let r = (x - cx).hypot(y - cy);
        if r > 0.0 {
            s += (f.m[c][0] * (x - cx) + f.m[c][1] * (y - cy)) / r;
        }
    }
    s
}

#[test]
fn uniform_perpendicular_state_is_stationary_without_dmi() {
    // with D ≠ 0 the free edges cant, so only D = 0 is an exact fixed point
    let mut mat = MaterialParams::baseline();
    mat.dmi = 0.0;
    let model = patch(20e-9, 1e-9, mat);
    let mut f = model.uniform([0.0, 0.0, 1.0]);
    assert_eq!(model.energy(&f), 0.0);
    assert_eq!(model.max_torque(&f), 0.0);
    let before = f.clone();
    let mut st = model.stepper();
    model.step_llg(&mut f, None, 1e-14, &mut st).unwrap();
    assert_eq!(f, before);
}

#[test]
fn field_is_minus_energy_gradient() {
    let model = patch(6e-9, 1e-9, MaterialParams::baseline());
    let f = random_field(&model, 7);
    let h = model.effective_field(&f);
    let scale = MU0 * model.material.ms * model.cell_volume();
    let eps = 1e-6;
    for c in model.cells().step_by(5) {
        for a in 0..3 {
            let (mut p, mut m) = (f.clone(), f.clone());
            p.m[c][a] += eps;
            m.m[c][a] -= eps;
            let grad = (model.energy(&p) - model.energy(&m)) / (2.0 * eps);
            let fd = -grad / scale;
            assert!((fd - h[c][a]).abs() <= 1e-6 * h[c][a].abs().max(1e3), "cell {c} axis {a}: {fd} vs {}", h[c][a]);
        }
    }
}

#[test]
fn spiral_exchange_energy() {
    let mut mat = MaterialParams::baseline();
    mat.dmi = 0.0;
    let dx = 1e-9;
    let (nx, ny) = (64, 4);
    let g = TrackGeometry::from_mask(vec![true; nx * ny], nx, ny, dx);
    let model = Micromag::with_k_eff(g, mat, 0.0, [0.0; 3]);
    let k = 2.0 * std::f64::consts::PI / (40.0 * dx);
    let mut f = model.uniform([0.0; 3]);
    for c in model.cells() {
        let x = model.geom.center(c).0;
        f.m[c] = [(k * x).cos(), 0.0, (k * x).sin()];
    }
    let bonds = ((nx - 1) * ny) as f64;
    let lattice = bonds * mat.a_ex * mat.thickness * 2.0 * (1.0 - (k * dx).cos());
    let e = model.energy(&f);
    assert!((e - lattice).abs() < 1e-12 * lattice);
    // continuum A·k² over the bonded area
    let continuum = mat.a_ex * k * k * bonds * dx * dx * mat.thickness;
    assert!((e / continuum - 1.0).abs() < 0.01);
}

#[test]
fn dmi_prefers_outward_neel_for_positive_d() {
    let model = patch(40e-9, 0.5e-9, MaterialParams::baseline());
    let out = skyrmion(&model);
    let mut inward = out.clone();
    for c in model.cells() {
        inward.m[c][0] = -inward.m[c][0];
        inward.m[c][1] = -inward.m[c][1];
    }
    assert!(radial_helicity(&model, &out) > 0.0);
    assert!(model.energy(&out) < model.energy(&inward));
}

#[test]
fn macrospin_matches_closed_form() {
    let mut mat = MaterialParams::baseline();
    mat.alpha = 0.1;
    let g = TrackGeometry::from_mask(vec![true], 1, 1, 1e-9);
    let bz = 0.5;
    let model = Micromag::with_k_eff(g, mat, 0.0, [0.0, 0.0, bz]);
    let th0: f64 = 1.0;
    let mut f = MagnetizationField { m: vec![[th0.sin(), 0.0, th0.cos()]] };
    let rate = model.gamma_ll() * bz / MU0;
    let (dt, n) = (1e-14, 5000);
    let mut st = model.stepper();
    for _ in 0..n {
        model.step_llg(&mut f, None, dt, &mut st).unwrap();
    }
    let t = dt * n as f64;
    let th = 2.0 * ((th0 / 2.0).tan() * (-mat.alpha * rate * t).exp()).atan();
    let phi = rate * t;
    let m = f.m[0];
    let expect = [th.sin() * phi.cos(), th.sin() * phi.sin(), th.cos()];
    for a in 0..3 {
        assert!((m[a] - expect[a]).abs() < 1e-6, "{m:?} vs {expect:?}");
    }
}

#[test]
fn steps_keep_unit_norm() {
    let model = patch(10e-9, 1e-9, MaterialParams::baseline());
    let mut f = random_field(&model, 3);
    let dt = model.default_dt(&f);
    let drive = crate::params::ExperimentConfig::default().drive();
    let mut integ = Integrator::new(&model, dt);
    for _ in 0..50 {
        integ.step(&model, &mut f, Some(&drive)).unwrap();
        assert!(f.max_norm_error(&model) < 1e-9);
    }
}

#[test]
fn ansatz_charge_and_symmetries() {
    let model = patch(40e-9, 0.5e-9, MaterialParams::baseline());
    let f = skyrmion(&model);
    let q = topological_charge(&model, &f);
    assert!((q + 1.0).abs() < 0.02, "Q = {q}");

    // in-plane rotation by π: helicity flips, charge does not
    let mut rot = f.clone();
    // spatial mirror x → −x together with m_x → −m_x
    let mut mir = f.clone();
    let mut flip = f.clone();
    let nx = model.geom.nx;
    for c in model.cells() {
        rot.m[c] = [-f.m[c][0], -f.m[c][1], f.m[c][2]];
        let (ix, iy) = (c % nx, c / nx);
        let src = f.m[model.geom.index(nx - 1 - ix, iy)];
        mir.m[c] = [-src[0], src[1], src[2]];
        flip.m[c][2] = -f.m[c][2];
    }
    assert!(radial_helicity(&model, &rot) < 0.0);
    assert!((topological_charge(&model, &rot) - q).abs() < 1e-9);
    assert!((topological_charge(&model, &mir) - q).abs() < 1e-9);
    assert!((topological_charge(&model, &flip) + q).abs() < 1e-9);
}

#[test]
fn uniform_charge_is_zero() {
    let model = patch(20e-9, 1e-9, MaterialParams::baseline());
    assert_eq!(topological_charge(&model, &model.uniform([0.0, 0.0, 1.0])), 0.0);
    assert_eq!(topological_charge(&model, &model.uniform([0.0, 0.0, -1.0])), 0.0);
}

#[test]
fn relax_lowers_energy_and_keeps_charge() {
    let model = patch(32e-9, 0.5e-9, MaterialParams::baseline().with_ku(1.0e6));
    let mut f = skyrmion(&model);
    let e0 = model.energy(&f);
    let r = model.relax(&mut f, 1e-8, 1e3).unwrap();
    assert!(r.energy <= e0);
    assert_eq!(r.energy, model.energy(&f));
    assert!(model.max_torque(&f) < 1e3);
    assert!(f.max_norm_error(&model) < 1e-9);
    assert!((topological_charge(&model, &f) + 1.0).abs() < 0.05);
}

#[test]
fn relax_reports_no_convergence() {
    let model = patch(20e-9, 1e-9, MaterialParams::baseline());
    let mut f = random_field(&model, 1);
    match model.relax(&mut f, 1e-15, 1e-9) {
        Err(MicromagError::NoConvergence { .. }) => {}
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_fields_have_near_integer_charge(seed in 0u64..1000) {
        // smooth random textures: a skyrmion plus a small random tilt
        let model = patch(16e-9, 1e-9, MaterialParams::baseline());
        let mut f = skyrmion(&model);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tilt = [rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), 0.0];
        for c in model.cells() {
            f.m[c] = crate::vec3::normalize(crate::vec3::add(f.m[c], tilt));
        }
        let q = topological_charge(&model, &f);
        prop_assert!((q - q.round()).abs() < 1e-9);
    }

    #[test]
    fn relax_step_never_raises_energy(seed in 0u64..1000) {
        let model = patch(8e-9, 1e-9, MaterialParams::baseline());
        let mut f = random_field(&model, seed);
        let e0 = model.energy(&f);
        let _ = model.relax(&mut f, 2e-12, 1e-9);
        prop_assert!(model.energy(&f) <= e0 + 1e-12 * e0.abs());
    }
}
