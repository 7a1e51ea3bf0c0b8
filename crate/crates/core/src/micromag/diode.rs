//! Seeding and the forward/reverse diode protocol at LLG level.

use super::{observe, Integrator, MagnetizationField, Micromag, MicromagError, SkyrmionObservables};
use crate::geometry::{build_t_track, TrackGeometry, TrackSpec};
use crate::params::{derive_scales, DriveParams, ExperimentConfig, MaterialParams};
use crate::thiele::{
    start_position, DiodeOutcome, DiodeRule, Direction, OutcomeClass, RadialProfile, TrajectorySample,
};

/// Overwrites `f` with an outward Néel skyrmion (core −ẑ) centred at `center`.
pub fn seed_skyrmion(model: &Micromag, f: &mut MagnetizationField, center: (f64, f64), profile: &RadialProfile) {
    let reach = profile.radius + 12.0 * profile.width;
    for c in model.cells() {
        let (x, y) = model.geom.center(c);
        let (dx, dy) = (x - center.0, y - center.1);
        if dx.hypot(dy) < reach {
            f.m[c] = profile.m_at(dx, dy);
        }
    }
}

/// Everything one LLG diode run needs.
#[derive(Debug, Clone)]
pub struct DiodeLlgRun {
    pub geometry: TrackGeometry,
    pub material: MaterialParams,
    /// Forward-bias drive; reverse runs use [`DriveParams::reversed`].
    pub drive: DriveParams,
    pub dt: Option<f64>,
    pub timeout: f64,
    pub relax_tol: f64,
    pub relax_max_time: f64,
    pub sample_interval: f64,
    /// Keep a full snapshot every this many samples (0 = none).
    pub snapshot_stride: usize,
}

impl DiodeLlgRun {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self, MicromagError> {
        let material = cfg.material();
        let scales = derive_scales(&material)?;
        let geometry = build_t_track(&TrackSpec::from(&cfg.geometry()), &scales)?;
        let run = cfg.llg_run();
        let out = cfg.output();
        Ok(Self {
            geometry,
            material,
            drive: cfg.drive(),
            dt: run.dt,
            timeout: run.timeout,
            relax_tol: run.relax_tol,
            relax_max_time: run.relax_max_time,
            sample_interval: out.trajectory_interval,
            snapshot_stride: out.snapshot_stride,
        })
    }
}

#[derive(Debug, Clone)]
pub struct LlgDiodeResult {
    pub outcome: DiodeOutcome,
    /// Relaxed texture at the start position, before the drive is applied.
    pub relaxed: SkyrmionObservables,
    /// Extremes of Q over the driven trajectory samples.
    pub charge_range: (f64, f64),
    pub dt: f64,
    pub snapshots: Vec<(f64, MagnetizationField)>,
}

pub fn run_diode_llg(run: &DiodeLlgRun, direction: Direction) -> Result<LlgDiodeResult, MicromagError> {
    let model = Micromag::new(run.geometry.clone(), run.material, [0.0; 3])?;
    let rule = DiodeRule::new(&model.geom, direction)?;
    let scales = derive_scales(&run.material)?;
    let r0 = start_position(&model.geom, direction);
    let mut f = model.uniform([0.0, 0.0, 1.0]);
    let seed = RadialProfile { radius: 2.0 * scales.delta_dw, width: scales.delta_dw };
    seed_skyrmion(&model, &mut f, (r0[0], r0[1]), &seed);
    let report = model.relax(&mut f, run.relax_max_time, run.relax_tol)?;
    log::info!(
        "{}: relaxed in {:.3e} s ({} steps), torque {:.3e} A/m",
        direction.as_str(),
        report.time,
        report.steps,
        report.torque
    );
    let relaxed = observe(&model, &f);
    let drive = match direction {
        Direction::Forward => run.drive,
        Direction::Reverse => run.drive.reversed(),
    };
    let dt = run.dt.unwrap_or_else(|| model.default_dt(&f));
    let mut integ = Integrator::new(&model, dt);
    let mut tracker = rule.tracker();
    let mut samples = vec![sample(0.0, &relaxed)];
    let mut snapshots = Vec::new();
    if run.snapshot_stride > 0 {
        snapshots.push((0.0, f.clone()));
    }
    let mut q_range = (relaxed.charge, relaxed.charge);
    let mut next_sample = run.sample_interval;
    let mut class = None;
    while integ.t < run.timeout {
        integ.step(&model, &mut f, Some(&drive))?;
        if integ.t + 0.5 * integ.dt < next_sample && integ.t < run.timeout {
            continue;
        }
        next_sample += run.sample_interval;
        let obs = observe(&model, &f);
        samples.push(sample(integ.t, &obs));
        if run.snapshot_stride > 0 && (samples.len() - 1) % run.snapshot_stride == 0 {
            snapshots.push((integ.t, f.clone()));
        }
        q_range = (q_range.0.min(obs.charge), q_range.1.max(obs.charge));
        if obs.charge.abs() < 0.5 || obs.core.is_none() {
            class = Some(OutcomeClass::Annihilated);
            break;
        }
        if let Some(c) = tracker.update(obs.core.expect("checked").0) {
            class = Some(c);
            break;
        }
    }
    Ok(LlgDiodeResult {
        outcome: DiodeOutcome {
            direction,
            class: class.unwrap_or(OutcomeClass::Stalled),
            time: class.map(|_| integ.t),
            left_domain: false,
            trajectory: samples,
        },
        relaxed,
        charge_range: q_range,
        dt: integ.dt,
        snapshots,
    })
}

fn sample(t: f64, o: &SkyrmionObservables) -> TrajectorySample {
    let (x, y) = o.core.unwrap_or((f64::NAN, f64::NAN));
    TrajectorySample { t, x, y, q: o.charge, energy: o.energy }
}
