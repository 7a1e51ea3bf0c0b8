//! Massless Thiele dynamics of a rigid skyrmion core,
//!
//! G×v + α_G·D·v = F − ∇U(r),
//!
//! with G = G·ẑ, so that component-wise
//! a·vₓ − G·v_y = Fₓ − ∂ₓU and G·vₓ + a·v_y = F_y − ∂_yU, a = α_G·d.

mod radial;
mod setup;

use rayon::prelude::*;
use thiserror::Error;

pub use radial::RadialProfile;
pub use setup::{ThieleSetup, U0_EDGE_FACTOR};

use crate::constants::{GAMMA0, MU0};
use crate::geometry::{ConfinementPotential, GeometryError, TrackGeometry};
use crate::params::{derive_scales, DriveParams, MaterialParams, ParamsError, TorqueKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThieleError {
    #[error("singular mobility: G and α_G·d are both zero")]
    SingularMobility,
    #[error("core left the track bounding box at t = {t:.3e} s, r = ({x:.3e}, {y:.3e}) m")]
    LeftDomain { t: f64, x: f64, y: f64 },
    #[error("no current density gives (Transmitted, Reflected)")]
    EmptyWindow,
    #[error("geometry has no junction; diode classification needs a T-track")]
    NotATrack,
    #[error("no stable isolated skyrmion for these material parameters")]
    NoSkyrmion,
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Integrals of a skyrmion texture that fix the Thiele coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextureIntegrals {
    /// Topological charge Q.
    pub charge: f64,
    /// ∫(∂ₓm)² dA (dimensionless; isotropic textures have D_xx = D_yy).
    pub dissipation: f64,
    /// `sot[k][i]` = ∫(m×eₖ)·∂ᵢm dA [m], linear kernel of the SOT force in σ.
    pub sot: [[f64; 2]; 3],
}

impl TextureIntegrals {
    /// Integrals of the outward Néel radial profile (Q = −1).
    pub fn from_profile(p: &RadialProfile) -> Self {
        let i = 2.0 * std::f64::consts::PI * p.sot_integral();
        Self {
            charge: -1.0,
            dissipation: p.dissipation_integral(),
            sot: [[0.0, -i], [i, 0.0], [0.0, 0.0]],
        }
    }
}

/// Coefficients of the Thiele equation (SI).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThieleParams {
    /// Signed gyrocoupling G [kg/s].
    pub gyro: f64,
    /// Dissipative tensor diagonal d [kg/s].
    pub d_diss: f64,
    pub alpha_g: f64,
    /// Drive force for forward bias [N].
    pub force: [f64; 2],
}

/// μ0·Ms·t/γ0 [kg/s], the prefactor turning texture integrals into Thiele coefficients.
pub fn coefficient_scale(m: &MaterialParams) -> f64 {
    MU0 * m.ms * m.thickness / GAMMA0
}

impl ThieleParams {
    pub fn from_texture(
        ti: &TextureIntegrals,
        m: &MaterialParams,
        drive: &DriveParams,
        alpha_g: f64,
    ) -> Self {
        let s = coefficient_scale(m);
        let gyro = 4.0 * std::f64::consts::PI * ti.charge * s;
        let d_diss = s * ti.dissipation;
        let force = match drive.torque_kind {
            TorqueKind::SotDampingLike => {
                let c = drive.sot_rate(m);
                let sig = drive.polarization_dir;
                let t = |i: usize| (0..3).map(|k| sig[k] * ti.sot[k][i]).sum::<f64>();
                [-s * c * t(0), -s * c * t(1)]
            }
            TorqueKind::SttZhangLi => {
                let u = drive.stt_velocity(m);
                let b = drive.nonadiabaticity_beta * d_diss;
                [b * u[0] - gyro * u[1], b * u[1] + gyro * u[0]]
            }
        };
        Self { gyro, d_diss, alpha_g, force }
    }

    /// Coefficients from the energy-minimizing radial Néel profile.
    pub fn from_material(m: &MaterialParams, drive: &DriveParams, alpha_g: f64) -> Result<Self, ThieleError> {
        let k_eff = derive_scales(m)?.k_eff;
        let prof = RadialProfile::minimize(m, k_eff).ok_or(ThieleError::NoSkyrmion)?;
        Ok(Self::from_texture(&TextureIntegrals::from_profile(&prof), m, drive, alpha_g))
    }

    pub fn dissipation(&self) -> f64 {
        self.alpha_g * self.d_diss
    }

    /// Solves G×v + a·v = f.
    pub fn velocity(&self, f: [f64; 2]) -> Result<[f64; 2], ThieleError> {
        let (a, g) = (self.dissipation(), self.gyro);
        let det = a * a + g * g;
        if det == 0.0 {
            return Err(ThieleError::SingularMobility);
        }
        Ok([(a * f[0] + g * f[1]) / det, (a * f[1] - g * f[0]) / det])
    }

    pub fn with_force(&self, force: [f64; 2]) -> Self {
        Self { force, ..*self }
    }

    pub fn scaled_force(&self, k: f64) -> Self {
        self.with_force([k * self.force[0], k * self.force[1]])
    }

    /// Mirror image under x → −x, relabelled so that forward bias still pushes along +x.
    pub fn mirrored(&self) -> Self {
        Self { gyro: -self.gyro, force: [self.force[0], -self.force[1]], ..*self }
    }
}

/// Closed-form velocity on a flat potential.
pub fn steady_velocity(p: &ThieleParams, f: [f64; 2]) -> Result<[f64; 2], ThieleError> {
    p.velocity(f)
}

/// Anything the core can move in: a potential with a bounding box.
pub trait Landscape {
    fn value(&self, r: [f64; 2]) -> f64;
    fn grad(&self, r: [f64; 2]) -> [f64; 2];
    /// Domain `[0, W] × [0, H]`.
    fn extent(&self) -> [f64; 2];
}

impl Landscape for ConfinementPotential {
    fn value(&self, r: [f64; 2]) -> f64 {
        self.value_at(r[0], r[1])
    }

    fn grad(&self, r: [f64; 2]) -> [f64; 2] {
        self.grad_at(r[0], r[1])
    }

    fn extent(&self) -> [f64; 2] {
        [self.nx as f64 * self.cell_size, self.ny as f64 * self.cell_size]
    }
}

/// Flat landscape of the given extent.
#[derive(Debug, Clone, Copy)]
pub struct Flat(pub [f64; 2]);

impl Landscape for Flat {
    fn value(&self, _: [f64; 2]) -> f64 {
        0.0
    }

    fn grad(&self, _: [f64; 2]) -> [f64; 2] {
        [0.0; 2]
    }

    fn extent(&self) -> [f64; 2] {
        self.0
    }
}

fn rhs(p: &ThieleParams, f: [f64; 2], land: &impl Landscape, r: [f64; 2]) -> Result<[f64; 2], ThieleError> {
    let g = land.grad(r);
    p.velocity([f[0] - g[0], f[1] - g[1]])
}

fn rk4(p: &ThieleParams, f: [f64; 2], land: &impl Landscape, r: [f64; 2], dt: f64) -> Result<[f64; 2], ThieleError> {
    let at = |r: [f64; 2], k: [f64; 2], h: f64| [r[0] + h * k[0], r[1] + h * k[1]];
    let k1 = rhs(p, f, land, r)?;
    let k2 = rhs(p, f, land, at(r, k1, dt / 2.0))?;
    let k3 = rhs(p, f, land, at(r, k2, dt / 2.0))?;
    let k4 = rhs(p, f, land, at(r, k3, dt))?;
    Ok([
        r[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        r[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ])
}

/// Integrates with force `f` from `r0` for up to `t_end`, calling `observe(t, r)`
/// after every step (and at t = 0); stops early when it returns `true`.
pub fn integrate_with(
    p: &ThieleParams,
    f: [f64; 2],
    land: &impl Landscape,
    r0: [f64; 2],
    t_end: f64,
    dt: f64,
    mut observe: impl FnMut(f64, [f64; 2]) -> bool,
) -> Result<(f64, [f64; 2]), ThieleError> {
    let [w, h] = land.extent();
    let steps = (t_end / dt).ceil() as usize;
    let mut r = r0;
    if observe(0.0, r) {
        return Ok((0.0, r));
    }
    for n in 1..=steps {
        r = rk4(p, f, land, r, dt)?;
        let t = n as f64 * dt;
        if !(r[0] >= 0.0 && r[0] <= w && r[1] >= 0.0 && r[1] <= h) {
            return Err(ThieleError::LeftDomain { t, x: r[0], y: r[1] });
        }
        if observe(t, r) {
            return Ok((t, r));
        }
    }
    Ok((steps as f64 * dt, r))
}

/// Trajectory `(t, r)` with the parameters' forward force, sampled every step.
pub fn integrate(
    p: &ThieleParams,
    land: &impl Landscape,
    r0: [f64; 2],
    t_end: f64,
    dt: f64,
) -> Result<Vec<(f64, [f64; 2])>, ThieleError> {
    let mut out = Vec::new();
    integrate_with(p, p.force, land, r0, t_end, dt, |t, r| {
        out.push((t, r));
        false
    })?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Current and drive along +x.
    Forward,
    /// Current and drive along −x.
    Reverse,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Reverse => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Reverse => "reverse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeClass {
    Transmitted,
    Reflected,
    Stalled,
    Annihilated,
}

impl OutcomeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeClass::Transmitted => "Transmitted",
            OutcomeClass::Reflected => "Reflected",
            OutcomeClass::Stalled => "Stalled",
            OutcomeClass::Annihilated => "Annihilated",
        }
    }
}

/// Fraction of the track length at which the injection plane sits, measured from the injection end.
pub const INJECTION_PLANE: f64 = 0.25;
/// Same for the output plane.
pub const OUTPUT_PLANE: f64 = 0.75;
/// Start column, as a fraction of track length from the injection end.
pub const START_FRACTION: f64 = 0.1;

/// Classification planes for one drive direction, in the progress coordinate
/// p = ±x that grows along the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiodeRule {
    pub direction: Direction,
    pub inject: f64,
    pub output: f64,
    /// Progress beyond which the core counts as having reached the throat.
    pub approach: f64,
}

impl DiodeRule {
    pub fn new(g: &TrackGeometry, direction: Direction) -> Result<Self, ThieleError> {
        let (t0, t1) = g.throat().ok_or(ThieleError::NotATrack)?;
        let w_in = g.spec.ok_or(ThieleError::NotATrack)?.arm_width_in;
        let w = g.width();
        Ok(match direction {
            Direction::Forward => Self {
                direction,
                inject: INJECTION_PLANE * w,
                output: OUTPUT_PLANE * w,
                approach: t0 - w_in,
            },
            Direction::Reverse => Self {
                direction,
                inject: -(w - INJECTION_PLANE * w),
                output: -(w - OUTPUT_PLANE * w),
                approach: -(t1 + w_in),
            },
        })
    }

    pub fn progress(&self, x: f64) -> f64 {
        self.direction.sign() * x
    }

    pub fn tracker(&self) -> DiodeTracker {
        DiodeTracker { rule: *self, entered: false, approached: false }
    }
}

/// Applies the transmission / reflection rule to a stream of core positions.
#[derive(Debug, Clone, Copy)]
pub struct DiodeTracker {
    rule: DiodeRule,
    entered: bool,
    approached: bool,
}

impl DiodeTracker {
    pub fn update(&mut self, x: f64) -> Option<OutcomeClass> {
        let p = self.rule.progress(x);
        if p >= self.rule.output {
            return Some(OutcomeClass::Transmitted);
        }
        if p >= self.rule.inject {
            self.entered = true;
        }
        if self.entered && p >= self.rule.approach {
            self.approached = true;
        }
        if self.approached && p < self.rule.inject {
            return Some(OutcomeClass::Reflected);
        }
        None
    }
}

/// Core start position: the arm centreline, a tenth of the track in from the injection end.
pub fn start_position(g: &TrackGeometry, direction: Direction) -> [f64; 2] {
    let ix = ((START_FRACTION * g.nx as f64).round() as usize).min(g.nx - 1);
    let ix = match direction {
        Direction::Forward => ix,
        Direction::Reverse => g.nx - 1 - ix,
    };
    let y = g.column_center(ix).unwrap_or(g.height() / 2.0);
    [(ix as f64 + 0.5) * g.cell_size, y]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub q: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiodeOutcome {
    pub direction: Direction,
    pub class: OutcomeClass,
    /// Time from drive onset to transmission or return [s]; `None` when stalled.
    pub time: Option<f64>,
    /// The core left the bounding box (counted as a reflection).
    pub left_domain: bool,
    pub trajectory: Vec<TrajectorySample>,
}

/// Integration controls for a diode run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThieleRun {
    pub dt: f64,
    pub timeout: f64,
    pub sample_interval: f64,
}

pub fn classify_diode(
    p: &ThieleParams,
    pot: &ConfinementPotential,
    g: &TrackGeometry,
    direction: Direction,
    run: &ThieleRun,
) -> Result<DiodeOutcome, ThieleError> {
    let rule = DiodeRule::new(g, direction)?;
    let mut tracker = rule.tracker();
    let s = direction.sign();
    let f = [s * p.force[0], s * p.force[1]];
    let q = p.gyro.signum();
    let every = ((run.sample_interval / run.dt).round() as usize).max(1);
    let mut samples = Vec::new();
    let mut class = None;
    let mut step = 0usize;
    let r0 = start_position(g, direction);
    let res = integrate_with(p, f, pot, r0, run.timeout, run.dt, |t, r| {
        class = tracker.update(r[0]);
        if step % every == 0 || class.is_some() {
            samples.push(TrajectorySample { t, x: r[0], y: r[1], q, energy: pot.value(r) });
        }
        step += 1;
        class.is_some()
    });
    match res {
        Ok((t, _)) => Ok(DiodeOutcome {
            direction,
            class: class.unwrap_or(OutcomeClass::Stalled),
            time: class.map(|_| t),
            left_domain: false,
            trajectory: samples,
        }),
        Err(ThieleError::LeftDomain { t, .. }) => Ok(DiodeOutcome {
            direction,
            class: OutcomeClass::Reflected,
            time: Some(t),
            left_domain: true,
            trajectory: samples,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub current_density: f64,
    pub forward: OutcomeClass,
    pub reverse: OutcomeClass,
    pub tau_fwd: Option<f64>,
    pub tau_rev: Option<f64>,
}

impl SweepRow {
    pub fn is_diode(&self) -> bool {
        self.forward == OutcomeClass::Transmitted && self.reverse == OutcomeClass::Reflected
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSweep {
    pub rows: Vec<SweepRow>,
}

impl WindowSweep {
    /// `[j_min, j_max]`: from the lowest diode-acting J up to the last J before the pair breaks.
    pub fn window(&self) -> Result<(f64, f64), ThieleError> {
        let first = self.rows.iter().position(SweepRow::is_diode).ok_or(ThieleError::EmptyWindow)?;
        let last = self.rows[first..]
            .iter()
            .take_while(|r| r.is_diode())
            .last()
            .expect("first row is a diode row");
        Ok((self.rows[first].current_density, last.current_density))
    }
}

/// Classifies both directions at every J; `p.force` is the force at `j_ref`.
pub fn efficiency_sweep(
    p: &ThieleParams,
    j_ref: f64,
    pot: &ConfinementPotential,
    g: &TrackGeometry,
    j_values: &[f64],
    run: &ThieleRun,
) -> Result<WindowSweep, ThieleError> {
    assert!(j_ref > 0.0, "reference current density must be positive");
    assert!(j_values.windows(2).all(|w| w[0] <= w[1]), "j_values must be ascending");
    let rows = j_values
        .par_iter()
        .map(|&j| {
            let pj = p.scaled_force(j / j_ref);
            let fwd = classify_diode(&pj, pot, g, Direction::Forward, run)?;
            let rev = classify_diode(&pj, pot, g, Direction::Reverse, run)?;
            Ok(SweepRow {
                current_density: j,
                forward: fwd.class,
                reverse: rev.class,
                tau_fwd: fwd.time,
                tau_rev: rev.time,
            })
        })
        .collect::<Result<Vec<_>, ThieleError>>()?;
    Ok(WindowSweep { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ThieleParams {
        ThieleParams { gyro: -4e-14, d_diss: 2.5e-14, alpha_g: 0.1, force: [3e-13, 0.0] }
    }

    #[test]
    fn zero_force_zero_velocity() {
        assert_eq!(steady_velocity(&params(), [0.0, 0.0]).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn hall_angle_closed_form() {
        let p = params();
        let v = steady_velocity(&p, [1e-13, 0.0]).unwrap();
        let ratio = v[1] / v[0];
        let expect = -p.gyro / (p.alpha_g * p.d_diss);
        assert!((ratio - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn gyro_sign_flips_transverse_velocity_only() {
        let p = params();
        let q = ThieleParams { gyro: -p.gyro, ..p };
        let (a, b) = (p.velocity([1e-13, 0.0]).unwrap(), q.velocity([1e-13, 0.0]).unwrap());
        assert_eq!(a[0], b[0]);
        assert_eq!(a[1], -b[1]);
    }

    #[test]
    fn singular_mobility() {
        let p = ThieleParams { gyro: 0.0, alpha_g: 0.0, ..params() };
        assert_eq!(p.velocity([1.0, 0.0]), Err(ThieleError::SingularMobility));
    }

    #[test]
    fn flat_trajectory_moves_at_steady_velocity() {
        let p = params();
        let land = Flat([1e-5, 1e-5]);
        let traj = integrate(&p, &land, [5e-6, 5e-6], 1e-9, 1e-11).unwrap();
        let v = steady_velocity(&p, p.force).unwrap();
        for w in traj.windows(2) {
            let dt = w[1].0 - w[0].0;
            for k in 0..2 {
                let vk = (w[1].1[k] - w[0].1[k]) / dt;
                assert!((vk - v[k]).abs() <= 1e-10 * v[k].abs().max(v[0].abs()));
            }
        }
    }
}
