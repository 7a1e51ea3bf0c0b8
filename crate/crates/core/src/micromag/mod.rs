//! Single-layer micromagnetics on the track raster.
//!
//! Energy (bond form, so the field is its exact gradient):
//!
//! * exchange  A·t·|mᵢ − mⱼ|² per nearest-neighbour bond;
//! * interfacial DMI  D·t·Δ·(ẑ × r̂ᵢⱼ)·(mᵢ × mⱼ) per bond;
//! * anisotropy  k_eff·V·(1 − m_z²) with the local thin-film demag k_eff;
//! * Zeeman  −μ0·Ms·V·m·H_ext.
//!
//! Missing bonds at the mask edge give the free boundary condition of the
//! continuum functional. H_eff = −(1/(μ0·Ms·V))·∂E/∂m.

mod diode;
mod observables;
mod sweep;

use thiserror::Error;

pub use diode::{run_diode_llg, seed_skyrmion, DiodeLlgRun, LlgDiodeResult};
pub use observables::{
    core_diameter, core_position, observe, texture_integrals, topological_charge, SkyrmionObservables,
};
pub use sweep::{relax_patch, size_sweep, RelaxedPoint, SizeSweep};

use crate::constants::{GAMMA0, MU0};
use crate::geometry::TrackGeometry;
use crate::params::{derive_scales, DriveParams, MaterialParams, ParamsError, TorqueKind};
use crate::vec3::{cross, dot, norm, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MicromagError {
    #[error("|m| drifted by {deviation:.2e} in one step (dt = {dt:.3e} s)")]
    StepUnstable { deviation: f64, dt: f64 },
    #[error("relaxation did not converge: max torque {torque:.3e} A/m after {time:.3e} s")]
    NoConvergence { torque: f64, time: f64 },
    #[error("skyrmion annihilated at t = {t:.3e} s")]
    SkyrmionAnnihilated { t: f64 },
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Thiele(#[from] crate::thiele::ThieleError),
}

const NONE: u32 = u32::MAX;

/// Unit magnetization per raster cell; vacuum cells hold zero vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationField {
    pub m: Vec<Vec3>,
}

impl MagnetizationField {
    pub fn max_norm_error(&self, model: &Micromag) -> f64 {
        model.cells.iter().map(|&c| (norm(self.m[c as usize]) - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Discretized material on a mask, with precomputed neighbour tables.
#[derive(Debug, Clone)]
pub struct Micromag {
    pub geom: TrackGeometry,
    pub material: MaterialParams,
    pub k_eff: f64,
    /// External field B [T].
    pub b_ext: Vec3,
    /// Raster indices of magnetic cells.
    cells: Vec<u32>,
    /// Raster indices of the +x, −x, +y, −y neighbours, `NONE` when absent.
    nbr: Vec<[u32; 4]>,
    c_ex: f64,
    c_dmi: f64,
    c_an: f64,
}

/// Drive term in Landau–Lifshitz form, prefactors folded in.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DriveTerms {
    kind: TorqueKind,
    /// c/(1+α²) for SOT.
    sot: f64,
    sigma: Vec3,
    /// u/(1+α²) for STT.
    u: [f64; 2],
    beta: f64,
    active: bool,
}

impl Micromag {
    pub fn new(geom: TrackGeometry, material: MaterialParams, b_ext: Vec3) -> Result<Self, MicromagError> {
        let k_eff = derive_scales(&material)?.k_eff;
        Ok(Self::build(geom, material, k_eff, b_ext))
    }

    /// Model with an explicit effective anisotropy (may be ≤ 0).
    pub fn with_k_eff(geom: TrackGeometry, material: MaterialParams, k_eff: f64, b_ext: Vec3) -> Self {
        Self::build(geom, material, k_eff, b_ext)
    }

    fn build(geom: TrackGeometry, material: MaterialParams, k_eff: f64, b_ext: Vec3) -> Self {
        let (nx, ny) = (geom.nx, geom.ny);
        let cells: Vec<u32> = (0..nx * ny).filter(|&i| geom.mask[i]).map(|i| i as u32).collect();
        let at = |ix: isize, iy: isize| -> u32 {
            if ix < 0 || iy < 0 || ix >= nx as isize || iy >= ny as isize {
                return NONE;
            }
            let j = iy as usize * nx + ix as usize;
            if geom.mask[j] {
                j as u32
            } else {
                NONE
            }
        };
        let nbr = cells
            .iter()
            .map(|&c| {
                let (ix, iy) = ((c as usize % nx) as isize, (c as usize / nx) as isize);
                [at(ix + 1, iy), at(ix - 1, iy), at(ix, iy + 1), at(ix, iy - 1)]
            })
            .collect();
        let dx = geom.cell_size;
        let mu_ms = MU0 * material.ms;
        Self {
            c_ex: 2.0 * material.a_ex / (mu_ms * dx * dx),
            c_dmi: material.dmi / (mu_ms * dx),
            c_an: 2.0 * k_eff / mu_ms,
            cells,
            nbr,
            geom,
            material,
            k_eff,
            b_ext,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().map(|&c| c as usize)
    }

    pub fn cell_volume(&self) -> f64 {
        self.geom.cell_size * self.geom.cell_size * self.material.thickness
    }

    pub fn gamma_ll(&self) -> f64 {
        GAMMA0 / (1.0 + self.material.alpha * self.material.alpha)
    }

    /// Uniform field along `dir` on every magnetic cell.
    pub fn uniform(&self, dir: Vec3) -> MagnetizationField {
        let mut m = vec![[0.0; 3]; self.geom.len()];
        for c in self.cells() {
            m[c] = dir;
        }
        MagnetizationField { m }
    }

    /// Effective field of the cell with compact index `k` [A/m].
    #[inline(always)]
    fn field_at(&self, m: &[Vec3], k: usize) -> Vec3 {
        let c = self.cells[k] as usize;
        let mi = m[c];
        let hz = 1.0 / MU0;
        let mut h = [self.b_ext[0] * hz, self.b_ext[1] * hz, self.b_ext[2] * hz + self.c_an * mi[2]];
        let (ex, dm) = (self.c_ex, self.c_dmi);
        let n = self.nbr[k];
        if n[0] != NONE {
            let mj = m[n[0] as usize];
            h[0] += ex * (mj[0] - mi[0]) + dm * mj[2];
            h[1] += ex * (mj[1] - mi[1]);
            h[2] += ex * (mj[2] - mi[2]) - dm * mj[0];
        }
        if n[1] != NONE {
            let mj = m[n[1] as usize];
            h[0] += ex * (mj[0] - mi[0]) - dm * mj[2];
            h[1] += ex * (mj[1] - mi[1]);
            h[2] += ex * (mj[2] - mi[2]) + dm * mj[0];
        }
        if n[2] != NONE {
            let mj = m[n[2] as usize];
            h[0] += ex * (mj[0] - mi[0]);
            h[1] += ex * (mj[1] - mi[1]) + dm * mj[2];
            h[2] += ex * (mj[2] - mi[2]) - dm * mj[1];
        }
        if n[3] != NONE {
            let mj = m[n[3] as usize];
            h[0] += ex * (mj[0] - mi[0]);
            h[1] += ex * (mj[1] - mi[1]) - dm * mj[2];
            h[2] += ex * (mj[2] - mi[2]) + dm * mj[1];
        }
        h
    }

    /// H_eff on every raster cell (zero in vacuum) [A/m].
    pub fn effective_field(&self, f: &MagnetizationField) -> Vec<Vec3> {
        let mut h = vec![[0.0; 3]; self.geom.len()];
        for k in 0..self.cells.len() {
            h[self.cells[k] as usize] = self.field_at(&f.m, k);
        }
        h
    }

    /// Field split into (exchange, DMI, anisotropy, Zeeman) for one raster cell.
    pub fn field_terms(&self, f: &MagnetizationField, cell: usize) -> [Vec3; 4] {
        let k = self.cells.binary_search(&(cell as u32)).expect("magnetic cell");
        let total = self.field_at(&f.m, k);
        let mi = f.m[cell];
        let mut ex = [0.0; 3];
        for j in self.nbr[k] {
            if j != NONE {
                let mj = f.m[j as usize];
                for a in 0..3 {
                    ex[a] += self.c_ex * (mj[a] - mi[a]);
                }
            }
        }
        let an = [0.0, 0.0, self.c_an * mi[2]];
        let zee = [self.b_ext[0] / MU0, self.b_ext[1] / MU0, self.b_ext[2] / MU0];
        let dmi = [0, 1, 2].map(|a| total[a] - ex[a] - an[a] - zee[a]);
        [ex, dmi, an, zee]
    }

    /// Total energy [J], zero for the uniform +ẑ state without field.
    pub fn energy(&self, f: &MagnetizationField) -> f64 {
        let m = &f.m;
        let t = self.material.thickness;
        let dx = self.geom.cell_size;
        let vol = self.cell_volume();
        let (a, kd) = (self.material.a_ex * t, self.material.dmi * t * dx);
        let h_ext = [self.b_ext[0] / MU0, self.b_ext[1] / MU0, self.b_ext[2] / MU0];
        let mut e = 0.0;
        for (k, &c) in self.cells.iter().enumerate() {
            let mi = m[c as usize];
            e += self.k_eff * vol * (1.0 - mi[2] * mi[2]);
            e -= MU0 * self.material.ms * vol * dot(mi, h_ext);
            let n = self.nbr[k];
            if n[0] != NONE {
                let mj = m[n[0] as usize];
                let d = [mi[0] - mj[0], mi[1] - mj[1], mi[2] - mj[2]];
                // (ẑ × x̂) = ŷ
                e += a * dot(d, d) + kd * cross(mi, mj)[1];
            }
            if n[2] != NONE {
                let mj = m[n[2] as usize];
                let d = [mi[0] - mj[0], mi[1] - mj[1], mi[2] - mj[2]];
                // (ẑ × ŷ) = −x̂
                e += a * dot(d, d) - kd * cross(mi, mj)[0];
            }
        }
        e
    }

    fn drive_terms(&self, drive: Option<&DriveParams>) -> DriveTerms {
        let s = 1.0 / (1.0 + self.material.alpha * self.material.alpha);
        match drive {
            Some(d) if d.current_density != 0.0 => {
                let u = d.stt_velocity(&self.material);
                DriveTerms {
                    kind: d.torque_kind,
                    sot: s * d.sot_rate(&self.material),
                    sigma: d.polarization_dir,
                    u: [s * u[0], s * u[1]],
                    beta: d.nonadiabaticity_beta,
                    active: true,
                }
            }
            _ => DriveTerms {
                kind: TorqueKind::SotDampingLike,
                sot: 0.0,
                sigma: [0.0; 3],
                u: [0.0; 2],
                beta: 0.0,
                active: false,
            },
        }
    }

    /// dm/dt into `out` (compact order). `precess = false` gives the damping-only flow.
    fn rhs(&self, m: &[Vec3], drive: &DriveTerms, precess: bool, out: &mut [Vec3]) {
        let alpha = self.material.alpha;
        if !drive.active {
            return self.rhs_with(m, precess, out, |_, _| [0.0; 3]);
        }
        match drive.kind {
            TorqueKind::SotDampingLike => {
                let (c, sigma) = (drive.sot, drive.sigma);
                self.rhs_with(m, precess, out, |_, mi| {
                    let mxs = cross(mi, sigma);
                    let mxmxs = cross(mi, mxs);
                    [0, 1, 2].map(|a| -c * mxmxs[a] + alpha * c * mxs[a])
                })
            }
            TorqueKind::SttZhangLi => {
                let inv2dx = 0.5 / self.geom.cell_size;
                let (p, q) = (1.0 + alpha * drive.beta, drive.beta - alpha);
                let u = drive.u;
                self.rhs_with(m, precess, out, |k, mi| {
                    let n = self.nbr[k];
                    // Central differences, one-sided at the mask edge.
                    let grad = |a: u32, b: u32| -> Vec3 {
                        let (pa, pb, s) = match (a != NONE, b != NONE) {
                            (true, true) => (m[a as usize], m[b as usize], inv2dx),
                            (true, false) => (m[a as usize], mi, 2.0 * inv2dx),
                            (false, true) => (mi, m[b as usize], 2.0 * inv2dx),
                            (false, false) => return [0.0; 3],
                        };
                        [(pa[0] - pb[0]) * s, (pa[1] - pb[1]) * s, (pa[2] - pb[2]) * s]
                    };
                    let (gx, gy) = (grad(n[0], n[1]), grad(n[2], n[3]));
                    let ud = [0, 1, 2].map(|a| u[0] * gx[a] + u[1] * gy[a]);
                    let mxud = cross(mi, ud);
                    [0, 1, 2].map(|a| -p * ud[a] + q * mxud[a])
                })
            }
        }
    }

    #[inline(always)]
    fn rhs_with(&self, m: &[Vec3], precess: bool, out: &mut [Vec3], torque: impl Fn(usize, Vec3) -> Vec3) {
        let g = self.gamma_ll();
        let gp = if precess { g } else { 0.0 };
        let ga = g * self.material.alpha;
        for (k, (o, &c)) in out.iter_mut().zip(&self.cells).enumerate() {
            let mi = m[c as usize];
            let h = self.field_at(m, k);
            let mxh = cross(mi, h);
            let mxmxh = cross(mi, mxh);
            let t = torque(k, mi);
            *o = [0, 1, 2].map(|a| -gp * mxh[a] - ga * mxmxh[a] + t[a]);
        }
    }

    /// Largest |m × H_eff| over magnetic cells [A/m].
    pub fn max_torque(&self, f: &MagnetizationField) -> f64 {
        (0..self.cells.len())
            .map(|k| norm(cross(f.m[self.cells[k] as usize], self.field_at(&f.m, k))))
            .fold(0.0, f64::max)
    }

    /// Stiffest field scale: max |H_eff| at this state plus the exchange and
    /// DMI spectral bounds (8·2A/(μ0Ms·Δ²) and 4·D/(μ0Ms·Δ)).
    pub fn field_scale(&self, f: &MagnetizationField) -> f64 {
        let hmax = (0..self.cells.len()).map(|k| norm(self.field_at(&f.m, k))).fold(0.0, f64::max);
        hmax + 8.0 * self.c_ex + 4.0 * self.c_dmi.abs()
    }

    /// Default step: half of the explicit stability bound 1/(γ0·H_scale).
    pub fn default_dt(&self, f: &MagnetizationField) -> f64 {
        0.5 / (GAMMA0 * self.field_scale(f))
    }

    pub fn stepper(&self) -> Stepper {
        let n = self.cells.len();
        Stepper { k1: vec![[0.0; 3]; n], k2: vec![[0.0; 3]; n], pred: Vec::new() }
    }

    /// One Heun step of the full LLG with optional drive; renormalizes.
    pub fn step_llg(
        &self,
        f: &mut MagnetizationField,
        drive: Option<&DriveParams>,
        dt: f64,
        st: &mut Stepper,
    ) -> Result<(), MicromagError> {
        let terms = self.drive_terms(drive);
        self.heun(f, &terms, true, dt, st)
    }

    fn heun(
        &self,
        f: &mut MagnetizationField,
        terms: &DriveTerms,
        precess: bool,
        dt: f64,
        st: &mut Stepper,
    ) -> Result<(), MicromagError> {
        self.rhs(&f.m, terms, precess, &mut st.k1);
        if st.pred.len() != f.m.len() {
            st.pred = f.m.clone();
        }
        for (k, &c) in self.cells.iter().enumerate() {
            let (mi, d) = (f.m[c as usize], st.k1[k]);
            st.pred[c as usize] = [mi[0] + dt * d[0], mi[1] + dt * d[1], mi[2] + dt * d[2]];
        }
        self.rhs(&st.pred, terms, precess, &mut st.k2);
        let mut worst = 0.0f64;
        let half = 0.5 * dt;
        for (k, &c) in self.cells.iter().enumerate() {
            let c = c as usize;
            let (mi, a, b) = (f.m[c], st.k1[k], st.k2[k]);
            let n = [
                mi[0] + half * (a[0] + b[0]),
                mi[1] + half * (a[1] + b[1]),
                mi[2] + half * (a[2] + b[2]),
            ];
            let len = norm(n);
            worst = worst.max((len - 1.0).abs());
            let inv = 1.0 / len;
            st.pred[c] = [n[0] * inv, n[1] * inv, n[2] * inv];
        }
        if worst > 1e-3 {
            return Err(MicromagError::StepUnstable { deviation: worst, dt });
        }
        // Vacuum entries of `pred` are zero like those of `f`.
        std::mem::swap(&mut f.m, &mut st.pred);
        Ok(())
    }

    /// Damping-only relaxation until the largest torque |m × H| drops below
    /// `torque_tol` [A/m].
    ///
    /// Each step moves along the damping direction H_⊥ = H − (m·H)m, which is
    /// the flow dm/dt = −γ'α·m×(m×H) with a pseudo-time step τ chosen by
    /// alternating Barzilai–Borwein rules. Steps that would raise the energy
    /// are halved and retried, so accepted energies never increase.
    /// `max_time` bounds the accumulated flow time τ/(γ'α).
    pub fn relax(
        &self,
        f: &mut MagnetizationField,
        max_time: f64,
        torque_tol: f64,
    ) -> Result<RelaxReport, MicromagError> {
        let n = self.cells.len();
        let rate = self.gamma_ll() * self.material.alpha;
        let tau_min = 1e-3 / self.field_scale(f);
        let mut tau = 0.5 / self.field_scale(f);
        let mut g = vec![[0.0; 3]; n];
        let mut g_prev = vec![[0.0; 3]; n];
        let mut trial = f.clone();
        let mut e = self.energy(f);
        let (mut t, mut steps) = (0.0, 0usize);
        loop {
            let mut torque = 0.0f64;
            for (k, gk) in g.iter_mut().enumerate() {
                let mi = f.m[self.cells[k] as usize];
                let h = self.field_at(&f.m, k);
                let mh = dot(mi, h);
                *gk = [h[0] - mh * mi[0], h[1] - mh * mi[1], h[2] - mh * mi[2]];
                torque = torque.max(norm(*gk));
            }
            if torque < torque_tol {
                return Ok(RelaxReport { time: t, steps, torque, energy: e });
            }
            if t >= max_time {
                return Err(MicromagError::NoConvergence { torque, time: t });
            }
            if steps > 0 {
                // s = m_k − m_{k−1} ≈ τ_prev·g_prev, y = −(g_k − g_{k−1})
                let (mut ss, mut sy, mut yy) = (0.0, 0.0, 0.0);
                for (k, &c) in self.cells.iter().enumerate() {
                    let c = c as usize;
                    for a in 0..3 {
                        let sa = f.m[c][a] - trial.m[c][a];
                        let ya = g_prev[k][a] - g[k][a];
                        ss += sa * sa;
                        sy += sa * ya;
                        yy += ya * ya;
                    }
                }
                let bb = if steps % 2 == 0 { ss / sy } else { sy / yy };
                if bb.is_finite() && bb > 0.0 {
                    tau = bb.max(tau_min);
                }
            }
            loop {
                for (k, &c) in self.cells.iter().enumerate() {
                    let c = c as usize;
                    let (mi, d) = (f.m[c], g[k]);
                    let v = [mi[0] + tau * d[0], mi[1] + tau * d[1], mi[2] + tau * d[2]];
                    let len = norm(v);
                    trial.m[c] = [v[0] / len, v[1] / len, v[2] / len];
                }
                let e_new = self.energy(&trial);
                if e_new <= e + 1e-12 * e.abs().max(1e-30) {
                    // `trial` keeps the previous state for the next BB update.
                    std::mem::swap(f, &mut trial);
                    std::mem::swap(&mut g, &mut g_prev);
                    e = e_new.min(e);
                    t += tau / rate;
                    steps += 1;
                    break;
                }
                tau *= 0.5;
                if tau < 1e-3 * tau_min {
                    return Err(MicromagError::NoConvergence { torque, time: t });
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxReport {
    pub time: f64,
    pub steps: usize,
    pub torque: f64,
    pub energy: f64,
}

/// Scratch buffers for the Heun integrator.
#[derive(Debug, Clone)]
pub struct Stepper {
    k1: Vec<Vec3>,
    k2: Vec<Vec3>,
    pred: Vec<Vec3>,
}

/// Fixed-step LLG driver that halves dt on instability (at most 10 times).
#[derive(Debug, Clone)]
pub struct Integrator {
    pub dt: f64,
    pub t: f64,
    pub halvings: u32,
    st: Stepper,
}

impl Integrator {
    pub fn new(model: &Micromag, dt: f64) -> Self {
        Self { dt, t: 0.0, halvings: 0, st: model.stepper() }
    }

    pub fn step(
        &mut self,
        model: &Micromag,
        f: &mut MagnetizationField,
        drive: Option<&DriveParams>,
    ) -> Result<(), MicromagError> {
        loop {
            match model.step_llg(f, drive, self.dt, &mut self.st) {
                Ok(()) => {
                    self.t += self.dt;
                    return Ok(());
                }
                Err(e @ MicromagError::StepUnstable { .. }) => {
                    if self.halvings >= 10 {
                        return Err(e);
                    }
                    self.halvings += 1;
                    self.dt *= 0.5;
                    log::warn!("LLG step unstable, dt halved to {:.3e} s", self.dt);
                }
                Err(e) => return Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests;
