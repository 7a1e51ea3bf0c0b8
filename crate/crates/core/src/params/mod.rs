//! Material constants, derived micromagnetic length scales, drive settings and
//! the experiment configuration file.

mod config;

pub use config::{
    ConfigError, ExperimentConfig, GeometrySection, LindbladSection, LlgRunSection, OutputSection,
    RotorSection,
    SchemaError, Section, ThieleSection, TransmonSection, Value,
};

use crate::constants::{E_CHARGE, GAMMA0, HBAR, MU0, MU_B};
use crate::vec3::{norm, Vec3};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("k_eff = {k_eff:.4e} J/m³ ≤ 0: shape anisotropy μ0·Ms²/2 overwhelms Ku, no perpendicular easy axis")]
    NonPerpendicularEasyAxis { k_eff: f64 },
    #[error("invalid material parameter {name}: {reason}")]
    InvalidMaterial { name: &'static str, reason: &'static str },
    #[error("invalid drive parameter {name}: {reason}")]
    InvalidDrive { name: &'static str, reason: &'static str },
}

/// Thin-film magnetic material (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Saturation magnetization [A/m].
    pub ms: f64,
    /// Exchange stiffness [J/m].
    pub a_ex: f64,
    /// Interfacial DMI constant [J/m²].
    pub dmi: f64,
    /// Uniaxial anisotropy [J/m³].
    pub ku: f64,
    /// Gilbert damping.
    pub alpha: f64,
    /// Film thickness [m].
    pub thickness: f64,
}

impl MaterialParams {
    /// Hard-magnet baseline: Ms = 580 kA/m, A = 15 pJ/m, D = 3 mJ/m², Ku = 0.8 MJ/m³, α = 0.1, 1 nm film.
    pub fn baseline() -> Self {
        Self {
            ms: 580e3,
            a_ex: 15e-12,
            dmi: 3.0e-3,
            ku: 0.8e6,
            alpha: 0.1,
            thickness: 1e-9,
        }
    }

    pub fn with_ku(self, ku: f64) -> Self {
        Self { ku, ..self }
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        let bad = |name, reason| Err(ParamsError::InvalidMaterial { name, reason });
        if !(self.ms > 0.0) {
            return bad("Ms", "must be > 0");
        }
        if !(self.a_ex > 0.0) {
            return bad("Aex", "must be > 0");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha", "must lie in (0, 1]");
        }
        if !(self.ku >= 0.0) {
            return bad("Ku", "must be ≥ 0");
        }
        if !self.dmi.is_finite() {
            return bad("Dmi", "must be finite");
        }
        if !(self.thickness > 0.0) {
            return bad("thickness", "must be > 0");
        }
        Ok(())
    }
}

/// Length and energy scales that follow from a [`MaterialParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Exchange length √(2A/(μ0·Ms²)) [m].
    pub l_ex: f64,
    /// Wall-width parameter √(A/Ku) [m].
    pub delta_dw: f64,
    /// Effective anisotropy with the local thin-film demag correction, Ku − μ0·Ms²/2 [J/m³].
    pub k_eff: f64,
}

pub fn derive_scales(m: &MaterialParams) -> Result<DerivedScales, ParamsError> {
    m.validate()?;
    let k_eff = m.ku - 0.5 * MU0 * m.ms * m.ms;
    if k_eff <= 0.0 {
        return Err(ParamsError::NonPerpendicularEasyAxis { k_eff });
    }
    Ok(DerivedScales {
        l_ex: (2.0 * m.a_ex / (MU0 * m.ms * m.ms)).sqrt(),
        delta_dw: (m.a_ex / m.ku).sqrt(),
        k_eff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorqueKind {
    /// Spin-Hall damping-like spin–orbit torque.
    SotDampingLike,
    /// Zhang–Li spin-transfer torque from in-plane current.
    SttZhangLi,
}

impl TorqueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TorqueKind::SotDampingLike => "sot",
            TorqueKind::SttZhangLi => "stt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sot" => Some(TorqueKind::SotDampingLike),
            "stt" => Some(TorqueKind::SttZhangLi),
            _ => None,
        }
    }
}

/// Current drive. `polarization_dir` is the spin-Hall polarization σ for SOT;
/// for STT it is ignored and the electron flow follows `current_dir`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    /// |J| [A/m²].
    pub current_density: f64,
    pub torque_kind: TorqueKind,
    /// Unit spin polarization σ.
    pub polarization_dir: Vec3,
    /// In-plane unit vector of the charge current.
    pub current_dir: [f64; 2],
    pub spin_hall_angle: f64,
    /// Spin polarization P of the current (STT).
    pub spin_polarization: f64,
    /// Non-adiabaticity β (STT).
    pub nonadiabaticity_beta: f64,
}

impl DriveParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        let bad = |name, reason| Err(ParamsError::InvalidDrive { name, reason });
        if !(self.current_density >= 0.0) {
            return bad("current_density", "must be ≥ 0");
        }
        if (norm(self.polarization_dir) - 1.0).abs() > 1e-9 {
            return bad("polarization", "must be a unit vector");
        }
        let c = self.current_dir;
        if ((c[0] * c[0] + c[1] * c[1]).sqrt() - 1.0).abs() > 1e-9 {
            return bad("current_dir", "must be a unit vector");
        }
        Ok(())
    }

    /// Same drive with the current (and hence σ) reversed.
    pub fn reversed(&self) -> Self {
        Self {
            polarization_dir: [
                -self.polarization_dir[0],
                -self.polarization_dir[1],
                -self.polarization_dir[2],
            ],
            current_dir: [-self.current_dir[0], -self.current_dir[1]],
            ..*self
        }
    }

    pub fn with_current_density(&self, j: f64) -> Self {
        Self { current_density: j, ..*self }
    }

    /// Damping-like SOT rate c = γ0·ħθ_SH·J/(2e·μ0·Ms·t) [1/s]; the Gilbert-form
    /// torque is −c·m×(m×σ).
    pub fn sot_rate(&self, m: &MaterialParams) -> f64 {
        GAMMA0 * HBAR * self.spin_hall_angle * self.current_density
            / (2.0 * E_CHARGE * MU0 * m.ms * m.thickness)
    }

    /// Zhang–Li drift velocity u = P·μB·J/(e·Ms) along the current [m/s].
    pub fn stt_velocity(&self, m: &MaterialParams) -> [f64; 2] {
        let u = self.spin_polarization * MU_B * self.current_density / (E_CHARGE * m.ms);
        [u * self.current_dir[0], u * self.current_dir[1]]
    }

    /// Image of the drive under the left–right mirror x → −x.
    ///
    /// Current is a polar vector, spin polarization an axial one.
    pub fn mirrored_x(&self) -> Self {
        let s = self.polarization_dir;
        Self {
            polarization_dir: [s[0], -s[1], -s[2]],
            current_dir: [-self.current_dir[0], self.current_dir[1]],
            ..*self
        }
    }
}
