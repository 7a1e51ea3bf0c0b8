//! Everything a Thiele diode run needs, assembled from a config.

use super::{RadialProfile, TextureIntegrals, ThieleError, ThieleParams, ThieleRun};
use crate::geometry::{build_t_track, ConfinementPotential, TrackGeometry, TrackSpec};
use crate::params::{derive_scales, DerivedScales, DriveParams, ExperimentConfig, MaterialParams, ParamsError};

/// Default U0 in units of the edge scale λ·|G|·|F|/(α_G·d) at the reference
/// drive. Calibrated so the baseline geometry separates forward and reverse.
pub const U0_EDGE_FACTOR: f64 = 15.0;
/// Current density used to fix the force direction when the drive is off.
const FALLBACK_J: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct ThieleSetup {
    pub material: MaterialParams,
    pub scales: DerivedScales,
    pub drive: DriveParams,
    pub geometry: TrackGeometry,
    pub potential: ConfinementPotential,
    /// Coefficients with the force at `drive.current_density`.
    pub params: ThieleParams,
    /// Force per unit current density [N·m²/A].
    pub force_per_j: [f64; 2],
    pub run: ThieleRun,
    pub j_values: Vec<f64>,
}

impl ThieleSetup {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self, ThieleError> {
        let material = cfg.material();
        let scales = derive_scales(&material)?;
        let drive = cfg.drive();
        let th = cfg.thiele();
        let geometry = build_t_track(&TrackSpec::from(&cfg.geometry()), &scales)?;
        let j_ref = if drive.current_density > 0.0 { drive.current_density } else { FALLBACK_J };
        let prof = RadialProfile::minimize(&material, scales.k_eff).ok_or(ThieleError::NoSkyrmion)?;
        let ti = TextureIntegrals::from_profile(&prof);
        let alpha_g = th.alpha_g.unwrap_or(material.alpha);
        let mut base = ThieleParams::from_texture(&ti, &material, &drive.with_current_density(j_ref), alpha_g);
        if let Some(g) = th.gyro {
            base.gyro = g;
        }
        if let Some(d) = th.d_diss {
            base.d_diss = d;
        }
        if let Some(f) = th.force {
            let n = base.force[0].hypot(base.force[1]);
            base.force = if n > 0.0 { [f * base.force[0] / n, f * base.force[1] / n] } else { [f, 0.0] };
        }
        let force_per_j = [base.force[0] / j_ref, base.force[1] / j_ref];
        let lambda = th.lambda.unwrap_or(scales.delta_dw);
        let edge = lambda * base.gyro.abs() * base.force[0].hypot(base.force[1]) / base.dissipation();
        let u0 = th.u0.unwrap_or(U0_EDGE_FACTOR * edge);
        if !(u0 > 0.0) {
            return Err(ParamsError::InvalidDrive { name: "U0", reason: "edge scale vanished; set thiele.U0" }.into());
        }
        let potential = ConfinementPotential::build(&geometry, u0, lambda);
        let params = base.with_force([force_per_j[0] * drive.current_density, force_per_j[1] * drive.current_density]);
        let run = ThieleRun { dt: th.dt, timeout: th.timeout, sample_interval: cfg.output().trajectory_interval };
        Ok(Self { material, scales, drive, geometry, potential, params, force_per_j, run, j_values: th.j_values() })
    }

    /// Coefficients with the force scaled to current density `j`.
    pub fn at_current(&self, j: f64) -> ThieleParams {
        self.params.with_force([self.force_per_j[0] * j, self.force_per_j[1] * j])
    }
}
