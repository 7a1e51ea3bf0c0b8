//! Relaxed skyrmion size versus anisotropy on a square patch.

use rayon::prelude::*;

use super::{observe, seed_skyrmion, MagnetizationField, Micromag, MicromagError, RelaxReport, SkyrmionObservables};
use crate::geometry::build_patch;
use crate::params::{derive_scales, ExperimentConfig, MaterialParams};
use crate::thiele::RadialProfile;

#[derive(Debug, Clone)]
pub struct SizeSweep {
    pub material: MaterialParams,
    pub ku_values: Vec<f64>,
    pub patch_size: f64,
    pub patch_cell: f64,
    pub relax_max_time: f64,
    pub relax_tol: f64,
}

impl SizeSweep {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        let g = cfg.geometry();
        let run = cfg.llg_run();
        Self {
            material: cfg.material(),
            ku_values: cfg.ku_sweep(),
            patch_size: g.patch_size,
            patch_cell: g.patch_cell,
            relax_max_time: run.relax_max_time,
            relax_tol: run.relax_tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelaxedPoint {
    pub ku: f64,
    pub observables: SkyrmionObservables,
    pub report: RelaxReport,
    pub model: Micromag,
    pub field: MagnetizationField,
}

/// Seeds a skyrmion of radius 2·δ_DW in the patch centre and relaxes it.
pub fn relax_patch(material: &MaterialParams, size: f64, cell: f64, max_time: f64, tol: f64) -> Result<RelaxedPoint, MicromagError> {
    let scales = derive_scales(material)?;
    let model = Micromag::new(build_patch(size, size, cell, &scales)?, *material, [0.0; 3])?;
    let mut f = model.uniform([0.0, 0.0, 1.0]);
    let c = (model.geom.width() / 2.0, model.geom.height() / 2.0);
    seed_skyrmion(&model, &mut f, c, &RadialProfile { radius: 2.0 * scales.delta_dw, width: scales.delta_dw });
    let report = model.relax(&mut f, max_time, tol)?;
    Ok(RelaxedPoint { ku: material.ku, observables: observe(&model, &f), report, model, field: f })
}

/// One relaxed point per Ku, in input order.
pub fn size_sweep(s: &SizeSweep) -> Result<Vec<RelaxedPoint>, MicromagError> {
    s.ku_values
        .par_iter()
        .map(|&ku| relax_patch(&s.material.with_ku(ku), s.patch_size, s.patch_cell, s.relax_max_time, s.relax_tol))
        .collect()
}
