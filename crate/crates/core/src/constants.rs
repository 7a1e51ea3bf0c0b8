//! Physical constants (SI, CODATA 2018).

use std::f64::consts::PI;

/// Vacuum permeability [T·m/A].
pub const MU0: f64 = 4.0e-7 * PI;
/// Electron gyromagnetic ratio magnitude [rad/(s·T)].
pub const GAMMA_E: f64 = 1.760_859_630_23e11;
/// LLG gyromagnetic constant γ0 = μ0·γ_e [m/(A·s)].
pub const GAMMA0: f64 = MU0 * GAMMA_E;
/// Reduced Planck constant [J·s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant [J·s].
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge [C].
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Bohr magneton [J/T].
pub const MU_B: f64 = 9.274_010_078_3e-24;
/// Superconducting flux quantum h/2e [Wb].
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * E_CHARGE);
