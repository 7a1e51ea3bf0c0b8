//! Flux-tunable transmon and the skyrmion stray-field estimate.
//!
//! Energies are in GHz·h throughout, so frequencies and energies share units
//! and dividing by h is a no-op.

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::constants::{FLUX_QUANTUM, MU0};
use crate::linalg::tridiagonal_lowest;
#[cfg(test)]
use crate::linalg::{jacobi_eigh, SymMatrix};
use crate::params::TransmonSection;

/// Below this E_J,eff/E_C the Duffing expansion is refused.
pub const REGIME_FLOOR: f64 = 20.0;
/// Below this ratio the expansion is used with a warning.
pub const REGIME_WARN: f64 = 50.0;
/// Largest tolerated relative level shift when the charge cutoff grows by 5.
pub const CUTOFF_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransmonError {
    #[error("E_J,eff/E_C = {ratio:.3} is below the transmon floor {REGIME_FLOOR}")]
    OutOfRegime { ratio: f64 },
    #[error("charge cutoff {cutoff}: {reason}")]
    Cutoff { cutoff: usize, reason: String },
    #[error("invalid transmon parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonParams {
    pub ej_sigma: f64,
    pub ec: f64,
    pub epsilon: f64,
    pub phi_e: f64,
}

impl TransmonParams {
    pub fn from_section(s: &TransmonSection) -> Self {
        Self { ej_sigma: s.ej_sigma, ec: s.ec, epsilon: s.epsilon, phi_e: s.phi_e }
    }

    pub fn validate(&self) -> Result<(), TransmonError> {
        if !(self.ej_sigma > 0.0) || !(self.ec > 0.0) {
            return Err(TransmonError::InvalidParams("EJ_sigma and EC must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(TransmonError::InvalidParams(format!("epsilon = {} outside [0, 1)", self.epsilon)));
        }
        if !self.phi_e.is_finite() {
            return Err(TransmonError::InvalidParams("phi_e must be finite".into()));
        }
        Ok(())
    }
}

/// E_JΣ·√(cos²(πφ_e) + ε²·sin²(πφ_e)).
///
/// Equal to E_JΣ·|cos πφ_e|·√(1 + ε²·tan² πφ_e) wherever cos πφ_e ≠ 0 (factor
/// cos² into the root), and finite at φ_e = 1/2 where it tends to E_JΣ·ε.
pub fn ej_eff(p: &TransmonParams) -> f64 {
    let (s, c) = (PI * p.phi_e).sin_cos();
    p.ej_sigma * (c * c + p.epsilon * p.epsilon * s * s).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuffingLevels {
    pub levels: Vec<f64>,
    /// ħω_p = √(8·E_C·E_J,eff).
    pub omega_p: f64,
    pub f01: f64,
    /// (E2 − E1) − (E1 − E0).
    pub anharmonicity: f64,
}

/// E_m = −E_J,eff + ħω_p(m + ½) − (E_C/12)(6m² + 6m + 3) for m = 0..n.
pub fn duffing_levels(p: &TransmonParams, n: usize) -> Result<DuffingLevels, TransmonError> {
    p.validate()?;
    let ej = ej_eff(p);
    let ratio = ej / p.ec;
    if ratio < REGIME_FLOOR {
        return Err(TransmonError::OutOfRegime { ratio });
    }
    if ratio < REGIME_WARN {
        log::warn!("E_J,eff/E_C = {ratio:.1}: Duffing expansion is marginal");
    }
    Ok(duffing_unchecked(ej, p.ec, n.max(3)))
}

fn duffing_unchecked(ej: f64, ec: f64, n: usize) -> DuffingLevels {
    let wp = (8.0 * ec * ej).sqrt();
    let levels: Vec<f64> = (0..n)
        .map(|m| {
            let m = m as f64;
            -ej + wp * (m + 0.5) - ec / 12.0 * (6.0 * m * m + 6.0 * m + 3.0)
        })
        .collect();
    // E_m differences telescope to ω_p − E_C and −E_C exactly; evaluate the
    // closed forms rather than subtracting large level values.
    DuffingLevels { levels, omega_p: wp, f01: wp - ec, anharmonicity: -ec }
}

/// Smallest cutoff the exact solver accepts for this E_J/E_C.
pub fn min_cutoff(ec: f64, ej: f64) -> usize {
    10 + (ej / ec).max(0.0).sqrt().ceil() as usize
}

#[cfg(test)]
fn charge_hamiltonian(ec: f64, ej: f64, cutoff: usize) -> SymMatrix {
    let n = 2 * cutoff + 1;
    let mut h = SymMatrix::zeros(n);
    for i in 0..n {
        let q = i as f64 - cutoff as f64;
        h.set_sym(i, i, 4.0 * ec * q * q);
        if i + 1 < n {
            h.set_sym(i, i + 1, -0.5 * ej);
        }
    }
    h
}

/// Lowest `n_levels` eigenvalues of 4E_C·n² − E_J·cos φ in the charge basis
/// |n|≤cutoff, at zero offset charge.
pub fn exact_levels(ec: f64, ej: f64, n_levels: usize, cutoff: usize) -> Result<Vec<f64>, TransmonError> {
    if !(ec > 0.0) || !(ej >= 0.0) {
        return Err(TransmonError::InvalidParams("need EC > 0 and EJ ≥ 0".into()));
    }
    let need = min_cutoff(ec, ej);
    if cutoff < need {
        return Err(TransmonError::Cutoff { cutoff, reason: format!("below the minimum {need} for this EJ/EC") });
    }
    if n_levels > 2 * cutoff + 1 {
        return Err(TransmonError::InvalidParams(format!("{n_levels} levels exceed the basis")));
    }
    let solve = |c: usize| {
        let d: Vec<f64> = (0..2 * c + 1).map(|i| 4.0 * ec * (i as f64 - c as f64).powi(2)).collect();
        tridiagonal_lowest(&d, &vec![-0.5 * ej; 2 * c], n_levels)
    };
    let (a, b) = (solve(cutoff), solve(cutoff + 5));
    for (x, y) in a.iter().zip(&b) {
        let shift = (x - y).abs() / x.abs().max(ec);
        if shift > CUTOFF_TOL {
            return Err(TransmonError::Cutoff { cutoff, reason: format!("levels shift by {shift:.2e} at cutoff + 5") });
        }
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Transmon,
    Marginal,
    OutOfRegime,
}

impl Regime {
    pub fn of(ratio: f64) -> Self {
        if ratio < REGIME_FLOOR {
            Regime::OutOfRegime
        } else if ratio < REGIME_WARN {
            Regime::Marginal
        } else {
            Regime::Transmon
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Transmon => "transmon",
            Regime::Marginal => "marginal",
            Regime::OutOfRegime => "out_of_regime",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonRow {
    pub phi_e: f64,
    pub epsilon: f64,
    pub ej_eff: f64,
    /// Eq. f01 = √(8E_C·E_J,eff) − E_C, reported even when flagged out of regime.
    pub f01_duffing: f64,
    pub f01_exact: Option<f64>,
    pub regime: Regime,
}

/// φ_e ∈ [0, 1) without the endpoint, and ε evenly over [eps_min, eps_max].
pub fn map_grids(s: &TransmonSection) -> (Vec<f64>, Vec<f64>) {
    let phi = (0..s.phi_points).map(|i| i as f64 / s.phi_points as f64).collect();
    let eps = crate::lindblad::linspace(s.eps_min, s.eps_max, s.eps_points);
    (phi, eps)
}

/// Rows ordered by ε, then φ_e. Out-of-regime points are flagged, not dropped.
pub fn f01_map(s: &TransmonSection) -> Result<Vec<TransmonRow>, TransmonError> {
    let (phi, eps) = map_grids(s);
    let points: Vec<(f64, f64)> = eps.iter().flat_map(|&e| phi.iter().map(move |&f| (f, e))).collect();
    points
        .par_iter()
        .map(|&(phi_e, epsilon)| {
            let p = TransmonParams { ej_sigma: s.ej_sigma, ec: s.ec, epsilon, phi_e };
            p.validate()?;
            let ej = ej_eff(&p);
            let exact = if s.exact_column {
                let lv = exact_levels(s.ec, ej, 2, s.charge_cutoff.max(min_cutoff(s.ec, ej)))?;
                Some(lv[1] - lv[0])
            } else {
                None
            };
            Ok(TransmonRow {
                phi_e,
                epsilon,
                ej_eff: ej,
                f01_duffing: duffing_unchecked(ej, s.ec, 3).f01,
                f01_exact: exact,
                regime: Regime::of(ej / s.ec),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleEstimate {
    /// m = Ms·volume [A·m²].
    pub moment: f64,
    pub z: f64,
    /// On-axis field (μ0/4π)·2m/z³ [T].
    pub bz: f64,
    pub loop_side: f64,
    /// Flux through a coaxial circle of area loop_side² [Wb].
    pub flux: f64,
    pub flux_quanta: f64,
}

pub fn dipole_estimate(ms: f64, volume: f64, z: f64, loop_side: f64) -> Result<DipoleEstimate, TransmonError> {
    if !(z > 0.0) || !(loop_side > 0.0) || !(ms >= 0.0) || !(volume >= 0.0) {
        return Err(TransmonError::InvalidParams("need z, loop_side > 0 and Ms, volume ≥ 0".into()));
    }
    let m = ms * volume;
    let bz = MU0 / (4.0 * PI) * 2.0 * m / z.powi(3);
    let r2 = loop_side * loop_side / PI;
    let flux = MU0 * m * r2 / (2.0 * (r2 + z * z).powf(1.5));
    Ok(DipoleEstimate { moment: m, z, bz, loop_side, flux, flux_quanta: flux / FLUX_QUANTUM })
}

/// z component of an ẑ-oriented point dipole's field at lateral offset ρ.
fn dipole_bz(m: f64, rho2: f64, z: f64) -> f64 {
    let r2 = rho2 + z * z;
    MU0 * m / (4.0 * PI) * (3.0 * z * z - r2) / (r2 * r2 * r2.sqrt())
}

/// Flux through the centred square loop at height z, by an n×n midpoint rule.
pub fn flux_through_square(m: f64, z: f64, side: f64, n: usize) -> f64 {
    let h = side / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let x = -0.5 * side + (i as f64 + 0.5) * h;
        for j in 0..n {
            let y = -0.5 * side + (j as f64 + 0.5) * h;
            total += dipole_bz(m, x * x + y * y, z);
        }
    }
    total * h * h
}

/// Flux through the centred disc of radius `r` by a radial midpoint rule.
pub fn flux_through_disc(m: f64, z: f64, r: f64, n: usize) -> f64 {
    let h = r / n as f64;
    (0..n)
        .map(|i| {
            let rho = (i as f64 + 0.5) * h;
            2.0 * PI * rho * dipole_bz(m, rho * rho, z) * h
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn paper(epsilon: f64, phi_e: f64) -> TransmonParams {
        TransmonParams { ej_sigma: 50.0, ec: 0.2, epsilon, phi_e }
    }

    #[test]
    fn ej_eff_limits() {
        assert_eq!(ej_eff(&paper(0.3, 0.0)), 50.0);
        assert!((ej_eff(&paper(0.2, 0.5)) - 10.0).abs() < 1e-12);
        for phi in [0.1, 0.37, 0.5, 0.9] {
            let p = TransmonParams { epsilon: 1.0, ..paper(0.0, phi) };
            assert!((ej_eff(&p) - 50.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ej_eff_equals_tangent_form() {
        for phi in [0.0, 0.1, 0.25, 0.45, 0.499, 0.6, 0.83] {
            for eps in [0.0, 0.05, 0.3, 0.7] {
                let c = (PI * phi).cos();
                let t = (PI * phi).tan();
                let want = 50.0 * c.abs() * (1.0 + eps * eps * t * t).sqrt();
                let got = ej_eff(&paper(eps, phi));
                assert!((got - want).abs() <= 1e-14 * want.max(1e-300) * 10.0, "{phi} {eps}");
            }
        }
    }

    #[test]
    fn duffing_paper_values() {
        let d = duffing_levels(&paper(0.0, 0.0), 4).unwrap();
        assert!((d.f01 - (80f64.sqrt() - 0.2)).abs() < 1e-12);
        assert!((d.f01 - 8.744).abs() < 1e-3);
        assert_eq!(d.anharmonicity, -0.2);
        let e = &d.levels;
        assert!(((e[2] - e[1]) - (e[1] - e[0]) + 0.2).abs() < 1e-12);
        let low = duffing_levels(&paper(0.2, 0.5), 3).unwrap();
        assert!((low.f01 - 3.8).abs() < 1e-12);
    }

    #[test]
    fn duffing_refuses_charge_regime() {
        assert!(matches!(duffing_levels(&paper(0.0, 0.5), 3), Err(TransmonError::OutOfRegime { .. })));
    }

    #[test]
    fn exact_without_josephson_is_charging_ladder() {
        let e = exact_levels(0.2, 0.0, 5, 12).unwrap();
        for (a, b) in e.iter().zip([0.0, 0.8, 0.8, 3.2, 3.2]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_matches_duffing_deep_transmon() {
        let e = exact_levels(0.2, 50.0, 3, 30).unwrap();
        let f01 = e[1] - e[0];
        let duff = duffing_levels(&paper(0.0, 0.0), 3).unwrap();
        assert!((f01 - duff.f01).abs() / duff.f01 < 0.01);
        // The anharmonicity correction falls off only as √(E_C/E_J): about 6%
        // at E_J/E_C = 250, under 5% from roughly 400 on.
        let e = exact_levels(0.2, 200.0, 3, 50).unwrap();
        let anh = (e[2] - e[1]) - (e[1] - e[0]);
        assert!((anh + 0.2).abs() < 0.05 * 0.2, "{anh}");
    }

    #[test]
    fn bisection_agrees_with_dense_solver() {
        let e = exact_levels(0.2, 30.0, 4, 25).unwrap();
        let dense = jacobi_eigh(&charge_hamiltonian(0.2, 30.0, 25)).values;
        for (a, b) in e.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn duffing_error_shrinks_with_ratio() {
        let errs: Vec<f64> = [20.0, 50.0, 100.0, 250.0]
            .iter()
            .map(|r| {
                let ej = r * 0.2;
                let e = exact_levels(0.2, ej, 2, min_cutoff(0.2, ej) + 5).unwrap();
                let d = duffing_unchecked(ej, 0.2, 3).f01;
                ((e[1] - e[0]) - d).abs() / d
            })
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn exact_spectrum_unchanged_by_index_reversal() {
        let h = charge_hamiltonian(0.3, 7.0, 15);
        let n = h.dim();
        let mut r = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                r.set_sym(i, j, h.get(n - 1 - i, n - 1 - j));
            }
        }
        let (a, b) = (jacobi_eigh(&h).values, jacobi_eigh(&r).values);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn cutoff_checks() {
        assert!(matches!(exact_levels(0.2, 50.0, 2, 12), Err(TransmonError::Cutoff { .. })));
        assert_eq!(min_cutoff(0.2, 50.0), 26);
    }

    #[test]
    fn map_structure() {
        let s = crate::params::ExperimentConfig::default().transmon();
        let rows = f01_map(&s).unwrap();
        let (phi, eps) = map_grids(&s);
        assert_eq!(rows.len(), phi.len() * eps.len());
        for col in rows.chunks(phi.len()) {
            let top = col[0].f01_duffing;
            assert!(col.iter().all(|r| r.f01_duffing <= top));
            for i in 1..phi.len() {
                let (a, b) = (col[i].f01_duffing, col[phi.len() - i].f01_duffing);
                assert!((a - b).abs() < 1e-12);
            }
        }
        // ε = 0 column bottoms out next to φ_e = 1/2, flagged out of regime
        let zero = &rows[..phi.len()];
        let worst = zero.iter().min_by(|a, b| a.f01_duffing.total_cmp(&b.f01_duffing)).unwrap();
        assert!((worst.phi_e - 0.5).abs() < 1.0 / phi.len() as f64);
        assert_eq!(worst.regime, Regime::OutOfRegime);
    }

    #[test]
    fn dipole_paper_numbers() {
        let near = dipole_estimate(1e6, 8e-24, 20e-9, 100e-9).unwrap();
        assert!((near.moment - 8e-18).abs() < 1e-30);
        assert!((near.bz - 0.2).abs() < 1e-12);
        let far = dipole_estimate(1e6, 8e-24, 50e-9, 100e-9).unwrap();
        assert!((far.bz - 0.0128).abs() < 1e-12);
        assert!(far.flux_quanta > 0.0);
    }

    #[test]
    fn flux_closed_form_matches_integration() {
        let d = dipole_estimate(1e6, 8e-24, 50e-9, 100e-9).unwrap();
        let r = d.loop_side / PI.sqrt();
        let disc = flux_through_disc(d.moment, d.z, r, 20000);
        assert!((disc - d.flux).abs() < 1e-6 * d.flux);
        let square = flux_through_square(d.moment, d.z, d.loop_side, 400);
        assert!((square - d.flux).abs() < 0.1 * d.flux, "{square} vs {}", d.flux);
    }

    proptest! {
        #[test]
        fn bz_scales_as_inverse_cube(z in 5e-9f64..500e-9) {
            let a = dipole_estimate(1e6, 8e-24, z, 100e-9).unwrap();
            let b = dipole_estimate(1e6, 8e-24, 20e-9, 100e-9).unwrap();
            prop_assert!((a.bz * z.powi(3) - b.bz * 20e-9f64.powi(3)).abs() <= 1e-12 * b.bz * 20e-9f64.powi(3));
        }

        #[test]
        fn f01_periodic_and_symmetric(phi in 0.0f64..1.0, eps in 0.0f64..0.99) {
            let a = ej_eff(&paper(eps, phi));
            prop_assert!((a - ej_eff(&paper(eps, 1.0 - phi))).abs() < 1e-12);
            prop_assert!((a - ej_eff(&paper(eps, phi + 1.0))).abs() < 1e-12);
        }
    }
}
