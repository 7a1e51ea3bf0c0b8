//! Quantum rotor for the skyrmion helicity angle φ0.
//!
//! H = κ_z·S_z² − h_z·S_z + K2_eff·cos 2φ0 − e_z·cos φ0 with K2_eff = η·K2,
//! written in the S_z = m eigenbasis, m ∈ [−m_max, m_max]. cos φ0 couples
//! m ↔ m±1 and cos 2φ0 couples m ↔ m±2, each with matrix element 1/2.

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{jacobi_eigh, SymMatrix};
use crate::params::RotorSection;

/// Extra basis states used by the truncation check.
pub const TRUNCATION_PROBE: usize = 10;
/// Largest tolerated relative level shift under m_max → m_max + 10.
pub const TRUNCATION_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HelicityError {
    #[error("level {level} moved by {shift:.3e} (relative) when m_max grew by {TRUNCATION_PROBE}")]
    Truncation { level: usize, shift: f64 },
    #[error("invalid rotor parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorParams {
    pub kappa_z: f64,
    pub h_z: f64,
    pub k2: f64,
    pub e_z: f64,
    pub eta: f64,
    pub m_max: usize,
}

impl RotorParams {
    pub fn from_section(s: &RotorSection) -> Self {
        Self { kappa_z: s.kappa_z, h_z: s.h_z, k2: s.k2, e_z: s.e_z, eta: s.eta, m_max: s.m_max }
    }

    pub fn free(m_max: usize) -> Self {
        Self { kappa_z: 1.0, h_z: 0.0, k2: 0.0, e_z: 0.0, eta: 0.0, m_max }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn k2_eff(&self) -> f64 {
        self.eta * self.k2
    }

    pub fn dim(&self) -> usize {
        2 * self.m_max + 1
    }

    pub fn validate(&self) -> Result<(), HelicityError> {
        if !(self.kappa_z > 0.0) {
            return Err(HelicityError::InvalidParams("kappa_z must be positive".into()));
        }
        if self.m_max < 10 {
            return Err(HelicityError::InvalidParams("m_max must be at least 10".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(HelicityError::InvalidParams(format!("eta = {} outside [0, 1]", self.eta)));
        }
        if [self.h_z, self.k2, self.e_z].iter().any(|x| !x.is_finite()) {
            return Err(HelicityError::InvalidParams("non-finite coefficient".into()));
        }
        Ok(())
    }

    /// V(φ0) = K2_eff·cos 2φ0 − e_z·cos φ0.
    pub fn potential(&self, phi: f64) -> f64 {
        self.k2_eff() * (2.0 * phi).cos() - self.e_z * phi.cos()
    }

    /// Harmonic intrawell spacing 2·√(2·κ_z·K2_eff) about the cos 2φ0 minima.
    pub fn harmonic_omega(&self) -> f64 {
        2.0 * (2.0 * self.kappa_z * self.k2_eff()).sqrt()
    }
}

/// Row/column `m + m_max` holds the state |m⟩.
pub fn build_hamiltonian(p: &RotorParams) -> SymMatrix {
    let n = p.dim();
    let mut h = SymMatrix::zeros(n);
    let k2 = p.k2_eff();
    for i in 0..n {
        let m = i as f64 - p.m_max as f64;
        h.set_sym(i, i, p.kappa_z * m * m - p.h_z * m);
        if i + 1 < n {
            h.set_sym(i, i + 1, -0.5 * p.e_z);
        }
        if i + 2 < n {
            h.set_sym(i, i + 2, 0.5 * k2);
        }
    }
    h
}

#[derive(Debug, Clone)]
pub struct RotorSpectrum {
    /// Lowest levels, ascending.
    pub energies: Vec<f64>,
    /// `vectors[k][i]` is the amplitude of |i − m_max⟩ in level k.
    pub vectors: Vec<Vec<f64>>,
}

impl RotorSpectrum {
    pub fn omega01(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    pub fn omega12(&self) -> f64 {
        self.energies[2] - self.energies[1]
    }

    pub fn anharmonicity(&self) -> f64 {
        self.omega12() - self.omega01()
    }
}

fn lowest(h: &SymMatrix, n_levels: usize) -> RotorSpectrum {
    let mut e = jacobi_eigh(h);
    e.values.truncate(n_levels);
    e.vectors.truncate(n_levels);
    RotorSpectrum { energies: e.values, vectors: e.vectors }
}

fn check_levels(p: &RotorParams, n_levels: usize) -> Result<(), HelicityError> {
    p.validate()?;
    if n_levels < 3 || n_levels + 3 > 2 * p.m_max {
        return Err(HelicityError::InvalidParams(format!(
            "n_levels = {n_levels} must lie in [3, 2·m_max − 3 = {}]",
            2 * p.m_max - 3
        )));
    }
    Ok(())
}

/// Largest |ΔE_n| / max(|E_n|, κ_z) over the compared levels.
fn truncation_shift(a: &[f64], b: &[f64], kappa: f64) -> (usize, f64) {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| (i, (x - y).abs() / x.abs().max(kappa)))
        .fold((0, 0.0), |acc, v| if v.1 > acc.1 { v } else { acc })
}

/// Lowest `n_levels` eigenpairs, validated against a basis with m_max + 10.
pub fn spectrum(p: &RotorParams, n_levels: usize) -> Result<RotorSpectrum, HelicityError> {
    check_levels(p, n_levels)?;
    let s = lowest(&build_hamiltonian(p), n_levels);
    let wide = RotorParams { m_max: p.m_max + TRUNCATION_PROBE, ..*p };
    let s_wide = lowest(&build_hamiltonian(&wide), n_levels);
    let (level, shift) = truncation_shift(&s.energies, &s_wide.energies, p.kappa_z);
    if shift > TRUNCATION_TOL {
        return Err(HelicityError::Truncation { level, shift });
    }
    Ok(s)
}

/// S_z-parity sector. Only meaningful when e_z = 0, where cos 2φ0 couples
/// m to m ± 2 alone and even and odd m never mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Even,
    Odd,
}

/// Lowest levels within one sector (π-periodic states for `Even`).
///
/// In a deep double well the full spectrum comes in tunnel-split doublets, so
/// its E1 − E0 is the tunnel splitting; within a sector each doublet
/// contributes one state and E1 − E0 is the intrawell spacing.
pub fn sector_spectrum(p: &RotorParams, n_levels: usize, sector: Sector) -> Result<RotorSpectrum, HelicityError> {
    check_levels(p, n_levels)?;
    if p.e_z != 0.0 {
        return Err(HelicityError::InvalidParams("sectors mix when e_z ≠ 0".into()));
    }
    let pick = |p: &RotorParams| {
        let full = build_hamiltonian(p);
        let parity = if sector == Sector::Even { 0 } else { 1 };
        let idx: Vec<usize> = (0..p.dim()).filter(|i| (*i + p.m_max) % 2 == parity).collect();
        let mut h = SymMatrix::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate().skip(a) {
                h.set_sym(a, b, full.get(i, j));
            }
        }
        lowest(&h, n_levels.min(idx.len()))
    };
    let s = pick(p);
    let wide = pick(&RotorParams { m_max: p.m_max + TRUNCATION_PROBE, ..*p });
    let (level, shift) = truncation_shift(&s.energies, &wide.energies, p.kappa_z);
    if shift > TRUNCATION_TOL {
        return Err(HelicityError::Truncation { level, shift });
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnharmonicityRow {
    pub eta: f64,
    pub omega01: f64,
    pub omega12: f64,
    pub delta_omega: f64,
}

/// One full spectrum per η, sharing every other parameter.
pub fn anharmonicity_sweep(p: &RotorParams, etas: &[f64], n_levels: usize) -> Result<Vec<(f64, RotorSpectrum)>, HelicityError> {
    etas.par_iter().map(|&eta| Ok((eta, spectrum(&p.with_eta(eta), n_levels)?))).collect()
}

pub fn anharmonicity_rows(sweep: &[(f64, RotorSpectrum)]) -> Vec<AnharmonicityRow> {
    sweep
        .iter()
        .map(|(eta, s)| AnharmonicityRow {
            eta: *eta,
            omega01: s.omega01(),
            omega12: s.omega12(),
            delta_omega: s.anharmonicity(),
        })
        .collect()
}

/// V(φ0) on a grid and, for each level, the φ intervals where E_n ≥ V.
#[derive(Debug, Clone)]
pub struct LevelDiagram {
    pub phi: Vec<f64>,
    pub potential: Vec<f64>,
    pub levels: Vec<(f64, Vec<(f64, f64)>)>,
}

/// `n` points covering [0, 2π) without the endpoint.
pub fn phi_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}

/// Interval ends are located by linear interpolation between grid points. A
/// run that wraps through φ = 0 is reported as two pieces, [a, 2π) and [0, b).
pub fn level_diagram(p: &RotorParams, phi: &[f64], energies: &[f64]) -> LevelDiagram {
    let v: Vec<f64> = phi.iter().map(|&f| p.potential(f)).collect();
    let levels = energies.iter().map(|&e| (e, allowed_intervals(p, phi, &v, e))).collect();
    LevelDiagram { phi: phi.to_vec(), potential: v, levels }
}

fn allowed_intervals(p: &RotorParams, phi: &[f64], v: &[f64], e: f64) -> Vec<(f64, f64)> {
    let n = phi.len();
    if n == 0 {
        return Vec::new();
    }
    if v.iter().all(|&x| x <= e) {
        return vec![(0.0, 2.0 * PI)];
    }
    // Grid closed periodically: point n is φ = 2π with V(2π) = V(0).
    let at = |i: usize| if i < n { (phi[i], v[i]) } else { (2.0 * PI, p.potential(2.0 * PI)) };
    let cross = |i: usize| {
        let ((f0, v0), (f1, v1)) = (at(i), at(i + 1));
        f0 + (e - v0) / (v1 - v0) * (f1 - f0)
    };
    let mut out = Vec::new();
    let mut start = if v[0] <= e { Some(0.0) } else { None };
    for i in 0..n {
        let (inside, next_inside) = (at(i).1 <= e, at(i + 1).1 <= e);
        match (inside, next_inside) {
            (false, true) => start = Some(cross(i)),
            (true, false) => {
                out.push((start.take().unwrap_or(0.0), cross(i)));
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, 2.0 * PI));
    }
    out
}
