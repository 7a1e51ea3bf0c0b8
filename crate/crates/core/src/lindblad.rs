//! Driven two-level system with an η-controlled amplitude-damping channel.
//!
//! H = J·σx + δ·σz and C = √(η·γ_max)·|0⟩⟨1|. Because H is real, the density
//! matrix reduces to four real numbers (ρ00, ρ11, Re ρ01, Im ρ01) obeying a
//! linear ODE, which is integrated with fixed-step RK4.

use rayon::prelude::*;
use thiserror::Error;

use crate::params::LindbladSection;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LindbladError {
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitModel {
    pub j: f64,
    pub delta: f64,
    pub gamma_max: f64,
    pub eta: f64,
}

impl QubitModel {
    pub fn from_section(s: &LindbladSection, eta: f64) -> Self {
        Self { j: s.j, delta: s.delta, gamma_max: s.gamma_max, eta }
    }

    pub fn gamma(&self) -> f64 {
        self.eta * self.gamma_max
    }

    /// Generator of d/dt (ρ00, ρ11, Re ρ01, Im ρ01).
    pub fn generator(&self) -> [[f64; 4]; 4] {
        let (j, d, g) = (self.j, self.delta, self.gamma());
        [
            [0.0, g, 0.0, -2.0 * j],
            [0.0, -g, 0.0, 2.0 * j],
            [0.0, 0.0, -0.5 * g, 2.0 * d],
            [j, -j, -2.0 * d, -0.5 * g],
        ]
    }

    fn validate(&self) -> Result<(), LindbladError> {
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(LindbladError::InvalidModel(format!("eta = {} outside [0, 1]", self.eta)));
        }
        if !(self.gamma_max >= 0.0) || !self.j.is_finite() || !self.delta.is_finite() {
            return Err(LindbladError::InvalidModel("need finite J, delta and gamma_max ≥ 0".into()));
        }
        Ok(())
    }
}

/// 2×2 Hermitian density matrix [[p0, c], [c*, p1]] with c = re + i·im.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    pub p0: f64,
    pub p1: f64,
    pub re: f64,
    pub im: f64,
}

impl DensityMatrix2 {
    pub fn ground() -> Self {
        Self { p0: 1.0, p1: 0.0, re: 0.0, im: 0.0 }
    }

    pub fn excited() -> Self {
        Self { p0: 0.0, p1: 1.0, re: 0.0, im: 0.0 }
    }

    pub fn trace(&self) -> f64 {
        self.p0 + self.p1
    }

    pub fn purity(&self) -> f64 {
        self.p0 * self.p0 + self.p1 * self.p1 + 2.0 * (self.re * self.re + self.im * self.im)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.p0 + self.p1);
        let half = 0.5 * (self.p0 - self.p1);
        mean - (half * half + self.re * self.re + self.im * self.im).sqrt()
    }

    pub fn validate(&self) -> Result<(), LindbladError> {
        let v = [self.p0, self.p1, self.re, self.im];
        if v.iter().any(|x| !x.is_finite()) {
            return Err(LindbladError::InvalidState("non-finite entry".into()));
        }
        if (self.trace() - 1.0).abs() > 1e-9 {
            return Err(LindbladError::InvalidState(format!("trace {}", self.trace())));
        }
        if self.min_eigenvalue() < -1e-9 {
            return Err(LindbladError::InvalidState(format!("eigenvalue {}", self.min_eigenvalue())));
        }
        Ok(())
    }

    fn to_vec(self) -> [f64; 4] {
        [self.p0, self.p1, self.re, self.im]
    }

    fn from_vec(v: [f64; 4]) -> Self {
        Self { p0: v[0], p1: v[1], re: v[2], im: v[3] }
    }
}

/// Number of equal RK4 substeps per output interval, with the substep
/// no longer than (t_max/400)/10.
fn substeps(dt: f64, h_max: f64) -> usize {
    ((dt / h_max) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

fn matvec(a: &[[f64; 4]; 4], x: &[f64; 4]) -> [f64; 4] {
    a.map(|row| row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3])
}

fn rk4(a: &[[f64; 4]; 4], x: [f64; 4], h: f64) -> [f64; 4] {
    let add = |x: &[f64; 4], k: &[f64; 4], s: f64| [0, 1, 2, 3].map(|i| x[i] + s * k[i]);
    let k1 = matvec(a, &x);
    let k2 = matvec(a, &add(&x, &k1, 0.5 * h));
    let k3 = matvec(a, &add(&x, &k2, 0.5 * h));
    let k4 = matvec(a, &add(&x, &k3, h));
    [0, 1, 2, 3].map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// ρ(t) at every point of the ascending `t_grid` (which may start after 0).
pub fn evolve(model: &QubitModel, rho0: DensityMatrix2, t_grid: &[f64]) -> Result<Vec<DensityMatrix2>, LindbladError> {
    model.validate()?;
    rho0.validate()?;
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(LindbladError::InvalidGrid("times must be finite and ≥ 0".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(LindbladError::InvalidGrid("times must be ascending".into()));
    }
    let t_max = t_grid.last().copied().unwrap_or(0.0);
    let h_max = t_max / 4000.0;
    let a = model.generator();
    let mut x = rho0.to_vec();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        let span = target - t;
        if span > 0.0 {
            let n = substeps(span, h_max);
            let h = span / n as f64;
            for _ in 0..n {
                x = rk4(&a, x, h);
            }
            t = target;
        }
        out.push(DensityMatrix2::from_vec(x));
    }
    Ok(out)
}

/// Forward (|0⟩ → ⟨1|ρ|1⟩) and reverse (|1⟩ → ⟨0|ρ|0⟩) populations over an η × t grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityMaps {
    pub eta: Vec<f64>,
    /// Times in units of 1/J.
    pub t_over_j: Vec<f64>,
    /// `forward[i][k]` is the value at eta[i], t[k].
    pub forward: Vec<Vec<f64>>,
    pub reverse: Vec<Vec<f64>>,
    /// Largest |Tr ρ − 1| seen anywhere.
    pub trace_error: f64,
    /// Smallest eigenvalue of ρ seen anywhere.
    pub min_eigenvalue: f64,
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn fidelity_maps(s: &LindbladSection) -> Result<FidelityMaps, LindbladError> {
    if !(s.j > 0.0) {
        return Err(LindbladError::InvalidModel("J must be positive".into()));
    }
    let eta = linspace(0.0, 1.0, s.eta_points);
    let t_over_j = linspace(0.0, s.t_max, s.t_points);
    let t: Vec<f64> = t_over_j.iter().map(|x| x / s.j).collect();
    let cols: Vec<_> = eta
        .par_iter()
        .map(|&e| {
            let m = QubitModel::from_section(s, e);
            let fwd = evolve(&m, DensityMatrix2::ground(), &t)?;
            let rev = evolve(&m, DensityMatrix2::excited(), &t)?;
            Ok((fwd, rev))
        })
        .collect::<Result<_, LindbladError>>()?;
    let mut maps = FidelityMaps {
        eta,
        t_over_j,
        forward: Vec::new(),
        reverse: Vec::new(),
        trace_error: 0.0,
        min_eigenvalue: f64::INFINITY,
    };
    for (fwd, rev) in cols {
        for r in fwd.iter().chain(&rev) {
            maps.trace_error = maps.trace_error.max((r.trace() - 1.0).abs());
            maps.min_eigenvalue = maps.min_eigenvalue.min(r.min_eigenvalue());
        }
        maps.forward.push(fwd.iter().map(|r| r.p1.clamp(0.0, 1.0)).collect());
        maps.reverse.push(rev.iter().map(|r| r.p0.clamp(0.0, 1.0)).collect());
    }
    Ok(maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix4;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(j: f64, delta: f64, gamma_max: f64, eta: f64) -> QubitModel {
        QubitModel { j, delta, gamma_max, eta }
    }

    #[test]
    fn rabi_closed_form() {
        let t = linspace(0.0, 10.0, 400);
        let out = evolve(&model(1.0, 0.0, 1.0, 0.0), DensityMatrix2::ground(), &t).unwrap();
        for (r, t) in out.iter().zip(&t) {
            assert!((r.p1 - t.sin().powi(2)).abs() < 1e-9);
            assert!((r.purity() - 1.0).abs() < 1e-8);
        }
        let peak = evolve(&model(1.0, 0.0, 1.0, 0.0), DensityMatrix2::ground(), &[std::f64::consts::FRAC_PI_2]).unwrap();
        assert!((peak[0].p1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pure_decay() {
        let t = linspace(0.0, 10.0, 400);
        let out = evolve(&model(0.0, 0.0, 0.7, 1.0), DensityMatrix2::excited(), &t).unwrap();
        for (r, t) in out.iter().zip(&t) {
            assert!((r.p1 - (-0.7 * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn matches_liouvillian_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = model(rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0), rng.gen_range(0.0..1.0));
            // random mixed state: p·|ψ⟩⟨ψ| + (1−p)·I/2
            let (th, ph, p): (f64, f64, f64) = (rng.gen_range(0.0..3.1), rng.gen_range(0.0..6.2), rng.gen_range(0.0..1.0));
            let rho0 = DensityMatrix2 {
                p0: p * (th / 2.0).cos().powi(2) + (1.0 - p) / 2.0,
                p1: p * (th / 2.0).sin().powi(2) + (1.0 - p) / 2.0,
                re: p * 0.5 * th.sin() * ph.cos(),
                im: p * 0.5 * th.sin() * ph.sin(),
            };
            let t = 3.0 / m.j;
            let got = evolve(&m, rho0, &[t]).unwrap()[0];
            let a = Matrix4::from_fn(|i, k| m.generator()[i][k]);
            let x = (a * t).exp() * nalgebra::Vector4::from(rho0.to_vec());
            // trace distance of the difference: ½·sum |eigenvalues|
            let d = DensityMatrix2::from_vec([got.p0 - x[0], got.p1 - x[1], got.re - x[2], got.im - x[3]]);
            let mean = 0.5 * (d.p0 + d.p1);
            let r = (0.25 * (d.p0 - d.p1).powi(2) + d.re * d.re + d.im * d.im).sqrt();
            let dist = 0.5 * ((mean + r).abs() + (mean - r).abs());
            assert!(dist < 1e-8, "{dist}");
        }
    }

    #[test]
    fn maps_keep_trace_and_positivity() {
        let s = crate::params::ExperimentConfig::default().lindblad();
        let maps = fidelity_maps(&s).unwrap();
        assert_eq!(maps.forward.len(), s.eta_points);
        assert_eq!(maps.forward[0].len(), s.t_points);
        assert!(maps.trace_error < 1e-9);
        assert!(maps.min_eigenvalue > -1e-9);
        // unitary columns: both maps are the Rabi transfer sin²(Jt)
        for (k, t) in maps.t_over_j.iter().enumerate() {
            assert!((maps.forward[0][k] - t.sin().powi(2)).abs() < 1e-9);
            assert!((maps.reverse[0][k] - t.sin().powi(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn reverse_settles_toward_ground_under_decay() {
        let t = linspace(0.0, 60.0, 400);
        let out = evolve(&model(0.1, 0.0, 1.0, 1.0), DensityMatrix2::excited(), &t).unwrap();
        assert!(out.last().unwrap().p0 > 0.9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = DensityMatrix2 { p0: 0.7, p1: 0.7, re: 0.0, im: 0.0 };
        assert!(matches!(evolve(&model(1.0, 0.0, 1.0, 0.5), bad, &[1.0]), Err(LindbladError::InvalidState(_))));
        let neg = DensityMatrix2 { p0: 0.5, p1: 0.5, re: 0.6, im: 0.0 };
        assert!(neg.validate().is_err());
        assert!(evolve(&model(1.0, 0.0, 1.0, 0.5), DensityMatrix2::ground(), &[2.0, 1.0]).is_err());
        assert!(evolve(&model(1.0, 0.0, 1.0, 1.5), DensityMatrix2::ground(), &[1.0]).is_err());
    }
}
