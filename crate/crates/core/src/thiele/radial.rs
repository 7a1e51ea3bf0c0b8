//! Radially symmetric Néel skyrmion: 2π-wall profile, energy and the Thiele
//! integrals it implies.
//!
//! θ(r) = 2·atan(sinh(R/w) / sinh(r/w)) runs from π at the core to 0 far away;
//! m = (sinθ·cosφ, sinθ·sinφ, cosθ) is the outward Néel texture with its core
//! down in a +ẑ background (Q = −1).

use std::f64::consts::PI;

use crate::params::MaterialParams;

/// Skyrmion radius R (m_z = 0 at r = R) and wall width w, both [m].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub radius: f64,
    pub width: f64,
}

const SAMPLES: usize = 6000;

impl RadialProfile {
    pub fn theta(&self, r: f64) -> f64 {
        let s = (self.radius / self.width).sinh();
        2.0 * (s / (r / self.width).sinh()).atan()
    }

    pub fn dtheta(&self, r: f64) -> f64 {
        let s = (self.radius / self.width).sinh();
        let (sh, ch) = ((r / self.width).sinh(), (r / self.width).cosh());
        -2.0 * s * ch / (self.width * (sh * sh + s * s))
    }

    /// Unit magnetization at offset (x, y) from the core.
    pub fn m_at(&self, x: f64, y: f64) -> [f64; 3] {
        let r = x.hypot(y);
        if r == 0.0 {
            return [0.0, 0.0, -1.0];
        }
        let th = self.theta(r);
        [th.sin() * x / r, th.sin() * y / r, th.cos()]
    }

    /// Midpoint-rule ∫₀^∞ f(r, θ, θ′) r dr.
    fn integrate(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let r_max = self.radius + 25.0 * self.width;
        let h = r_max / SAMPLES as f64;
        (0..SAMPLES)
            .map(|k| {
                let r = (k as f64 + 0.5) * h;
                f(r, self.theta(r), self.dtheta(r)) * r
            })
            .sum::<f64>()
            * h
    }

    /// Energy relative to the uniform state [J], thin-film local demag.
    pub fn energy(&self, m: &MaterialParams, k_eff: f64) -> f64 {
        let (a, d) = (m.a_ex, m.dmi);
        2.0 * PI
            * m.thickness
            * self.integrate(|r, th, dth| {
                let s = th.sin();
                a * (dth * dth + s * s / (r * r)) + d * (dth + s * th.cos() / r) + k_eff * s * s
            })
    }

    /// ∫(∂ₓm)² dA, dimensionless.
    pub fn dissipation_integral(&self) -> f64 {
        PI * self.integrate(|r, th, dth| dth * dth + th.sin().powi(2) / (r * r))
    }

    /// I = −∫ sin²θ·θ′ r dr [m]; the damping-like SOT integral is
    /// ∫(m×σ)·∂ᵢm dA = 2π·I·(σ_y, −σ_x).
    pub fn sot_integral(&self) -> f64 {
        -self.integrate(|_, th, dth| th.sin().powi(2) * dth)
    }

    /// Minimizes the profile energy over (R, w) by Nelder–Mead in log space.
    ///
    /// Returns `None` if the texture collapses or expands without bound.
    pub fn minimize(m: &MaterialParams, k_eff: f64) -> Option<Self> {
        let delta = (m.a_ex / k_eff).sqrt();
        let f = |p: [f64; 2]| {
            let prof = RadialProfile { radius: p[0].exp(), width: p[1].exp() };
            if !(prof.radius > 0.05 * delta && prof.radius < 200.0 * delta) {
                return f64::INFINITY;
            }
            if !(prof.width > 0.05 * delta && prof.width < 20.0 * delta) {
                return f64::INFINITY;
            }
            prof.energy(m, k_eff)
        };
        let mut best: Option<([f64; 2], f64)> = None;
        for r0 in [1.0, 2.0, 4.0] {
            let start = [(r0 * delta).ln(), delta.ln()];
            let (p, e) = nelder_mead(&f, start, 0.3, 400);
            if e.is_finite() && best.map_or(true, |(_, b)| e < b) {
                best = Some((p, e));
            }
        }
        let (p, _) = best?;
        let prof = RadialProfile { radius: p[0].exp(), width: p[1].exp() };
        // Hitting the search box means no interior minimum.
        let interior = prof.radius > 0.06 * delta && prof.radius < 190.0 * delta;
        interior.then_some(prof)
    }
}

fn nelder_mead(f: &impl Fn([f64; 2]) -> f64, x0: [f64; 2], step: f64, iters: usize) -> ([f64; 2], f64) {
    let mut s = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut v = s.map(|p| f(p));
    for _ in 0..iters {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let (b, m, w) = (idx[0], idx[1], idx[2]);
        if (v[w] - v[b]).abs() <= 1e-14 * v[b].abs().max(1e-40) && (s[w][0] - s[b][0]).abs() < 1e-10 {
            break;
        }
        let c = [(s[b][0] + s[m][0]) / 2.0, (s[b][1] + s[m][1]) / 2.0];
        let at = |t: f64| [c[0] + t * (s[w][0] - c[0]), c[1] + t * (s[w][1] - c[1])];
        let xr = at(-1.0);
        let fr = f(xr);
        if fr < v[b] {
            let xe = at(-2.0);
            let fe = f(xe);
            if fe < fr {
                (s[w], v[w]) = (xe, fe);
            } else {
                (s[w], v[w]) = (xr, fr);
            }
        } else if fr < v[m] {
            (s[w], v[w]) = (xr, fr);
        } else {
            let xc = at(0.5);
            let fc = f(xc);
            if fc < v[w] {
                (s[w], v[w]) = (xc, fc);
            } else {
                for k in [m, w] {
                    s[k] = [(s[k][0] + s[b][0]) / 2.0, (s[k][1] + s[b][1]) / 2.0];
                    v[k] = f(s[k]);
                }
            }
        }
    }
    let b = (0..3).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    (s[b], v[b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_scales;

    #[test]
    fn profile_crosses_equator_at_radius() {
        let p = RadialProfile { radius: 7e-9, width: 3e-9 };
        assert!((p.theta(7e-9) - PI / 2.0).abs() < 1e-12);
        assert!((p.theta(1e-15) - PI).abs() < 1e-5);
        let h = 1e-13;
        let fd = (p.theta(5e-9 + h) - p.theta(5e-9 - h)) / (2.0 * h);
        assert!((fd - p.dtheta(5e-9)).abs() < 1e-6 * fd.abs());
    }

    #[test]
    fn sot_integral_of_thin_wall_approaches_pi_r_over_2() {
        // Thin wall: ∫ sin²θ |θ′| r dr → R·∫₀^π sin²θ dθ = πR/2.
        let p = RadialProfile { radius: 40e-9, width: 0.5e-9 };
        let i = p.sot_integral();
        assert!((i / (PI * 40e-9 / 2.0) - 1.0).abs() < 1e-3, "{i}");
    }

    #[test]
    fn baseline_skyrmion_shrinks_with_anisotropy() {
        let m = MaterialParams::baseline();
        let mut last = f64::INFINITY;
        for ku in [0.8e6, 1.0e6, 1.2e6, 1.5e6] {
            let mm = m.with_ku(ku);
            let k = derive_scales(&mm).unwrap().k_eff;
            let p = RadialProfile::minimize(&mm, k).unwrap();
            assert!(p.radius < last);
            last = p.radius;
        }
    }
}
