//! Topological charge, core position and size, and texture integrals.

use std::f64::consts::PI;

use super::{MagnetizationField, Micromag};
use crate::thiele::TextureIntegrals;
use crate::vec3::{cross, dot, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkyrmionObservables {
    pub charge: f64,
    /// Core centre [m]; `None` when no cell has m_z < 0.
    pub core: Option<(f64, f64)>,
    /// Diameter of the m_z = 0 contour [m].
    pub diameter: f64,
    pub energy: f64,
}

/// Signed solid angle of the spherical triangle (a, b, c).
fn solid_angle(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let num = dot(a, cross(b, c));
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

/// Berg–Lüscher lattice charge: two counter-clockwise triangles per
/// plaquette, summed and divided by 4π.
///
/// Every plaquette touching a magnetic cell is included; vacuum cells (and a
/// ring around the grid) take the background direction ±ẑ, chosen by the sign
/// of the mean m_z on the mask edge. Edge canting then cannot leave a
/// fractional charge behind, and the result is an integer for any texture
/// without exceptional (near-antipodal) plaquettes.
pub fn topological_charge(model: &Micromag, f: &MagnetizationField) -> f64 {
    let g = &model.geom;
    let (nx, ny) = (g.nx as isize, g.ny as isize);
    let bg: Vec3 = [0.0, 0.0, background_sign(model, f)];
    let at = |ix: isize, iy: isize| -> (Vec3, bool) {
        if ix < 0 || iy < 0 || ix >= nx || iy >= ny {
            return (bg, false);
        }
        let i = (iy * nx + ix) as usize;
        if g.mask[i] {
            (f.m[i], true)
        } else {
            (bg, false)
        }
    };
    let mut total = 0.0;
    for iy in -1..ny {
        for ix in -1..nx {
            let (m1, a) = at(ix, iy);
            let (m2, b) = at(ix + 1, iy);
            let (m3, c) = at(ix + 1, iy + 1);
            let (m4, d) = at(ix, iy + 1);
            if a || b || c || d {
                total += solid_angle(m1, m2, m3) + solid_angle(m1, m3, m4);
            }
        }
    }
    total / (4.0 * PI)
}

/// ±1: sign of the mean m_z over magnetic cells that touch vacuum or the grid edge.
fn background_sign(model: &Micromag, f: &MagnetizationField) -> f64 {
    let g = &model.geom;
    let nx = g.nx;
    let mut sum = 0.0;
    for c in model.cells() {
        let (ix, iy) = (c % nx, c / nx);
        let edge = ix == 0
            || iy == 0
            || ix + 1 == nx
            || iy + 1 == g.ny
            || !g.mask[c - 1]
            || !g.mask[c + 1]
            || !g.mask[c - nx]
            || !g.mask[c + nx];
        if edge {
            sum += f.m[c][2];
        }
    }
    if sum < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Centroid of the reversed region, weighted by max(0, −m_z).
pub fn core_position(model: &Micromag, f: &MagnetizationField) -> Option<(f64, f64)> {
    let (mut w, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for c in model.cells() {
        let q = (-f.m[c][2]).max(0.0);
        if q > 0.0 {
            let (x, y) = model.geom.center(c);
            w += q;
            sx += q * x;
            sy += q * y;
        }
    }
    (w > 0.0).then(|| (sx / w, sy / w))
}

/// 2·√(A/π) with A the area where m_z < 0. Each cell contributes the fraction
/// of its width lying below zero, assuming m_z varies linearly along its gradient.
pub fn core_diameter(model: &Micromag, f: &MagnetizationField) -> f64 {
    let g = &model.geom;
    let dx = g.cell_size;
    let nx = g.nx;
    let mz = |j: usize| f.m[j][2];
    let mut area = 0.0;
    for c in model.cells() {
        let (ix, iy) = (c % nx, c / nx);
        let diff = |p: Option<usize>, q: Option<usize>| match (p, q) {
            (Some(a), Some(b)) => (mz(a) - mz(b)) / 2.0,
            (Some(a), None) => mz(a) - mz(c),
            (None, Some(b)) => mz(c) - mz(b),
            (None, None) => 0.0,
        };
        let ok = |j: usize| g.mask[j].then_some(j);
        let right = (ix + 1 < nx).then(|| c + 1).and_then(ok);
        let left = (ix > 0).then(|| c - 1).and_then(ok);
        let up = (iy + 1 < g.ny).then(|| c + nx).and_then(ok);
        let down = (iy > 0).then(|| c - nx).and_then(ok);
        let slope = diff(right, left).hypot(diff(up, down));
        let frac = if slope > 1e-12 {
            (0.5 - mz(c) / slope).clamp(0.0, 1.0)
        } else if mz(c) < 0.0 {
            1.0
        } else {
            0.0
        };
        area += frac * dx * dx;
    }
    2.0 * (area / PI).sqrt()
}

pub fn observe(model: &Micromag, f: &MagnetizationField) -> SkyrmionObservables {
    SkyrmionObservables {
        charge: topological_charge(model, f),
        core: core_position(model, f),
        diameter: core_diameter(model, f),
        energy: model.energy(f),
    }
}

/// Thiele integrals of a lattice texture, with centred differences (one-sided at edges).
pub fn texture_integrals(model: &Micromag, f: &MagnetizationField) -> TextureIntegrals {
    let g = &model.geom;
    let (nx, dx) = (g.nx, g.cell_size);
    let mut diss = [0.0; 2];
    let mut sot = [[0.0; 2]; 3];
    let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for c in model.cells() {
        let (ix, iy) = (c % nx, c / nx);
        let ok = |j: usize| g.mask[j].then_some(j);
        let deriv = |p: Option<usize>, q: Option<usize>| -> Vec3 {
            let d = |a: usize, b: usize, s: f64| [0, 1, 2].map(|k| (f.m[a][k] - f.m[b][k]) / (s * dx));
            match (p, q) {
                (Some(a), Some(b)) => d(a, b, 2.0),
                (Some(a), None) => d(a, c, 1.0),
                (None, Some(b)) => d(c, b, 1.0),
                (None, None) => [0.0; 3],
            }
        };
        let dmx = deriv((ix + 1 < nx).then(|| c + 1).and_then(ok), (ix > 0).then(|| c - 1).and_then(ok));
        let dmy = deriv((iy + 1 < g.ny).then(|| c + nx).and_then(ok), (iy > 0).then(|| c - nx).and_then(ok));
        let a = dx * dx;
        diss[0] += dot(dmx, dmx) * a;
        diss[1] += dot(dmy, dmy) * a;
        for (k, e) in basis.iter().enumerate() {
            let mxe = cross(f.m[c], *e);
            sot[k][0] += dot(mxe, dmx) * a;
            sot[k][1] += dot(mxe, dmy) * a;
        }
    }
    TextureIntegrals {
        charge: topological_charge(model, f),
        dissipation: 0.5 * (diss[0] + diss[1]),
        sot,
    }
}
