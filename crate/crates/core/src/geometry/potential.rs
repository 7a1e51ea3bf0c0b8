//! Edge-repulsion potential U(r) = U0·exp(−d(r)/λ).

use std::path::Path;

use crate::output::{OutputError, Table};

use super::distance::squared_edt;
use super::TrackGeometry;

/// Outside the magnet the potential keeps rising as U0·exp(d_out/λ), capped at
/// this many λ, so a core that overshoots an edge is pushed back in.
const OUTSIDE_CAP: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfinementPotential {
    pub nx: usize,
    pub ny: usize,
    pub cell_size: f64,
    pub u0: f64,
    pub lambda: f64,
    /// U per cell [J].
    pub u: Vec<f64>,
    /// ∇U per cell [J/m].
    pub grad: Vec<[f64; 2]>,
    mask: Vec<bool>,
}

impl ConfinementPotential {
    pub fn build(g: &TrackGeometry, u0: f64, lambda: f64) -> Self {
        assert!(u0 > 0.0 && lambda > 0.0, "U0 and λ must be positive");
        let (nx, ny, dx) = (g.nx, g.ny, g.cell_size);
        let d_in = g.distance_field();
        let d_out: Vec<f64> = squared_edt(&g.mask, nx, ny)
            .into_iter()
            .map(|d2| d2.sqrt() * dx)
            .collect();
        let u: Vec<f64> = (0..nx * ny)
            .map(|i| {
                if g.mask[i] {
                    u0 * (-d_in[i] / lambda).exp()
                } else {
                    u0 * (d_out[i] / lambda).min(OUTSIDE_CAP).exp()
                }
            })
            .collect();
        let mut grad = vec![[0.0; 2]; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                let i = iy * nx + ix;
                let inside = g.mask[i];
                // Mask cells only difference against mask neighbours; vacuum cells use the full grid.
                let usable = |j: usize| !inside || g.mask[j];
                let left = (ix > 0).then(|| i - 1).filter(|&j| usable(j));
                let right = (ix + 1 < nx).then(|| i + 1).filter(|&j| usable(j));
                let down = (iy > 0).then(|| i - nx).filter(|&j| usable(j));
                let up = (iy + 1 < ny).then(|| i + nx).filter(|&j| usable(j));
                grad[i] = [diff(&u, i, left, right, dx), diff(&u, i, down, up, dx)];
            }
        }
        Self { nx, ny, cell_size: dx, u0, lambda, u, grad, mask: g.mask.clone() }
    }

    /// Bilinear interpolation weights over the four surrounding cell centres.
    fn stencil(&self, x: f64, y: f64) -> [(usize, f64); 4] {
        let axis = |p: f64, n: usize| {
            let f = p / self.cell_size - 0.5;
            if n == 1 {
                return (0, 0, 0.0);
            }
            let i0 = (f.floor().max(0.0) as usize).min(n - 2);
            let t = (f - i0 as f64).clamp(0.0, 1.0);
            (i0, i0 + 1, t)
        };
        let (x0, x1, tx) = axis(x, self.nx);
        let (y0, y1, ty) = axis(y, self.ny);
        let n = self.nx;
        [
            (y0 * n + x0, (1.0 - tx) * (1.0 - ty)),
            (y0 * n + x1, tx * (1.0 - ty)),
            (y1 * n + x0, (1.0 - tx) * ty),
            (y1 * n + x1, tx * ty),
        ]
    }

    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        self.stencil(x, y).iter().map(|&(i, w)| w * self.u[i]).sum()
    }

    pub fn grad_at(&self, x: f64, y: f64) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (i, w) in self.stencil(x, y) {
            g[0] += w * self.grad[i][0];
            g[1] += w * self.grad[i][1];
        }
        g
    }

    /// Table `x_nm,y_nm,U_joule` over magnetic cells, row-major from the bottom row.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["x_nm", "y_nm", "U_joule"]);
        let dx_nm = self.cell_size * 1e9;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let i = iy * self.nx + ix;
                if self.mask[i] {
                    t.push(vec![((ix as f64 + 0.5) * dx_nm).into(), ((iy as f64 + 0.5) * dx_nm).into(), self.u[i].into()]);
                }
            }
        }
        t
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), OutputError> {
        self.table().write_csv(path)
    }
}

fn diff(u: &[f64], i: usize, lo: Option<usize>, hi: Option<usize>, dx: f64) -> f64 {
    match (lo, hi) {
        (Some(a), Some(b)) => (u[b] - u[a]) / (2.0 * dx),
        (None, Some(b)) => (u[b] - u[i]) / dx,
        (Some(a), None) => (u[i] - u[a]) / dx,
        (None, None) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn channel(nx: usize, ny: usize) -> TrackGeometry {
        TrackGeometry::from_mask(vec![true; nx * ny], nx, ny, 1e-9)
    }

    #[test]
    fn straight_channel_symmetric_about_centerline() {
        let g = channel(40, 21);
        let p = ConfinementPotential::build(&g, 1e-20, 3e-9);
        for ix in 0..40 {
            let col: Vec<f64> = (0..21).map(|iy| p.u[iy * 40 + ix]).collect();
            let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
            assert_eq!(col[10], min);
            for k in 0..21 {
                assert_eq!(col[k], col[20 - k]);
            }
        }
    }

    #[test]
    fn one_decay_length_gives_u0_over_e() {
        let g = channel(30, 13);
        let lambda = 6e-9;
        let p = ConfinementPotential::build(&g, 2.0, lambda);
        // Row 5 sits exactly 6 cells from the outside ring.
        let u = p.u[5 * 30 + 15];
        assert!((u - 2.0 / std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn far_field_vanishes() {
        let g = channel(300, 300);
        let lambda = 1e-9 * 4.0;
        let p = ConfinementPotential::build(&g, 1.0, lambda);
        let d = g.distance_field();
        for i in 0..g.len() {
            if d[i] > 30.0 * lambda {
                assert!(p.u[i] < 1e-12);
                assert!(p.grad[i][0].abs() * lambda < 1e-12 && p.grad[i][1].abs() * lambda < 1e-12);
            }
        }
    }

    #[test]
    fn potential_is_monotone_in_distance() {
        let g = channel(25, 31);
        let p = ConfinementPotential::build(&g, 1.0, 2e-9);
        let d = g.distance_field();
        for i in 0..g.len() {
            for j in 0..g.len() {
                if d[i] < d[j] {
                    assert!(p.u[i] > p.u[j]);
                }
            }
            assert!(p.u[i] > 0.0 && p.u[i] <= 1.0);
        }
    }
}
