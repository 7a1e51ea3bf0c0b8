//! Exact Euclidean distance transform (Felzenszwalb–Huttenlocher lower envelope).

const INF: f64 = 1e20;

/// 1D squared distance transform of `f` into `out`, unit spacing.
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let meet = |q: usize, p: usize| {
        ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
    };
    for q in 1..n {
        let mut s = meet(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = meet(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Squared distance, in cell units, from every cell to the nearest cell where
/// `feature` is true. Grid is row-major `iy * nx + ix`.
pub(crate) fn squared_edt(feature: &[bool], nx: usize, ny: usize) -> Vec<f64> {
    let mut g: Vec<f64> = feature.iter().map(|&b| if b { 0.0 } else { INF }).collect();
    let n = nx.max(ny);
    let (mut f, mut out) = (vec![0.0; n], vec![0.0; n]);
    let (mut v, mut z) = (vec![0usize; n], vec![0.0; n + 1]);
    for ix in 0..nx {
        for iy in 0..ny {
            f[iy] = g[iy * nx + ix];
        }
        edt_1d(&f[..ny], &mut out[..ny], &mut v, &mut z);
        for iy in 0..ny {
            g[iy * nx + ix] = out[iy];
        }
    }
    for iy in 0..ny {
        let row = &mut g[iy * nx..(iy + 1) * nx];
        f[..nx].copy_from_slice(row);
        edt_1d(&f[..nx], &mut out[..nx], &mut v, &mut z);
        row.copy_from_slice(&out[..nx]);
    }
    g
}

/// Distance [cells] from each mask cell to the nearest non-mask cell, counting
/// everything outside the grid as non-mask. Non-mask cells get 0.
pub(crate) fn boundary_distance_cells(mask: &[bool], nx: usize, ny: usize) -> Vec<f64> {
    let (px, py) = (nx + 2, ny + 2);
    let mut vacuum = vec![true; px * py];
    for iy in 0..ny {
        for ix in 0..nx {
            vacuum[(iy + 1) * px + ix + 1] = !mask[iy * nx + ix];
        }
    }
    let d2 = squared_edt(&vacuum, px, py);
    let mut out = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            out[iy * nx + ix] = d2[(iy + 1) * px + ix + 1].sqrt();
        }
    }
    out
}

/// Quadratic-time reference: minimum over all non-mask cells (including the
/// ring just outside the grid).
pub fn brute_force_distance_cells(mask: &[bool], nx: usize, ny: usize) -> Vec<f64> {
    let mut outside = Vec::new();
    for iy in -1..=ny as i64 {
        for ix in -1..=nx as i64 {
            let inside_grid = ix >= 0 && iy >= 0 && ix < nx as i64 && iy < ny as i64;
            if !inside_grid || !mask[iy as usize * nx + ix as usize] {
                outside.push((ix, iy));
            }
        }
    }
    let mut out = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            if !mask[iy * nx + ix] {
                continue;
            }
            let best = outside
                .iter()
                .map(|&(ox, oy)| {
                    let (dx, dy) = (ox - ix as i64, oy - iy as i64);
                    dx * dx + dy * dy
                })
                .min()
                .unwrap();
            out[iy * nx + ix] = (best as f64).sqrt();
        }
    }
    out
}
