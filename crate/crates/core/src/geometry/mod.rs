//! Rasterized T-junction track, boundary distance field and the edge
//! confinement potential.
//!
//! Layout (input arm on the left):
//!
//! ```text
//!                          ┌──────────────┐  ← output arm widens on `widen_side`
//! ┌──────────────┬────────┐│              │
//! │  input arm   │ throat  │  output arm  │
//! │              └──┬──┬──┘│              │  ← throat narrows on the opposite side
//! └─────────────────┘  │   └──────────────┘
//!                   stem
//! ```
//!
//! All rectangle edges are snapped to cell boundaries before rasterizing, so
//! mirroring the spec mirrors the mask cell for cell.

mod distance;
mod potential;

use std::path::Path;

use thiserror::Error;

pub use distance::brute_force_distance_cells;
pub use potential::ConfinementPotential;

use crate::params::{DerivedScales, GeometrySection};

/// Slack on the "cell ≲ min(l_ex, Δ_DW)/5" resolution rule.
pub const RESOLUTION_SLACK: f64 = 1.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("cell size {cell:.3e} m exceeds resolution limit {limit:.3e} m (min(l_ex, Δ_DW)/5)")]
    Resolution { cell: f64, limit: f64 },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("mask is not a single 4-connected region ({0} components)")]
    Disconnected(usize),
}

/// Which way the input arm faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputSide {
    Left,
    Right,
}

/// Which side of the channel the output arm widens towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Top,
    Bottom,
}

impl Side {
    pub fn opposite(self) -> Self {
        match self {
            Side::Top => Side::Bottom,
            Side::Bottom => Side::Top,
        }
    }
}

/// Track layout in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSpec {
    pub length: f64,
    pub height: f64,
    pub cell_size: f64,
    pub arm_width_in: f64,
    pub arm_width_out: f64,
    pub stem_width: f64,
    pub throat_width: f64,
    pub throat_length: f64,
    /// Distance from the input end of the track to the throat, as a fraction of `length`.
    pub junction_x: f64,
    pub widen: Side,
    pub input: InputSide,
}

impl From<&GeometrySection> for TrackSpec {
    fn from(g: &GeometrySection) -> Self {
        Self {
            length: g.length,
            height: g.height,
            cell_size: g.cell_size,
            arm_width_in: g.arm_width_in,
            arm_width_out: g.arm_width_out,
            stem_width: g.stem_width,
            throat_width: g.throat_width,
            throat_length: g.throat_length,
            junction_x: g.junction_x,
            widen: if g.widen_top { Side::Top } else { Side::Bottom },
            input: InputSide::Left,
        }
    }
}

impl TrackSpec {
    /// Left–right mirror image.
    pub fn mirrored(&self) -> Self {
        Self {
            input: match self.input {
                InputSide::Left => InputSide::Right,
                InputSide::Right => InputSide::Left,
            },
            ..*self
        }
    }
}

/// Cell-index rectangle `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CellRect {
    x0: usize,
    x1: usize,
    y0: usize,
    y1: usize,
}

/// Rasterized magnetic region. Cell `(ix, iy)` has its centre at
/// `((ix + ½)·dx, (iy + ½)·dx)` and flat index `iy·nx + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackGeometry {
    pub cell_size: f64,
    pub nx: usize,
    pub ny: usize,
    pub mask: Vec<bool>,
    pub spec: Option<TrackSpec>,
    /// Throat column range `[x0, x1)` in cells, if the mask is a track.
    pub throat_cells: Option<(usize, usize)>,
}

fn cells(len: f64, dx: f64) -> usize {
    (len / dx).round().max(0.0) as usize
}

pub fn resolution_limit(scales: &DerivedScales) -> f64 {
    scales.l_ex.min(scales.delta_dw) / 5.0 * RESOLUTION_SLACK
}

fn check_resolution(cell: f64, scales: &DerivedScales) -> Result<(), GeometryError> {
    let limit = resolution_limit(scales);
    if cell > limit * (1.0 + 1e-12) {
        return Err(GeometryError::Resolution { cell, limit });
    }
    Ok(())
}

/// Builds the asymmetric T-junction track.
pub fn build_t_track(spec: &TrackSpec, scales: &DerivedScales) -> Result<TrackGeometry, GeometryError> {
    let dx = spec.cell_size;
    if !(dx > 0.0) {
        return Err(GeometryError::Degenerate("cell_size must be > 0".into()));
    }
    check_resolution(dx, scales)?;
    let nx = cells(spec.length, dx);
    let ny = cells(spec.height, dx);
    let w_in = cells(spec.arm_width_in, dx);
    let w_out = cells(spec.arm_width_out, dx);
    let w_thr = cells(spec.throat_width, dx);
    let l_thr = cells(spec.throat_length, dx);
    let w_stem = cells(spec.stem_width, dx);
    if w_thr == 0 {
        return Err(GeometryError::Degenerate("throat has zero width".into()));
    }
    if l_thr == 0 {
        return Err(GeometryError::Degenerate("throat has zero length".into()));
    }
    if w_in == 0 || nx == 0 || ny == 0 {
        return Err(GeometryError::Degenerate("arm or track has zero extent".into()));
    }
    if w_thr > w_in {
        return Err(GeometryError::Degenerate("throat wider than input arm".into()));
    }
    if w_out < w_in || w_out > ny {
        return Err(GeometryError::Degenerate("output arm must be ≥ input arm and fit the track".into()));
    }
    let x_j = cells(spec.junction_x * spec.length, dx);
    if x_j == 0 || x_j + l_thr >= nx {
        return Err(GeometryError::Degenerate("junction does not fit along the track".into()));
    }
    let in_lo = (ny - w_in) / 2;
    let in_hi = in_lo + w_in;
    // The output arm keeps the input edge on the narrowing side and grows on the widening side.
    let (out_lo, out_hi, thr_lo, thr_hi) = match spec.widen {
        Side::Top => (in_lo, in_lo + w_out, in_hi - w_thr, in_hi),
        Side::Bottom => (in_hi.saturating_sub(w_out), in_hi, in_lo, in_lo + w_thr),
    };
    if out_hi > ny || (spec.widen == Side::Bottom && w_out > in_hi) {
        return Err(GeometryError::Degenerate("output arm leaves the track".into()));
    }
    let mut rects = vec![
        CellRect { x0: 0, x1: x_j, y0: in_lo, y1: in_hi },
        CellRect { x0: x_j, x1: x_j + l_thr, y0: thr_lo, y1: thr_hi },
        CellRect { x0: x_j + l_thr, x1: nx, y0: out_lo, y1: out_hi },
    ];
    if w_stem > 0 {
        let mid = x_j + l_thr / 2;
        let s0 = mid.saturating_sub(w_stem / 2);
        let s1 = (s0 + w_stem).min(nx);
        // The stem hangs off the narrowed side of the throat, down to the track edge.
        let stem = match spec.widen {
            Side::Top => CellRect { x0: s0, x1: s1, y0: 0, y1: thr_lo },
            Side::Bottom => CellRect { x0: s0, x1: s1, y0: thr_hi, y1: ny },
        };
        rects.push(stem);
    }
    if spec.input == InputSide::Right {
        for r in &mut rects {
            *r = CellRect { x0: nx - r.x1, x1: nx - r.x0, ..*r };
        }
    }
    let mut mask = vec![false; nx * ny];
    for r in &rects {
        for iy in r.y0..r.y1 {
            for ix in r.x0..r.x1 {
                mask[iy * nx + ix] = true;
            }
        }
    }
    let components = count_components(&mask, nx, ny);
    if components != 1 {
        return Err(GeometryError::Disconnected(components));
    }
    let (t0, t1) = match spec.input {
        InputSide::Left => (x_j, x_j + l_thr),
        InputSide::Right => (nx - x_j - l_thr, nx - x_j),
    };
    Ok(TrackGeometry {
        cell_size: dx,
        nx,
        ny,
        mask,
        spec: Some(*spec),
        throat_cells: Some((t0, t1)),
    })
}

/// Full rectangular film of `size_x × size_y`, used for relaxation studies.
pub fn build_patch(
    size_x: f64,
    size_y: f64,
    cell_size: f64,
    scales: &DerivedScales,
) -> Result<TrackGeometry, GeometryError> {
    check_resolution(cell_size, scales)?;
    let (nx, ny) = (cells(size_x, cell_size), cells(size_y, cell_size));
    if nx == 0 || ny == 0 {
        return Err(GeometryError::Degenerate("patch has zero extent".into()));
    }
    Ok(TrackGeometry::from_mask(vec![true; nx * ny], nx, ny, cell_size))
}

fn count_components(mask: &[bool], nx: usize, ny: usize) -> usize {
    let mut seen = vec![false; mask.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (ix, iy) = (i % nx, i / nx);
            let mut visit = |j: usize| {
                if mask[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if ix > 0 {
                visit(i - 1);
            }
            if ix + 1 < nx {
                visit(i + 1);
            }
            if iy > 0 {
                visit(i - nx);
            }
            if iy + 1 < ny {
                visit(i + nx);
            }
        }
    }
    count
}

impl TrackGeometry {
    pub fn from_mask(mask: Vec<bool>, nx: usize, ny: usize, cell_size: f64) -> Self {
        assert_eq!(mask.len(), nx * ny);
        Self { cell_size, nx, ny, mask, spec: None, throat_cells: None }
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn width(&self) -> f64 {
        self.nx as f64 * self.cell_size
    }

    pub fn height(&self) -> f64 {
        self.ny as f64 * self.cell_size
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn center(&self, i: usize) -> (f64, f64) {
        let dx = self.cell_size;
        (((i % self.nx) as f64 + 0.5) * dx, ((i / self.nx) as f64 + 0.5) * dx)
    }

    /// Throat x-extent `[x0, x1]` [m].
    pub fn throat(&self) -> Option<(f64, f64)> {
        self.throat_cells
            .map(|(a, b)| (a as f64 * self.cell_size, b as f64 * self.cell_size))
    }

    pub fn is_connected(&self) -> bool {
        count_components(&self.mask, self.nx, self.ny) == 1
    }

    /// Whether the point lies in a magnetic cell.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if x < 0.0 || y < 0.0 {
            return false;
        }
        let (ix, iy) = ((x / self.cell_size) as usize, (y / self.cell_size) as usize);
        ix < self.nx && iy < self.ny && self.mask[iy * self.nx + ix]
    }

    /// Left–right mirror of the raster.
    pub fn mirrored(&self) -> Self {
        let mut mask = vec![false; self.len()];
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                mask[iy * self.nx + (self.nx - 1 - ix)] = self.mask[iy * self.nx + ix];
            }
        }
        Self {
            mask,
            spec: self.spec.map(|s| s.mirrored()),
            throat_cells: self.throat_cells.map(|(a, b)| (self.nx - b, self.nx - a)),
            ..*self
        }
    }

    /// Euclidean distance [m] from each magnetic cell centre to the nearest
    /// non-magnetic cell centre (cells beyond the grid count as non-magnetic).
    pub fn distance_field(&self) -> Vec<f64> {
        distance::boundary_distance_cells(&self.mask, self.nx, self.ny)
            .into_iter()
            .map(|d| d * self.cell_size)
            .collect()
    }

    /// Mean y [m] of the magnetic cells in column `ix`.
    pub fn column_center(&self, ix: usize) -> Option<f64> {
        let ys: Vec<usize> = (0..self.ny).filter(|&iy| self.mask[iy * self.nx + ix]).collect();
        if ys.is_empty() {
            return None;
        }
        let mean = ys.iter().map(|&iy| iy as f64 + 0.5).sum::<f64>() / ys.len() as f64;
        Some(mean * self.cell_size)
    }

    /// Binary PGM (P5): 255 = magnet, 0 = vacuum, top row first.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        for iy in (0..self.ny).rev() {
            out.extend((0..self.nx).map(|ix| if self.mask[iy * self.nx + ix] { 255u8 } else { 0 }));
        }
        out
    }

    pub fn write_pgm(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_pgm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_scales, ExperimentConfig, MaterialParams};

    fn scales() -> DerivedScales {
        derive_scales(&MaterialParams::baseline()).unwrap()
    }

    fn fine_scales() -> DerivedScales {
        derive_scales(&MaterialParams::baseline().with_ku(1.5e6)).unwrap()
    }

    fn default_spec() -> TrackSpec {
        TrackSpec::from(&ExperimentConfig::default().geometry())
    }

    #[test]
    fn baseline_track_dimensions() {
        let g = build_t_track(&default_spec(), &scales()).unwrap();
        assert_eq!((g.nx, g.ny), (300, 100));
        assert!(g.is_connected());
    }

    #[test]
    fn fine_patch_dimensions() {
        let g = build_patch(60e-9, 36e-9, 0.1e-9, &fine_scales()).unwrap();
        assert_eq!((g.nx, g.ny), (600, 360));
    }

    #[test]
    fn zero_throat_is_degenerate() {
        let spec = TrackSpec { throat_width: 0.0, ..default_spec() };
        assert!(matches!(build_t_track(&spec, &scales()), Err(GeometryError::Degenerate(_))));
    }

    #[test]
    fn coarse_mesh_is_rejected() {
        let spec = TrackSpec { cell_size: 2e-9, ..default_spec() };
        assert!(matches!(build_t_track(&spec, &scales()), Err(GeometryError::Resolution { .. })));
    }

    #[test]
    fn mirrored_spec_gives_mirrored_mask() {
        for widen in [Side::Top, Side::Bottom] {
            let spec = TrackSpec { widen, stem_width: 20e-9, ..default_spec() };
            let a = build_t_track(&spec, &scales()).unwrap();
            let b = build_t_track(&spec.mirrored(), &scales()).unwrap();
            assert_eq!(b.mask, a.mirrored().mask);
            assert_eq!(b.throat_cells, a.mirrored().throat_cells);
        }
    }

    #[test]
    fn widening_and_narrowing_sides_differ() {
        let spec = TrackSpec { stem_width: 0.0, ..default_spec() };
        let g = build_t_track(&spec, &scales()).unwrap();
        let (t0, t1) = g.throat().unwrap();
        let col = |x: f64| {
            let ix = (x / g.cell_size) as usize;
            let ys: Vec<usize> = (0..g.ny).filter(|&iy| g.mask[g.index(ix, iy)]).collect();
            (*ys.first().unwrap(), *ys.last().unwrap())
        };
        let arm_in = col(t0 - 5e-9);
        let arm_out = col(t1 + 5e-9);
        let throat = col(t0 + 1e-9);
        assert!(arm_out.1 > arm_in.1, "output widens upward");
        assert_eq!(arm_out.0, arm_in.0);
        assert!(throat.0 > arm_in.0, "throat narrows from below");
        assert_eq!(throat.1, arm_in.1);
    }

    #[test]
    fn channel_centerline_distance() {
        let (nx, ny) = (50, 40);
        let g = TrackGeometry::from_mask(vec![true; nx * ny], nx, ny, 1e-9);
        let d = g.distance_field();
        let w = ny as f64 * 1e-9;
        let mid = d[g.index(25, 19)].max(d[g.index(25, 20)]);
        assert!((mid - w / 2.0).abs() <= 1e-9 + 1e-18);
        assert!(d[g.index(25, 0)] > 0.0 && d[g.index(25, 0)] <= 1e-9 * 2f64.sqrt());
    }

    #[test]
    fn pgm_header_and_size() {
        let g = build_t_track(&default_spec(), &scales()).unwrap();
        let dir = std::env::temp_dir().join(format!("skyrlab-pgm-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("mask.pgm");
        g.write_pgm(&p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let header = b"P5\n300 100\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len(), header.len() + 300 * 100);
        std::fs::remove_dir_all(dir).ok();
    }
}
