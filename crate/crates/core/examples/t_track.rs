//! Builds the baseline T-junction, prints its layout and writes the mask as PGM.

use skyrlab::geometry::{build_t_track, resolution_limit, TrackSpec};
use skyrlab::params::{derive_scales, ExperimentConfig};

fn main() {
    let cfg = ExperimentConfig::default();
    let scales = derive_scales(&cfg.material()).unwrap();
    let g = build_t_track(&TrackSpec::from(&cfg.geometry()), &scales).unwrap();
    println!("raster {} x {} cells of {:.2} nm (limit {:.2} nm)", g.nx, g.ny, g.cell_size * 1e9, resolution_limit(&scales) * 1e9);
    println!("magnetic cells: {}", g.mask.iter().filter(|&&m| m).count());
    if let Some((a, b)) = g.throat() {
        println!("throat from x = {:.1} to {:.1} nm", a * 1e9, b * 1e9);
    }
    let d = g.distance_field();
    let deepest = d.iter().cloned().fold(0.0, f64::max);
    println!("largest distance to an edge: {:.1} nm", deepest * 1e9);

    // coarse ASCII view, one character per 5x5 cells, top row first
    for iy in (0..g.ny).step_by(5).rev() {
        let row: String = (0..g.nx).step_by(5).map(|ix| if g.mask[g.index(ix, iy)] { '#' } else { '.' }).collect();
        println!("{row}");
    }
    let path = std::env::temp_dir().join("skyrlab_mask.pgm");
    g.write_pgm(&path).unwrap();
    println!("mask written to {}", path.display());
}
