//! Relaxed skyrmion diameter versus Ku on the fine square patch.
//!
//! Pass a cell size in nm to trade accuracy for speed, e.g. `-- 0.5`.

use skyrlab::micromag::{size_sweep, SizeSweep};
use skyrlab::params::ExperimentConfig;

fn main() {
    let mut sweep = SizeSweep::from_config(&ExperimentConfig::default());
    if let Some(cell) = std::env::args().nth(1).and_then(|s| s.parse::<f64>().ok()) {
        sweep.patch_cell = cell * 1e-9;
    }
    println!("{:.0} nm patch, {:.2} nm cells", sweep.patch_size * 1e9, sweep.patch_cell * 1e9);
    for p in size_sweep(&sweep).unwrap() {
        let o = p.observables;
        println!(
            "Ku = {:.1} MJ/m3: diameter {:5.2} nm, Q = {:+.4}, {} iterations",
            p.ku * 1e-6,
            o.diameter * 1e9,
            o.charge,
            p.report.steps
        );
    }
}
