//! Stray field of a skyrmion-sized dipole and the flux it threads through a loop.

use skyrlab::params::ExperimentConfig;
use skyrlab::transmon::{dipole_estimate, flux_through_square};

fn main() {
    let s = ExperimentConfig::default().transmon();
    println!("m = Ms V = {:.2e} A m2, loop side {:.0} nm", s.dipole_ms * s.dipole_volume, s.loop_side * 1e9);
    for &z in &s.dipole_z {
        let d = dipole_estimate(s.dipole_ms, s.dipole_volume, z, s.loop_side).unwrap();
        // the estimate uses an equal-area disc; integrate the square loop directly for comparison
        let square = flux_through_square(d.moment, z, s.loop_side, 400);
        println!(
            "z = {:5.0} nm: Bz = {:8.3} mT, flux = {:.4} Phi0 (square loop {:.4} Phi0)",
            z * 1e9,
            d.bz * 1e3,
            d.flux_quanta,
            square / skyrlab::constants::FLUX_QUANTUM
        );
    }
}
