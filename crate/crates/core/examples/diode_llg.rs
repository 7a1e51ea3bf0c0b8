//! Full micromagnetic diode protocol on the T-track.
//!
//! The complete run takes minutes per direction. By default this stops after
//! 0.1 ns of drive to show the setup; pass `--full` for the real protocol.

use skyrlab::micromag::{run_diode_llg, DiodeLlgRun};
use skyrlab::params::ExperimentConfig;
use skyrlab::thiele::Direction;

fn main() {
    let mut run = DiodeLlgRun::from_config(&ExperimentConfig::default()).unwrap();
    if !std::env::args().any(|a| a == "--full") {
        run.timeout = 0.1e-9;
    }
    println!("{} x {} cells, drive for up to {:.2} ns", run.geometry.nx, run.geometry.ny, run.timeout * 1e9);
    let (fwd, rev) = rayon::join(
        || run_diode_llg(&run, Direction::Forward).unwrap(),
        || run_diode_llg(&run, Direction::Reverse).unwrap(),
    );
    for r in [fwd, rev] {
        let o = &r.outcome;
        let end = o.trajectory.last().unwrap();
        println!(
            "{:>8}: {:<12} relaxed d = {:.2} nm, dt = {:.2e} s, end ({:.1}, {:.1}) nm, Q in [{:.4}, {:.4}]",
            o.direction.as_str(),
            o.class.as_str(),
            r.relaxed.diameter * 1e9,
            r.dt,
            end.x * 1e9,
            end.y * 1e9,
            r.charge_range.0,
            r.charge_range.1
        );
    }
}
