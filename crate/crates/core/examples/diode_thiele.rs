//! Rigid-core diode: forward and reverse runs, then the current-density window.

use skyrlab::thiele::{classify_diode, efficiency_sweep, steady_velocity, Direction, ThieleSetup};
use skyrlab::params::ExperimentConfig;

fn main() {
    let s = ThieleSetup::from_config(&ExperimentConfig::default()).unwrap();
    let p = &s.params;
    let v = steady_velocity(p, p.force).unwrap();
    println!("G = {:.3e}, alpha_G d = {:.3e}, F = ({:.3e}, {:.3e}) N", p.gyro, p.dissipation(), p.force[0], p.force[1]);
    println!("free-film velocity ({:.1}, {:.1}) m/s, U0 = {:.3e} J", v[0], v[1], s.potential.u0);

    for dir in [Direction::Forward, Direction::Reverse] {
        let o = classify_diode(p, &s.potential, &s.geometry, dir, &s.run).unwrap();
        let end = o.trajectory.last().unwrap();
        let t = o.time.map_or("-".to_string(), |t| format!("{:.2} ns", t * 1e9));
        println!("{:>8}: {:<12} after {t}, core at ({:.1}, {:.1}) nm", dir.as_str(), o.class.as_str(), end.x * 1e9, end.y * 1e9);
    }

    let j_ref = s.drive.current_density;
    let sweep = efficiency_sweep(p, j_ref, &s.potential, &s.geometry, &s.j_values, &s.run).unwrap();
    for r in &sweep.rows {
        println!("J = {:.2e} A/m2: {} / {}", r.current_density, r.forward.as_str(), r.reverse.as_str());
    }
    match sweep.window() {
        Ok((lo, hi)) => println!("diode window [{lo:.2e}, {hi:.2e}] A/m2"),
        Err(e) => println!("{e}"),
    }
}
