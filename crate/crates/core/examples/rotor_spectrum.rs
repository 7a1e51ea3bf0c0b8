//! Helicity-rotor levels and where each one is classically allowed.

use skyrlab::helicity::{level_diagram, phi_grid, spectrum, RotorParams};
use skyrlab::params::ExperimentConfig;

fn main() {
    let sec = ExperimentConfig::default().rotor();
    let p = RotorParams::from_section(&sec);
    let s = spectrum(&p, sec.n_levels).unwrap();
    println!("kappa_z = {}, K2_eff = {}, e_z = {}", p.kappa_z, p.k2_eff(), p.e_z);
    let d = level_diagram(&p, &phi_grid(sec.phi_points), &s.energies);
    for (n, (e, pieces)) in d.levels.iter().enumerate() {
        let spans: Vec<String> = pieces.iter().map(|(a, b)| format!("[{a:.2}, {b:.2}]")).collect();
        println!("E{n} = {e:9.4}  allowed phi: {}", spans.join(" "));
    }
    println!("omega01 = {:.4}, omega12 = {:.4}", s.omega01(), s.omega12());
}
