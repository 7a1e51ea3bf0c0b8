//! Flux-tunable transmon: Duffing and exact f01 along phi_e, with regime flags.

use skyrlab::params::ExperimentConfig;
use skyrlab::transmon::{duffing_levels, f01_map, TransmonParams};

fn main() {
    let mut sec = ExperimentConfig::default().transmon();
    let d = duffing_levels(&TransmonParams::from_section(&sec), 3).unwrap();
    println!("sweet spot: f01 = {:.6} GHz, anharmonicity = {} GHz", d.f01, d.anharmonicity);

    sec.phi_points = 11;
    sec.eps_min = 0.2;
    sec.eps_max = 0.2;
    sec.eps_points = 1;
    println!("{:>6} {:>10} {:>12} {:>12}  regime", "phi_e", "EJ_eff", "f01_duffing", "f01_exact");
    for r in f01_map(&sec).unwrap() {
        let exact = r.f01_exact.map_or("-".into(), |f| format!("{f:.4}"));
        println!("{:>6.2} {:>10.3} {:>12.4} {:>12}  {}", r.phi_e, r.ej_eff, r.f01_duffing, exact, r.regime.as_str());
    }
}
