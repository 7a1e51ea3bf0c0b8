//! How the diode coupling eta tunes the rotor's anharmonicity.

use skyrlab::helicity::{anharmonicity_rows, anharmonicity_sweep, RotorParams};
use skyrlab::lindblad::linspace;
use skyrlab::params::ExperimentConfig;

fn main() {
    let sec = ExperimentConfig::default().rotor();
    let p = RotorParams::from_section(&sec);
    let sweep = anharmonicity_sweep(&p, &linspace(0.0, 1.0, 11), 3).unwrap();
    println!("{:>5} {:>10} {:>10} {:>12}", "eta", "omega01", "omega12", "delta_omega");
    for r in anharmonicity_rows(&sweep) {
        println!("{:>5.2} {:>10.4} {:>10.4} {:>12.4}", r.eta, r.omega01, r.omega12, r.delta_omega);
    }
}
