//! Length scales of the baseline film across the anisotropy sweep.

use skyrlab::params::{derive_scales, MaterialParams};

fn main() {
    let base = MaterialParams::baseline();
    let s = derive_scales(&base).expect("baseline material is valid");
    println!("exchange length  l_ex = {:.3} nm", s.l_ex * 1e9);
    println!("{:>10} {:>12} {:>14}", "Ku [MJ/m3]", "delta_dw [nm]", "k_eff [MJ/m3]");
    for ku in [0.8e6, 1.0e6, 1.2e6, 1.5e6] {
        let s = derive_scales(&base.with_ku(ku)).expect("perpendicular easy axis");
        println!("{:>10.2} {:>12.3} {:>14.3}", ku * 1e-6, s.delta_dw * 1e9, s.k_eff * 1e-6);
    }
}
