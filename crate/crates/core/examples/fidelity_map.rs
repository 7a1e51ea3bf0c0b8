//! Transfer fidelity of the dissipative two-level model over (eta, t).

use skyrlab::lindblad::fidelity_maps;
use skyrlab::params::ExperimentConfig;

fn main() {
    let sec = ExperimentConfig::default().lindblad();
    let maps = fidelity_maps(&sec).unwrap();
    // nearest grid time to a quarter period, t = pi/(2J)
    let k = maps
        .t_over_j
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - std::f64::consts::FRAC_PI_2).abs().total_cmp(&(b.1 - std::f64::consts::FRAC_PI_2).abs()))
        .map(|(k, _)| k)
        .unwrap();
    let last = maps.t_over_j.len() - 1;
    println!("{:>5} {:>16} {:>16}", "eta", format!("F_fwd(Jt={:.2})", maps.t_over_j[k]), format!("F_rev(Jt={:.0})", maps.t_over_j[last]));
    for i in (0..maps.eta.len()).step_by(5) {
        println!("{:>5.2} {:>16.4} {:>16.4}", maps.eta[i], maps.forward[i][k], maps.reverse[i][last]);
    }
    println!("max |Tr rho - 1| = {:.1e}, min eigenvalue = {:.1e}", maps.trace_error, maps.min_eigenvalue);
}
