//! Drives the CLI runner in-process: one cheap subcommand into a temp directory.

use skyrlab::cli::{run_with, Command};
use skyrlab::params::ExperimentConfig;

fn main() {
    let out = std::env::temp_dir().join("skyrlab_cli_example");
    let m = run_with(Command::Dipole, &ExperimentConfig::default(), &out, true, None).unwrap();
    println!("config hash {}", m.config_hash);
    for f in &m.outputs {
        println!("{} {}", &f.sha256[..12], out.join(&f.file).display());
    }
}
