//! Command-line runner: config → experiment → CSV (and optional SVG) files
//! plus a `manifest.json` in the output directory.

use std::error::Error;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::geometry::TrackGeometry;
use crate::helicity::{self, RotorParams};
use crate::lindblad::{self, linspace};
use crate::micromag::{self, DiodeLlgRun, MagnetizationField, Micromag};
use crate::output::{emit_svg, Cell, PlotKind, Table};
use crate::params::ExperimentConfig;
use crate::thiele::{self, DiodeOutcome, Direction, ThieleError, ThieleSetup, TrajectorySample};
use crate::transmon;

pub const THREADS_ENV: &str = "SKYRLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "skyrlab", version, about = "Skyrmion diode and qubit-model experiments")]
pub struct Args {
    /// TOML configuration; schema defaults fill every missing key.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Worker threads for sweeps (falls back to SKYRLAB_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Relax one skyrmion per Ku on the square patch and report its size.
    Relax,
    /// LLG forward and reverse runs on the T-track.
    DiodeLlg,
    /// Thiele forward and reverse runs on the T-track.
    DiodeThiele,
    /// Thiele classification over the current-density grid.
    SweepWindow,
    /// Forward and reverse transfer fidelity over (η, t).
    FidelityMap,
    /// Helicity-rotor levels over η.
    RotorSpectrum,
    /// ω01, ω12 and their difference over η.
    Anharmonicity,
    /// Transmon f01 over (φ_e, ε).
    TransmonMap,
    /// Skyrmion dipole field and flux through a pickup loop.
    Dipole,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Relax => "relax",
            Command::DiodeLlg => "diode-llg",
            Command::DiodeThiele => "diode-thiele",
            Command::SweepWindow => "sweep-window",
            Command::FidelityMap => "fidelity-map",
            Command::RotorSpectrum => "rotor-spectrum",
            Command::Anharmonicity => "anharmonicity",
            Command::TransmonMap => "transmon-map",
            Command::Dipole => "dipole",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub config_hash: String,
    pub threads: Option<usize>,
    /// Unix seconds.
    pub started: f64,
    pub finished: f64,
    pub outputs: Vec<OutputFile>,
    pub notes: Vec<String>,
}

/// Writes artifacts under one directory and remembers what it wrote.
struct Sink {
    dir: PathBuf,
    svg: bool,
    outputs: Vec<OutputFile>,
    notes: Vec<String>,
}

impl Sink {
    fn bytes(&mut self, name: &str, data: &[u8]) -> Result<(), Box<dyn Error + Send + Sync>> {
        fs::write(self.dir.join(name), data)?;
        self.outputs.push(OutputFile { file: name.into(), sha256: hex::encode(Sha256::digest(data)) });
        Ok(())
    }

    fn csv(&mut self, name: &str, t: &Table) -> Result<(), Box<dyn Error + Send + Sync>> {
        self.bytes(name, &t.to_csv()?)
    }

    fn plot(&mut self, name: &str, t: &Table, kind: PlotKind) -> Result<(), Box<dyn Error + Send + Sync>> {
        if self.svg {
            self.bytes(name, emit_svg(t, &kind)?.as_bytes())?;
        }
        Ok(())
    }

    fn note(&mut self, s: String) {
        log::info!("{s}");
        self.notes.push(s);
    }
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Parses `args` (program name first) and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = if args.verbose { "debug" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    execute(&args)
}

/// Runs already-parsed arguments; returns the process exit code.
pub fn execute(args: &Args) -> i32 {
    let cfg = match load_config(args.config.as_deref()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let threads = args.threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse().ok()));
    match run_with(args.command, &cfg, &args.out, args.svg, threads) {
        Ok(m) => {
            log::info!("wrote {} file(s) to {}", m.outputs.len(), args.out.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, String> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?,
        None => String::new(),
    };
    ExperimentConfig::parse(&text).map_err(|e| e.to_string())
}

/// Runs one experiment, writing its artifacts and the manifest into `out`.
pub fn run_with(
    cmd: Command,
    cfg: &ExperimentConfig,
    out: &Path,
    svg: bool,
    threads: Option<usize>,
) -> Result<RunManifest, Box<dyn Error + Send + Sync>> {
    let started = unix_now();
    fs::create_dir_all(out)?;
    let mut sink = Sink { dir: out.to_path_buf(), svg: svg || cfg.output().svg, outputs: Vec::new(), notes: Vec::new() };
    let result = match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| dispatch(cmd, cfg, &mut sink)),
        _ => dispatch(cmd, cfg, &mut sink),
    };
    let manifest = RunManifest {
        tool: "skyrlab",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cmd.name(),
        config_hash: cfg.canonical_hash(),
        threads,
        started,
        finished: unix_now(),
        outputs: std::mem::take(&mut sink.outputs),
        notes: match &result {
            Ok(()) => std::mem::take(&mut sink.notes),
            Err(e) => {
                let mut n = std::mem::take(&mut sink.notes);
                n.push(format!("failed: {e}"));
                n
            }
        },
    };
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    result.map(|_| manifest)
}

fn dispatch(cmd: Command, cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), Box<dyn Error + Send + Sync>> {
    match cmd {
        Command::Relax => relax(cfg, sink),
        Command::DiodeLlg => diode_llg(cfg, sink),
        Command::DiodeThiele => diode_thiele(cfg, sink),
        Command::SweepWindow => sweep_window(cfg, sink),
        Command::FidelityMap => fidelity_map(cfg, sink),
        Command::RotorSpectrum => rotor_spectrum(cfg, sink),
        Command::Anharmonicity => anharmonicity(cfg, sink),
        Command::TransmonMap => transmon_map(cfg, sink),
        Command::Dipole => dipole(cfg, sink),
    }
}

pub fn trajectory_table(samples: &[TrajectorySample]) -> Table {
    let mut t = Table::new(&["t_ns", "x_nm", "y_nm", "Q", "E_joule"]);
    for s in samples {
        t.push(vec![(s.t * 1e9).into(), (s.x * 1e9).into(), (s.y * 1e9).into(), s.q.into(), s.energy.into()]);
    }
    t
}

pub fn snapshot_table(model: &Micromag, f: &MagnetizationField) -> Table {
    let mut t = Table::new(&["x_nm", "y_nm", "mx", "my", "mz"]);
    for c in model.cells() {
        let (x, y) = model.geom.center(c);
        let m = f.m[c];
        t.push(vec![(x * 1e9).into(), (y * 1e9).into(), m[0].into(), m[1].into(), m[2].into()]);
    }
    t
}

fn opt_ns(t: Option<f64>) -> Cell {
    t.map_or(Cell::Empty, |t| Cell::Num(t * 1e9))
}

fn relax(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), Box<dyn Error + Send + Sync>> {
    let points = micromag::size_sweep(&micromag::SizeSweep::from_config(cfg))?;
    let mut t = Table::new(&["Ku", "diameter_nm", "Q", "E_joule", "torque_A_per_m", "relax_time_ns"]);
    for p in &points {
        let o = &p.observables;
        t.push(vec![
            p.ku.into(),
            (o.diameter * 1e9).into(),
            o.charge.into(),
            o.energy.into(),
            p.report.torque.into(),
            (p.report.time * 1e9).into(),
        ]);
    }
    sink.csv("relax.csv", &t)?;
    sink.plot("relax.svg", &t, PlotKind::lines("Ku", "diameter_nm", None))?;
    if cfg.output().snapshot_stride > 0 || sink.svg {
        for (i, p) in points.iter().enumerate() {
            let snap = snapshot_table(&p.model, &p.field);
            if cfg.output().snapshot_stride > 0 {
                sink.csv(&format!("snapshot_ku{i}.csv"), &snap)?;
            }
            sink.plot(&format!("snapshot_ku{i}.svg"), &snap, PlotKind::heatmap("x_nm", "y_nm", &["mz"]))?;
        }
    }
    Ok(())
}

fn outcome_row(t: &mut Table, o: &DiodeOutcome, extra: Vec<Cell>) {
    let mut row = vec![Cell::Text(o.direction.as_str().into()), Cell::Text(o.class.as_str().into()), opt_ns(o.time)];
    row.extend(extra);
    t.push(row);
}

fn write_trajectories(sink: &mut Sink, fwd: &DiodeOutcome, rev: &DiodeOutcome, stem: &str) -> Result<(), Box<dyn Error + Send + Sync>> {
    sink.csv(&format!("trajectory_forward{stem}.csv"), &trajectory_table(&fwd.trajectory))?;
    sink.csv(&format!("trajectory_reverse{stem}.csv"), &trajectory_table(&rev.trajectory))?;
    if sink.svg {
        let mut both = Table::new(&["direction", "x_nm", "y_nm"]);
        for o in [fwd, rev] {
            for s in &o.trajectory {
                both.push(vec![Cell::Text(o.direction.as_str().into()), (s.x * 1e9).into(), (s.y * 1e9).into()]);
            }
        }
        sink.plot(&format!("trajectories{stem}.svg"), &both, PlotKind::lines("x_nm", "y_nm", Some("direction")))?;
    }
    Ok(())
}

fn write_mask(sink: &mut Sink, g: &TrackGeometry) -> Result<(), Box<dyn Error + Send + Sync>> {
    sink.bytes("mask.pgm", &g.to_pgm())
}

fn diode_llg(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), Box<dyn Error + Send + Sync>> {
    let run = DiodeLlgRun::from_config(cfg)?;
    write_mask(sink, &run.geometry)?;
    let (fwd, rev) = rayon::join(
        || micromag::run_diode_llg(&run, Direction::Forward),
        || micromag::run_diode_llg(&run, Direction::Reverse),
    );
    let (fwd, rev) = (fwd?, rev?);
    let mut t = Table::new(&["direction", "class", "time_ns", "Q_min", "Q_max", "relaxed_diameter_nm", "dt_s"]);
    for r in [&fwd, &rev] {
        let extra = vec![
            r.charge_range.0.into(),
            r.charge_range.1.into(),
            (r.relaxed.diameter * 1e9).into(),
            r.dt.into(),
        ];
        outcome_row(&mut t, &r.outcome, extra);
    }
    sink.csv("diode_llg.csv", &t)?;
    write_trajectories(sink, &fwd.outcome, &rev.outcome, "")?;
    if !fwd.snapshots.is_empty() || !rev.snapshots.is_empty() {
        let model = Micromag::new(run.geometry.clone(), run.material, [0.0; 3])?;
        for r in [&fwd, &rev] {
            for (k, (_, f)) in r.snapshots.iter().enumerate() {
                let snap = snapshot_table(&model, f);
                let name = format!("snapshot_{}_{k:04}", r.outcome.direction.as_str().to_lowercase());
                sink.csv(&format!("{name}.csv"), &snap)?;
                sink.plot(&format!("{name}.svg"), &snap, PlotKind::heatmap("x_nm", "y_nm", &["mz"]))?;
            }
        }
    }
    sink.note(format!("forward {}, reverse {}", fwd.outcome.class.as_str(), rev.outcome.class.as_str()));
    Ok(())
}

fn potential_outputs(sink: &mut Sink, s: &ThieleSetup) -> Result<(), Box<dyn Error + Send + Sync>> {
    write_mask(sink, &s.geometry)?;
    let pot = s.potential.table();
    sink.csv("potential.csv", &pot)?;
    sink.plot("potential.svg", &pot, PlotKind::heatmap("x_nm", "y_nm", &["U_joule"]))
}

fn diode_thiele(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), Box<dyn Error + Send + Sync>> {
    let s = ThieleSetup::from_config(cfg)?;
    potential_outputs(sink, &s)?;
    let (fwd, rev) = rayon::join(
        || thiele::classify_diode(&s.params, &s.potential, &s.geometry, Direction::Forward, &s.run),
        || thiele::classify_diode(&s.params, &s.potential, &s.geometry, Direction::Reverse, &s.run),
    );
    let (fwd, rev) = (fwd?, rev?);
    let mut t = Table::new(&["direction", "class", "time_ns", "left_domain"]);
    for o in [&fwd, &rev] {
        outcome_row(&mut t, o, vec![Cell::Text(o.left_domain.to_string())]);
    }
    sink.csv("diode_thiele.csv", &t)?;
    write_trajectories(sink, &fwd, &rev, "")?;
    sink.note(format!("forward {}, reverse {}", fwd.class.as_str(), rev.class.as_str()));
    Ok(())
}

fn sweep_window(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), Box<dyn Error + Send + Sync>> {
    let s = ThieleSetup::from_config(cfg)?;
    let j_ref = s.drive.current_density;
    let base = if j_ref > 0.0 { s.params } else { s.at_current(1.0) };
    let sweep = thiele::efficiency_sweep(&base, j_ref.max(1.0), &s.potential, &s.geometry, &s.j_values, &s.run)?;
    let mut t = Table::new(&["J_A_per_m2", "forward_class", "reverse_class", "tau_fwd_ns", "tau_rev_ns"]);
    for r in &sweep.rows {
        t.push(vec![
            r.current_density.into(),
            Cell::Text(r.forward.as_str().into()),
            Cell::Text(r.reverse.as_str().into()),
            opt_ns(r.tau_fwd),
            opt_ns(r.tau_rev),
        ]);
    }
    sink.csv("sweep.csv", &t)?;
    sink.plot("sweep.svg", &t, PlotKind::lines("J_A_per_m2", "tau_fwd_ns", None))?;
    match sweep.window() {
        Ok((lo, hi)) => sink.note(format!("diode window: J in [{lo:e}, {hi:e}] A/m^2")),
        Err(ThieleError::EmptyWindow) => {
            log::warn!("no current density in the sweep gives (Transmitted, Reflected)");
            sink.note("diode window: empty".into());
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn fidelity_map(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), Box<dyn Error + Send + Sync>> {
    let maps = lindblad::fidelity_maps(&cfg.lindblad())?;
    let mut t = Table::new(&["eta", "t_over_J", "F_forward", "F_reverse"]);
    for (i, &eta) in maps.eta.iter().enumerate() {
        for (k, &tj) in maps.t_over_j.iter().enumerate() {
            t.push(vec![eta.into(), tj.into(), maps.forward[i][k].into(), maps.reverse[i][k].into()]);
        }
    }
    sink.csv("fidelity.csv", &t)?;
    sink.plot("fidelity.svg", &t, PlotKind::heatmap("t_over_J", "eta", &["F_forward", "F_reverse"]))?;
    sink.note(format!("max trace error {:e}, min eigenvalue {:e}", maps.trace_error, maps.min_eigenvalue));
    Ok(())
}

fn rotor_sweep(cfg: &ExperimentConfig) -> Result<(RotorParams, Vec<(f64, helicity::RotorSpectrum)>), Box<dyn Error + Send + Sync>> {
    let r = cfg.rotor();
    let p = RotorParams::from_section(&r);
    let etas = linspace(0.0, 1.0, r.eta_points);
    Ok((p, helicity::anharmonicity_sweep(&p, &etas, r.n_levels)?))
}

fn rotor_spectrum(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), Box<dyn Error + Send + Sync>> {
    let (p, sweep) = rotor_sweep(cfg)?;
    let mut t = Table::new(&["eta", "level_index", "energy"]);
    for (eta, s) in &sweep {
        for (n, e) in s.energies.iter().enumerate() {
            t.push(vec![(*eta).into(), n.into(), (*e).into()]);
        }
    }
    sink.csv("spectrum.csv", &t)?;
    sink.plot("spectrum.svg", &t, PlotKind::lines("eta", "energy", Some("level_index")))?;
    if sink.svg {
        let r = cfg.rotor();
        let levels = helicity::spectrum(&p, r.n_levels)?;
        let d = helicity::level_diagram(&p, &helicity::phi_grid(r.phi_points), &levels.energies);
        let mut lt = Table::new(&["curve", "phi", "energy"]);
        for (&f, &v) in d.phi.iter().zip(&d.potential) {
            lt.push(vec![Cell::Text("V".into()), f.into(), v.into()]);
        }
        for (n, (e, pieces)) in d.levels.iter().enumerate() {
            for (k, &(a, b)) in pieces.iter().enumerate() {
                for x in [a, b] {
                    lt.push(vec![Cell::Text(format!("E{n}.{k}")), x.into(), (*e).into()]);
                }
            }
        }
        sink.plot("level_diagram.svg", &lt, PlotKind::lines("phi", "energy", Some("curve")))?;
    }
    Ok(())
}

fn anharmonicity(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), Box<dyn Error + Send + Sync>> {
    let (_, sweep) = rotor_sweep(cfg)?;
    let mut t = Table::new(&["eta", "omega01", "omega12", "delta_omega"]);
    for r in helicity::anharmonicity_rows(&sweep) {
        t.push(vec![r.eta.into(), r.omega01.into(), r.omega12.into(), r.delta_omega.into()]);
    }
    sink.csv("anharmonicity.csv", &t)?;
    sink.plot("anharmonicity.svg", &t, PlotKind::lines("eta", "delta_omega", None))
}

fn transmon_map(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), Box<dyn Error + Send + Sync>> {
    let rows = transmon::f01_map(&cfg.transmon())?;
    let mut t = Table::new(&["phi_e", "epsilon", "EJ_eff_GHz", "f01_duffing_GHz", "f01_exact_GHz", "regime_flag"]);
    let mut flagged = 0;
    for r in &rows {
        flagged += usize::from(r.regime != transmon::Regime::Transmon);
        t.push(vec![
            r.phi_e.into(),
            r.epsilon.into(),
            r.ej_eff.into(),
            r.f01_duffing.into(),
            r.f01_exact.map_or(Cell::Empty, Cell::Num),
            Cell::Text(r.regime.as_str().into()),
        ]);
    }
    sink.csv("transmon.csv", &t)?;
    sink.plot("transmon.svg", &t, PlotKind::heatmap("phi_e", "epsilon", &["f01_duffing_GHz"]))?;
    if flagged > 0 {
        log::warn!("{flagged} point(s) outside the transmon regime (EJ_eff/EC < {})", transmon::REGIME_WARN);
        sink.note(format!("{flagged} point(s) flagged outside the transmon regime"));
    }
    Ok(())
}

fn dipole(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<(), Box<dyn Error + Send + Sync>> {
    let s = cfg.transmon();
    let mut t = Table::new(&["z_nm", "Bz_mT", "flux_over_flux0"]);
    for &z in &s.dipole_z {
        let d = transmon::dipole_estimate(s.dipole_ms, s.dipole_volume, z, s.loop_side)?;
        t.push(vec![(z * 1e9).into(), (d.bz * 1e3).into(), d.flux_quanta.into()]);
    }
    sink.csv("dipole.csv", &t)?;
    sink.plot("dipole.svg", &t, PlotKind::lines("z_nm", "Bz_mT", None))
}
