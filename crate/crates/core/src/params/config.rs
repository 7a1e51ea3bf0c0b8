//! Sectioned `key = value` experiment configuration.
//!
//! The file is TOML syntax restricted to eight flat sections. Every key is
//! checked against a static schema; all violations are collected before
//! returning. The canonical form lists sections in fixed order, keys sorted,
//! and floats in shortest round-trip notation, so `parse ∘ to_canonical` is a
//! fixed point.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{DriveParams, MaterialParams, TorqueKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Section {
    Material,
    Geometry,
    Drive,
    Thiele,
    Rotor,
    Lindblad,
    Transmon,
    Output,
}

impl Section {
    pub const ALL: [Section; 8] = [
        Section::Material,
        Section::Geometry,
        Section::Drive,
        Section::Thiele,
        Section::Rotor,
        Section::Lindblad,
        Section::Transmon,
        Section::Output,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Section::Material => "material",
            Section::Geometry => "geometry",
            Section::Drive => "drive",
            Section::Thiele => "thiele",
            Section::Rotor => "rotor",
            Section::Lindblad => "lindblad",
            Section::Transmon => "transmon",
            Section::Output => "output",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    FloatList(Vec<f64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{}", fmt_float(*x)),
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => write!(f, "\"{s}\""),
            Value::Bool(b) => write!(f, "{b}"),
            Value::FloatList(v) => {
                let items: Vec<String> = v.iter().map(|x| fmt_float(*x)).collect();
                write!(f, "[{}]", items.join(", "))
            }
        }
    }
}

/// Shortest round-trip decimal; always contains `.` or `e` so it re-parses as a float.
pub(crate) fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{section}.{key}: {reason}")]
pub struct SchemaError {
    pub section: String,
    pub key: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config syntax error: {0}")]
    Syntax(String),
    #[error("{} schema violation(s):\n{}", .0.len(), list(.0))]
    Schema(Vec<SchemaError>),
}

fn list(errs: &[SchemaError]) -> String {
    errs.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n")
}

impl ConfigError {
    pub fn violations(&self) -> &[SchemaError] {
        match self {
            ConfigError::Schema(v) => v,
            ConfigError::Syntax(_) => &[],
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Float,
    Int,
    Str(&'static [&'static str]),
    Bool,
    FloatList,
}

#[derive(Debug, Clone, Copy)]
enum Dflt {
    F(f64),
    I(i64),
    S(&'static str),
    B(bool),
    L(&'static [f64]),
    /// Optional key without a default; resolved by the consuming module.
    Absent,
}

#[derive(Debug, Clone, Copy)]
enum Rule {
    Any,
    Positive,
    NonNegative,
    /// Closed interval.
    Within(f64, f64),
    /// Half-open `[lo, hi)`.
    HalfOpen(f64, f64),
    /// `(lo, hi]`.
    LeftOpen(f64, f64),
    AtLeast(f64),
}

struct KeySpec {
    key: &'static str,
    kind: Kind,
    default: Dflt,
    rule: Rule,
}

const fn k(key: &'static str, kind: Kind, default: Dflt, rule: Rule) -> KeySpec {
    KeySpec { key, kind, default, rule }
}

use Dflt::*;
use Kind::{Bool as KB, Float as KF, FloatList as KL, Int as KI, Str as KS};
use Rule::*;

const MATERIAL: &[KeySpec] = &[
    k("Aex", KF, F(15e-12), Positive),
    k("Dmi", KF, F(3.0e-3), Any),
    k("Ku", KF, F(0.8e6), NonNegative),
    k("Ms", KF, F(580e3), Positive),
    k("alpha", KF, F(0.1), LeftOpen(0.0, 1.0)),
    k("ku_sweep", KL, L(&[0.8e6, 1.0e6, 1.2e6, 1.5e6]), NonNegative),
    k("thickness", KF, F(1e-9), Positive),
    k("units", KS(&["SI"]), S("SI"), Any),
];

const GEOMETRY: &[KeySpec] = &[
    k("arm_width_in", KF, F(40e-9), Positive),
    k("arm_width_out", KF, F(60e-9), Positive),
    k("cell_size", KF, F(1e-9), Positive),
    k("height", KF, F(100e-9), Positive),
    k("junction_x", KF, F(0.65), Within(0.05, 0.95)),
    k("length", KF, F(300e-9), Positive),
    k("patch_cell", KF, F(0.25e-9), Positive),
    k("patch_size", KF, F(48e-9), Positive),
    k("stem_width", KF, F(0.0), NonNegative),
    k("throat_length", KF, F(14e-9), Positive),
    k("throat_width", KF, F(24e-9), NonNegative),
    k("units", KS(&["SI"]), S("SI"), Any),
    k("widen_side", KS(&["top", "bottom"]), S("top"), Any),
];

const DRIVE: &[KeySpec] = &[
    k("beta", KF, Absent, NonNegative),
    k("current_density", KF, F(0.2e12), NonNegative),
    k("dt", KF, Absent, Positive),
    k("polarization_x", KF, F(0.0), Within(-1.0, 1.0)),
    k("polarization_y", KF, F(-1.0), Within(-1.0, 1.0)),
    k("polarization_z", KF, F(0.0), Within(-1.0, 1.0)),
    k("relax_max_time", KF, F(1e-6), Positive),
    k("relax_tol", KF, F(1e2), Positive),
    k("spin_hall_angle", KF, F(0.1), Any),
    k("spin_polarization", KF, F(0.5), Within(0.0, 1.0)),
    k("timeout", KF, F(4e-9), Positive),
    k("torque_kind", KS(&["sot", "stt"]), S("sot"), Any),
    k("units", KS(&["SI"]), S("SI"), Any),
];

const THIELE: &[KeySpec] = &[
    k("U0", KF, Absent, Positive),
    k("alpha_g", KF, Absent, Positive),
    k("d_diss", KF, Absent, Positive),
    k("dt", KF, F(1e-12), Positive),
    k("force", KF, Absent, NonNegative),
    k("gyro", KF, Absent, Any),
    k("j_max", KF, F(1.0e12), NonNegative),
    k("j_min", KF, F(0.0), NonNegative),
    k("j_points", KI, I(21), AtLeast(1.0)),
    k("lambda", KF, Absent, Positive),
    k("timeout", KF, F(20e-9), Positive),
    k("units", KS(&["SI"]), S("SI"), Any),
];

const ROTOR: &[KeySpec] = &[
    k("K2", KF, F(10.0), NonNegative),
    k("e_z", KF, F(1.0), Any),
    k("eta", KF, F(1.0), Within(0.0, 1.0)),
    k("eta_points", KI, I(41), AtLeast(2.0)),
    k("h_z", KF, F(0.0), Any),
    k("kappa_z", KF, F(1.0), Positive),
    k("m_max", KI, I(40), AtLeast(10.0)),
    k("n_levels", KI, I(6), AtLeast(3.0)),
    k("phi_points", KI, I(721), AtLeast(8.0)),
    k("units", KS(&["natural"]), S("natural"), Any),
];

const LINDBLAD: &[KeySpec] = &[
    k("J", KF, F(1.0), Positive),
    k("delta", KF, F(0.0), Any),
    k("eta_points", KI, I(41), AtLeast(2.0)),
    k("gamma_max", KF, F(1.0), NonNegative),
    k("t_max", KF, F(10.0), Positive),
    k("t_points", KI, I(400), AtLeast(2.0)),
    k("units", KS(&["natural"]), S("natural"), Any),
];

const TRANSMON: &[KeySpec] = &[
    k("EC", KF, F(0.2), Positive),
    k("EJ_sigma", KF, F(50.0), Positive),
    k("charge_cutoff", KI, I(30), AtLeast(1.0)),
    k("dipole_ms", KF, F(1e6), Positive),
    k("dipole_volume", KF, F(8e-24), Positive),
    k("dipole_z", KL, L(&[20e-9, 50e-9, 100e-9]), Positive),
    k("eps_max", KF, F(0.5), HalfOpen(0.0, 1.0)),
    k("eps_min", KF, F(0.0), HalfOpen(0.0, 1.0)),
    k("eps_points", KI, I(11), AtLeast(1.0)),
    k("epsilon", KF, F(0.0), HalfOpen(0.0, 1.0)),
    k("exact_column", KB, B(true), Any),
    k("loop_side", KF, F(100e-9), Positive),
    k("phi_e", KF, F(0.0), Any),
    k("phi_points", KI, I(201), AtLeast(2.0)),
    k("units", KS(&["GHz"]), S("GHz"), Any),
];

const OUTPUT: &[KeySpec] = &[
    k("snapshot_stride", KI, I(0), AtLeast(0.0)),
    k("svg", KB, B(false), Any),
    k("trajectory_interval", KF, F(10e-12), Positive),
];

fn schema(section: Section) -> &'static [KeySpec] {
    match section {
        Section::Material => MATERIAL,
        Section::Geometry => GEOMETRY,
        Section::Drive => DRIVE,
        Section::Thiele => THIELE,
        Section::Rotor => ROTOR,
        Section::Lindblad => LINDBLAD,
        Section::Transmon => TRANSMON,
        Section::Output => OUTPUT,
    }
}

/// Validated configuration: every schema key with a default is present.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    sections: BTreeMap<Section, BTreeMap<String, Value>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::parse("").expect("schema defaults are valid")
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            ConfigError::Syntax(e.message().to_string())
        })?;
        let mut errors = Vec::new();
        let mut sections = BTreeMap::new();
        for (name, body) in &table {
            let Some(section) = Section::from_name(name) else {
                errors.push(SchemaError {
                    section: name.clone(),
                    key: "*".into(),
                    reason: "unknown section".into(),
                });
                continue;
            };
            let Some(body) = body.as_table() else {
                errors.push(SchemaError {
                    section: name.clone(),
                    key: "*".into(),
                    reason: "expected a [section] table".into(),
                });
                continue;
            };
            let mut values = BTreeMap::new();
            for (key, raw) in body {
                let err = |reason: String| SchemaError {
                    section: name.clone(),
                    key: key.clone(),
                    reason,
                };
                let Some(spec) = schema(section).iter().find(|s| s.key == key) else {
                    errors.push(err("unknown key".into()));
                    continue;
                };
                match convert(spec, raw) {
                    Ok(v) => match check(spec, &v) {
                        Ok(()) => {
                            values.insert(key.clone(), v);
                        }
                        Err(reason) => errors.push(err(reason)),
                    },
                    Err(reason) => errors.push(err(reason)),
                }
            }
            sections.insert(section, values);
        }
        for section in Section::ALL {
            let values = sections.entry(section).or_default();
            for spec in schema(section) {
                if values.contains_key(spec.key) {
                    continue;
                }
                if let Some(v) = default_value(spec.default) {
                    log::debug!("[{}] {} defaulted to {}", section.name(), spec.key, v);
                    values.insert(spec.key.to_string(), v);
                }
            }
        }
        let cfg = Self { sections };
        if errors.is_empty() {
            cfg.cross_checks(&mut errors);
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError::Schema(errors))
        }
    }

    fn cross_checks(&self, errors: &mut Vec<SchemaError>) {
        let mut push = |section: Section, key: &str, reason: &str| {
            errors.push(SchemaError {
                section: section.name().into(),
                key: key.into(),
                reason: reason.into(),
            })
        };
        let p = [
            self.f64(Section::Drive, "polarization_x"),
            self.f64(Section::Drive, "polarization_y"),
            self.f64(Section::Drive, "polarization_z"),
        ];
        if ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs() > 1e-9 {
            push(Section::Drive, "polarization_x", "polarization vector must have unit norm");
        }
        let g = self.geometry();
        if g.throat_width > g.arm_width_in {
            push(Section::Geometry, "throat_width", "must be ≤ arm_width_in");
        }
        if g.arm_width_in > g.height || g.arm_width_out > g.height {
            push(Section::Geometry, "arm_width_out", "arm widths must fit inside height");
        }
        let th = self.thiele();
        if th.j_min > th.j_max {
            push(Section::Thiele, "j_min", "must be ≤ j_max");
        }
        let tr = self.transmon();
        if tr.eps_min > tr.eps_max {
            push(Section::Transmon, "eps_min", "must be ≤ eps_max");
        }
    }

    /// Canonical text form: fixed section order, sorted keys, shortest round-trip floats.
    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        for (i, section) in Section::ALL.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{}]\n", section.name()));
            if let Some(values) = self.sections.get(section) {
                for (key, v) in values {
                    out.push_str(&format!("{key} = {v}\n"));
                }
            }
        }
        out
    }

    /// SHA-256 of the canonical form, hex encoded.
    pub fn canonical_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical().as_bytes()))
    }

    pub fn get(&self, section: Section, key: &str) -> Option<&Value> {
        self.sections.get(&section).and_then(|s| s.get(key))
    }

    /// Overrides one value, re-validating the whole configuration.
    pub fn with(&self, section: Section, key: &str, value: Value) -> Result<Self, ConfigError> {
        let mut next = self.clone();
        next.sections
            .entry(section)
            .or_default()
            .insert(key.to_string(), value);
        Self::parse(&next.to_canonical())
    }

    fn f64(&self, section: Section, key: &str) -> f64 {
        self.opt_f64(section, key)
            .unwrap_or_else(|| panic!("{}.{key} missing after validation", section.name()))
    }

    fn opt_f64(&self, section: Section, key: &str) -> Option<f64> {
        match self.get(section, key)? {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn usize(&self, section: Section, key: &str) -> usize {
        match self.get(section, key) {
            Some(Value::Int(i)) => *i as usize,
            _ => panic!("{}.{key} missing after validation", section.name()),
        }
    }

    fn str(&self, section: Section, key: &str) -> &str {
        match self.get(section, key) {
            Some(Value::Str(s)) => s,
            _ => panic!("{}.{key} missing after validation", section.name()),
        }
    }

    fn bool(&self, section: Section, key: &str) -> bool {
        matches!(self.get(section, key), Some(Value::Bool(true)))
    }

    fn list(&self, section: Section, key: &str) -> Vec<f64> {
        match self.get(section, key) {
            Some(Value::FloatList(v)) => v.clone(),
            _ => panic!("{}.{key} missing after validation", section.name()),
        }
    }

    pub fn material(&self) -> MaterialParams {
        let s = Section::Material;
        MaterialParams {
            ms: self.f64(s, "Ms"),
            a_ex: self.f64(s, "Aex"),
            dmi: self.f64(s, "Dmi"),
            ku: self.f64(s, "Ku"),
            alpha: self.f64(s, "alpha"),
            thickness: self.f64(s, "thickness"),
        }
    }

    pub fn ku_sweep(&self) -> Vec<f64> {
        self.list(Section::Material, "ku_sweep")
    }

    pub fn geometry(&self) -> GeometrySection {
        let s = Section::Geometry;
        GeometrySection {
            length: self.f64(s, "length"),
            height: self.f64(s, "height"),
            cell_size: self.f64(s, "cell_size"),
            arm_width_in: self.f64(s, "arm_width_in"),
            arm_width_out: self.f64(s, "arm_width_out"),
            stem_width: self.f64(s, "stem_width"),
            throat_width: self.f64(s, "throat_width"),
            throat_length: self.f64(s, "throat_length"),
            junction_x: self.f64(s, "junction_x"),
            widen_top: self.str(s, "widen_side") == "top",
            patch_size: self.f64(s, "patch_size"),
            patch_cell: self.f64(s, "patch_cell"),
        }
    }

    /// Drive for forward bias (current along +x).
    pub fn drive(&self) -> DriveParams {
        let s = Section::Drive;
        DriveParams {
            current_density: self.f64(s, "current_density"),
            torque_kind: TorqueKind::parse(self.str(s, "torque_kind")).expect("validated"),
            polarization_dir: [
                self.f64(s, "polarization_x"),
                self.f64(s, "polarization_y"),
                self.f64(s, "polarization_z"),
            ],
            current_dir: [1.0, 0.0],
            spin_hall_angle: self.f64(s, "spin_hall_angle"),
            spin_polarization: self.f64(s, "spin_polarization"),
            nonadiabaticity_beta: self
                .opt_f64(s, "beta")
                .unwrap_or_else(|| self.f64(Section::Material, "alpha")),
        }
    }

    pub fn llg_run(&self) -> LlgRunSection {
        let s = Section::Drive;
        LlgRunSection {
            timeout: self.f64(s, "timeout"),
            dt: self.opt_f64(s, "dt"),
            relax_tol: self.f64(s, "relax_tol"),
            relax_max_time: self.f64(s, "relax_max_time"),
        }
    }

    pub fn thiele(&self) -> ThieleSection {
        let s = Section::Thiele;
        ThieleSection {
            alpha_g: self.opt_f64(s, "alpha_g"),
            gyro: self.opt_f64(s, "gyro"),
            d_diss: self.opt_f64(s, "d_diss"),
            force: self.opt_f64(s, "force"),
            u0: self.opt_f64(s, "U0"),
            lambda: self.opt_f64(s, "lambda"),
            dt: self.f64(s, "dt"),
            timeout: self.f64(s, "timeout"),
            j_min: self.f64(s, "j_min"),
            j_max: self.f64(s, "j_max"),
            j_points: self.usize(s, "j_points"),
        }
    }

    pub fn rotor(&self) -> RotorSection {
        let s = Section::Rotor;
        RotorSection {
            kappa_z: self.f64(s, "kappa_z"),
            h_z: self.f64(s, "h_z"),
            k2: self.f64(s, "K2"),
            e_z: self.f64(s, "e_z"),
            eta: self.f64(s, "eta"),
            m_max: self.usize(s, "m_max"),
            n_levels: self.usize(s, "n_levels"),
            eta_points: self.usize(s, "eta_points"),
            phi_points: self.usize(s, "phi_points"),
        }
    }

    pub fn lindblad(&self) -> LindbladSection {
        let s = Section::Lindblad;
        LindbladSection {
            j: self.f64(s, "J"),
            delta: self.f64(s, "delta"),
            gamma_max: self.f64(s, "gamma_max"),
            eta_points: self.usize(s, "eta_points"),
            t_max: self.f64(s, "t_max"),
            t_points: self.usize(s, "t_points"),
        }
    }

    pub fn transmon(&self) -> TransmonSection {
        let s = Section::Transmon;
        TransmonSection {
            ej_sigma: self.f64(s, "EJ_sigma"),
            ec: self.f64(s, "EC"),
            epsilon: self.f64(s, "epsilon"),
            phi_e: self.f64(s, "phi_e"),
            phi_points: self.usize(s, "phi_points"),
            eps_min: self.f64(s, "eps_min"),
            eps_max: self.f64(s, "eps_max"),
            eps_points: self.usize(s, "eps_points"),
            charge_cutoff: self.usize(s, "charge_cutoff"),
            exact_column: self.bool(s, "exact_column"),
            dipole_ms: self.f64(s, "dipole_ms"),
            dipole_volume: self.f64(s, "dipole_volume"),
            dipole_z: self.list(s, "dipole_z"),
            loop_side: self.f64(s, "loop_side"),
        }
    }

    pub fn output(&self) -> OutputSection {
        let s = Section::Output;
        OutputSection {
            svg: self.bool(s, "svg"),
            snapshot_stride: self.usize(s, "snapshot_stride"),
            trajectory_interval: self.f64(s, "trajectory_interval"),
        }
    }
}

/// `[geometry]`: T-track layout plus the square patch used for size sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometrySection {
    pub length: f64,
    pub height: f64,
    pub cell_size: f64,
    pub arm_width_in: f64,
    pub arm_width_out: f64,
    pub stem_width: f64,
    pub throat_width: f64,
    pub throat_length: f64,
    /// Junction position as a fraction of `length`.
    pub junction_x: f64,
    pub widen_top: bool,
    pub patch_size: f64,
    pub patch_cell: f64,
}

/// LLG run controls from `[drive]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlgRunSection {
    pub timeout: f64,
    pub dt: Option<f64>,
    pub relax_tol: f64,
    pub relax_max_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThieleSection {
    pub alpha_g: Option<f64>,
    pub gyro: Option<f64>,
    pub d_diss: Option<f64>,
    pub force: Option<f64>,
    pub u0: Option<f64>,
    pub lambda: Option<f64>,
    pub dt: f64,
    pub timeout: f64,
    pub j_min: f64,
    pub j_max: f64,
    pub j_points: usize,
}

impl ThieleSection {
    /// Ascending current densities for the window sweep.
    pub fn j_values(&self) -> Vec<f64> {
        if self.j_points == 1 {
            return vec![self.j_min];
        }
        let n = self.j_points - 1;
        (0..=n)
            .map(|i| self.j_min + (self.j_max - self.j_min) * i as f64 / n as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorSection {
    pub kappa_z: f64,
    pub h_z: f64,
    pub k2: f64,
    pub e_z: f64,
    pub eta: f64,
    pub m_max: usize,
    pub n_levels: usize,
    pub eta_points: usize,
    pub phi_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladSection {
    pub j: f64,
    pub delta: f64,
    pub gamma_max: f64,
    pub eta_points: usize,
    pub t_max: f64,
    pub t_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmonSection {
    pub ej_sigma: f64,
    pub ec: f64,
    pub epsilon: f64,
    pub phi_e: f64,
    pub phi_points: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_points: usize,
    pub charge_cutoff: usize,
    pub exact_column: bool,
    pub dipole_ms: f64,
    pub dipole_volume: f64,
    pub dipole_z: Vec<f64>,
    pub loop_side: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputSection {
    pub svg: bool,
    pub snapshot_stride: usize,
    pub trajectory_interval: f64,
}

fn default_value(d: Dflt) -> Option<Value> {
    match d {
        F(x) => Some(Value::Float(x)),
        I(i) => Some(Value::Int(i)),
        S(s) => Some(Value::Str(s.to_string())),
        B(b) => Some(Value::Bool(b)),
        L(v) => Some(Value::FloatList(v.to_vec())),
        Absent => None,
    }
}

fn convert(spec: &KeySpec, raw: &toml::Value) -> Result<Value, String> {
    match (spec.kind, raw) {
        (KF, toml::Value::Float(x)) => Ok(Value::Float(*x)),
        (KF, toml::Value::Integer(i)) => Ok(Value::Float(*i as f64)),
        (KI, toml::Value::Integer(i)) => Ok(Value::Int(*i)),
        (KI, toml::Value::Float(x)) if x.fract() == 0.0 && x.abs() < 9e15 => Ok(Value::Int(*x as i64)),
        (KS(choices), toml::Value::String(s)) => {
            if choices.contains(&s.as_str()) {
                Ok(Value::Str(s.clone()))
            } else {
                Err(format!("must be one of {choices:?}"))
            }
        }
        (KB, toml::Value::Boolean(b)) => Ok(Value::Bool(*b)),
        (KL, toml::Value::Array(items)) => items
            .iter()
            .map(|v| match v {
                toml::Value::Float(x) => Ok(*x),
                toml::Value::Integer(i) => Ok(*i as f64),
                _ => Err("list entries must be numbers".to_string()),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Value::FloatList),
        (KF, _) => Err("expected a number".into()),
        (KI, _) => Err("expected an integer".into()),
        (KS(_), _) => Err("expected a string".into()),
        (KB, _) => Err("expected true or false".into()),
        (KL, _) => Err("expected a list of numbers".into()),
    }
}

fn check(spec: &KeySpec, v: &Value) -> Result<(), String> {
    let nums: Vec<f64> = match v {
        Value::Float(x) => vec![*x],
        Value::Int(i) => vec![*i as f64],
        Value::FloatList(xs) => {
            if xs.is_empty() {
                return Err("list must not be empty".into());
            }
            xs.clone()
        }
        Value::Str(_) | Value::Bool(_) => return Ok(()),
    };
    for x in nums {
        if !x.is_finite() {
            return Err("must be finite".into());
        }
        let reason = match spec.rule {
            Any => None,
            Positive if x <= 0.0 => Some("must be > 0".to_string()),
            NonNegative if x < 0.0 => Some("must be ≥ 0".to_string()),
            Within(lo, hi) if !(lo..=hi).contains(&x) => Some(format!("must lie in [{lo}, {hi}]")),
            HalfOpen(lo, hi) if !(x >= lo && x < hi) => Some(format!("must lie in [{lo}, {hi})")),
            LeftOpen(lo, hi) if !(x > lo && x <= hi) => Some(format!("must lie in ({lo}, {hi}]")),
            AtLeast(lo) if x < lo => Some(format!("must be ≥ {lo}")),
            _ => None,
        };
        if let Some(r) = reason {
            return Err(r);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_material_section_gives_documented_defaults() {
        let cfg = ExperimentConfig::parse("[material]\n").unwrap();
        assert_eq!(cfg.material(), MaterialParams::baseline());
        assert_eq!(cfg.lindblad().t_points, 400);
        assert_eq!(cfg.rotor().m_max, 40);
        assert_eq!(cfg.transmon().ej_sigma, 50.0);
    }

    #[test]
    fn negative_anisotropy_is_a_schema_error() {
        let err = ExperimentConfig::parse("[material]\nKu = -1\n").unwrap_err();
        let v = err.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].section, "material");
        assert_eq!(v[0].key, "Ku");
        assert_eq!(v[0].reason, "must be ≥ 0");
    }

    #[test]
    fn all_violations_are_reported() {
        let text = "[material]\nKu = -1\nMs = 0\nbogus = 3\n[rotor]\nm_max = 4\n[nope]\n";
        let err = ExperimentConfig::parse(text).unwrap_err();
        let keys: Vec<_> = err
            .violations()
            .iter()
            .map(|e| format!("{}.{}", e.section, e.key))
            .collect();
        assert_eq!(keys, ["material.Ku", "material.Ms", "material.bogus", "nope.*", "rotor.m_max"]);
    }

    #[test]
    fn baseline_file_round_trips() {
        let text = "[material]\nMs = 580e3\nAex = 15e-12\nDmi = 3.0e-3\nalpha = 0.1\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        let canon = cfg.to_canonical();
        let again = ExperimentConfig::parse(&canon).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_canonical(), canon);
        assert!(canon.starts_with("[material]\nAex = 1.5e-11\nDmi = 0.003\nKu = 800000.0\nMs = 580000.0\n"));
    }

    #[test]
    fn section_order_is_fixed() {
        let canon = ExperimentConfig::default().to_canonical();
        let heads: Vec<_> = canon.lines().filter(|l| l.starts_with('[')).collect();
        assert_eq!(
            heads,
            ["[material]", "[geometry]", "[drive]", "[thiele]", "[rotor]", "[lindblad]", "[transmon]", "[output]"]
        );
    }

    #[test]
    fn scientific_notation_and_integers_accepted() {
        let cfg = ExperimentConfig::parse("[drive]\ncurrent_density = 2e11\n[rotor]\nK2 = 50\n").unwrap();
        assert_eq!(cfg.drive().current_density, 2e11);
        assert_eq!(cfg.rotor().k2, 50.0);
    }

    #[test]
    fn syntax_errors_are_reported() {
        assert!(matches!(
            ExperimentConfig::parse("[material\nKu = 1"),
            Err(ConfigError::Syntax(_))
        ));
    }

    #[test]
    fn wrong_unit_tag_rejected() {
        let err = ExperimentConfig::parse("[rotor]\nunits = \"SI\"\n").unwrap_err();
        assert_eq!(err.violations()[0].key, "units");
    }

    proptest::proptest! {
        #[test]
        fn canonical_form_round_trips(
            ku in 0.0f64..3e6,
            dmi in -5e-3f64..5e-3,
            alpha in 1e-3f64..1.0,
            j in 1e-3f64..1e3,
            n in 2i64..500,
            z in proptest::collection::vec(1e-9f64..1e-6, 1..5),
        ) {
            let cfg = ExperimentConfig::default()
                .with(Section::Material, "Ku", Value::Float(ku)).unwrap()
                .with(Section::Material, "Dmi", Value::Float(dmi)).unwrap()
                .with(Section::Material, "alpha", Value::Float(alpha)).unwrap()
                .with(Section::Lindblad, "J", Value::Float(j)).unwrap()
                .with(Section::Lindblad, "t_points", Value::Int(n)).unwrap()
                .with(Section::Transmon, "dipole_z", Value::FloatList(z)).unwrap();
            let canon = cfg.to_canonical();
            let again = ExperimentConfig::parse(&canon).unwrap();
            proptest::prop_assert_eq!(&again, &cfg);
            proptest::prop_assert_eq!(again.canonical_hash(), cfg.canonical_hash());
        }
    }
}

