//! Skyrmion diode transport and the quantum models built on it.
//!
//! * [`params`]: materials, derived length scales, drive and config file.
//! * [`geometry`]: T-junction track mask, distance field, confinement potential.
//! * [`micromag`]: 2D LLG solver with DMI, SOT/STT drive, topological charge.
//! * [`thiele`]: rigid-core Thiele dynamics and diode classification.
//! * [`lindblad`]: driven, decaying two-level system and fidelity maps.
//! * [`helicity`]: helicity quantum-rotor spectra and anharmonicity.
//! * [`transmon`]: flux-tunable transmon spectrum and dipole stray-field estimate.
//! * [`cli`]: subcommand runner writing CSV/SVG artifacts plus a manifest.

pub mod cli;
pub mod constants;
pub mod geometry;
pub mod helicity;
pub mod lindblad;
pub mod linalg;
pub mod micromag;
pub mod output;
pub mod params;
pub mod thiele;
pub mod transmon;
pub mod vec3;
