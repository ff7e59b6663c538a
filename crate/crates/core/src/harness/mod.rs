//! Scenario files, built-in presets, the feasibility pipeline and output
//! helpers shared by the command-line tool.

mod feasibility;
mod presets;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::configure::EprModel;
use crate::donor::DonorModel;
use crate::error::{Error, Result};
use crate::integrals::{PAxis, DEFAULT_TERMS};
use crate::lattice::LatticeSpec;
use crate::spectra::SpectralModel;
use crate::spins::DEFAULT_RESIDUAL_THRESHOLD;

pub use feasibility::{
    patch_statistics, run_feasibility, AdjacencyOutcome, CalibrationSummary, ExchangeRow,
    FeasibilityReport, GateDynamics, GateSummary, PatchStatistics, ResolvedDopant, scenario_scan_inputs,
};
pub use presets::{
    exchange_curve_preset, preset_catalog, scenario_preset, splitting_curve_preset,
    ExchangeCurvePreset, PresetInfo, PresetKind, SplittingCurvePreset,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dopant {
    pub label: String,
    pub species: String,
    /// Å.
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPlacement {
    /// Atomic fraction of lattice sites occupied.
    pub concentration: f64,
    /// (species, fraction) pairs summing to 1.
    pub mix: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Placements {
    Explicit(Vec<Dopant>),
    /// Lattice sites inside the lattice bounding radius, drawn with the
    /// scenario seed.
    Random(RandomPlacement),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExchangeSettings {
    #[serde(default = "default_axis")]
    pub axis: PAxis,
    #[serde(default = "default_terms")]
    pub n_terms: usize,
    /// ΔE in J₁J₂/ΔE, meV.
    pub excitation_energy: f64,
    /// Pairs farther apart than this (Å) are taken as uncoupled.
    pub cutoff: f64,
}

fn default_axis() -> PAxis {
    PAxis::Averaged
}

fn default_terms() -> usize {
    DEFAULT_TERMS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Smallest excited-state coupling (meV) that makes a qubit part of a gate.
    pub detection: f64,
    /// Largest acceptable control residual entanglement, bits.
    #[serde(default = "default_residual")]
    pub gate_residual: f64,
}

fn default_residual() -> f64 {
    DEFAULT_RESIDUAL_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    pub n_qubits: usize,
    pub n_gates: usize,
}

/// Optional, slower parts of the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stages {
    /// Run the exact gate search for every two-qubit gate.
    pub gate_dynamics: bool,
    /// Simulate the configuration scan and infer adjacency from it.
    pub configuration: bool,
}

impl Default for Stages {
    fn default() -> Self {
        Stages {
            gate_dynamics: true,
            configuration: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub notes: Vec<String>,
    pub lattice: LatticeSpec,
    pub species: Vec<DonorModel>,
    pub placements: Placements,
    pub spectral: SpectralModel,
    #[serde(default)]
    pub epr: EprModel,
    pub exchange: ExchangeSettings,
    pub thresholds: Thresholds,
    pub targets: Targets,
    pub seed: u64,
    #[serde(default)]
    pub stages: Stages,
}

impl Scenario {
    pub fn species(&self, name: &str) -> Option<&DonorModel> {
        self.species.iter().find(|s| s.species_name == name)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        self.lattice.validate()?;
        for s in &self.species {
            s.validate()?;
        }
        let mut names: Vec<&str> = self.species.iter().map(|s| s.species_name.as_str()).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return bad("species names must be unique".into());
        }
        match &self.placements {
            Placements::Explicit(list) => {
                for d in list {
                    if self.species(&d.species).is_none() {
                        return bad(format!("dopant {} uses undeclared species {}", d.label, d.species));
                    }
                    if d.position.iter().any(|x| !x.is_finite()) {
                        return bad(format!("dopant {} has a non-finite position", d.label));
                    }
                }
                let mut labels: Vec<&str> = list.iter().map(|d| d.label.as_str()).collect();
                labels.sort();
                if labels.windows(2).any(|w| w[0] == w[1]) {
                    return bad("dopant labels must be unique".into());
                }
            }
            Placements::Random(r) => {
                if !(0.0..=1.0).contains(&r.concentration) {
                    return bad(format!("concentration {} is outside [0, 1]", r.concentration));
                }
                for (name, _) in &r.mix {
                    if self.species(name).is_none() {
                        return bad(format!("placement mix uses undeclared species {name}"));
                    }
                }
            }
        }
        self.spectral.validate()?;
        self.epr.validate()?;
        if !(self.exchange.excitation_energy > 0.0) || !(self.exchange.cutoff > 0.0) {
            return bad("excitation energy and cutoff must be positive".into());
        }
        if self.exchange.n_terms < 3 {
            return bad("at least three Gaussian terms are needed".into());
        }
        if !(self.thresholds.detection > 0.0) || !(self.thresholds.gate_residual >= 0.0) {
            return bad("thresholds must be positive".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses and validates a scenario from JSON text.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text).map_err(parse_error)?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<()> {
    std::fs::write(path, scenario.to_json() + "\n")?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Writes flat records as CSV (with header) or as a JSON array.
pub fn write_records<T: Serialize, W: std::io::Write>(records: &[T], format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, records).map_err(|e| Error::Io(e.into()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Writes one value as pretty JSON.
pub fn write_json<T: Serialize, W: std::io::Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}
