use serde::Serialize;

use super::{
    Dopant, ExchangeSettings, Placements, RandomPlacement, Scenario, Stages, Targets, Thresholds,
    SCHEMA_VERSION,
};
use crate::configure::EprModel;
use crate::donor::{preset, DonorModel};
use crate::error::{Error, Result};
use crate::integrals::{transition_energy, PAxis, DEFAULT_TERMS};
use crate::lattice::LatticeSpec;
use crate::spectra::SpectralModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetKind {
    Scenario,
    ExchangeCurve,
    SplittingCurve,
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub kind: PresetKind,
    pub description: &'static str,
}

pub fn preset_catalog() -> Vec<PresetInfo> {
    vec![
        PresetInfo {
            name: "table1",
            kind: PresetKind::Scenario,
            description: "two P controls and three N qubits, a = 12 Å, d = 9 Å",
        },
        PresetInfo {
            name: "patch",
            kind: PresetKind::Scenario,
            description: "random P/N patch 20 nm across, about 200 dopants, NV-like spectra",
        },
        PresetInfo {
            name: "empty",
            kind: PresetKind::Scenario,
            description: "no dopants",
        },
        PresetInfo {
            name: "fig2a",
            kind: PresetKind::ExchangeCurve,
            description: "control-qubit exchange, 0.6 eV Coulombic control, qubit at full and half radius",
        },
        PresetInfo {
            name: "fig2b",
            kind: PresetKind::ExchangeCurve,
            description: "as fig2a with 0.4 eV Coulombic binding plus central cell",
        },
        PresetInfo {
            name: "fig3",
            kind: PresetKind::SplittingCurve,
            description: "bonding/antibonding transition energies of two P controls",
        },
        PresetInfo {
            name: "shen-nv",
            kind: PresetKind::Spectral,
            description: "0.36 nm homogeneous, 5 nm inhomogeneous at 637 nm, k = 1.5",
        },
    ]
}

fn species(name: &str) -> DonorModel {
    preset(name).expect("built-in species")
}

/// Spectral model used by the scenario presets: NV-like widths around the
/// P-control 1s → 2p line.
fn control_spectra() -> SpectralModel {
    SpectralModel::shen_nv().centred_at(transition_energy(&species("P-control")))
}

fn base(name: &str, lattice_radius: f64, placements: Placements) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        notes: Vec::new(),
        lattice: LatticeSpec::diamond(lattice_radius),
        species: vec![species("P-control"), species("N-qubit")],
        placements,
        spectral: control_spectra(),
        epr: EprModel::default(),
        exchange: ExchangeSettings {
            axis: PAxis::Averaged,
            n_terms: DEFAULT_TERMS,
            excitation_energy: 600.0,
            cutoff: 50.0,
        },
        thresholds: Thresholds {
            detection: 1.0,
            gate_residual: 0.02,
        },
        targets: Targets {
            n_qubits: 3,
            n_gates: 2,
        },
        seed: 1,
        stages: Stages::default(),
    }
}

fn dopant(label: &str, species: &str, x: f64, y: f64) -> Dopant {
    Dopant {
        label: label.into(),
        species: species.into(),
        position: [x, y, 0.0],
    }
}

fn table1() -> Scenario {
    let (a, d) = (12.0, 9.0);
    let placements = Placements::Explicit(vec![
        dopant("C1", "P-control", -a, 0.0),
        dopant("C2", "P-control", a, 0.0),
        dopant("Q1", "N-qubit", -a - d, d / 2.0),
        dopant("Q2", "N-qubit", -0.1 * a, d),
        dopant("Q3", "N-qubit", a, -d),
    ]);
    let mut s = base("table1", 40.0, placements);
    s.notes = vec![
        "a = 12 Å and d = 9 Å; a table caption elsewhere quotes a = 10 Å, but only a = 12 Å reproduces the separation column".into(),
        "qubits are P envelopes at half radius".into(),
        "exactly clean gates need equal couplings, so the residual threshold is 0.02 bits".into(),
    ];
    s
}

fn patch() -> Scenario {
    let mut s = base(
        "patch",
        100.0,
        Placements::Random(RandomPlacement {
            concentration: 2.7e-4,
            mix: vec![("P-control".into(), 0.25), ("N-qubit".into(), 0.75)],
        }),
    );
    s.targets = Targets {
        n_qubits: 20,
        n_gates: 10,
    };
    s.stages = Stages {
        gate_dynamics: false,
        configuration: false,
    };
    s.notes = vec!["about 200 dopants in a sphere of radius 100 Å".into()];
    s
}

fn empty() -> Scenario {
    let mut s = base("empty", 10.0, Placements::Explicit(Vec::new()));
    s.targets = Targets {
        n_qubits: 0,
        n_gates: 0,
    };
    s
}

pub fn scenario_preset(name: &str) -> Result<Scenario> {
    match name {
        "table1" => Ok(table1()),
        "patch" => Ok(patch()),
        "empty" => Ok(empty()),
        other => Err(Error::Precondition(format!("no scenario preset named {other}"))),
    }
}

/// Exchange curve inputs. The qubit is also evaluated at half radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchangeCurvePreset {
    pub control: DonorModel,
    pub qubit: DonorModel,
    pub axis: PAxis,
    /// Å.
    pub r_grid: Vec<f64>,
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

pub fn exchange_curve_preset(name: &str) -> Result<ExchangeCurvePreset> {
    let control = match name {
        "fig2a" => species("P-control"),
        "fig2b" => species("P-control-soft"),
        other => return Err(Error::Precondition(format!("no exchange curve preset named {other}"))),
    };
    let qubit = control.clone().with_name("qubit").with_role(crate::donor::Role::Qubit);
    Ok(ExchangeCurvePreset {
        control,
        qubit,
        axis: PAxis::Averaged,
        r_grid: grid(2.0, 40.0, 0.5),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingCurvePreset {
    pub control: DonorModel,
    pub r_grid: Vec<f64>,
}

pub fn splitting_curve_preset(name: &str) -> Result<SplittingCurvePreset> {
    match name {
        "fig3" => Ok(SplittingCurvePreset {
            control: species("P-control"),
            r_grid: grid(4.0, 40.0, 0.5),
        }),
        other => Err(Error::Precondition(format!("no splitting curve preset named {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
        (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn table1_separations() {
        let s = table1();
        let Placements::Explicit(list) = &s.placements else { panic!() };
        let mut seps: Vec<f64> = list[..2]
            .iter()
            .flat_map(|c| list[2..].iter().map(move |q| dist(c.position, q.position)))
            .collect();
        seps.sort_by(f64::total_cmp);
        for (got, want) in seps.iter().zip([9.0, 10.1, 14.1, 16.0, 25.6, 33.3]) {
            assert!((got - want).abs() < 0.1, "{got} vs {want}");
        }
    }

    #[test]
    fn catalog_names_resolve() {
        for p in preset_catalog() {
            let ok = match p.kind {
                PresetKind::Scenario => scenario_preset(p.name).is_ok(),
                PresetKind::ExchangeCurve => exchange_curve_preset(p.name).is_ok(),
                PresetKind::SplittingCurve => splitting_curve_preset(p.name).is_ok(),
                PresetKind::Spectral => p.name == "shen-nv",
            };
            assert!(ok, "{}", p.name);
        }
        assert!(scenario_preset("nope").is_err());
    }
}
