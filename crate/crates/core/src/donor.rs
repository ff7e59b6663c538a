//! Effective-mass parameters of dopant species.
//!
//! A donor is treated as a hydrogen atom with electron mass m* and a
//! Coulomb interaction screened by the dielectric constant ε. Its binding
//! energy is then the Rydberg scaled by (m*/m₀)/ε² and its Bohr radius is
//! a₀·ε/(m*/m₀). Only the Coulombic part of the binding enters the radius;
//! any central-cell correction is carried as a separate energy split.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{BOHR_MAGNETON, BOHR_RADIUS, BOLTZMANN, RYDBERG};

/// Static dielectric constant of diamond.
pub const DIAMOND_DIELECTRIC: f64 = 5.7;

/// Catalog schema version understood by [`DonorCatalog`].
pub const CATALOG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Qubit,
    Control,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DonorModel {
    pub species_name: String,
    pub role: Role,
    /// Total binding energy R_eff in meV.
    pub binding_energy: f64,
    /// Part of the binding that is not Coulombic, in meV.
    pub central_cell_split: f64,
    pub dielectric_constant: f64,
    /// Effective Bohr radius a* in Å, set by the Coulombic binding.
    pub effective_bohr_radius: f64,
    /// Orbital radius relative to a*; below 1 for compact qubits.
    pub radius_scale_factor: f64,
    pub spin: f64,
    /// Spin-lattice relaxation time in ps.
    pub t1: f64,
    /// Spin coherence time in ps.
    pub t2: f64,
}

impl DonorModel {
    pub fn coulombic_binding(&self) -> f64 {
        self.binding_energy - self.central_cell_split
    }

    /// m*/m₀ implied by the Coulombic binding and ε.
    pub fn effective_mass_ratio(&self) -> f64 {
        self.dielectric_constant.powi(2) * self.coulombic_binding() / RYDBERG
    }

    /// Radius of the ground-state orbital actually used for this species, in Å.
    pub fn orbital_radius(&self) -> f64 {
        self.effective_bohr_radius * self.radius_scale_factor
    }

    pub fn with_radius_scale(mut self, factor: f64) -> Self {
        self.radius_scale_factor = factor;
        self
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.species_name = name.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(format!("{}: {m}", self.species_name)));
        if !(self.binding_energy > 0.0) {
            return bad(format!("binding energy must be positive, got {}", self.binding_energy));
        }
        if !(self.central_cell_split >= 0.0 && self.central_cell_split < self.binding_energy) {
            return bad(format!(
                "central-cell split {} outside [0, {})",
                self.central_cell_split, self.binding_energy
            ));
        }
        if !(self.dielectric_constant > 1.0) {
            return bad(format!("dielectric constant must exceed 1, got {}", self.dielectric_constant));
        }
        if !(self.effective_bohr_radius > 0.0) {
            return bad("effective Bohr radius must be positive".into());
        }
        if !(self.radius_scale_factor > 0.0 && self.radius_scale_factor <= 1.0) {
            return bad(format!("radius scale factor {} outside (0, 1]", self.radius_scale_factor));
        }
        if (2.0 * self.spin).fract() != 0.0 || self.spin <= 0.0 {
            return bad(format!("spin {} is not a positive half-integer", self.spin));
        }
        if !(self.t1 > 0.0 && self.t2 > 0.0) {
            return bad("relaxation times must be positive".into());
        }
        Ok(())
    }
}

/// Builds a donor from its ionization energy (meV), dielectric constant and
/// central-cell split (meV).
pub fn model_from_ionization(
    species_name: impl Into<String>,
    role: Role,
    binding_energy: f64,
    dielectric_constant: f64,
    central_cell_split: f64,
) -> Result<DonorModel> {
    let species_name = species_name.into();
    let coulombic = binding_energy - central_cell_split;
    if !(coulombic > 0.0) || central_cell_split < 0.0 {
        return Err(Error::InvalidModel(format!(
            "{species_name}: Coulombic binding {coulombic} meV must be positive"
        )));
    }
    if !(dielectric_constant > 1.0) {
        return Err(Error::InvalidModel(format!(
            "{species_name}: dielectric constant must exceed 1"
        )));
    }
    let mass_ratio = dielectric_constant.powi(2) * coulombic / RYDBERG;
    let model = DonorModel {
        species_name,
        role,
        binding_energy,
        central_cell_split,
        dielectric_constant,
        effective_bohr_radius: BOHR_RADIUS * dielectric_constant / mass_ratio,
        radius_scale_factor: 1.0,
        spin: 0.5,
        t1: DEFAULT_T1,
        t2: DEFAULT_T1,
    };
    model.validate()?;
    Ok(model)
}

/// Builds a donor from bound-exciton data via the Haynes rule: the donor
/// binding is the exciton binding divided by `haynes_factor`.
pub fn model_from_exciton(
    species_name: impl Into<String>,
    role: Role,
    exciton_binding: f64,
    haynes_factor: f64,
    dielectric_constant: f64,
    central_cell_split: f64,
) -> Result<DonorModel> {
    if !(exciton_binding > 0.0) {
        return Err(Error::InvalidModel("exciton binding must be positive".into()));
    }
    if !(haynes_factor > 0.0 && haynes_factor < 1.0) {
        return Err(Error::InvalidModel(format!(
            "Haynes factor {haynes_factor} outside (0, 1)"
        )));
    }
    model_from_ionization(
        species_name,
        role,
        exciton_binding / haynes_factor,
        dielectric_constant,
        central_cell_split,
    )
}

/// 1 ms, the room-temperature spin-lattice time of substitutional N.
pub const DEFAULT_T1: f64 = 1e-3 * crate::units::PS_PER_S;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeemanCheck {
    pub g_factor: f64,
    /// Tesla.
    pub field: f64,
    /// Kelvin.
    pub temperature: f64,
    /// gμ_B·B / k_B·T.
    pub ratio: f64,
    /// Thermal spin polarization tanh(ratio/2).
    pub polarization: f64,
}

pub fn zeeman_check(g_factor: f64, field: f64, temperature: f64) -> Result<ZeemanCheck> {
    if !(temperature > 0.0) {
        return Err(Error::Precondition(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let ratio = g_factor * BOHR_MAGNETON * field / (BOLTZMANN * temperature);
    Ok(ZeemanCheck {
        g_factor,
        field,
        temperature,
        ratio,
        polarization: (ratio / 2.0).tanh(),
    })
}

/// P ionization energy predicted from bound-exciton and boron-acceptor data
/// (Nakazawa et al. 2001), in meV. Kept for comparison only.
pub const NAKAZAWA_P_IONIZATION: f64 = 605.0;

/// The built-in species.
pub fn builtin_presets() -> Vec<DonorModel> {
    let p = model_from_ionization("P-control", Role::Control, 600.0, DIAMOND_DIELECTRIC, 0.0)
        .expect("valid preset");
    let p_soft =
        model_from_ionization("P-control-soft", Role::Control, 600.0, DIAMOND_DIELECTRIC, 200.0)
            .expect("valid preset");
    // EMT is not valid for N_s or NV⁻; both are represented by the P
    // envelope shrunk to half its radius.
    let n = p
        .clone()
        .with_name("N-qubit")
        .with_role(Role::Qubit)
        .with_radius_scale(0.5);
    let nv = n.clone().with_name("NV-qubit");
    vec![p, p_soft, n, nv]
}

pub fn preset(name: &str) -> Option<DonorModel> {
    builtin_presets().into_iter().find(|m| m.species_name == name)
}

/// Versioned species catalog, stored as TOML:
///
/// ```toml
/// catalog_version = 1
///
/// [[species]]
/// species_name = "P-control"
/// role = "control"
/// binding_energy = 600.0        # meV
/// central_cell_split = 0.0      # meV
/// dielectric_constant = 5.7
/// effective_bohr_radius = 2.1   # Å
/// radius_scale_factor = 1.0
/// spin = 0.5
/// t1 = 1e9                      # ps
/// t2 = 1e9                      # ps
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DonorCatalog {
    pub catalog_version: u32,
    pub species: Vec<DonorModel>,
}

impl DonorCatalog {
    pub fn builtin() -> Self {
        DonorCatalog {
            catalog_version: CATALOG_VERSION,
            species: builtin_presets(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&DonorModel> {
        self.species.iter().find(|m| m.species_name == name)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("catalog serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let catalog: DonorCatalog = toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or((0, 0));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        if catalog.catalog_version != CATALOG_VERSION {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!(
                    "unsupported catalog_version {} (expected {CATALOG_VERSION})",
                    catalog.catalog_version
                ),
            });
        }
        for m in &catalog.species {
            m.validate()?;
        }
        Ok(catalog)
    }
}

pub(crate) fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}
