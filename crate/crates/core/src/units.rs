//! Physical constants and unit conversions.
//!
//! The crate works in Å, meV, ps, tesla and kelvin. Conversions from other
//! units (eV, nm, seconds) only happen when presets are constructed.

/// Bohr radius in Å.
pub const BOHR_RADIUS: f64 = 0.529_177_210_9;

/// Hydrogen Rydberg in meV.
pub const RYDBERG: f64 = 13_605.693_12;

/// Bohr magneton in meV/T.
pub const BOHR_MAGNETON: f64 = 5.788_381_806e-2;

/// Boltzmann constant in meV/K.
pub const BOLTZMANN: f64 = 8.617_333_262e-2;

/// Reduced Planck constant in meV·ps.
pub const HBAR: f64 = 0.658_211_956_9;

/// h·c in meV·nm.
pub const HC: f64 = 1_239_841.984;

pub const MEV_PER_EV: f64 = 1000.0;

pub const PS_PER_S: f64 = 1e12;

/// Photon energy (meV) of a line at `wavelength_nm`.
pub fn photon_energy(wavelength_nm: f64) -> f64 {
    HC / wavelength_nm
}

/// Energy width (meV) of a spectral width `dlambda_nm` measured at `wavelength_nm`.
pub fn wavelength_width_to_energy(dlambda_nm: f64, wavelength_nm: f64) -> f64 {
    HC * dlambda_nm / (wavelength_nm * wavelength_nm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rydberg_and_bohr_give_coulomb_constant() {
        // e²/(4πε₀) = 2 Ry a₀ = 14.3996 eV·Å
        assert!((2.0 * RYDBERG * BOHR_RADIUS / 1000.0 - 14.399_645).abs() < 1e-4);
    }

    #[test]
    fn width_conversion_matches_direct_difference() {
        let lambda = 637.0;
        let direct = photon_energy(lambda - 0.05) - photon_energy(lambda + 0.05);
        assert!((wavelength_width_to_energy(0.1, lambda) - direct).abs() < 1e-6);
    }
}
