//! Effective-mass donor parameters and the built-in species.

use sfgsim::donor::{builtin_presets, model_from_ionization, Role, DIAMOND_DIELECTRIC};
use sfgsim::integrals::transition_energy;

fn main() -> sfgsim::Result<()> {
    let full = model_from_ionization("P", Role::Control, 600.0, DIAMOND_DIELECTRIC, 0.0)?;
    let soft = model_from_ionization("P-soft", Role::Control, 600.0, DIAMOND_DIELECTRIC, 200.0)?;
    println!("a* = {:.3} Å (600 meV Coulombic)", full.effective_bohr_radius);
    println!(
        "a* = {:.3} Å (400 meV Coulombic), ratio {:.3}",
        soft.effective_bohr_radius,
        soft.effective_bohr_radius / full.effective_bohr_radius
    );
    for m in builtin_presets() {
        println!(
            "{:<15} {:?} radius {:.2} Å, 1s→2p {:.1} meV",
            m.species_name,
            m.role,
            m.orbital_radius(),
            transition_energy(&m)
        );
    }
    Ok(())
}
