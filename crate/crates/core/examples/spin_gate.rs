//! Gate time at which the excited control ends disentangled from its qubits.

use sfgsim::spins::{sfg_gate, GateOptions, SpinSystem};
use sfgsim::Error;

fn main() -> sfgsim::Result<()> {
    let options = GateOptions::default();
    let symmetric = SpinSystem::star("C", &[("Q1", 10.0), ("Q2", 10.0)]);
    let g = sfg_gate(&symmetric, 0, &options)?;
    println!(
        "equal couplings: τ = {:.4} ps, residual {:.1e} bits, entangling power {:.4}",
        g.duration_ps, g.control_residual_entanglement, g.entangling_power
    );
    let unequal = SpinSystem::star("C1", &[("Q1", 38.75), ("Q2", 12.9)]);
    match sfg_gate(&unequal, 0, &options) {
        Ok(g) => println!("unequal couplings: clean gate at {:.4} ps", g.duration_ps),
        Err(Error::NoCleanGate { best }) => println!(
            "unequal couplings: best τ = {:.4} ps leaves {:.2e} bits on the control",
            best.duration_ps, best.control_residual_entanglement
        ),
        Err(e) => return Err(e),
    }
    Ok(())
}
