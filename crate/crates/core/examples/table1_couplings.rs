//! The two-gate, three-qubit arrangement: exchange table and effective couplings.

use sfgsim::harness::{run_feasibility, scenario_preset, Stages};

fn main() -> sfgsim::Result<()> {
    let mut s = scenario_preset("table1")?;
    s.stages = Stages {
        gate_dynamics: false,
        configuration: false,
    };
    let report = run_feasibility(&s)?;
    for row in &report.exchange {
        println!(
            "{}-{}  R = {:>5.2} Å  J = {:>9.4} meV",
            row.control, row.qubit, row.separation_angstrom, row.j_mev
        );
    }
    for g in &report.gates {
        let qubits: Vec<&str> = g.couplings.iter().map(|c| c.0.as_str()).collect();
        println!(
            "gate {} on {:?}: J_eff = {:.3} meV, πħ/J_eff = {:.2} ps",
            g.control,
            qubits,
            g.j_eff.unwrap_or(f64::NAN),
            g.gate_time_ps.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
