//! Full pipeline on the two-gate preset, then statistics over random patches.

use sfgsim::harness::{patch_statistics, run_feasibility, scenario_preset};

fn main() -> sfgsim::Result<()> {
    let report = run_feasibility(&scenario_preset("table1")?)?;
    println!(
        "table1: {} resolvable, {} usable gates",
        report.resolvable_gate_count, report.usable_gate_count
    );
    if let Some(a) = &report.adjacency {
        println!("adjacency recovered: {}", a.matches_ground_truth);
        for c in &a.calibrations {
            println!("  {} {:?}: fidelity {:?}", c.control, c.qubits, c.fidelity);
        }
    }
    let stats = patch_statistics(&scenario_preset("patch")?, 20, 3)?;
    println!(
        "patches: mean {:.1} dopants, {:.1} resolvable, {:.1} usable; {:.0}% reach {} usable gates",
        stats.mean_dopants,
        stats.mean_resolvable_gates,
        stats.mean_usable_gates,
        100.0 * stats.fraction_meeting_target,
        stats.gate_target
    );
    println!("histogram (usable gates, patches): {:?}", stats.histogram);
    Ok(())
}
