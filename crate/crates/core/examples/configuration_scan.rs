//! Reading gate adjacency back from a simulated optical/EPR scan.

use sfgsim::configure::{infer_adjacency, matches_ground_truth, separable_random_inputs, simulate_scan, EprModel};
use sfgsim::spectra::SpectralModel;

fn main() -> sfgsim::Result<()> {
    let model = SpectralModel::shen_nv();
    let epr = EprModel::default();
    let threshold = 1.0;
    let mut recovered = 0;
    for seed in 0..20 {
        let inputs = separable_random_inputs(seed, threshold, model.homogeneous_width, model.resolution_factor, &epr);
        let scan = simulate_scan(&inputs, &epr)?;
        let hypothesis = infer_adjacency(&scan, threshold)?;
        if matches_ground_truth(&hypothesis, &inputs, threshold) {
            recovered += 1;
        }
        if seed == 0 {
            for g in &hypothesis.gates {
                let qs: Vec<String> = g.qubits.iter().map(|c| format!("{} ({:.2} meV)", c.qubit, c.coupling)).collect();
                println!("line at {:.3} meV moves {}", g.optical_energy, qs.join(", "));
            }
        }
    }
    println!("{recovered}/20 arrangements recovered");
    Ok(())
}
