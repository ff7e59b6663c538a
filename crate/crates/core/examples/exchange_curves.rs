//! Control-qubit exchange with the control in its ground and excited state.

use sfgsim::donor::preset;
use sfgsim::integrals::{crossover_radius, exchange_curve_with, IntegralEngine, PAxis};

fn main() -> sfgsim::Result<()> {
    let engine = IntegralEngine::default();
    let r: Vec<f64> = (1..=8).map(|k| 4.0 * k as f64).collect();
    for name in ["P-control", "P-control-soft"] {
        let control = preset(name).expect("built in");
        let qubit = control.clone();
        let ground = exchange_curve_with(&engine, &control, &qubit, false, &r, PAxis::Averaged)?;
        let excited = exchange_curve_with(&engine, &control, &qubit, true, &r, PAxis::Averaged)?;
        println!("{name}");
        for ((g, e), r) in ground.iter().zip(&excited).zip(&r) {
            println!("  R = {r:>4.1} Å  1s-1s {:>10.4} meV  2p-1s {:>10.4} meV", g.exchange_splitting, e.exchange_splitting);
        }
        if let Some(x) = crossover_radius(&engine, &control, &qubit, PAxis::Averaged, 3.0, 40.0)? {
            println!("  excited exchange dominates beyond {x:.2} Å");
        }
    }
    Ok(())
}
