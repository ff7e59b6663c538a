//! Bonding and antibonding transition energies of two nearby controls.

use sfgsim::donor::preset;
use sfgsim::integrals::transfer_splitting_curve;

fn main() -> sfgsim::Result<()> {
    let control = preset("P-control").expect("built in");
    let r: Vec<f64> = (2..=8).map(|k| 5.0 * k as f64).collect();
    for p in transfer_splitting_curve(&control, &r)? {
        println!(
            "R = {:>4.1} Å  {:>7.2} / {:>7.2} meV  splitting {:>6.2} meV",
            p.separation, p.lower, p.upper, p.splitting
        );
    }
    Ok(())
}
