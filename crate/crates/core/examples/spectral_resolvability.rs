//! How many gates can be told apart by wavelength as the inhomogeneous width grows.

use sfgsim::spectra::{resolvable_count_statistics, SpectralModel};

fn main() -> sfgsim::Result<()> {
    for ratio in [2.0, 5.0, 10.0, 14.0, 20.0, 40.0] {
        let model = SpectralModel::with_ratio(1.0, ratio, 1.5);
        let s = resolvable_count_statistics(&model, 20, 1000, 5)?;
        println!("δi/δh = {ratio:>4.0}: {:.2} ± {:.2} of 20 lines resolvable", s.mean, s.std_dev);
    }
    let nv = SpectralModel::shen_nv();
    println!(
        "NV-like preset: δh = {:.2} meV, δi = {:.2} meV, ratio {:.1}",
        nv.homogeneous_width,
        nv.inhomogeneous_width(),
        nv.broadening_ratio()
    );
    Ok(())
}
