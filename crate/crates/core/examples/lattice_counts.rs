//! Site counts in spheres around a lattice site and the first neighbor shells.

use sfgsim::lattice::{shell_sizes, sphere_count, LatticeSpec};

fn main() -> sfgsim::Result<()> {
    let spec = LatticeSpec::diamond(0.0);
    println!("radius/Å  sites  continuum");
    for r in [10.0, 18.0, 25.0] {
        let c = sphere_count(&spec, r)?;
        println!("{:>8.1} {:>6} {:>10.0}", c.radius, c.sites, c.continuum_estimate);
    }
    let shells = shell_sizes(&LatticeSpec::diamond(10.0), 5)?;
    for (k, s) in shells.shells.iter().enumerate() {
        println!("shell {}: {:.3} Å, {} sites", k + 1, s.radius, s.site_count);
    }
    println!("first five shells: {} sites", shells.total_sites());
    Ok(())
}
