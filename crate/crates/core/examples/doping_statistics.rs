//! Chance that a dopant has 0, 1, 2 or more dopant neighbors within five shells.

use sfgsim::lattice::{neighbor_statistics, place_dopants, LatticeSpec, NeighborStatistics};

fn main() -> sfgsim::Result<()> {
    for c in [0.001, 0.005, 0.01, 0.02] {
        let region = place_dopants(&LatticeSpec::diamond(120.0), c, &[("P".into(), 1.0)], 11)?;
        let stats = neighbor_statistics(&region, 5)?;
        let a = NeighborStatistics::summary(&stats.analytic);
        let e = NeighborStatistics::summary(&stats.empirical);
        println!(
            "c = {:.3}: analytic {:.3} {:.3} {:.3} {:.3}  sampled ({} dopants) {:.3} {:.3} {:.3} {:.3}",
            c, a[0], a[1], a[2], a[3], stats.sampled_dopants, e[0], e[1], e[2], e[3]
        );
    }
    Ok(())
}
