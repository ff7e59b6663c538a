//! Diamond lattice geometry and random doping.
//!
//! Sites are addressed by integer coordinates in units of a/4, where `a` is
//! the conventional cubic lattice constant. The diamond structure is the set
//! of points whose coordinates are all even with a sum divisible by 4 (the
//! fcc sublattice) or all odd with a sum congruent to 3 mod 4 (the second
//! sublattice, displaced by a(1,1,1)/4). Shells are identified by the exact
//! integer squared distance, so no floating point merging ever happens.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard diamond lattice constant in Å.
pub const DIAMOND_LATTICE_CONSTANT: f64 = 3.567;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OriginConvention {
    /// Sphere centred on a lattice site; the centre site is counted.
    #[default]
    AtomCentered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub lattice_constant: f64,
    #[serde(default)]
    pub origin_convention: OriginConvention,
    pub bounding_radius: f64,
}

impl LatticeSpec {
    pub fn diamond(bounding_radius: f64) -> Self {
        LatticeSpec {
            lattice_constant: DIAMOND_LATTICE_CONSTANT,
            origin_convention: OriginConvention::AtomCentered,
            bounding_radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lattice_constant > 0.0) || !self.lattice_constant.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "lattice constant must be positive, got {}",
                self.lattice_constant
            )));
        }
        if !(self.bounding_radius >= 0.0) || !self.bounding_radius.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "bounding radius must be non-negative, got {}",
                self.bounding_radius
            )));
        }
        Ok(())
    }

    /// Length of one integer coordinate step (a/4) in Å.
    pub fn unit(&self) -> f64 {
        self.lattice_constant / 4.0
    }

    /// Largest integer squared distance (in units of (a/4)²) inside `radius`.
    fn max_d2(&self, radius: f64) -> i64 {
        let r = radius / self.unit();
        // tolerate rounding on radii that sit exactly on a shell
        (r * r * (1.0 + 1e-12)).floor() as i64
    }

    pub fn position(&self, coords: [i32; 3]) -> [f64; 3] {
        let u = self.unit();
        [coords[0] as f64 * u, coords[1] as f64 * u, coords[2] as f64 * u]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub index: usize,
    pub coords: [i32; 3],
    pub position: [f64; 3],
}

pub fn is_diamond_site(c: [i32; 3]) -> bool {
    let sum = c[0] + c[1] + c[2];
    let even = c.iter().all(|x| x.rem_euclid(2) == 0);
    let odd = c.iter().all(|x| x.rem_euclid(2) == 1);
    (even && sum.rem_euclid(4) == 0) || (odd && sum.rem_euclid(4) == 3)
}

fn d2(c: [i32; 3]) -> i64 {
    c.iter().map(|&x| (x as i64) * (x as i64)).sum()
}

/// Visits every diamond site with integer squared distance `<= max_d2`, in
/// lexicographic (x, y, z) order.
fn for_each_site(max_d2: i64, mut f: impl FnMut([i32; 3])) {
    let n = (max_d2 as f64).sqrt().floor() as i32;
    for x in -n..=n {
        let rx = (x as i64) * (x as i64);
        if rx > max_d2 {
            continue;
        }
        for y in -n..=n {
            if (x - y).rem_euclid(2) != 0 {
                continue;
            }
            let rxy = rx + (y as i64) * (y as i64);
            if rxy > max_d2 {
                continue;
            }
            let zmax = ((max_d2 - rxy) as f64).sqrt().floor() as i32;
            // z must share the parity of x
            let mut z = -zmax;
            if (z - x).rem_euclid(2) != 0 {
                z += 1;
            }
            while z <= zmax {
                let c = [x, y, z];
                if d2(c) <= max_d2 && is_diamond_site(c) {
                    f(c);
                }
                z += 2;
            }
        }
    }
}

/// All lattice sites with |position| ≤ bounding radius, origin included,
/// in lexicographic coordinate order.
pub fn enumerate_sites(spec: &LatticeSpec) -> Result<Vec<Site>> {
    spec.validate()?;
    let mut sites = Vec::new();
    for_each_site(spec.max_d2(spec.bounding_radius), |c| {
        sites.push(Site {
            index: sites.len(),
            coords: c,
            position: spec.position(c),
        })
    });
    Ok(sites)
}

/// Number of sites within `radius` of the origin site (centre counted).
pub fn sites_within(spec: &LatticeSpec, radius: f64) -> Result<usize> {
    spec.validate()?;
    let mut n = 0usize;
    for_each_site(spec.max_d2(radius), |_| n += 1);
    Ok(n)
}

/// Number of sites a uniform density of 8/a³ would put in a sphere of
/// `radius`. This is a volume estimate, not a lattice count.
pub fn continuum_site_estimate(spec: &LatticeSpec, radius: f64) -> f64 {
    let density = 8.0 / spec.lattice_constant.powi(3);
    density * 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereCount {
    pub radius: f64,
    pub sites: usize,
    pub includes_center: bool,
    pub continuum_estimate: f64,
}

pub fn sphere_count(spec: &LatticeSpec, radius: f64) -> Result<SphereCount> {
    Ok(SphereCount {
        radius,
        sites: sites_within(spec, radius)?,
        includes_center: true,
        continuum_estimate: continuum_site_estimate(spec, radius),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub radius: f64,
    /// Squared radius in units of (a/4)².
    pub d2: i64,
    pub site_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellTable {
    pub shells: Vec<Shell>,
}

impl ShellTable {
    pub fn total_sites(&self) -> usize {
        self.shells.iter().map(|s| s.site_count).sum()
    }

    pub fn outer_d2(&self) -> i64 {
        self.shells.last().map_or(0, |s| s.d2)
    }
}

/// The first `n_shells` distinct neighbor distances from the origin site.
pub fn shell_sizes(spec: &LatticeSpec, n_shells: usize) -> Result<ShellTable> {
    spec.validate()?;
    if n_shells == 0 {
        return Err(Error::Precondition("n_shells must be at least 1".into()));
    }
    let mut hist: BTreeMap<i64, usize> = BTreeMap::new();
    for_each_site(spec.max_d2(spec.bounding_radius), |c| {
        let r2 = d2(c);
        if r2 > 0 {
            *hist.entry(r2).or_default() += 1;
        }
    });
    if hist.len() < n_shells {
        return Err(Error::InsufficientRegion {
            radius: spec.bounding_radius,
            requested: n_shells,
            available: hist.len(),
        });
    }
    let shells = hist
        .into_iter()
        .take(n_shells)
        .map(|(r2, count)| Shell {
            radius: (r2 as f64).sqrt() * spec.unit(),
            d2: r2,
            site_count: count,
        })
        .collect();
    Ok(ShellTable { shells })
}

/// Integer offsets of every site in the first `n_shells` shells.
pub fn shell_offsets(n_shells: usize) -> Result<Vec<[i32; 3]>> {
    // grow the search sphere until enough shells are complete
    let mut radius_units = 4i64;
    loop {
        let spec = LatticeSpec {
            lattice_constant: 4.0,
            origin_convention: OriginConvention::AtomCentered,
            bounding_radius: radius_units as f64,
        };
        match shell_sizes(&spec, n_shells) {
            Ok(table) => {
                let outer = table.outer_d2();
                let mut offsets = Vec::with_capacity(table.total_sites());
                for_each_site(outer, |c| {
                    if d2(c) > 0 {
                        offsets.push(c)
                    }
                });
                return Ok(offsets);
            }
            Err(Error::InsufficientRegion { .. }) => radius_units *= 2,
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub site_index: usize,
    pub coords: [i32; 3],
    pub species: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DopedRegion {
    pub spec: LatticeSpec,
    pub placements: Vec<Placement>,
    /// Realized atomic fraction: placements / enumerated sites.
    pub concentration: f64,
    /// Occupation probability that generated the placements.
    pub nominal_concentration: f64,
    pub site_count: usize,
    pub seed: u64,
}

impl DopedRegion {
    pub fn position(&self, p: &Placement) -> [f64; 3] {
        self.spec.position(p.coords)
    }
}

/// Independently occupies each site with probability `concentration`; the
/// species of an occupied site is drawn from `species_mix`.
pub fn place_dopants(
    spec: &LatticeSpec,
    concentration: f64,
    species_mix: &[(String, f64)],
    seed: u64,
) -> Result<DopedRegion> {
    spec.validate()?;
    if !(concentration > 0.0 && concentration <= 1.0) {
        return Err(Error::Precondition(format!(
            "concentration must lie in (0, 1], got {concentration}"
        )));
    }
    if species_mix.is_empty() {
        return Err(Error::Precondition("species mix is empty".into()));
    }
    let total: f64 = species_mix.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > 1e-9 || species_mix.iter().any(|(_, w)| *w < 0.0) {
        return Err(Error::Precondition(format!(
            "species fractions must be non-negative and sum to 1, got {total}"
        )));
    }
    let chooser = WeightedIndex::new(species_mix.iter().map(|(_, w)| *w))
        .map_err(|e| Error::Precondition(e.to_string()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placements = Vec::new();
    let mut index = 0usize;
    for_each_site(spec.max_d2(spec.bounding_radius), |c| {
        if rng.random::<f64>() < concentration {
            let species = species_mix[chooser.sample(&mut rng)].0.clone();
            placements.push(Placement {
                site_index: index,
                coords: c,
                species,
            });
        }
        index += 1;
    });
    let site_count = index;
    Ok(DopedRegion {
        spec: spec.clone(),
        concentration: placements.len() as f64 / site_count as f64,
        nominal_concentration: concentration,
        placements,
        site_count,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborStatistics {
    pub shells: ShellTable,
    /// Dopants whose whole neighborhood lies inside the region.
    pub sampled_dopants: usize,
    /// Histogram of other dopants found in the neighborhood, index = k.
    pub counts: Vec<usize>,
    pub empirical: Vec<f64>,
    /// Binomial reference for the nominal concentration, index = k.
    pub analytic: Vec<f64>,
}

impl NeighborStatistics {
    /// (P(0), P(1), P(2), P(>2)) of a distribution indexed by k.
    pub fn summary(dist: &[f64]) -> [f64; 4] {
        let p = |k: usize| dist.get(k).copied().unwrap_or(0.0);
        [p(0), p(1), p(2), dist.iter().skip(3).sum()]
    }
}

/// Binomial distribution of occupied sites among `n` sites at occupation `c`.
pub fn binomial_distribution(n: usize, c: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut log_choose = 0.0f64;
    for k in 0..=n {
        if k > 0 {
            log_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        let p = if c >= 1.0 {
            if k == n {
                1.0
            } else {
                0.0
            }
        } else if c <= 0.0 {
            if k == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (log_choose + k as f64 * c.ln() + (n - k) as f64 * (1.0 - c).ln()).exp()
        };
        out.push(p);
    }
    out
}

pub fn neighbor_statistics(region: &DopedRegion, n_shells: usize) -> Result<NeighborStatistics> {
    if region.placements.is_empty() {
        return Err(Error::Precondition("doped region has no dopants".into()));
    }
    let offsets = shell_offsets(n_shells)?;
    let table = shell_sizes(
        &LatticeSpec {
            bounding_radius: region.spec.unit()
                * (offsets.iter().map(|&c| d2(c)).max().unwrap_or(0) as f64).sqrt(),
            ..region.spec.clone()
        },
        n_shells,
    )?;
    let outer = (table.outer_d2() as f64).sqrt();
    let limit = region.spec.bounding_radius / region.spec.unit();

    let occupied: HashSet<[i32; 3]> = region.placements.iter().map(|p| p.coords).collect();
    let m = offsets.len();
    let mut counts = vec![0usize; m + 1];
    let mut sampled = 0usize;
    for p in &region.placements {
        if (d2(p.coords) as f64).sqrt() + outer > limit * (1.0 + 1e-12) {
            continue;
        }
        sampled += 1;
        // the second sublattice sees the inverted neighbour star
        let sign = if p.coords[0].rem_euclid(2) == 1 { -1 } else { 1 };
        let k = offsets
            .iter()
            .filter(|o| {
                occupied.contains(&[
                    p.coords[0] + sign * o[0],
                    p.coords[1] + sign * o[1],
                    p.coords[2] + sign * o[2],
                ])
            })
            .count();
        counts[k] += 1;
    }
    let empirical = counts
        .iter()
        .map(|&c| if sampled == 0 { 0.0 } else { c as f64 / sampled as f64 })
        .collect();
    Ok(NeighborStatistics {
        shells: table,
        sampled_dopants: sampled,
        counts,
        empirical,
        analytic: binomial_distribution(m, region.nominal_concentration),
    })
}
