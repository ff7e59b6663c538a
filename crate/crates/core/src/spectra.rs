//! Optical transition energies of gates and how many of them a laser can
//! address separately.
//!
//! All widths are full widths at half maximum in meV. Random shifts are
//! Gaussian with σ = FWHM / (2√(2 ln 2)).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{photon_energy, wavelength_width_to_energy};

/// FWHM / σ for a Gaussian.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

/// Key of the deterministic component in [`TransitionLine::shift_breakdown`].
pub const OVERLAP_COMPONENT: &str = "overlap";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderComponent {
    pub name: String,
    /// FWHM of the Gaussian shift distribution, meV.
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralModel {
    /// meV.
    pub base_transition_energy: f64,
    /// δ_h, meV.
    pub homogeneous_width: f64,
    pub disorder_components: Vec<DisorderComponent>,
    /// Lines closer than k·δ_h are not resolved.
    pub resolution_factor: f64,
}

impl SpectralModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.homogeneous_width > 0.0) {
            return Err(Error::Precondition("homogeneous width must be positive".into()));
        }
        if !(self.resolution_factor >= 1.0) {
            return Err(Error::Precondition("resolution factor must be at least 1".into()));
        }
        if !self.base_transition_energy.is_finite() {
            return Err(Error::Precondition("base transition energy must be finite".into()));
        }
        if self.disorder_components.iter().any(|c| !(c.width >= 0.0)) {
            return Err(Error::Precondition("disorder widths must be non-negative".into()));
        }
        Ok(())
    }

    /// Combined inhomogeneous FWHM δ_i of the random components.
    pub fn inhomogeneous_width(&self) -> f64 {
        self.disorder_components
            .iter()
            .map(|c| c.width * c.width)
            .sum::<f64>()
            .sqrt()
    }

    pub fn broadening_ratio(&self) -> f64 {
        self.inhomogeneous_width() / self.homogeneous_width
    }

    /// NV⁻ zero-phonon line: 0.36 nm homogeneous, 5 nm inhomogeneous at
    /// 637 nm, split evenly between strain and Stark shifts. k = 1.5.
    pub fn shen_nv() -> Self {
        let lambda = 637.0;
        let inhomogeneous = wavelength_width_to_energy(5.0, lambda);
        let each = inhomogeneous / 2f64.sqrt();
        SpectralModel {
            base_transition_energy: photon_energy(lambda),
            homogeneous_width: wavelength_width_to_energy(0.36, lambda),
            disorder_components: vec![
                DisorderComponent {
                    name: "strain".into(),
                    width: each,
                },
                DisorderComponent {
                    name: "stark".into(),
                    width: each,
                },
            ],
            resolution_factor: 1.5,
        }
    }

    /// Same widths and k around a different centre energy.
    pub fn centred_at(mut self, base: f64) -> Self {
        self.base_transition_energy = base;
        self
    }

    /// Single Gaussian component giving δ_i/δ_h = `ratio`.
    pub fn with_ratio(homogeneous_width: f64, ratio: f64, k: f64) -> Self {
        SpectralModel {
            base_transition_energy: 0.0,
            homogeneous_width,
            disorder_components: vec![DisorderComponent {
                name: "inhomogeneous".into(),
                width: ratio * homogeneous_width,
            }],
            resolution_factor: k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionLine {
    pub gate_id: String,
    /// meV.
    pub energy: f64,
    /// meV.
    pub width: f64,
    /// Shift of each component from the base, meV, in a fixed order:
    /// overlap first, then the disorder components.
    pub shift_breakdown: Vec<(String, f64)>,
}

/// A control that defines a gate.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSite {
    pub id: String,
    /// Å.
    pub position: [f64; 3],
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Excited-state hopping shifts for a set of controls.
///
/// The hopping matrix t(R_ij) is diagonalized and its eigenvalues are
/// handed out in ascending order, each to the unassigned control carrying
/// the largest weight in that eigenvector (lowest index on ties). For two
/// controls this yields ∓|t|.
pub fn overlap_shifts(controls: &[ControlSite], transfer: &dyn Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
    let n = controls.len();
    if n < 2 {
        return Ok(vec![0.0; n]);
    }
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let t = transfer(distance(controls[i].position, controls[j].position))?;
            h[(i, j)] = t;
            h[(j, i)] = t;
        }
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut shifts = vec![0.0; n];
    let mut taken = vec![false; n];
    for k in order {
        let v = eig.eigenvectors.column(k);
        let mut best = None::<usize>;
        for i in (0..n).filter(|&i| !taken[i]) {
            match best {
                Some(b) if v[i].powi(2) <= v[b].powi(2) + 1e-12 => {}
                _ => best = Some(i),
            }
        }
        let i = best.expect("one control per eigenvalue");
        taken[i] = true;
        shifts[i] = eig.eigenvalues[k];
    }
    Ok(shifts)
}

/// Transition line of each control: base + hopping shift + sampled disorder.
pub fn gate_transitions(
    controls: &[ControlSite],
    model: &SpectralModel,
    transfer: &dyn Fn(f64) -> Result<f64>,
    seed: u64,
) -> Result<Vec<TransitionLine>> {
    model.validate()?;
    let overlap = overlap_shifts(controls, transfer)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::with_capacity(controls.len());
    for (c, shift) in controls.iter().zip(overlap) {
        let mut breakdown = vec![(OVERLAP_COMPONENT.to_string(), shift)];
        for d in &model.disorder_components {
            let x = if d.width > 0.0 {
                Normal::new(0.0, d.width / FWHM_PER_SIGMA)
                    .expect("positive width")
                    .sample(&mut rng)
            } else {
                0.0
            };
            breakdown.push((d.name.clone(), x));
        }
        let total: f64 = breakdown.iter().map(|(_, x)| x).sum();
        lines.push(TransitionLine {
            gate_id: c.id.clone(),
            energy: model.base_transition_energy + total,
            width: model.homogeneous_width,
            shift_breakdown: breakdown,
        });
    }
    Ok(lines)
}

/// Greedy count of lines pairwise separated by at least k·δ_h: after
/// sorting, a line is kept when it sits k·δ_h or more above the last kept
/// one.
pub fn resolvable_gate_count(energies: &[f64], homogeneous_width: f64, k: f64) -> usize {
    let mut sorted: Vec<f64> = energies.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gap = k * homogeneous_width;
    let slack = 1e-9 * gap.abs();
    let mut iter = sorted.into_iter();
    let Some(mut last) = iter.next() else {
        return 0;
    };
    let mut count = 1;
    for e in iter {
        if e - last >= gap - slack {
            count += 1;
            last = e;
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountStatistics {
    pub mean: f64,
    pub std_dev: f64,
    pub draws: usize,
}

/// Resolvable count of `n_lines` isolated controls drawn from `model`,
/// averaged over `draws` independent realizations.
pub fn resolvable_count_statistics(model: &SpectralModel, n_lines: usize, draws: usize, seed: u64) -> Result<CountStatistics> {
    model.validate()?;
    if draws == 0 {
        return Err(Error::Precondition("need at least one draw".into()));
    }
    let sigma = model.inhomogeneous_width() / FWHM_PER_SIGMA;
    let counts: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|d| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(d as u64);
            let energies: Vec<f64> = (0..n_lines)
                .map(|_| {
                    if sigma > 0.0 {
                        Normal::new(0.0, sigma).expect("positive").sample(&mut rng)
                    } else {
                        0.0
                    }
                })
                .collect();
            resolvable_gate_count(&energies, model.homogeneous_width, model.resolution_factor) as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / draws as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / draws as f64;
    Ok(CountStatistics {
        mean,
        std_dev: var.sqrt(),
        draws,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn no_transfer(_: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn site(id: &str, x: f64) -> ControlSite {
        ControlSite {
            id: id.into(),
            position: [x, 0.0, 0.0],
        }
    }

    #[test]
    fn isolated_control_without_disorder_sits_at_base() {
        let model = SpectralModel {
            base_transition_energy: 450.0,
            homogeneous_width: 1.0,
            disorder_components: vec![],
            resolution_factor: 1.5,
        };
        let lines = gate_transitions(&[site("C1", 0.0)], &model, &no_transfer, 1).unwrap();
        assert_eq!(lines[0].energy, 450.0);
        assert_eq!(lines[0].width, 1.0);
    }

    #[test]
    fn control_pair_splits_by_twice_the_hopping() {
        let model = SpectralModel {
            base_transition_energy: 450.0,
            homogeneous_width: 1.0,
            disorder_components: vec![],
            resolution_factor: 1.5,
        };
        let t = |r: f64| Ok(-40.0 * (-r / 10.0f64).exp());
        let lines = gate_transitions(&[site("C1", 0.0), site("C2", 12.0)], &model, &t, 1).unwrap();
        let expected = 2.0 * 40.0 * (-1.2f64).exp();
        assert_relative_eq!((lines[1].energy - lines[0].energy).abs(), expected, epsilon = 1e-10);
        assert_relative_eq!(lines[0].energy + lines[1].energy, 900.0, epsilon = 1e-10);
    }

    #[test]
    fn missing_transfer_data_is_a_dependency_error() {
        let model = SpectralModel::shen_nv();
        let t = |_: f64| Err(Error::Dependency("transfer table".into()));
        let r = gate_transitions(&[site("C1", 0.0), site("C2", 12.0)], &model, &t, 1);
        assert!(matches!(r, Err(Error::Dependency(_))));
    }

    #[test]
    fn shen_nv_ratio_is_about_fourteen() {
        let m = SpectralModel::shen_nv();
        assert_relative_eq!(m.broadening_ratio(), 5.0 / 0.36, epsilon = 1e-9);
        assert_relative_eq!(m.homogeneous_width, 1.100, epsilon = 2e-3);
    }

    #[test]
    fn sampled_spread_matches_ratio() {
        let m = SpectralModel::shen_nv();
        let controls: Vec<_> = (0..1000).map(|k| site(&format!("C{k}"), 100.0 * k as f64)).collect();
        let lines = gate_transitions(&controls, &m, &no_transfer, 3).unwrap();
        let mean = lines.iter().map(|l| l.energy).sum::<f64>() / 1000.0;
        let sd = (lines.iter().map(|l| (l.energy - mean).powi(2)).sum::<f64>() / 999.0).sqrt();
        let ratio = sd * FWHM_PER_SIGMA / m.homogeneous_width;
        assert!((ratio - 13.9).abs() < 1.0, "{ratio}");
    }

    #[test]
    fn counting_edge_cases() {
        assert_eq!(resolvable_gate_count(&[3.0; 7], 1.0, 1.5), 1);
        let grid: Vec<f64> = (0..12).map(|k| 0.1 * k as f64).collect();
        assert_eq!(resolvable_gate_count(&grid, 0.1, 1.0), 12);
        assert_eq!(resolvable_gate_count(&[], 1.0, 1.0), 0);
    }

    #[test]
    fn twenty_lines_at_ratio_fourteen_give_about_ten() {
        let m = SpectralModel::with_ratio(1.0, 14.0, 1.5);
        let s = resolvable_count_statistics(&m, 20, 1000, 11).unwrap();
        assert!((s.mean - 10.0).abs() <= 2.0, "{s:?}");
    }

    proptest! {
        #[test]
        fn count_is_monotone(energies in prop::collection::vec(-50.0..50.0f64, 1..40), k in 1.0..3.0f64, dk in 0.0..2.0f64, w in 0.1..5.0f64, dw in 0.0..3.0f64) {
            let base = resolvable_gate_count(&energies, w, k);
            prop_assert!(resolvable_gate_count(&energies, w, k + dk) <= base);
            prop_assert!(resolvable_gate_count(&energies, w + dw, k) <= base);
        }

        #[test]
        fn shifts_add_up(seed in 0u64..1000, x in 5.0..40.0f64) {
            let m = SpectralModel::shen_nv();
            let t = |r: f64| Ok(-30.0 / r);
            let lines = gate_transitions(&[site("A", 0.0), site("B", x), site("C", -x * 1.3)], &m, &t, seed).unwrap();
            for l in &lines {
                let sum: f64 = l.shift_breakdown.iter().map(|(_, s)| s).sum();
                prop_assert!((l.energy - m.base_transition_energy - sum).abs() < 1e-12 * m.base_transition_energy);
            }
            let again = gate_transitions(&[site("A", 0.0), site("B", x), site("C", -x * 1.3)], &m, &t, seed).unwrap();
            prop_assert_eq!(lines, again);
        }
    }
}
