//! Two-centre integrals between scaled hydrogenic orbitals.
//!
//! Each donor is a hydrogen-like centre in a dielectric medium. Orbitals are
//! expanded in Gaussians (see [`fit`]) and all one- and two-electron
//! integrals are then analytic (see [`gto`]). The medium fixes the reduced
//! units: lengths in the medium Bohr radius a_m and energies in the medium
//! Hartree 2R_m. A centre whose orbital has radius a carries effective
//! charge a_m/a, which makes that orbital an eigenstate of the isolated
//! centre.
//!
//! The exchange splitting follows Heitler and London. With
//! Q = h_aa + h_bb + (aa|bb) and X = 2S·h_ab + (ab|ab),
//!
//! ```text
//! E_singlet = (Q + X)/(1 + S²),  E_triplet = (Q − X)/(1 − S²)
//! J = E_triplet − E_singlet = 2(S²Q − X)/(1 − S⁴)
//! ```
//!
//! where h is the one-electron Hamiltonian of both centres.

pub mod fit;
pub mod gto;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::donor::DonorModel;
use crate::error::{Error, Result};
use gto::Primitive;

pub use fit::{canonical_fit, CanonicalFit};

/// Default number of Gaussians per orbital.
pub const DEFAULT_TERMS: usize = 6;

/// Overlap beyond which the two-centre problem is treated as degenerate.
pub const MAX_OVERLAP: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitalKind {
    /// Hydrogenic 1s, decay length a.
    S1,
    /// Hydrogenic 2p, decay length 2a, oriented along `axis`.
    P2,
}

impl OrbitalKind {
    fn l(self) -> i32 {
        match self {
            OrbitalKind::S1 => 0,
            OrbitalKind::P2 => 1,
        }
    }

    fn principal(self) -> f64 {
        match self {
            OrbitalKind::S1 => 1.0,
            OrbitalKind::P2 => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitalSpec {
    pub kind: OrbitalKind,
    /// Hydrogenic Bohr radius a in Å.
    pub bohr_radius: f64,
    /// Å.
    pub center: [f64; 3],
    /// Unit vector; ignored for s orbitals.
    pub axis: [f64; 3],
}

impl OrbitalSpec {
    pub fn s1(bohr_radius: f64, center: [f64; 3]) -> Self {
        OrbitalSpec {
            kind: OrbitalKind::S1,
            bohr_radius,
            center,
            axis: [0.0, 0.0, 1.0],
        }
    }

    pub fn p2(bohr_radius: f64, center: [f64; 3], axis: [f64; 3]) -> Self {
        let n = norm(axis);
        OrbitalSpec {
            kind: OrbitalKind::P2,
            bohr_radius,
            center,
            axis: [axis[0] / n, axis[1] / n, axis[2] / n],
        }
    }

    /// Slater exponent ζ in Å⁻¹.
    pub fn slater_exponent(&self) -> f64 {
        1.0 / (self.kind.principal() * self.bohr_radius)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bohr_radius > 0.0) {
            return Err(Error::Precondition("orbital radius must be positive".into()));
        }
        if self.kind == OrbitalKind::P2 && (norm(self.axis) - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition("p-orbital axis must be a unit vector".into()));
        }
        Ok(())
    }
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianExpansion {
    /// (exponent in Å⁻², coefficient) of the radial factors r^l e^{-α r²}.
    pub terms: Vec<(f64, f64)>,
    pub target: OrbitalSpec,
    pub fit_error: f64,
}

impl GaussianExpansion {
    /// Cartesian primitives in reduced units (lengths divided by `length_unit`).
    fn primitives(&self, length_unit: f64) -> Vec<Primitive> {
        let l = self.target.kind.l();
        let scale = length_unit.powf(l as f64 + 1.5);
        let center = self.target.center.map(|x| x / length_unit);
        let mut out = Vec::new();
        for &(alpha, c) in &self.terms {
            let exponent = alpha * length_unit * length_unit;
            match self.target.kind {
                OrbitalKind::S1 => out.push(Primitive {
                    exponent,
                    coefficient: c * scale,
                    center,
                    powers: [0, 0, 0],
                }),
                OrbitalKind::P2 => {
                    for k in 0..3 {
                        let w = self.target.axis[k];
                        if w.abs() < 1e-15 {
                            continue;
                        }
                        let mut powers = [0, 0, 0];
                        powers[k] = 1;
                        out.push(Primitive {
                            exponent,
                            coefficient: c * w * scale,
                            center,
                            powers,
                        });
                    }
                }
            }
        }
        out
    }

    /// Value of the expanded orbital at `r` (Å).
    pub fn value(&self, r: [f64; 3]) -> f64 {
        let d = [
            r[0] - self.target.center[0],
            r[1] - self.target.center[1],
            r[2] - self.target.center[2],
        ];
        let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let angular = match self.target.kind {
            OrbitalKind::S1 => 1.0,
            OrbitalKind::P2 => d[0] * self.target.axis[0] + d[1] * self.target.axis[1] + d[2] * self.target.axis[2],
        };
        angular * self.terms.iter().map(|(a, c)| c * (-a * r2).exp()).sum::<f64>()
    }
}

pub fn fit_gaussian_expansion(orbital: &OrbitalSpec, n_terms: usize) -> Result<GaussianExpansion> {
    orbital.validate()?;
    let canon = canonical_fit(orbital.kind, n_terms)?;
    let zeta = orbital.slater_exponent();
    let cscale = zeta.powf(orbital.kind.l() as f64 + 1.5);
    Ok(GaussianExpansion {
        terms: canon
            .terms
            .iter()
            .map(|&(a, c)| (a * zeta * zeta, c * cscale))
            .collect(),
        target: orbital.clone(),
        fit_error: canon.fit_error,
    })
}

/// Dielectric medium that sets the reduced units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    /// Effective Bohr radius of a unit-charge centre, Å.
    pub bohr_radius: f64,
    /// Effective Rydberg of a unit-charge centre, meV.
    pub rydberg: f64,
}

impl Medium {
    /// The medium seen by a donor: its own a* and Coulombic binding.
    pub fn of(model: &DonorModel) -> Self {
        Medium {
            bohr_radius: model.effective_bohr_radius,
            rydberg: model.coulombic_binding(),
        }
    }

    pub fn hartree(&self) -> f64 {
        2.0 * self.rydberg
    }

    /// Charge for which `orbital` is an exact hydrogenic eigenstate.
    pub fn eigenstate_charge(&self, orbital: &OrbitalSpec) -> f64 {
        self.bohr_radius / orbital.bohr_radius
    }

    /// Isolated-centre energy of `orbital` (meV, negative when bound).
    pub fn orbital_energy(&self, orbital: &OrbitalSpec) -> f64 {
        let z = self.eigenstate_charge(orbital);
        -z * z * self.rydberg / orbital.kind.principal().powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCharges {
    pub a: f64,
    pub b: f64,
}

impl EffectiveCharges {
    pub fn eigenstate(a: &OrbitalSpec, b: &OrbitalSpec, medium: &Medium) -> Self {
        EffectiveCharges {
            a: medium.eigenstate_charge(a),
            b: medium.eigenstate_charge(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairConfiguration {
    pub kinds: (OrbitalKind, OrbitalKind),
    /// Å.
    pub radii: (f64, f64),
    pub charges: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairIntegralResult {
    /// Å.
    pub separation: f64,
    pub overlap: f64,
    /// Orthogonalized one-electron hopping (meV).
    pub transfer: f64,
    /// Two-electron Coulomb integral (aa|bb) in meV.
    pub coulomb: f64,
    /// Two-electron exchange integral (ab|ab) in meV.
    pub exchange_integral: f64,
    /// Triplet minus singlet energy (meV).
    pub exchange_splitting: f64,
    pub configuration: PairConfiguration,
}

/// Raw integrals in reduced units; exposed for cross-checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawPairIntegrals {
    pub overlap: f64,
    pub kinetic_ab: f64,
    pub kinetic_aa: f64,
    pub kinetic_bb: f64,
    /// ⟨x| 1/r_C |y⟩ for the two nuclei C = A, B.
    pub attraction_aa: [f64; 2],
    pub attraction_bb: [f64; 2],
    pub attraction_ab: [f64; 2],
    pub coulomb: f64,
    pub exchange: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegralEngine {
    pub n_terms: usize,
}

impl Default for IntegralEngine {
    fn default() -> Self {
        IntegralEngine {
            n_terms: DEFAULT_TERMS,
        }
    }
}

impl IntegralEngine {
    pub fn new(n_terms: usize) -> Self {
        IntegralEngine { n_terms }
    }

    pub fn raw(&self, a: &OrbitalSpec, b: &OrbitalSpec, medium: &Medium) -> Result<RawPairIntegrals> {
        if distance(a.center, b.center) < 1e-9 {
            return Err(Error::Precondition("orbital centres must be distinct".into()));
        }
        let unit = medium.bohr_radius;
        let ea = fit_gaussian_expansion(a, self.n_terms)?;
        let eb = fit_gaussian_expansion(b, self.n_terms)?;
        let (pa, pb) = (ea.primitives(unit), eb.primitives(unit));
        let ca = a.center.map(|x| x / unit);
        let cb = b.center.map(|x| x / unit);
        Ok(RawPairIntegrals {
            overlap: gto::overlap(&pa, &pb),
            kinetic_ab: gto::kinetic(&pa, &pb),
            kinetic_aa: gto::kinetic(&pa, &pa),
            kinetic_bb: gto::kinetic(&pb, &pb),
            attraction_aa: [gto::coulomb_1e(&pa, &pa, ca), gto::coulomb_1e(&pa, &pa, cb)],
            attraction_bb: [gto::coulomb_1e(&pb, &pb, ca), gto::coulomb_1e(&pb, &pb, cb)],
            attraction_ab: [gto::coulomb_1e(&pa, &pb, ca), gto::coulomb_1e(&pa, &pb, cb)],
            coulomb: gto::eri(&pa, &pa, &pb, &pb),
            exchange: gto::eri(&pa, &pb, &pa, &pb),
        })
    }

    pub fn pair(
        &self,
        a: &OrbitalSpec,
        b: &OrbitalSpec,
        medium: &Medium,
        charges: EffectiveCharges,
    ) -> Result<PairIntegralResult> {
        let raw = self.raw(a, b, medium)?;
        assemble(&raw, a, b, medium, charges)
    }
}

/// Combines raw integrals into Heitler–London energies.
pub fn assemble(
    raw: &RawPairIntegrals,
    a: &OrbitalSpec,
    b: &OrbitalSpec,
    medium: &Medium,
    charges: EffectiveCharges,
) -> Result<PairIntegralResult> {
    let s = raw.overlap;
    if s.abs() > MAX_OVERLAP {
        return Err(Error::IllConditioned { overlap: s });
    }
    let z = [charges.a, charges.b];
    let h = |t: f64, v: [f64; 2]| t - z[0] * v[0] - z[1] * v[1];
    let h_aa = h(raw.kinetic_aa, raw.attraction_aa);
    let h_bb = h(raw.kinetic_bb, raw.attraction_bb);
    let h_ab = h(raw.kinetic_ab, raw.attraction_ab);
    let q = h_aa + h_bb + raw.coulomb;
    let x = 2.0 * s * h_ab + raw.exchange;
    let s2 = s * s;
    let j = 2.0 * (s2 * q - x) / (1.0 - s2 * s2);
    let t = (h_ab - 0.5 * s * (h_aa + h_bb)) / (1.0 - s2);
    let e = medium.hartree();
    Ok(PairIntegralResult {
        separation: distance(a.center, b.center),
        overlap: s,
        transfer: t * e,
        coulomb: raw.coulomb * e,
        exchange_integral: raw.exchange * e,
        exchange_splitting: j * e,
        configuration: PairConfiguration {
            kinds: (a.kind, b.kind),
            radii: (a.bohr_radius, b.bohr_radius),
            charges: (charges.a, charges.b),
        },
    })
}

/// Integrals for one pair with eigenstate charges and the default engine.
pub fn pair_integrals(
    a: &OrbitalSpec,
    b: &OrbitalSpec,
    medium: &Medium,
    charges: EffectiveCharges,
) -> Result<PairIntegralResult> {
    IntegralEngine::default().pair(a, b, medium, charges)
}

/// Orientation of the excited control's p orbital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PAxis {
    /// Along the line joining the two centres.
    #[default]
    InterCenter,
    /// Fixed direction in the crystal frame.
    Fixed([f64; 3]),
    /// Mean over the threefold degenerate 2p level: one orbital along the
    /// inter-centre line and two perpendicular to it.
    Averaged,
}

impl PAxis {
    fn resolve(self, from: [f64; 3], to: [f64; 3]) -> [f64; 3] {
        match self {
            PAxis::InterCenter | PAxis::Averaged => {
                let d = [to[0] - from[0], to[1] - from[1], to[2] - from[2]];
                let n = norm(d);
                [d[0] / n, d[1] / n, d[2] / n]
            }
            PAxis::Fixed(v) => {
                let n = norm(v);
                [v[0] / n, v[1] / n, v[2] / n]
            }
        }
    }
}

/// Control orbital for a control at `control_at` interacting with a partner at `partner_at`.
pub fn control_orbital(
    control: &DonorModel,
    excited: bool,
    control_at: [f64; 3],
    partner_at: [f64; 3],
    axis: PAxis,
) -> OrbitalSpec {
    if excited {
        OrbitalSpec::p2(
            control.orbital_radius(),
            control_at,
            axis.resolve(control_at, partner_at),
        )
    } else {
        OrbitalSpec::s1(control.orbital_radius(), control_at)
    }
}

/// Control–qubit exchange at arbitrary positions (Å).
pub fn control_qubit_exchange(
    engine: &IntegralEngine,
    control: &DonorModel,
    qubit: &DonorModel,
    excited: bool,
    control_at: [f64; 3],
    qubit_at: [f64; 3],
    axis: PAxis,
) -> Result<PairIntegralResult> {
    let medium = Medium::of(control);
    let a = control_orbital(control, excited, control_at, qubit_at, axis);
    let b = OrbitalSpec::s1(qubit.orbital_radius(), qubit_at);
    let along = engine.pair(&a, &b, &medium, EffectiveCharges::eigenstate(&a, &b, &medium))?;
    if !(excited && axis == PAxis::Averaged) {
        return Ok(along);
    }
    // a 1s partner is symmetric about the axis, so both perpendicular
    // orbitals give the same integrals
    let perp = OrbitalSpec::p2(a.bohr_radius, a.center, perpendicular(a.axis));
    let across = engine.pair(&perp, &b, &medium, EffectiveCharges::eigenstate(&perp, &b, &medium))?;
    let mean = |x: f64, y: f64| (x + 2.0 * y) / 3.0;
    Ok(PairIntegralResult {
        overlap: mean(along.overlap, across.overlap),
        transfer: mean(along.transfer, across.transfer),
        coulomb: mean(along.coulomb, across.coulomb),
        exchange_integral: mean(along.exchange_integral, across.exchange_integral),
        exchange_splitting: mean(along.exchange_splitting, across.exchange_splitting),
        ..along
    })
}

fn perpendicular(u: [f64; 3]) -> [f64; 3] {
    let helper = if u[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = helper[0] * u[0] + helper[1] * u[1] + helper[2] * u[2];
    let v = [helper[0] - dot * u[0], helper[1] - dot * u[1], helper[2] - dot * u[2]];
    let n = norm(v);
    [v[0] / n, v[1] / n, v[2] / n]
}

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() || r_grid[0] <= 0.0 || r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(
            "separation grid must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// J(R) between a control (ground or 2p-excited) and a qubit in its ground state.
pub fn exchange_curve(
    control: &DonorModel,
    qubit: &DonorModel,
    excited: bool,
    r_grid: &[f64],
) -> Result<Vec<PairIntegralResult>> {
    exchange_curve_with(&IntegralEngine::default(), control, qubit, excited, r_grid, PAxis::InterCenter)
}

pub fn exchange_curve_with(
    engine: &IntegralEngine,
    control: &DonorModel,
    qubit: &DonorModel,
    excited: bool,
    r_grid: &[f64],
    axis: PAxis,
) -> Result<Vec<PairIntegralResult>> {
    check_grid(r_grid)?;
    r_grid
        .par_iter()
        .map(|&r| control_qubit_exchange(engine, control, qubit, excited, [0.0; 3], [r, 0.0, 0.0], axis))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingPoint {
    /// Å.
    pub separation: f64,
    /// Lower and upper transition energies of the pair, meV.
    pub lower: f64,
    pub upper: f64,
    /// upper − lower = 2|t|, meV.
    pub splitting: f64,
    pub transfer: f64,
}

/// 2p hopping between two identical controls at separation `r` (Å).
pub fn control_pair_transfer(engine: &IntegralEngine, control: &DonorModel, r: f64) -> Result<PairIntegralResult> {
    let medium = Medium::of(control);
    let axis = [1.0, 0.0, 0.0];
    let a = OrbitalSpec::p2(control.orbital_radius(), [0.0; 3], axis);
    let b = OrbitalSpec::p2(control.orbital_radius(), [r, 0.0, 0.0], axis);
    engine.pair(&a, &b, &medium, EffectiveCharges::eigenstate(&a, &b, &medium))
}

/// Bonding/antibonding excited-state energies of two identical controls.
/// The branches are placed symmetrically about the isolated transition
/// energy; the common shift from the neutral neighbour is dropped.
pub fn transfer_splitting_curve(control: &DonorModel, r_grid: &[f64]) -> Result<Vec<SplittingPoint>> {
    check_grid(r_grid)?;
    let engine = IntegralEngine::default();
    let base = transition_energy(control);
    r_grid
        .par_iter()
        .map(|&r| {
            let res = control_pair_transfer(&engine, control, r)?;
            let t = res.transfer.abs();
            Ok(SplittingPoint {
                separation: r,
                lower: base - t,
                upper: base + t,
                splitting: 2.0 * t,
                transfer: res.transfer,
            })
        })
        .collect()
}

/// Separation (Å) beyond which the excited-control exchange exceeds the
/// ground-state exchange everywhere up to `r_max`. Located on a 0.25 Å scan
/// and refined by bisection; `None` if the excited curve never takes over.
pub fn crossover_radius(
    engine: &IntegralEngine,
    control: &DonorModel,
    qubit: &DonorModel,
    axis: PAxis,
    r_min: f64,
    r_max: f64,
) -> Result<Option<f64>> {
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(Error::Precondition("crossover search needs 0 < r_min < r_max".into()));
    }
    let excess = |r: f64| -> Result<f64> {
        let e = control_qubit_exchange(engine, control, qubit, true, [0.0; 3], [r, 0.0, 0.0], axis)?;
        let g = control_qubit_exchange(engine, control, qubit, false, [0.0; 3], [r, 0.0, 0.0], axis)?;
        Ok(e.exchange_splitting - g.exchange_splitting)
    };
    let n = ((r_max - r_min) / 0.25).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| r_min + (r_max - r_min) * k as f64 / n as f64).collect();
    let values: Vec<f64> = grid.par_iter().map(|&r| excess(r)).collect::<Result<_>>()?;
    if values[n] <= 0.0 {
        return Ok(None);
    }
    let Some(k) = (0..n).rev().find(|&k| values[k] <= 0.0) else {
        return Ok(Some(r_min));
    };
    let (mut a, mut b) = (grid[k], grid[k + 1]);
    for _ in 0..40 {
        let m = 0.5 * (a + b);
        if excess(m)? <= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// 1s → 2p transition energy of an isolated donor (meV). The central-cell
/// part deepens the 1s level only.
pub fn transition_energy(model: &DonorModel) -> f64 {
    model.binding_energy - model.coulombic_binding() / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::donor::preset;
    use crate::units::BOHR_RADIUS;

    #[test]
    fn expansion_is_normalized() {
        let e = fit_gaussian_expansion(&OrbitalSpec::s1(BOHR_RADIUS, [0.0; 3]), 6).unwrap();
        let p = e.primitives(1.0);
        assert!((gto::overlap(&p, &p) - 1.0).abs() < 1e-6);
        let e = fit_gaussian_expansion(&OrbitalSpec::p2(2.1, [0.0; 3], [0.0, 0.6, 0.8]), 6).unwrap();
        let p = e.primitives(2.1);
        assert!((gto::overlap(&p, &p) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn exponents_scale_with_inverse_radius_squared() {
        let h = fit_gaussian_expansion(&OrbitalSpec::s1(BOHR_RADIUS, [0.0; 3]), 6).unwrap();
        let d = fit_gaussian_expansion(&OrbitalSpec::s1(2.1, [0.0; 3]), 6).unwrap();
        let ratio = (BOHR_RADIUS / 2.1).powi(2);
        for (a, b) in h.terms.iter().zip(&d.terms) {
            assert!((b.0 - a.0 * ratio).abs() < 1e-12 * a.0);
        }
    }

    #[test]
    fn isolated_orbital_energies_close_to_hydrogenic() {
        // ⟨φ|T − Z/r|φ⟩ for the fitted orbitals vs −Z²/2n²
        let medium = Medium { bohr_radius: 1.0, rydberg: 0.5 };
        for (spec, exact) in [
            (OrbitalSpec::s1(1.0, [0.0; 3]), -0.5),
            (OrbitalSpec::p2(1.0, [0.0; 3], [0.0, 0.0, 1.0]), -0.125),
            (OrbitalSpec::s1(0.5, [0.0; 3]), -2.0),
        ] {
            let z = medium.eigenstate_charge(&spec);
            let p = fit_gaussian_expansion(&spec, 6).unwrap().primitives(1.0);
            let e = gto::kinetic(&p, &p) - z * gto::coulomb_1e(&p, &p, [0.0; 3]);
            assert!((e - exact).abs() < 5e-3 * exact.abs(), "{e} vs {exact}");
        }
    }

    #[test]
    fn decoupled_at_large_separation() {
        let p = preset("P-control").unwrap();
        let r = exchange_curve(&p, &p, false, &[200.0]).unwrap();
        assert!(r[0].exchange_splitting.abs() < 1e-9);
    }

    #[test]
    fn swapping_identical_centres_is_symmetric() {
        let medium = Medium { bohr_radius: 2.1, rydberg: 600.0 };
        let a = OrbitalSpec::s1(2.1, [0.0; 3]);
        let b = OrbitalSpec::s1(2.1, [3.0, 4.0, 5.0]);
        let ch = EffectiveCharges::eigenstate(&a, &b, &medium);
        let ab = pair_integrals(&a, &b, &medium, ch).unwrap();
        let ba = pair_integrals(&b, &a, &medium, ch).unwrap();
        assert!((ab.exchange_splitting - ba.exchange_splitting).abs() < 1e-9 * ab.exchange_splitting.abs());
        assert!((ab.overlap - ba.overlap).abs() < 1e-14);
    }

    #[test]
    fn coincident_centres_rejected() {
        let medium = Medium { bohr_radius: 2.1, rydberg: 600.0 };
        let a = OrbitalSpec::s1(2.1, [0.0; 3]);
        let ch = EffectiveCharges::eigenstate(&a, &a, &medium);
        assert!(pair_integrals(&a, &a, &medium, ch).is_err());
        let b = OrbitalSpec::s1(2.1, [1e-3, 0.0, 0.0]);
        assert!(matches!(pair_integrals(&a, &b, &medium, ch), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn transition_energy_of_phosphorus() {
        assert!((transition_energy(&preset("P-control").unwrap()) - 450.0).abs() < 1e-9);
    }
}
