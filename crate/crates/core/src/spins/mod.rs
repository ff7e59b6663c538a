//! Exact dynamics of small spin-½ clusters.
//!
//! Basis states are labelled by bit strings with spin 0 as the most
//! significant bit, so operators compose in Kronecker order
//! S₀ ⊗ S₁ ⊗ … A set bit means spin down.

mod entanglement;
mod gate;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::donor::Role;
use crate::error::{Error, Result};
use crate::units::HBAR;

pub use entanglement::{
    concurrence, entangling_power, entanglement_entropy, entanglement_metrics, operator_schmidt,
    EntanglementMetrics, TwoQubit,
};
pub use gate::{sfg_gate, GateOptions, GateReport, DEFAULT_RESIDUAL_THRESHOLD};

/// Largest cluster handled with dense matrices.
pub const MAX_SPINS: usize = 14;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spin {
    pub label: String,
    pub role: Role,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    /// Isotropic exchange, meV.
    pub j_mev: f64,
}

/// Spins with isotropic exchange and Zeeman splittings along z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSystem {
    pub spins: Vec<Spin>,
    pub couplings: Vec<Coupling>,
    /// Δᵢ in H = … + Σ Δᵢ Sᵢᶻ, meV.
    pub zeeman: Vec<f64>,
}

impl SpinSystem {
    pub fn new(spins: Vec<Spin>) -> Self {
        let n = spins.len();
        SpinSystem {
            spins,
            couplings: Vec::new(),
            zeeman: vec![0.0; n],
        }
    }

    /// A control coupled to each qubit in `qubits` with the given exchange.
    pub fn star(control: &str, qubits: &[(&str, f64)]) -> Self {
        let mut spins = vec![Spin {
            label: control.to_string(),
            role: Role::Control,
        }];
        spins.extend(qubits.iter().map(|(l, _)| Spin {
            label: l.to_string(),
            role: Role::Qubit,
        }));
        let mut s = SpinSystem::new(spins);
        for (k, (_, j)) in qubits.iter().enumerate() {
            s.couplings.push(Coupling {
                i: 0,
                j: k + 1,
                j_mev: *j,
            });
        }
        s
    }

    pub fn with_zeeman(mut self, zeeman: Vec<f64>) -> Self {
        self.zeeman = zeeman;
        self
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn dimension(&self) -> usize {
        1 << self.spins.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.spins.iter().position(|s| s.label == label)
    }

    /// Net coupling between two spins (duplicates add).
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        self.couplings
            .iter()
            .filter(|c| (c.i == a && c.j == b) || (c.i == b && c.j == a))
            .map(|c| c.j_mev)
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.spins.len();
        if n > MAX_SPINS {
            return Err(Error::TooLarge {
                spins: n,
                limit: MAX_SPINS,
            });
        }
        if self.zeeman.len() != n {
            return Err(Error::Shape(format!(
                "{} Zeeman terms for {n} spins",
                self.zeeman.len()
            )));
        }
        if self.zeeman.iter().any(|z| !z.is_finite()) {
            return Err(Error::Precondition("Zeeman terms must be finite".into()));
        }
        for c in &self.couplings {
            if c.i >= n || c.j >= n || c.i == c.j {
                return Err(Error::Precondition(format!(
                    "coupling ({}, {}) does not join two distinct spins",
                    c.i, c.j
                )));
            }
            if !c.j_mev.is_finite() {
                return Err(Error::Precondition("couplings must be finite".into()));
            }
        }
        Ok(())
    }

    /// Same physics with the spins listed in `order`.
    pub fn permuted(&self, order: &[usize]) -> Result<SpinSystem> {
        let n = self.spins.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::Shape("order must be a permutation of the spins".into()));
        }
        let mut position = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        Ok(SpinSystem {
            spins: order.iter().map(|&k| self.spins[k].clone()).collect(),
            couplings: self
                .couplings
                .iter()
                .map(|c| Coupling {
                    i: position[c.i],
                    j: position[c.j],
                    j_mev: c.j_mev,
                })
                .collect(),
            zeeman: order.iter().map(|&k| self.zeeman[k]).collect(),
        })
    }
}

/// Dense Hamiltonian with its spectral decomposition.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub n_spins: usize,
    pub matrix: DMatrix<f64>,
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

fn bit(state: usize, spin: usize, n: usize) -> usize {
    (state >> (n - 1 - spin)) & 1
}

/// H = Σ_{i<j} J_ij Sᵢ·Sⱼ + Σᵢ Δᵢ Sᵢᶻ. Real symmetric in the Sᶻ basis.
pub fn build_hamiltonian(system: &SpinSystem) -> Result<Hamiltonian> {
    system.validate()?;
    let n = system.len();
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let sz = |s: usize, k: usize| if bit(s, k, n) == 0 { 0.5 } else { -0.5 };
    for s in 0..dim {
        let mut diag = 0.0;
        for (k, d) in system.zeeman.iter().enumerate() {
            diag += d * sz(s, k);
        }
        for c in &system.couplings {
            diag += c.j_mev * sz(s, c.i) * sz(s, c.j);
            if bit(s, c.i, n) != bit(s, c.j, n) {
                let flipped = s ^ (1 << (n - 1 - c.i)) ^ (1 << (n - 1 - c.j));
                h[(flipped, s)] += 0.5 * c.j_mev;
            }
        }
        h[(s, s)] += diag;
    }
    let eig = SymmetricEigen::new(h.clone());
    Ok(Hamiltonian {
        n_spins: n,
        matrix: h,
        eigenvalues: eig.eigenvalues,
        eigenvectors: eig.eigenvectors,
    })
}

impl Hamiltonian {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// exp(−iHt/ħ), t in ps.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let v = self.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let phases = self
            .eigenvalues
            .map(|e| Complex64::from_polar(1.0, -e * t / HBAR));
        let mut vd = v.clone();
        for (k, mut col) in vd.column_iter_mut().enumerate() {
            col *= phases[k];
        }
        vd * v.adjoint()
    }

    /// ⟨ψ|H|ψ⟩ in meV.
    pub fn expectation(&self, state: &CVector) -> f64 {
        let h = self.matrix.map(|x| Complex64::new(x, 0.0));
        state.dotc(&(h * state)).re
    }

    /// Σᵢ Sᵢᶻ as a diagonal operator.
    pub fn total_sz(&self) -> DMatrix<f64> {
        let n = self.n_spins;
        let dim = self.dimension();
        DMatrix::from_fn(dim, dim, |r, c| {
            if r != c {
                0.0
            } else {
                (0..n).map(|k| if bit(r, k, n) == 0 { 0.5 } else { -0.5 }).sum()
            }
        })
    }
}

/// Evolves a normalized state for `t` ps.
pub fn evolve(state: &CVector, h: &Hamiltonian, t: f64) -> Result<CVector> {
    if state.len() != h.dimension() {
        return Err(Error::Shape(format!(
            "state of length {} for a {}-dimensional Hamiltonian",
            state.len(),
            h.dimension()
        )));
    }
    if (state.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition("state must be normalized".into()));
    }
    let v = h.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let mut c = v.adjoint() * state;
    for (k, e) in h.eigenvalues.iter().enumerate() {
        c[k] *= Complex64::from_polar(1.0, -e * t / HBAR);
    }
    Ok(v * c)
}

/// Product state from per-spin amplitudes (up, down).
pub fn product_state(spins: &[(Complex64, Complex64)]) -> CVector {
    let mut psi = CVector::from_element(1, Complex64::new(1.0, 0.0));
    for &(up, down) in spins {
        let single = CVector::from_vec(vec![up, down]);
        psi = psi.kronecker(&single);
    }
    let n = psi.norm();
    psi / Complex64::new(n, 0.0)
}

/// Perturbative qubit–qubit coupling through a virtually excited control:
/// J₁J₂/ΔE (meV).
pub fn effective_coupling(j1: f64, j2: f64, excitation_energy: f64) -> Result<f64> {
    if !(excitation_energy > 0.0) {
        return Err(Error::Precondition("excitation energy must be positive".into()));
    }
    Ok(j1 * j2 / excitation_energy)
}
