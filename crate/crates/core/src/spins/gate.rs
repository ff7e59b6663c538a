use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::entanglement::{entangling_power, operator_schmidt, polar_unitary};
use super::{build_hamiltonian, CMatrix, Hamiltonian, SpinSystem};
use crate::error::{Error, Result};
use crate::units::HBAR;

pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 1e-6;

const MAX_SCAN_STEPS: usize = 200_000;

#[derive(Debug, Clone)]
pub struct GateOptions {
    /// Search window in ps. Defaults to (resolution, 8πħ/smallest level gap).
    pub tau_range: Option<(f64, f64)>,
    /// Scan step in ps. Defaults to 10⁻³·πħ/max|J|.
    pub resolution: Option<f64>,
    /// Largest acceptable control residual entanglement, bits.
    pub threshold: f64,
    /// Reference two-qubit gate for `fidelity_to_target`.
    pub target: Option<CMatrix>,
}

impl Default for GateOptions {
    fn default() -> Self {
        GateOptions {
            tau_range: None,
            resolution: None,
            threshold: DEFAULT_RESIDUAL_THRESHOLD,
            target: None,
        }
    }
}

fn serialize_matrix<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect();
    rows.serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct GateReport {
    pub qubits: [String; 2],
    pub duration_ps: f64,
    #[serde(serialize_with = "serialize_matrix")]
    pub qubit_unitary: CMatrix,
    /// Operator entanglement between control and qubits, bits.
    pub control_residual_entanglement: f64,
    pub entangling_power: f64,
    /// Average gate fidelity against `GateOptions::target`.
    pub fidelity_to_target: Option<f64>,
}

/// (|Tr T†U|² + 4)/20, insensitive to global phase.
pub fn average_gate_fidelity(target: &CMatrix, u: &CMatrix) -> f64 {
    let tr = (target.adjoint() * u).trace();
    (tr.norm_sqr() + 4.0) / 20.0
}

fn leak(h: &Hamiltonian, tau: f64) -> f64 {
    let d = operator_schmidt(&h.propagator(tau), 4, 2).expect("8×8 propagator");
    (1.0 - d.weights()[0]).max(0.0)
}

fn golden_minimum(h: &Hamiltonian, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = leak(h, x1);
    let mut f2 = leak(h, x2);
    while b - a > 1e-13 * b.abs().max(1.0) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = leak(h, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = leak(h, x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

fn report(h: &Hamiltonian, tau: f64, qubits: &[String; 2], target: Option<&CMatrix>) -> GateReport {
    let d = operator_schmidt(&h.propagator(tau), 4, 2).expect("8×8 propagator");
    let u = polar_unitary(&(&d.left[0] * Complex64::new(2.0, 0.0)));
    GateReport {
        qubits: qubits.clone(),
        duration_ps: tau,
        control_residual_entanglement: d.entropy(),
        entangling_power: entangling_power(&u).expect("4×4"),
        fidelity_to_target: target.map(|t| average_gate_fidelity(t, &u)),
        qubit_unitary: u,
    }
}

/// Finds how long the control must stay excited so that it ends
/// disentangled from its two qubits, preferring the most entangling gate.
pub fn sfg_gate(system: &SpinSystem, control: usize, options: &GateOptions) -> Result<GateReport> {
    system.validate()?;
    if system.len() != 3 || control >= 3 {
        return Err(Error::Precondition(
            "a gate is one control and exactly two qubits".into(),
        ));
    }
    let others: Vec<usize> = (0..3).filter(|&k| k != control).collect();
    if system.coupling(others[0], others[1]) != 0.0 {
        return Err(Error::Precondition("qubits must not couple directly".into()));
    }
    let j_max = others
        .iter()
        .map(|&q| system.coupling(control, q).abs())
        .fold(0.0, f64::max);
    if j_max == 0.0 {
        return Err(Error::Precondition("control couples to neither qubit".into()));
    }
    let ordered = system.permuted(&[others[0], others[1], control])?;
    let qubits = [ordered.spins[0].label.clone(), ordered.spins[1].label.clone()];
    let h = build_hamiltonian(&ordered)?;

    let mut levels: Vec<f64> = h.eigenvalues.iter().copied().collect();
    levels.sort_by(f64::total_cmp);
    let min_gap = levels
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 1e-9 * j_max)
        .fold(f64::INFINITY, f64::min);
    let base_res = options
        .resolution
        .unwrap_or(1e-3 * std::f64::consts::PI * HBAR / j_max);
    let (t0, t1) = options
        .tau_range
        .unwrap_or((base_res, 8.0 * std::f64::consts::PI * HBAR / min_gap));
    if !(t0 >= 0.0 && t1 > t0 && base_res > 0.0) {
        return Err(Error::Precondition("empty τ search window".into()));
    }
    let steps = (((t1 - t0) / base_res).ceil() as usize).clamp(4, MAX_SCAN_STEPS);
    let res = (t1 - t0) / steps as f64;

    let scan: Vec<f64> = (0..=steps)
        .into_par_iter()
        .map(|k| leak(&h, t0 + k as f64 * res))
        .collect();

    let mut minima: Vec<usize> = (0..=steps)
        .filter(|&k| {
            k > 0 && k < steps && scan[k] <= scan[k - 1] && scan[k] <= scan[k + 1]
        })
        .collect();
    // Only minima that could plausibly reach zero need refining.
    let floor = scan.iter().copied().fold(f64::INFINITY, f64::min);
    minima.retain(|&k| scan[k] < 1e-2 || scan[k] <= floor);
    if minima.is_empty() {
        let k = (1..steps).min_by(|&a, &b| scan[a].total_cmp(&scan[b])).unwrap_or(1);
        minima.push(k);
    }

    let refined: Vec<f64> = minima
        .par_iter()
        .map(|&k| {
            let a = t0 + k.saturating_sub(1) as f64 * res;
            let b = t0 + (k + 1).min(steps) as f64 * res;
            golden_minimum(&h, a, b)
        })
        .collect();

    let target = options.target.as_ref();
    let candidates: Vec<GateReport> = refined
        .iter()
        .map(|&tau| report(&h, tau, &qubits, target))
        .collect();

    let clean = candidates
        .iter()
        .filter(|r| r.control_residual_entanglement < options.threshold)
        .fold(None::<&GateReport>, |best, r| match best {
            Some(b) if r.entangling_power <= b.entangling_power + 1e-9 => Some(b),
            _ => Some(r),
        });
    if let Some(best) = clean {
        return Ok(best.clone());
    }
    let best = candidates
        .into_iter()
        .min_by(|a, b| {
            a.control_residual_entanglement
                .total_cmp(&b.control_residual_entanglement)
        })
        .expect("a scan always has a minimum");
    Err(Error::NoCleanGate {
        best: Box::new(best),
    })
}
