//! The configuration experiment: EPR spectra recorded while the laser is
//! swept through the control lines, and what can be read back from them.
//!
//! Measurement model. A control is excited when the laser sits inside its
//! homogeneous line, |f − E_c| ≤ δ_h/2. Each qubit line is a Lorentzian of
//! unit height; an excited control coupled with J splits it into a doublet
//! at ±J/2 (the two control spin states), each of half height.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spins::{sfg_gate, Coupling, GateOptions, GateReport, SpinSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlLine {
    pub id: String,
    /// Optical transition energy, meV.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitLine {
    pub id: String,
    /// EPR resonance, meV.
    pub epr_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitedCoupling {
    pub control: String,
    pub qubit: String,
    /// meV.
    pub j: f64,
}

/// Everything the scan depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanInputs {
    pub controls: Vec<ControlLine>,
    pub qubits: Vec<QubitLine>,
    pub couplings: Vec<ExcitedCoupling>,
    /// δ_h, meV.
    pub homogeneous_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EprModel {
    /// Centre of the qubit EPR lines, meV.
    pub center: f64,
    /// Qubit EPR lines are spread uniformly over center ± spread, meV.
    pub spread: f64,
    /// FWHM of one EPR line, meV.
    pub linewidth: f64,
}

impl Default for EprModel {
    fn default() -> Self {
        EprModel {
            center: 0.0,
            spread: 2.0,
            linewidth: 0.05,
        }
    }
}

impl EprModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.linewidth > 0.0) || !(self.spread >= 0.0) || !self.center.is_finite() {
            return Err(Error::Precondition("EPR linewidth must be positive and spread non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMap {
    /// meV, strictly increasing.
    pub optical_axis: Vec<f64>,
    /// meV, strictly increasing.
    pub epr_axis: Vec<f64>,
    /// response[i][j] at (optical_axis[i], epr_axis[j]).
    pub response: Vec<Vec<f64>>,
    pub epr_linewidth: f64,
    /// Unperturbed EPR lines and the qubits they belong to. These are read
    /// off the laser-off spectrum.
    pub epr_lines: Vec<(String, f64)>,
    /// Controls, couplings and optical lines are not recorded.
    pub ground_truth_hidden: bool,
}

fn lorentzian(x: f64, width: f64) -> f64 {
    let u = 2.0 * x / width;
    1.0 / (1.0 + u * u)
}

fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

fn check_inputs(inputs: &ScanInputs, epr: &EprModel) -> Result<()> {
    epr.validate()?;
    if !(inputs.homogeneous_width > 0.0) {
        return Err(Error::Precondition("homogeneous width must be positive".into()));
    }
    for c in &inputs.couplings {
        if !inputs.controls.iter().any(|x| x.id == c.control) || !inputs.qubits.iter().any(|q| q.id == c.qubit) {
            return Err(Error::Dependency(format!(
                "coupling {}–{} names an unknown dopant",
                c.control, c.qubit
            )));
        }
    }
    Ok(())
}

/// Scan on automatically chosen axes: the optical axis covers every control
/// line with a 3δ_h margin in steps of δ_h/8; the EPR axis covers every
/// displaced line with a margin of 10 linewidths in steps of linewidth/4.
pub fn simulate_scan(inputs: &ScanInputs, epr: &EprModel) -> Result<ScanMap> {
    check_inputs(inputs, epr)?;
    let dh = inputs.homogeneous_width;
    let energies = inputs.controls.iter().map(|c| c.energy);
    let (olo, ohi) = energies.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| (a.min(e), b.max(e)));
    let optical = if inputs.controls.is_empty() {
        vec![0.0]
    } else {
        axis(olo - 3.0 * dh, ohi + 3.0 * dh, dh / 8.0)
    };
    let reach = inputs.couplings.iter().map(|c| c.j.abs() / 2.0).fold(0.0, f64::max);
    let epr_pos = inputs.qubits.iter().map(|q| q.epr_energy);
    let (elo, ehi) = epr_pos.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| (a.min(e), b.max(e)));
    let margin = reach + 10.0 * epr.linewidth;
    let epr_axis = if inputs.qubits.is_empty() {
        axis(epr.center - margin, epr.center + margin, epr.linewidth / 4.0)
    } else {
        axis(elo - margin, ehi + margin, epr.linewidth / 4.0)
    };
    simulate_scan_on(inputs, epr, &optical, &epr_axis)
}

/// Scan on caller-supplied axes.
pub fn simulate_scan_on(inputs: &ScanInputs, epr: &EprModel, optical_axis: &[f64], epr_axis: &[f64]) -> Result<ScanMap> {
    check_inputs(inputs, epr)?;
    for a in [optical_axis, epr_axis] {
        if a.is_empty() || a.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("scan axes must be non-empty and strictly increasing".into()));
        }
    }
    let half = inputs.homogeneous_width / 2.0;
    let response = optical_axis
        .par_iter()
        .map(|&f| {
            let excited: Vec<&str> = inputs
                .controls
                .iter()
                .filter(|c| (f - c.energy).abs() <= half)
                .map(|c| c.id.as_str())
                .collect();
            let mut row = vec![0.0; epr_axis.len()];
            for q in &inputs.qubits {
                // the doublet structure from every excited coupled control
                let mut lines = vec![(q.epr_energy, 1.0)];
                for c in inputs.couplings.iter().filter(|c| c.qubit == q.id && excited.contains(&c.control.as_str())) {
                    lines = lines
                        .iter()
                        .flat_map(|&(x, w)| [(x - c.j / 2.0, w / 2.0), (x + c.j / 2.0, w / 2.0)])
                        .collect();
                }
                for (v, e) in row.iter_mut().zip(epr_axis) {
                    *v += lines.iter().map(|&(x, w)| w * lorentzian(e - x, epr.linewidth)).sum::<f64>();
                }
            }
            row
        })
        .collect();
    Ok(ScanMap {
        optical_axis: optical_axis.to_vec(),
        epr_axis: epr_axis.to_vec(),
        response,
        epr_linewidth: epr.linewidth,
        epr_lines: inputs.qubits.iter().map(|q| (q.id.clone(), q.epr_energy)).collect(),
        ground_truth_hidden: true,
    })
}

impl ScanMap {
    /// One row per optical frequency: `optical_meV` then one column per EPR
    /// axis point, headed by its energy.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["optical_meV".to_string()];
        header.extend(self.epr_axis.iter().map(|e| format!("{e}")));
        out.write_record(&header)?;
        for (f, row) in self.optical_axis.iter().zip(&self.response) {
            let mut rec = vec![format!("{f}")];
            rec.extend(row.iter().map(|v| format!("{v}")));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferredCoupling {
    pub qubit: String,
    /// Twice the measured doublet displacement, meV.
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferredGate {
    /// Centre of the optical window that moves these lines, meV.
    pub optical_energy: f64,
    /// Couplings at or above the detection threshold, in EPR-line order.
    pub qubits: Vec<InferredCoupling>,
    /// Set when the window is wider than one homogeneous line, borders
    /// another window, or a displaced line could not be paired.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct AdjacencyHypothesis {
    pub gates: Vec<InferredGate>,
}

impl AdjacencyHypothesis {
    /// Labels each inferred gate with the control whose optical line lies
    /// closest to it, if within `tolerance` meV.
    pub fn label_controls(&self, controls: &[ControlLine], tolerance: f64) -> Vec<(Option<String>, &InferredGate)> {
        self.gates
            .iter()
            .map(|g| {
                let best = controls
                    .iter()
                    .map(|c| (c, (c.energy - g.optical_energy).abs()))
                    .filter(|(_, d)| *d <= tolerance)
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(c, _)| c.id.clone());
                (best, g)
            })
            .collect()
    }
}

struct Peak {
    position: f64,
    height: f64,
}

fn peaks(row: &[f64], axis: &[f64], floor: f64) -> Vec<Peak> {
    let step = axis[1] - axis[0];
    (1..row.len() - 1)
        .filter(|&j| row[j] > floor && row[j] >= row[j - 1] && row[j] > row[j + 1])
        .map(|j| {
            // parabolic refinement on a uniform grid
            let (a, b, c) = (row[j - 1], row[j], row[j + 1]);
            let denom = a - 2.0 * b + c;
            let dx = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            Peak {
                position: axis[j] + dx * step,
                height: b - 0.25 * (a - c) * dx,
            }
        })
        .collect()
}

fn nearest(axis: &[f64], x: f64) -> usize {
    match axis.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(k) => k,
        Err(k) if k == 0 => 0,
        Err(k) if k >= axis.len() => axis.len() - 1,
        Err(k) => {
            if x - axis[k - 1] <= axis[k] - x {
                k - 1
            } else {
                k
            }
        }
    }
}

struct RowReading {
    moved: Vec<usize>,
    /// Estimated coupling per EPR line (0 when unmoved).
    coupling: Vec<f64>,
    unpaired: bool,
}

fn read_row(scan: &ScanMap, row: &[f64]) -> RowReading {
    let w = scan.epr_linewidth;
    let axis = &scan.epr_axis;
    let reference = |k: usize| -> f64 {
        scan.epr_lines
            .iter()
            .map(|(_, x)| lorentzian(axis[k] - x, w))
            .sum()
    };
    let found = peaks(row, axis, 0.1);
    let mut moved = Vec::new();
    let mut coupling = vec![0.0; scan.epr_lines.len()];
    let mut unpaired = false;
    for (q, (_, x)) in scan.epr_lines.iter().enumerate() {
        let k = nearest(axis, *x);
        if row[k] >= 0.75 * reference(k) {
            continue;
        }
        moved.push(q);
        // a doublet centred on the unperturbed line; halves may sit on top
        // of other lines, so their heights are only bounded below
        let mut best: Option<(f64, f64)> = None;
        let halves = || found.iter().filter(|p| p.height >= 0.25);
        for a in halves().filter(|p| p.position < *x) {
            for b in halves().filter(|p| p.position > *x) {
                let asym = (a.position + b.position - 2.0 * x).abs();
                if asym <= w && best.is_none_or(|(s, _)| asym < s) {
                    best = Some((asym, b.position - a.position));
                }
            }
        }
        // an unresolved doublet lowers the central peak to 1/(1 + (J/w)²)
        let single = found
            .iter()
            .find(|p| (p.position - x).abs() <= 0.5 * w && p.height < 1.0)
            .map(|p| w * (1.0 / p.height - 1.0).sqrt());
        match (best, single) {
            (Some((asym, split)), _) if asym <= 0.05 * w => coupling[q] = split,
            (_, Some(j)) => coupling[q] = j,
            (Some((_, split)), None) => coupling[q] = split,
            (None, None) => unpaired = true,
        }
    }
    RowReading {
        moved,
        coupling,
        unpaired,
    }
}

/// Reads gates off a scan: contiguous optical windows that displace the
/// same set of EPR lines form one gate.
pub fn infer_adjacency(scan: &ScanMap, detection_threshold: f64) -> Result<AdjacencyHypothesis> {
    if !(detection_threshold > 0.0) {
        return Err(Error::Precondition("detection threshold must be positive".into()));
    }
    if scan.response.len() != scan.optical_axis.len() || scan.response.iter().any(|r| r.len() != scan.epr_axis.len()) {
        return Err(Error::Shape("scan response does not match its axes".into()));
    }
    if scan.epr_lines.is_empty() || scan.epr_axis.len() < 3 {
        return Ok(AdjacencyHypothesis::default());
    }
    let readings: Vec<RowReading> = scan.response.par_iter().map(|r| read_row(scan, r)).collect();

    // runs of rows with the same non-empty displaced set
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < readings.len() {
        if readings[i].moved.is_empty() {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < readings.len() && readings[j + 1].moved == readings[i].moved {
            j += 1;
        }
        runs.push((i, j));
        i = j + 1;
    }

    let step = if scan.optical_axis.len() > 1 {
        scan.optical_axis[1] - scan.optical_axis[0]
    } else {
        0.0
    };
    let widths: Vec<f64> = runs
        .iter()
        .map(|&(a, b)| scan.optical_axis[b] - scan.optical_axis[a])
        .collect();
    // every run of an isolated control has the same width
    let typical = {
        let mut w = widths.clone();
        w.sort_by(f64::total_cmp);
        w.get(w.len() / 2).copied().unwrap_or(0.0)
    };
    let gates = runs
        .iter()
        .enumerate()
        .map(|(n, &(a, b))| {
            let mid = (a + b) / 2;
            let reading = &readings[mid];
            let touches = (n > 0 && runs[n - 1].1 + 1 == a) || (n + 1 < runs.len() && runs[n + 1].0 == b + 1);
            let too_wide = widths[n] > typical + 2.0 * step;
            let qubits = reading
                .moved
                .iter()
                .filter(|&&q| reading.coupling[q] >= detection_threshold)
                .map(|&q| InferredCoupling {
                    qubit: scan.epr_lines[q].0.clone(),
                    coupling: reading.coupling[q],
                })
                .collect();
            InferredGate {
                optical_energy: 0.5 * (scan.optical_axis[a] + scan.optical_axis[b]),
                qubits,
                ambiguous: touches || too_wide || reading.unpaired,
            }
        })
        .filter(|g| !g.qubits.is_empty() || g.ambiguous)
        .collect();
    Ok(AdjacencyHypothesis { gates })
}

#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    /// Gate tuned on the inferred couplings.
    pub gate: GateReport,
    /// Average gate fidelity against the gate found from the true couplings.
    pub fidelity: f64,
}

fn star(control: &str, couplings: &[(String, f64)]) -> SpinSystem {
    let refs: Vec<(&str, f64)> = couplings.iter().map(|(q, j)| (q.as_str(), *j)).collect();
    SpinSystem::star(control, &refs)
}

/// Tunes the gate of `control` using the couplings read from the scan and
/// compares it with the gate the true couplings would call for.
pub fn calibrate_gate_time(
    inferred: &InferredGate,
    control: &str,
    true_couplings: &[ExcitedCoupling],
    options: &GateOptions,
) -> Result<Calibration> {
    if inferred.qubits.len() != 2 {
        return Err(Error::Precondition(format!(
            "control {control} has {} inferred qubits; a gate needs exactly two",
            inferred.qubits.len()
        )));
    }
    let estimated: Vec<(String, f64)> = inferred
        .qubits
        .iter()
        .map(|c| (c.qubit.clone(), c.coupling))
        .collect();
    let truth: Vec<(String, f64)> = estimated
        .iter()
        .map(|(q, _)| {
            let j = true_couplings
                .iter()
                .filter(|c| c.control == control && &c.qubit == q)
                .map(|c| c.j)
                .sum();
            (q.clone(), j)
        })
        .collect();
    let reference = sfg_gate(&star(control, &truth), 0, options)?;
    let options = GateOptions {
        target: Some(reference.qubit_unitary.clone()),
        ..options.clone()
    };
    let gate = sfg_gate(&star(control, &estimated), 0, &options)?;
    let fidelity = gate.fidelity_to_target.expect("target was set");
    Ok(Calibration { gate, fidelity })
}

/// Couplings as a spin system: the control plus its coupled qubits.
pub fn gate_system(control: &str, couplings: &[ExcitedCoupling]) -> SpinSystem {
    let mine: Vec<(String, f64)> = couplings
        .iter()
        .filter(|c| c.control == control)
        .map(|c| (c.qubit.clone(), c.j))
        .collect();
    let mut s = star(control, &mine);
    s.couplings.retain(|c: &Coupling| c.j_mev != 0.0);
    s
}

/// A random two-control, three-qubit arrangement meeting the round-trip
/// conditions: optical lines at least k·δ_h apart and every coupling either
/// above 5× or below 1/5 of `threshold`. EPR lines are at least four
/// linewidths apart.
pub fn separable_random_inputs(seed: u64, threshold: f64, homogeneous_width: f64, k: f64, epr: &EprModel) -> ScanInputs {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let spread = 20.0 * homogeneous_width;
    let (e1, e2) = loop {
        let a = rng.random_range(-spread..spread);
        let b = rng.random_range(-spread..spread);
        if (a - b).abs() >= k * homogeneous_width {
            break (a, b);
        }
    };
    let lines: Vec<f64> = loop {
        let v: Vec<f64> = (0..3)
            .map(|_| epr.center + rng.random_range(-1.0..1.0) * epr.spread)
            .collect();
        let ok = (0..3).all(|i| (0..i).all(|j| (v[i] - v[j]).abs() >= 4.0 * epr.linewidth));
        if ok {
            break v;
        }
    };
    let controls = vec![
        ControlLine { id: "C1".into(), energy: e1 },
        ControlLine { id: "C2".into(), energy: e2 },
    ];
    let qubits: Vec<QubitLine> = lines
        .iter()
        .enumerate()
        .map(|(i, &e)| QubitLine { id: format!("Q{}", i + 1), epr_energy: e })
        .collect();
    let mut couplings = Vec::new();
    for c in &controls {
        for q in &qubits {
            let j = if rng.random::<bool>() {
                rng.random_range(5.0 * threshold..60.0 * threshold)
            } else {
                rng.random_range(0.0..0.2 * threshold)
            };
            couplings.push(ExcitedCoupling { control: c.id.clone(), qubit: q.id.clone(), j });
        }
    }
    ScanInputs { controls, qubits, couplings, homogeneous_width }
}

/// Whether `hypothesis` names exactly the couplings of `inputs` at or
/// above `threshold`, with each gate matched to the nearest control line.
pub fn matches_ground_truth(hypothesis: &AdjacencyHypothesis, inputs: &ScanInputs, threshold: f64) -> bool {
    let mut expected: Vec<(String, Vec<String>)> = inputs
        .controls
        .iter()
        .map(|c| {
            let mut qs: Vec<String> = inputs
                .couplings
                .iter()
                .filter(|x| x.control == c.id && x.j >= threshold)
                .map(|x| x.qubit.clone())
                .collect();
            qs.sort();
            (c.id.clone(), qs)
        })
        .filter(|(_, qs)| !qs.is_empty())
        .collect();
    expected.sort();
    let mut found: Vec<(String, Vec<String>)> = Vec::new();
    for (label, g) in hypothesis.label_controls(&inputs.controls, inputs.homogeneous_width / 2.0) {
        let Some(label) = label else { return false };
        if g.ambiguous {
            return false;
        }
        let mut qs: Vec<String> = g.qubits.iter().map(|c| c.qubit.clone()).collect();
        qs.sort();
        found.push((label, qs));
    }
    found.sort();
    found == expected
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cl(id: &str, e: f64) -> ControlLine {
        ControlLine { id: id.into(), energy: e }
    }
    fn ql(id: &str, e: f64) -> QubitLine {
        QubitLine { id: id.into(), epr_energy: e }
    }
    fn j(c: &str, q: &str, v: f64) -> ExcitedCoupling {
        ExcitedCoupling { control: c.into(), qubit: q.into(), j: v }
    }

    fn two_gates() -> ScanInputs {
        ScanInputs {
            controls: vec![cl("C1", 440.0), cl("C2", 452.0)],
            qubits: vec![ql("Q1", -1.0), ql("Q2", 0.3), ql("Q3", 1.4)],
            couplings: vec![
                j("C1", "Q1", 38.7),
                j("C1", "Q2", 12.9),
                j("C2", "Q2", 6.98),
                j("C2", "Q3", 48.9),
                j("C1", "Q3", 0.208),
                j("C2", "Q1", 0.0096),
            ],
            homogeneous_width: 1.1,
        }
    }

    #[test]
    fn unexcited_row_is_plain_epr_spectrum() {
        let inputs = two_gates();
        let epr = EprModel::default();
        let scan = simulate_scan(&inputs, &epr).unwrap();
        let row = &scan.response[0];
        for (k, e) in scan.epr_axis.iter().enumerate() {
            let expected: f64 = inputs.qubits.iter().map(|q| lorentzian(e - q.epr_energy, epr.linewidth)).sum();
            assert_relative_eq!(row[k], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn exciting_one_control_moves_its_two_qubits() {
        let scan = simulate_scan(&two_gates(), &EprModel::default()).unwrap();
        let hyp = infer_adjacency(&scan, 1.0).unwrap();
        assert_eq!(hyp.gates.len(), 2);
        let names: Vec<Vec<&str>> = hyp
            .gates
            .iter()
            .map(|g| g.qubits.iter().map(|c| c.qubit.as_str()).collect())
            .collect();
        assert_eq!(names, vec![vec!["Q1", "Q2"], vec!["Q2", "Q3"]]);
        assert!(hyp.gates.iter().all(|g| !g.ambiguous));
        assert_relative_eq!(hyp.gates[0].qubits[0].coupling, 38.7, epsilon = 0.02);
        assert_relative_eq!(hyp.gates[1].qubits[1].coupling, 48.9, epsilon = 0.02);
        assert_relative_eq!(hyp.gates[0].optical_energy, 440.0, epsilon = 0.15);
        let labels = hyp.label_controls(&two_gates().controls, 0.55);
        assert_eq!(labels[1].0.as_deref(), Some("C2"));
    }

    #[test]
    fn doubling_a_coupling_doubles_the_displacement() {
        let mut inputs = two_gates();
        let a = infer_adjacency(&simulate_scan(&inputs, &EprModel::default()).unwrap(), 1.0).unwrap();
        inputs.couplings[1].j *= 2.0;
        let b = infer_adjacency(&simulate_scan(&inputs, &EprModel::default()).unwrap(), 1.0).unwrap();
        assert_relative_eq!(b.gates[0].qubits[1].coupling / a.gates[0].qubits[1].coupling, 2.0, epsilon = 0.01);
    }

    #[test]
    fn empty_scenario_gives_empty_hypothesis() {
        let inputs = ScanInputs {
            controls: vec![],
            qubits: vec![],
            couplings: vec![],
            homogeneous_width: 1.0,
        };
        let scan = simulate_scan(&inputs, &EprModel::default()).unwrap();
        assert!(infer_adjacency(&scan, 1.0).unwrap().gates.is_empty());
    }

    #[test]
    fn scan_is_additive_over_separate_clusters() {
        let all = two_gates();
        let part = |ids: &[&str], qs: &[&str]| ScanInputs {
            controls: all.controls.iter().filter(|c| ids.contains(&c.id.as_str())).cloned().collect(),
            qubits: all.qubits.iter().filter(|q| qs.contains(&q.id.as_str())).cloned().collect(),
            couplings: all
                .couplings
                .iter()
                .filter(|c| ids.contains(&c.control.as_str()) && qs.contains(&c.qubit.as_str()))
                .cloned()
                .collect(),
            homogeneous_width: all.homogeneous_width,
        };
        // C1 with Q1 and C2 with Q3 do not share qubits
        let a = part(&["C1"], &["Q1"]);
        let b = part(&["C2"], &["Q3"]);
        let union = ScanInputs {
            controls: [a.controls.clone(), b.controls.clone()].concat(),
            qubits: [a.qubits.clone(), b.qubits.clone()].concat(),
            couplings: [a.couplings.clone(), b.couplings.clone()].concat(),
            homogeneous_width: all.homogeneous_width,
        };
        let epr = EprModel::default();
        let optical: Vec<f64> = (0..120).map(|k| 435.0 + 0.2 * k as f64).collect();
        let epr_axis: Vec<f64> = (0..4000).map(|k| -30.0 + 0.015 * k as f64).collect();
        let sa = simulate_scan_on(&a, &epr, &optical, &epr_axis).unwrap();
        let sb = simulate_scan_on(&b, &epr, &optical, &epr_axis).unwrap();
        let su = simulate_scan_on(&union, &epr, &optical, &epr_axis).unwrap();
        for i in 0..optical.len() {
            for k in 0..epr_axis.len() {
                assert!((su.response[i][k] - sa.response[i][k] - sb.response[i][k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_separable_cases_round_trip() {
        let epr = EprModel::default();
        for seed in 0..20 {
            let inputs = separable_random_inputs(seed, 1.0, 1.1, 1.5, &epr);
            let hyp = infer_adjacency(&simulate_scan(&inputs, &epr).unwrap(), 1.0).unwrap();
            assert!(matches_ground_truth(&hyp, &inputs, 1.0), "seed {seed}: {hyp:?}");
        }
    }

    #[test]
    fn close_optical_lines_are_flagged() {
        let mut inputs = two_gates();
        inputs.controls[1].energy = 440.8;
        let hyp = infer_adjacency(&simulate_scan(&inputs, &EprModel::default()).unwrap(), 1.0).unwrap();
        assert!(hyp.gates.iter().any(|g| g.ambiguous));
    }

    #[test]
    fn exact_inference_calibrates_perfectly() {
        let inputs = two_gates();
        let gate = InferredGate {
            optical_energy: 440.0,
            qubits: vec![
                InferredCoupling { qubit: "Q1".into(), coupling: 1.0 },
                InferredCoupling { qubit: "Q2".into(), coupling: 1.0 },
            ],
            ambiguous: false,
        };
        let truth = vec![j("C1", "Q1", 1.0), j("C1", "Q2", 1.0)];
        let cal = calibrate_gate_time(&gate, "C1", &truth, &GateOptions::default()).unwrap();
        assert_relative_eq!(cal.fidelity, 1.0, epsilon = 1e-8);
        let one = InferredGate { qubits: gate.qubits[..1].to_vec(), ..gate.clone() };
        assert!(matches!(
            calibrate_gate_time(&one, "C1", &inputs.couplings, &GateOptions::default()),
            Err(Error::Precondition(_))
        ));
    }
}
