//! The lattice → integrals → spectra → spins → configure pipeline.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Placements, Scenario};
use crate::configure::{
    calibrate_gate_time, infer_adjacency, matches_ground_truth, simulate_scan, AdjacencyHypothesis, ControlLine,
    EprModel, ExcitedCoupling, QubitLine, ScanInputs,
};
use crate::donor::{DonorModel, Role};
use crate::error::{Error, Result};
use crate::integrals::{control_pair_transfer, control_qubit_exchange, IntegralEngine, PAxis};
use crate::lattice::place_dopants;
use crate::spectra::{gate_transitions, resolvable_gate_count, ControlSite, TransitionLine};
use crate::spins::{effective_coupling, sfg_gate, GateOptions, GateReport, SpinSystem};
use crate::units::HBAR;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedDopant {
    pub label: String,
    pub species: String,
    pub role: Role,
    /// Å.
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchangeRow {
    pub control: String,
    pub qubit: String,
    pub separation_angstrom: f64,
    /// Exchange with the control excited, meV.
    pub j_mev: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateDynamics {
    /// Whether the residual stayed below the scenario threshold. If not,
    /// `report` is the best candidate found.
    pub clean: bool,
    pub report: GateReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateSummary {
    pub control: String,
    /// Optical line, meV.
    pub transition_energy: f64,
    /// Qubits at or above the detection threshold, strongest first.
    pub couplings: Vec<(String, f64)>,
    /// J₁J₂/ΔE for two-qubit gates, meV.
    pub j_eff: Option<f64>,
    /// πħ/J_eff, ps.
    pub gate_time_ps: Option<f64>,
    /// Shortest T₂ among the gate's qubits, ps.
    pub t2_budget_ps: f64,
    pub within_t2: Option<bool>,
    /// No other control that couples to a qubit has its line within k·δ_h.
    pub isolated: bool,
    pub usable: bool,
    pub dynamics: Option<GateDynamics>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationSummary {
    pub control: String,
    pub qubits: Vec<String>,
    pub duration_ps: Option<f64>,
    pub fidelity: Option<f64>,
    /// Why no calibrated gate is reported.
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdjacencyOutcome {
    pub qubit_epr_lines: Vec<QubitLine>,
    pub hypothesis: AdjacencyHypothesis,
    pub matches_ground_truth: bool,
    pub calibrations: Vec<CalibrationSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub dopants: Vec<ResolvedDopant>,
    pub n_controls: usize,
    pub n_qubits: usize,
    /// Rows within the cutoff, strongest first.
    pub exchange: Vec<ExchangeRow>,
    pub transitions: Vec<TransitionLine>,
    pub broadening_ratio: f64,
    /// Controls with at least two qubits above the detection threshold.
    pub gates: Vec<GateSummary>,
    /// Greedy count of gate lines separated by k·δ_h.
    pub resolvable_gate_count: usize,
    /// Two-qubit, isolated gates that fit in the T₂ budget.
    pub usable_gate_count: usize,
    pub qubit_target_met: bool,
    pub gate_target_met: bool,
    pub adjacency: Option<AdjacencyOutcome>,
}

/// Pair quantities that only depend on the species and the separation.
#[derive(Default)]
struct PairCache {
    exchange: Mutex<HashMap<(String, String, i64), f64>>,
    transfer: Mutex<HashMap<(String, i64), f64>>,
}

/// Separations are quantized to 1 μÅ so cached values do not depend on
/// which of two nearly equal separations was computed first.
fn quantize(r: f64) -> i64 {
    (r * 1e6).round() as i64
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn sub_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

const STREAM_SPECTRA: u64 = 1;
const STREAM_EPR: u64 = 2;
const STREAM_PATCHES: u64 = 1 << 32;

fn resolve_dopants(s: &Scenario) -> Result<Vec<ResolvedDopant>> {
    let role_of = |species: &str| -> Result<Role> {
        s.species(species)
            .map(|m| m.role)
            .ok_or_else(|| Error::InvalidScenario(format!("undeclared species {species}")))
    };
    match &s.placements {
        Placements::Explicit(list) => list
            .iter()
            .map(|d| {
                Ok(ResolvedDopant {
                    label: d.label.clone(),
                    species: d.species.clone(),
                    role: role_of(&d.species)?,
                    position: d.position,
                })
            })
            .collect(),
        Placements::Random(r) => {
            if r.concentration == 0.0 {
                return Ok(Vec::new());
            }
            let region = place_dopants(&s.lattice, r.concentration, &r.mix, s.seed)?;
            let (mut nc, mut nq) = (0, 0);
            region
                .placements
                .iter()
                .map(|p| {
                    let role = role_of(&p.species)?;
                    let label = match role {
                        Role::Control => {
                            nc += 1;
                            format!("C{nc}")
                        }
                        Role::Qubit => {
                            nq += 1;
                            format!("Q{nq}")
                        }
                    };
                    Ok(ResolvedDopant {
                        label,
                        species: p.species.clone(),
                        role,
                        position: region.position(p),
                    })
                })
                .collect()
        }
    }
}

fn exchange_rows(
    s: &Scenario,
    engine: &IntegralEngine,
    controls: &[&ResolvedDopant],
    qubits: &[&ResolvedDopant],
    cache: &PairCache,
) -> Result<Vec<ExchangeRow>> {
    let mut pairs = Vec::new();
    for c in controls {
        for q in qubits {
            let r = distance(c.position, q.position);
            if r <= s.exchange.cutoff {
                pairs.push((*c, *q, r));
            }
        }
    }
    let model = |name: &str| -> &DonorModel { s.species(name).expect("validated") };
    // With a fixed axis J depends on direction, so nothing is shared.
    let by_separation = !matches!(s.exchange.axis, PAxis::Fixed(_));
    let j_values: Vec<f64> = if by_separation {
        let mut needed: Vec<(String, String, i64)> = {
            let known = cache.exchange.lock().expect("cache lock");
            pairs
                .iter()
                .map(|(c, q, r)| (c.species.clone(), q.species.clone(), quantize(*r)))
                .filter(|k| !known.contains_key(k))
                .collect()
        };
        needed.sort();
        needed.dedup();
        let fresh: Vec<((String, String, i64), f64)> = needed
            .into_par_iter()
            .map(|key| {
                let r = key.2 as f64 * 1e-6;
                let res = control_qubit_exchange(
                    engine,
                    model(&key.0),
                    model(&key.1),
                    true,
                    [0.0; 3],
                    [r, 0.0, 0.0],
                    s.exchange.axis,
                )?;
                Ok((key, res.exchange_splitting))
            })
            .collect::<Result<_>>()?;
        let mut known = cache.exchange.lock().expect("cache lock");
        known.extend(fresh);
        pairs
            .iter()
            .map(|(c, q, r)| known[&(c.species.clone(), q.species.clone(), quantize(*r))])
            .collect()
    } else {
        pairs
            .par_iter()
            .map(|(c, q, _)| {
                control_qubit_exchange(
                    engine,
                    model(&c.species),
                    model(&q.species),
                    true,
                    c.position,
                    q.position,
                    s.exchange.axis,
                )
                .map(|r| r.exchange_splitting)
            })
            .collect::<Result<_>>()?
    };
    let mut rows: Vec<ExchangeRow> = pairs
        .iter()
        .zip(j_values)
        .map(|((c, q, r), j)| ExchangeRow {
            control: c.label.clone(),
            qubit: q.label.clone(),
            separation_angstrom: *r,
            j_mev: j,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.j_mev
            .total_cmp(&a.j_mev)
            .then_with(|| a.control.cmp(&b.control))
            .then_with(|| a.qubit.cmp(&b.qubit))
    });
    Ok(rows)
}

/// Control pairs beyond the exchange cutoff are taken as not hopping.
fn transitions(
    s: &Scenario,
    engine: &IntegralEngine,
    controls: &[&ResolvedDopant],
    cache: &PairCache,
) -> Result<Vec<TransitionLine>> {
    let mut kinds: Vec<&str> = controls.iter().map(|c| c.species.as_str()).collect();
    kinds.sort();
    kinds.dedup();
    if kinds.len() > 1 {
        return Err(Error::Precondition(format!(
            "hopping shifts need a single control species, found {}",
            kinds.join(", ")
        )));
    }
    let sites: Vec<ControlSite> = controls
        .iter()
        .map(|c| ControlSite {
            id: c.label.clone(),
            position: c.position,
        })
        .collect();
    let table: HashMap<i64, f64> = if let Some(&species) = kinds.first() {
        let model = s.species(species).expect("validated");
        let mut keys: Vec<i64> = Vec::new();
        for i in 0..sites.len() {
            for j in i + 1..sites.len() {
                let r = distance(sites[i].position, sites[j].position);
                if r <= s.exchange.cutoff {
                    keys.push(quantize(r));
                }
            }
        }
        keys.sort();
        keys.dedup();
        let missing: Vec<i64> = {
            let known = cache.transfer.lock().expect("cache lock");
            keys.iter()
                .copied()
                .filter(|k| !known.contains_key(&(species.to_string(), *k)))
                .collect()
        };
        let fresh: Vec<(i64, f64)> = missing
            .into_par_iter()
            .map(|k| Ok((k, control_pair_transfer(engine, model, k as f64 * 1e-6)?.transfer)))
            .collect::<Result<_>>()?;
        let mut known = cache.transfer.lock().expect("cache lock");
        for (k, t) in fresh {
            known.insert((species.to_string(), k), t);
        }
        keys.iter()
            .map(|k| (*k, known[&(species.to_string(), *k)]))
            .collect()
    } else {
        HashMap::new()
    };
    let cutoff = s.exchange.cutoff;
    let transfer = |r: f64| -> Result<f64> {
        if r > cutoff {
            return Ok(0.0);
        }
        Ok(table[&quantize(r)])
    };
    gate_transitions(&sites, &s.spectral, &transfer, sub_seed(s.seed, STREAM_SPECTRA))
}

fn gate_summaries(
    s: &Scenario,
    controls: &[&ResolvedDopant],
    exchange: &[ExchangeRow],
    lines: &[TransitionLine],
    dopants: &[ResolvedDopant],
) -> Result<Vec<GateSummary>> {
    let gap = s.spectral.resolution_factor * s.spectral.homogeneous_width;
    let t2_of = |label: &str| -> f64 {
        dopants
            .iter()
            .find(|d| d.label == label)
            .and_then(|d| s.species(&d.species))
            .map_or(f64::INFINITY, |m| m.t2)
    };
    let options = GateOptions {
        threshold: s.thresholds.gate_residual,
        ..GateOptions::default()
    };
    let active: std::collections::HashSet<&str> = exchange
        .iter()
        .filter(|r| r.j_mev >= s.thresholds.detection)
        .map(|r| r.control.as_str())
        .collect();
    let mut gates = Vec::new();
    for (c, line) in controls.iter().zip(lines) {
        let couplings: Vec<(String, f64)> = exchange
            .iter()
            .filter(|r| r.control == c.label && r.j_mev >= s.thresholds.detection)
            .map(|r| (r.qubit.clone(), r.j_mev))
            .collect();
        if couplings.len() < 2 {
            continue;
        }
        let isolated = lines
            .iter()
            .filter(|l| l.gate_id != line.gate_id && active.contains(l.gate_id.as_str()))
            .all(|l| (l.energy - line.energy).abs() >= gap * (1.0 - 1e-9));
        let t2_budget_ps = couplings.iter().map(|(q, _)| t2_of(q)).fold(f64::INFINITY, f64::min);
        let (mut j_eff, mut gate_time_ps, mut within_t2, mut dynamics) = (None, None, None, None);
        if let [(q1, j1), (q2, j2)] = couplings.as_slice() {
            let je = effective_coupling(*j1, *j2, s.exchange.excitation_energy)?;
            let t = std::f64::consts::PI * HBAR / je;
            j_eff = Some(je);
            gate_time_ps = Some(t);
            within_t2 = Some(t < t2_budget_ps);
            if s.stages.gate_dynamics {
                let system = SpinSystem::star(&c.label, &[(q1, *j1), (q2, *j2)]);
                dynamics = Some(match sfg_gate(&system, 0, &options) {
                    Ok(report) => GateDynamics { clean: true, report },
                    Err(Error::NoCleanGate { best }) => GateDynamics {
                        clean: false,
                        report: *best,
                    },
                    Err(e) => return Err(e),
                });
            }
        }
        let usable = within_t2 == Some(true) && isolated;
        gates.push(GateSummary {
            control: c.label.clone(),
            transition_energy: line.energy,
            couplings,
            j_eff,
            gate_time_ps,
            t2_budget_ps,
            within_t2,
            isolated,
            usable,
            dynamics,
        });
    }
    Ok(gates)
}

/// Uniform over placements in center ± spread with neighbours at least
/// four linewidths apart, handed to the qubits in random order.
fn sample_epr_lines(epr: &EprModel, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let gap = 4.0 * epr.linewidth;
    let room = 2.0 * epr.spread - (n - 1) as f64 * gap;
    if room < 0.0 {
        return Err(Error::Precondition(format!(
            "{n} EPR lines four linewidths apart do not fit in ±{} meV",
            epr.spread
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * room).collect();
    u.sort_by(f64::total_cmp);
    let mut lines: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(i, x)| epr.center - epr.spread + x + i as f64 * gap)
        .collect();
    lines.shuffle(&mut rng);
    Ok(lines)
}

fn build_scan_inputs(
    s: &Scenario,
    qubits: &[&ResolvedDopant],
    exchange: &[ExchangeRow],
    lines: &[TransitionLine],
) -> Result<ScanInputs> {
    let epr = sample_epr_lines(&s.epr, qubits.len(), sub_seed(s.seed, STREAM_EPR))?;
    Ok(ScanInputs {
        controls: lines
            .iter()
            .map(|l| ControlLine {
                id: l.gate_id.clone(),
                energy: l.energy,
            })
            .collect(),
        qubits: qubits
            .iter()
            .zip(&epr)
            .map(|(q, &e)| QubitLine {
                id: q.label.clone(),
                epr_energy: e,
            })
            .collect(),
        couplings: exchange
            .iter()
            .map(|r| ExcitedCoupling {
                control: r.control.clone(),
                qubit: r.qubit.clone(),
                j: r.j_mev,
            })
            .collect(),
        homogeneous_width: s.spectral.homogeneous_width,
    })
}

fn configuration(
    s: &Scenario,
    qubits: &[&ResolvedDopant],
    exchange: &[ExchangeRow],
    lines: &[TransitionLine],
) -> Result<AdjacencyOutcome> {
    let inputs = build_scan_inputs(s, qubits, exchange, lines)?;
    let threshold = s.thresholds.detection;
    let hypothesis = if inputs.qubits.is_empty() || inputs.controls.is_empty() {
        AdjacencyHypothesis::default()
    } else {
        infer_adjacency(&simulate_scan(&inputs, &s.epr)?, threshold)?
    };
    let matches = matches_ground_truth(&hypothesis, &inputs, threshold);
    let options = GateOptions {
        threshold: s.thresholds.gate_residual,
        ..GateOptions::default()
    };
    let mut calibrations = Vec::new();
    for (label, g) in hypothesis.label_controls(&inputs.controls, inputs.homogeneous_width / 2.0) {
        let Some(control) = label else { continue };
        if g.ambiguous || g.qubits.len() != 2 {
            continue;
        }
        let qubits = g.qubits.iter().map(|c| c.qubit.clone()).collect();
        let summary = match calibrate_gate_time(g, &control, &inputs.couplings, &options) {
            Ok(cal) => CalibrationSummary {
                control,
                qubits,
                duration_ps: Some(cal.gate.duration_ps),
                fidelity: Some(cal.fidelity),
                note: None,
            },
            Err(e @ Error::NoCleanGate { .. }) => CalibrationSummary {
                control,
                qubits,
                duration_ps: None,
                fidelity: None,
                note: Some(e.to_string()),
            },
            Err(e) => return Err(e),
        };
        calibrations.push(summary);
    }
    Ok(AdjacencyOutcome {
        qubit_epr_lines: inputs.qubits,
        hypothesis,
        matches_ground_truth: matches,
        calibrations,
    })
}

fn run_with(s: &Scenario, cache: &PairCache) -> Result<FeasibilityReport> {
    s.validate()?;
    let engine = IntegralEngine::new(s.exchange.n_terms);
    let dopants = resolve_dopants(s).map_err(|e| e.at_stage("lattice"))?;
    let controls: Vec<&ResolvedDopant> = dopants.iter().filter(|d| d.role == Role::Control).collect();
    let qubits: Vec<&ResolvedDopant> = dopants.iter().filter(|d| d.role == Role::Qubit).collect();

    let exchange = exchange_rows(s, &engine, &controls, &qubits, cache).map_err(|e| e.at_stage("integrals"))?;
    let lines = transitions(s, &engine, &controls, cache).map_err(|e| e.at_stage("spectra"))?;
    let gates = gate_summaries(s, &controls, &exchange, &lines, &dopants).map_err(|e| e.at_stage("spins"))?;

    let energies: Vec<f64> = gates.iter().map(|g| g.transition_energy).collect();
    let resolvable_gate_count = resolvable_gate_count(
        &energies,
        s.spectral.homogeneous_width,
        s.spectral.resolution_factor,
    );
    let usable_gate_count = gates.iter().filter(|g| g.usable).count();
    let adjacency = if s.stages.configuration {
        Some(configuration(s, &qubits, &exchange, &lines).map_err(|e| e.at_stage("configure"))?)
    } else {
        None
    };
    Ok(FeasibilityReport {
        scenario: s.clone(),
        seed: s.seed,
        n_controls: controls.len(),
        n_qubits: qubits.len(),
        qubit_target_met: qubits.len() >= s.targets.n_qubits,
        gate_target_met: usable_gate_count >= s.targets.n_gates,
        broadening_ratio: s.spectral.broadening_ratio(),
        dopants,
        exchange,
        transitions: lines,
        gates,
        resolvable_gate_count,
        usable_gate_count,
        adjacency,
    })
}

/// The configuration-scan inputs `scenario` produces: its control lines,
/// sampled qubit EPR lines and excited couplings.
pub fn scenario_scan_inputs(scenario: &Scenario) -> Result<ScanInputs> {
    scenario.validate()?;
    let cache = PairCache::default();
    let engine = IntegralEngine::new(scenario.exchange.n_terms);
    let dopants = resolve_dopants(scenario).map_err(|e| e.at_stage("lattice"))?;
    let controls: Vec<&ResolvedDopant> = dopants.iter().filter(|d| d.role == Role::Control).collect();
    let qubits: Vec<&ResolvedDopant> = dopants.iter().filter(|d| d.role == Role::Qubit).collect();
    let exchange =
        exchange_rows(scenario, &engine, &controls, &qubits, &cache).map_err(|e| e.at_stage("integrals"))?;
    let lines = transitions(scenario, &engine, &controls, &cache).map_err(|e| e.at_stage("spectra"))?;
    build_scan_inputs(scenario, &qubits, &exchange, &lines).map_err(|e| e.at_stage("configure"))
}

/// Runs every stage of `scenario`. Errors carry the name of the failing
/// stage. The report holds no timestamps and is a function of the scenario
/// alone.
pub fn run_feasibility(scenario: &Scenario) -> Result<FeasibilityReport> {
    run_with(scenario, &PairCache::default())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatchStatistics {
    pub template: String,
    pub n_patches: usize,
    pub seed: u64,
    pub gate_target: usize,
    pub usable_gate_counts: Vec<usize>,
    pub resolvable_gate_counts: Vec<usize>,
    pub dopant_counts: Vec<usize>,
    /// (usable gates, patches) in increasing order of gates.
    pub histogram: Vec<(usize, usize)>,
    pub fraction_meeting_target: f64,
    /// Fraction of patches whose resolvable count reaches the target.
    pub fraction_resolvable_meeting_target: f64,
    pub mean_usable_gates: f64,
    pub mean_resolvable_gates: f64,
    pub mean_dopants: f64,
}

/// Repeats the pipeline over `n_patches` random placements of `template`
/// with gate dynamics and configuration switched off.
pub fn patch_statistics(template: &Scenario, n_patches: usize, seed: u64) -> Result<PatchStatistics> {
    if n_patches == 0 {
        return Err(Error::Precondition("need at least one patch".into()));
    }
    if !matches!(template.placements, Placements::Random(_)) {
        return Err(Error::Precondition("patch statistics need random placements".into()));
    }
    template.validate()?;
    let cache = PairCache::default();
    let reports: Vec<(usize, usize, usize)> = (0..n_patches)
        .into_par_iter()
        .map(|i| {
            let mut s = template.clone();
            s.seed = sub_seed(seed, STREAM_PATCHES + i as u64);
            s.stages.gate_dynamics = false;
            s.stages.configuration = false;
            let r = run_with(&s, &cache)?;
            Ok((r.usable_gate_count, r.resolvable_gate_count, r.dopants.len()))
        })
        .collect::<Result<_>>()?;
    let usable: Vec<usize> = reports.iter().map(|r| r.0).collect();
    let resolvable: Vec<usize> = reports.iter().map(|r| r.1).collect();
    let dopants: Vec<usize> = reports.iter().map(|r| r.2).collect();
    let mut histogram: Vec<(usize, usize)> = Vec::new();
    let mut sorted = usable.clone();
    sorted.sort();
    for g in sorted {
        match histogram.last_mut() {
            Some((v, n)) if *v == g => *n += 1,
            _ => histogram.push((g, 1)),
        }
    }
    let n = n_patches as f64;
    let target = template.targets.n_gates;
    let mean = |v: &[usize]| v.iter().sum::<usize>() as f64 / n;
    Ok(PatchStatistics {
        template: template.name.clone(),
        n_patches,
        seed,
        gate_target: target,
        fraction_meeting_target: usable.iter().filter(|&&g| g >= target).count() as f64 / n,
        fraction_resolvable_meeting_target: resolvable.iter().filter(|&&g| g >= target).count() as f64 / n,
        mean_usable_gates: mean(&usable),
        mean_resolvable_gates: mean(&resolvable),
        mean_dopants: mean(&dopants),
        histogram,
        usable_gate_counts: usable,
        resolvable_gate_counts: resolvable,
        dopant_counts: dopants,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{scenario_preset, RandomPlacement};
    use super::*;

    #[test]
    fn empty_scenario_has_no_gates() {
        let r = run_feasibility(&scenario_preset("empty").unwrap()).unwrap();
        assert_eq!(r.dopants.len(), 0);
        assert_eq!(r.gates.len(), 0);
        assert_eq!(r.resolvable_gate_count, 0);
        assert_eq!(r.usable_gate_count, 0);
        assert!(r.adjacency.unwrap().matches_ground_truth);
    }

    #[test]
    fn table1_exchange_ranking_and_gates() {
        let mut s = scenario_preset("table1").unwrap();
        s.stages = super::super::Stages {
            gate_dynamics: false,
            configuration: false,
        };
        let r = run_feasibility(&s).unwrap();
        let order: Vec<String> = r.exchange.iter().map(|x| format!("{}{}", x.control, x.qubit)).collect();
        assert_eq!(order, ["C2Q3", "C1Q1", "C1Q2", "C2Q2", "C1Q3", "C2Q1"]);
        let gates: Vec<(String, Vec<String>)> = r
            .gates
            .iter()
            .map(|g| (g.control.clone(), g.couplings.iter().map(|c| c.0.clone()).collect()))
            .collect();
        assert_eq!(gates[0], ("C1".to_string(), vec!["Q1".to_string(), "Q2".to_string()]));
        assert_eq!(gates[1], ("C2".to_string(), vec!["Q3".to_string(), "Q2".to_string()]));
        for (g, reference) in r.gates.iter().zip([0.7, 0.4]) {
            let je = g.j_eff.unwrap();
            assert!(je / reference < 2.0 && reference / je < 2.0, "{je}");
        }
    }

    #[test]
    fn zero_concentration_patches_meet_no_target() {
        let mut s = scenario_preset("patch").unwrap();
        s.placements = Placements::Random(RandomPlacement {
            concentration: 0.0,
            mix: vec![("P-control".into(), 0.25), ("N-qubit".into(), 0.75)],
        });
        let stats = patch_statistics(&s, 4, 3).unwrap();
        assert_eq!(stats.fraction_meeting_target, 0.0);
        assert_eq!(stats.histogram, vec![(0, 4)]);
    }

    #[test]
    fn stage_errors_are_attributed() {
        let mut s = scenario_preset("table1").unwrap();
        s.epr.spread = 0.01;
        match run_feasibility(&s) {
            Err(Error::Stage { stage, .. }) => assert_eq!(stage, "configure"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn epr_lines_keep_their_spacing() {
        let epr = EprModel::default();
        let mut v = sample_epr_lines(&epr, 12, 9).unwrap();
        v.sort_by(f64::total_cmp);
        assert!(v.windows(2).all(|w| w[1] - w[0] >= 4.0 * epr.linewidth - 1e-12));
        assert!(v.iter().all(|x| x.abs() <= epr.spread + 1e-12));
    }
}
