use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sfgsim::configure::{infer_adjacency, separable_random_inputs, simulate_scan, EprModel, ScanMap};
use sfgsim::donor::{model_from_ionization, Role, DIAMOND_DIELECTRIC};
use sfgsim::harness::{
    exchange_curve_preset, load_scenario, patch_statistics, preset_catalog, run_feasibility,
    save_scenario, scenario_preset, scenario_scan_inputs, splitting_curve_preset, write_json, write_records,
    Format, Scenario,
};
use sfgsim::integrals::{exchange_curve_with, transfer_splitting_curve, IntegralEngine};
use sfgsim::lattice::{
    neighbor_statistics, place_dopants, shell_sizes, sphere_count, LatticeSpec, NeighborStatistics,
    DIAMOND_LATTICE_CONSTANT,
};
use sfgsim::spins::{sfg_gate, GateOptions, SpinSystem, DEFAULT_RESIDUAL_THRESHOLD};
use sfgsim::{Error, Result};

#[derive(Parser)]
#[command(name = "sfgsim", version, about = "Optically controlled donor-spin gates in diamond")]
struct Cli {
    /// Random seed. Overrides the scenario seed where there is one.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Diamond lattice site counts.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Random doping.
    #[command(subcommand)]
    Dope(DopeCmd),
    /// Effective-mass donor parameters.
    Emt(EmtArgs),
    /// Control-qubit exchange.
    #[command(subcommand)]
    Exchange(CurveCmd),
    /// Control-pair transition splitting.
    #[command(subcommand)]
    Splitting(CurveCmd),
    /// Gate dynamics.
    #[command(subcommand)]
    Gate(GateCmd),
    /// Configuration scan and adjacency inference.
    #[command(subcommand)]
    Configure(ConfigureCmd),
    /// Full pipeline.
    #[command(subcommand)]
    Feasibility(FeasibilityCmd),
    #[command(subcommand)]
    Presets(PresetsCmd),
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Sites within each radius, centre site included.
    Count {
        #[arg(long, num_args = 1.., default_values_t = [10.0, 18.0, 25.0])]
        radius: Vec<f64>,
        #[arg(long, default_value_t = DIAMOND_LATTICE_CONSTANT)]
        lattice_constant: f64,
    },
    /// Neighbor shells of a site.
    Shells {
        #[arg(long, default_value_t = 5)]
        shells: usize,
        #[arg(long, default_value_t = DIAMOND_LATTICE_CONSTANT)]
        lattice_constant: f64,
    },
}

#[derive(Subcommand)]
enum DopeCmd {
    /// Neighbor-count distribution, analytic and sampled.
    Stats {
        #[arg(long, default_value_t = 0.01)]
        concentration: f64,
        #[arg(long, default_value_t = 5)]
        shells: usize,
        /// Radius (Å) of the sampled region.
        #[arg(long, default_value_t = 100.0)]
        radius: f64,
    },
}

#[derive(Args)]
struct EmtArgs {
    /// Total binding energy, meV.
    #[arg(long, default_value_t = 600.0)]
    binding: f64,
    /// Part of the binding that is not Coulombic, meV.
    #[arg(long, default_value_t = 0.0)]
    central_cell: f64,
    #[arg(long, default_value_t = DIAMOND_DIELECTRIC)]
    dielectric: f64,
}

#[derive(Subcommand)]
enum CurveCmd {
    Curve {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
}

#[derive(Subcommand)]
enum GateCmd {
    /// Gate time for a control coupled to two qubits.
    Run {
        /// Control–qubit exchange, meV.
        #[arg(long)]
        j1: f64,
        #[arg(long)]
        j2: f64,
        /// Largest acceptable residual entanglement, bits.
        #[arg(long, default_value_t = DEFAULT_RESIDUAL_THRESHOLD)]
        threshold: f64,
    },
}

#[derive(Args)]
struct ScenarioSource {
    /// Scenario file (JSON).
    #[arg(long, conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in scenario preset.
    #[arg(long)]
    preset: Option<String>,
}

impl ScenarioSource {
    fn load(&self, default: &str, seed: Option<u64>) -> Result<Scenario> {
        let mut s = match (&self.scenario, &self.preset) {
            (Some(path), _) => load_scenario(path)?,
            (None, Some(name)) => scenario_preset(name)?,
            (None, None) => scenario_preset(default)?,
        };
        if let Some(seed) = seed {
            s.seed = seed;
        }
        Ok(s)
    }
}

#[derive(Subcommand)]
enum ConfigureCmd {
    /// Simulated EPR-vs-optical map.
    Scan {
        #[command(flatten)]
        source: ScenarioSource,
        /// Use a random separable two-control, three-qubit arrangement.
        #[arg(long, conflicts_with_all = ["scenario", "preset"])]
        random: bool,
    },
    /// Adjacency from a scan saved as JSON.
    Infer {
        #[arg(long)]
        scan: PathBuf,
        /// Detection threshold, meV.
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
    },
}

#[derive(Subcommand)]
enum FeasibilityCmd {
    Run {
        #[command(flatten)]
        source: ScenarioSource,
        /// Also write the scenario that was run.
        #[arg(long)]
        save_scenario: Option<PathBuf>,
    },
    /// Usable-gate statistics over random patches.
    Patches {
        #[command(flatten)]
        source: ScenarioSource,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum PresetsCmd {
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

#[derive(Serialize)]
struct DopeRow {
    neighbors: usize,
    analytic: f64,
    empirical: f64,
    count: usize,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct EmtRow {
    binding_meV: f64,
    coulombic_meV: f64,
    dielectric: f64,
    mass_ratio: f64,
    bohr_radius_angstrom: f64,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct ExchangeRow {
    R_angstrom: f64,
    J_ground_meV: f64,
    J_excited_meV: f64,
    J_excited_half_radius_meV: f64,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct SplittingRow {
    R_angstrom: f64,
    lower_meV: f64,
    upper_meV: f64,
    splitting_meV: f64,
}

#[derive(Serialize)]
struct GateRow {
    qubit_1: String,
    qubit_2: String,
    duration_ps: f64,
    residual_bits: f64,
    entangling_power: f64,
    clean: bool,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct InferRow {
    gate: usize,
    optical_meV: f64,
    qubit: String,
    coupling_meV: f64,
    ambiguous: bool,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct FeasibilityRow {
    control: String,
    transition_meV: f64,
    qubits: String,
    j_eff_meV: Option<f64>,
    gate_time_ps: Option<f64>,
    within_t2: Option<bool>,
    isolated: bool,
    usable: bool,
}

#[derive(Serialize)]
struct PatchRow {
    patch: usize,
    dopants: usize,
    resolvable_gates: usize,
    usable_gates: usize,
}

fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && hi >= lo) {
        return Err(Error::Precondition("grid needs r_max ≥ r_min and a positive step".into()));
    }
    let n = ((hi - lo) / step).round() as usize;
    Ok((0..=n).map(|k| lo + k as f64 * step).collect())
}

fn regrid(default: &[f64], r_min: Option<f64>, r_max: Option<f64>, step: Option<f64>) -> Result<Vec<f64>> {
    if r_min.is_none() && r_max.is_none() && step.is_none() {
        return Ok(default.to_vec());
    }
    let lo = r_min.unwrap_or(default[0]);
    let hi = r_max.unwrap_or(*default.last().expect("non-empty"));
    let step = step.unwrap_or(default[1] - default[0]);
    grid(lo, hi, step)
}

fn run(cli: Cli) -> Result<()> {
    let format: Format = cli.format.into();
    let out = output(&cli.out)?;
    match cli.command {
        Command::Lattice(LatticeCmd::Count { radius, lattice_constant }) => {
            let spec = LatticeSpec {
                lattice_constant,
                ..LatticeSpec::diamond(0.0)
            };
            let rows: Vec<_> = radius.iter().map(|&r| sphere_count(&spec, r)).collect::<Result<_>>()?;
            write_records(&rows, format, out)
        }
        Command::Lattice(LatticeCmd::Shells { shells, lattice_constant }) => {
            let spec = LatticeSpec {
                lattice_constant,
                bounding_radius: lattice_constant * (shells as f64 + 2.0),
                ..LatticeSpec::diamond(0.0)
            };
            write_records(&shell_sizes(&spec, shells)?.shells, format, out)
        }
        Command::Dope(DopeCmd::Stats { concentration, shells, radius }) => {
            let spec = LatticeSpec::diamond(radius);
            let region = place_dopants(&spec, concentration, &[("X".into(), 1.0)], cli.seed.unwrap_or(0))?;
            let stats = neighbor_statistics(&region, shells)?;
            match format {
                Format::Json => write_json(&stats, out),
                Format::Csv => write_records(&dope_rows(&stats), format, out),
            }
        }
        Command::Emt(a) => {
            let m = model_from_ionization("donor", Role::Control, a.binding, a.dielectric, a.central_cell)?;
            let row = EmtRow {
                binding_meV: m.binding_energy,
                coulombic_meV: m.coulombic_binding(),
                dielectric: m.dielectric_constant,
                mass_ratio: m.effective_mass_ratio(),
                bohr_radius_angstrom: m.effective_bohr_radius,
            };
            write_records(&[row], format, out)
        }
        Command::Exchange(CurveCmd::Curve { preset, r_min, r_max, step }) => {
            let p = exchange_curve_preset(preset.as_deref().unwrap_or("fig2a"))?;
            let r = regrid(&p.r_grid, r_min, r_max, step)?;
            let engine = IntegralEngine::default();
            let half = p.qubit.clone().with_radius_scale(0.5);
            let ground = exchange_curve_with(&engine, &p.control, &p.qubit, false, &r, p.axis)?;
            let excited = exchange_curve_with(&engine, &p.control, &p.qubit, true, &r, p.axis)?;
            let excited_half = exchange_curve_with(&engine, &p.control, &half, true, &r, p.axis)?;
            let rows: Vec<ExchangeRow> = (0..r.len())
                .map(|k| ExchangeRow {
                    R_angstrom: r[k],
                    J_ground_meV: ground[k].exchange_splitting,
                    J_excited_meV: excited[k].exchange_splitting,
                    J_excited_half_radius_meV: excited_half[k].exchange_splitting,
                })
                .collect();
            write_records(&rows, format, out)
        }
        Command::Splitting(CurveCmd::Curve { preset, r_min, r_max, step }) => {
            let p = splitting_curve_preset(preset.as_deref().unwrap_or("fig3"))?;
            let r = regrid(&p.r_grid, r_min, r_max, step)?;
            let rows: Vec<SplittingRow> = transfer_splitting_curve(&p.control, &r)?
                .into_iter()
                .map(|s| SplittingRow {
                    R_angstrom: s.separation,
                    lower_meV: s.lower,
                    upper_meV: s.upper,
                    splitting_meV: s.splitting,
                })
                .collect();
            write_records(&rows, format, out)
        }
        Command::Gate(GateCmd::Run { j1, j2, threshold }) => {
            let system = SpinSystem::star("C", &[("Q1", j1), ("Q2", j2)]);
            let options = GateOptions {
                threshold,
                ..GateOptions::default()
            };
            let (report, clean) = match sfg_gate(&system, 0, &options) {
                Ok(r) => (r, true),
                Err(Error::NoCleanGate { best }) => (*best, false),
                Err(e) => return Err(e),
            };
            match format {
                Format::Json => write_json(&serde_json::json!({ "clean": clean, "gate": report }), out),
                Format::Csv => {
                    let [q1, q2] = report.qubits.clone();
                    let row = GateRow {
                        qubit_1: q1,
                        qubit_2: q2,
                        duration_ps: report.duration_ps,
                        residual_bits: report.control_residual_entanglement,
                        entangling_power: report.entangling_power,
                        clean,
                    };
                    write_records(&[row], format, out)
                }
            }
        }
        Command::Configure(ConfigureCmd::Scan { source, random }) => {
            let (inputs, epr) = if random {
                let model = sfgsim::spectra::SpectralModel::shen_nv();
                let epr = EprModel::default();
                let inputs = separable_random_inputs(
                    cli.seed.unwrap_or(0),
                    1.0,
                    model.homogeneous_width,
                    model.resolution_factor,
                    &epr,
                );
                (inputs, epr)
            } else {
                let s = source.load("table1", cli.seed)?;
                (scenario_scan_inputs(&s)?, s.epr.clone())
            };
            let map = simulate_scan(&inputs, &epr)?;
            match format {
                Format::Json => write_json(&map, out),
                Format::Csv => map.write_csv(out),
            }
        }
        Command::Configure(ConfigureCmd::Infer { scan, threshold }) => {
            let text = std::fs::read_to_string(&scan)?;
            let map: ScanMap = serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            let hyp = infer_adjacency(&map, threshold)?;
            match format {
                Format::Json => write_json(&hyp, out),
                Format::Csv => {
                    let rows: Vec<InferRow> = hyp
                        .gates
                        .iter()
                        .enumerate()
                        .flat_map(|(i, g)| {
                            g.qubits.iter().map(move |c| InferRow {
                                gate: i + 1,
                                optical_meV: g.optical_energy,
                                qubit: c.qubit.clone(),
                                coupling_meV: c.coupling,
                                ambiguous: g.ambiguous,
                            })
                        })
                        .collect();
                    write_records(&rows, format, out)
                }
            }
        }
        Command::Feasibility(FeasibilityCmd::Run { source, save_scenario: save }) => {
            let s = source.load("table1", cli.seed)?;
            if let Some(path) = save {
                save_scenario(&s, &path)?;
            }
            let report = run_feasibility(&s)?;
            match format {
                Format::Json => write_json(&report, out),
                Format::Csv => {
                    let rows: Vec<FeasibilityRow> = report
                        .gates
                        .iter()
                        .map(|g| FeasibilityRow {
                            control: g.control.clone(),
                            transition_meV: g.transition_energy,
                            qubits: g.couplings.iter().map(|c| c.0.as_str()).collect::<Vec<_>>().join(";"),
                            j_eff_meV: g.j_eff,
                            gate_time_ps: g.gate_time_ps,
                            within_t2: g.within_t2,
                            isolated: g.isolated,
                            usable: g.usable,
                        })
                        .collect();
                    write_records(&rows, format, out)
                }
            }
        }
        Command::Feasibility(FeasibilityCmd::Patches { source, n }) => {
            let s = source.load("patch", None)?;
            let stats = patch_statistics(&s, n, cli.seed.unwrap_or(s.seed))?;
            match format {
                Format::Json => write_json(&stats, out),
                Format::Csv => {
                    let rows: Vec<PatchRow> = (0..n)
                        .map(|i| PatchRow {
                            patch: i,
                            dopants: stats.dopant_counts[i],
                            resolvable_gates: stats.resolvable_gate_counts[i],
                            usable_gates: stats.usable_gate_counts[i],
                        })
                        .collect();
                    write_records(&rows, format, out)
                }
            }
        }
        Command::Presets(PresetsCmd::List) => write_records(&preset_catalog(), format, out),
    }
}

fn dope_rows(stats: &NeighborStatistics) -> Vec<DopeRow> {
    (0..stats.analytic.len())
        .map(|k| DopeRow {
            neighbors: k,
            analytic: stats.analytic[k],
            empirical: stats.empirical.get(k).copied().unwrap_or(0.0),
            count: stats.counts.get(k).copied().unwrap_or(0),
        })
        .collect()
}
