//! Thin command-line front end over the library's experiment layer.
//!
//! Every subcommand is a small adapter: parse flags, call one library entry
//! point, write one CSV product. Exit codes: 0 on success, 2 for
//! configuration problems (bad flags, unreadable or malformed inputs), 3 for
//! runtime failures (divergence, integration or optimization errors, output
//! IO).

use clap::{Parser, Subcommand, ValueEnum};
use nisqlab::annealing::{mean_excitation, protocol_comparison, ProtocolFamily};
use nisqlab::dqc::{DqcError, FeatureMapKind};
use nisqlab::harness::{
    emit_report, format_metric, resolve_workers, run_campaign, run_decay_experiment,
    sat_phase_experiment, ExperimentConfig, HarnessError, ReportFormat,
};
use nisqlab::problems::{
    maxcut_qubo, maxsat_diagonal, parse_edge_list, CnfFormula, PaintShopSequence, QuboProblem,
};
use nisqlab::qaoa::{hardness_sweep_qaoa, optimize_qaoa, QaoaStrategy};
use nisqlab::statevector::DiagonalObservable;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nisqlab",
    version,
    about = "Quantum and classical solvers for small combinatorial problems"
)]
struct Cli {
    /// Master seed for all stochastic work.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (otherwise NISQLAB_WORKERS, otherwise all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config file (campaign; flags override file values).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random 3-SAT phase scan: P(satisfiable) and median backtracks per ratio.
    Satscan {
        /// Variable count (1..=40).
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Clause-to-variable ratios: comma list (1,2,3) or range (1:8:0.25).
        #[arg(long, default_value = "1:8:0.25")]
        ratios: String,
        /// Formulas per ratio.
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
    /// Annealing protocol comparison on random-energy instances.
    Anneal {
        /// Qubit count (≤ 12).
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Strength grid: comma list or range.
        #[arg(long, default_value = "0.25,0.5,1,2,4")]
        g: String,
        /// Protocols to run, numbered 1 (projector 1/t), 2 (transverse 1/t),
        /// 3 (projector 1/t²).
        #[arg(long, default_value = "1,2,3")]
        protocols: String,
        /// Instances per (protocol, g) cell.
        #[arg(long, default_value_t = 20)]
        instances: usize,
        /// Integrator step.
        #[arg(long, default_value_t = 0.005)]
        dt: f64,
    },
    /// QAOA on a problem file, or a random-SAT hardness sweep.
    Qaoa {
        /// Problem file: .cnf (DIMACS MaxSAT), .json (QUBO), else edge list
        /// (MaxCut). Required unless --hardness is set.
        #[arg(long)]
        problem: Option<PathBuf>,
        /// Circuit depth.
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Multistart count.
        #[arg(long, default_value_t = 10)]
        starts: usize,
        /// Expectation-evaluation budget.
        #[arg(long, default_value_t = 4000)]
        budget: usize,
        /// Run the clause-ratio hardness sweep instead of a single problem.
        #[arg(long)]
        hardness: bool,
        /// Hardness sweep: variable count.
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Hardness sweep: ratio grid.
        #[arg(long, default_value = "1,2,3,4,5,6")]
        ratios: String,
        /// Hardness sweep: depths.
        #[arg(long, default_value = "1,2", value_name = "P_LIST")]
        p_list: String,
        /// Hardness sweep: instances per ratio.
        #[arg(long, default_value_t = 5)]
        instances: usize,
    },
    /// Train a differentiable circuit on a reference ODE; emits the trace.
    Dqc {
        /// ODE name; only "decay" (df/dx = −f, f(0) = 1) is registered.
        #[arg(long, default_value = "decay")]
        ode: String,
        #[arg(long, default_value_t = 4)]
        qubits: usize,
        /// Feature map: fourier, chebyshev, or tower.
        #[arg(long, default_value = "tower")]
        map: MapKind,
        #[arg(long, default_value_t = 3)]
        layers: usize,
        #[arg(long, default_value_t = 600)]
        iters: usize,
    },
    /// Exact, annealed, and greedy colorings of a binary paint-shop sequence.
    Paintshop {
        /// Explicit sequence as letters, e.g. ABAB (each car exactly twice).
        #[arg(long)]
        sequence: Option<String>,
        /// Random sequence with this many cars (used when --sequence absent).
        #[arg(long, default_value_t = 6)]
        cars: usize,
    },
    /// Run a configured experiment campaign (requires --config).
    Campaign {
        /// Report format for --out.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MapKind {
    Fourier,
    Chebyshev,
    Tower,
}

impl From<MapKind> for FeatureMapKind {
    fn from(kind: MapKind) -> Self {
        match kind {
            MapKind::Fourier => FeatureMapKind::FourierDefault,
            MapKind::Chebyshev => FeatureMapKind::ChebyshevDefault,
            MapKind::Tower => FeatureMapKind::ChebyshevTower,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Failures split by exit code.
enum CliError {
    /// Bad flags, unreadable or malformed input: exit 2.
    Config(String),
    /// Execution failure (divergence, integration, optimization, output IO):
    /// exit 3.
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Comma list (1,2,3) or colon range (min:max:step), inclusive of the upper
/// end within half a step.
fn parse_grid(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let bad = |detail: &str| {
        CliError::Config(format!(
            "--{flag} expects a comma list like 1,2,3 or a range like 1:8:0.25 ({detail})"
        ))
    };
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range needs min:max:step"));
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad("bad min"))?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad("bad max"))?;
        let step: f64 = parts[2].trim().parse().map_err(|_| bad("bad step"))?;
        if !(step.is_finite() && step > 0.0) || max < min {
            return Err(bad("need step > 0 and max ≥ min"));
        }
        let count = ((max - min) / step + 0.5).floor() as usize + 1;
        (0..count).map(|i| min + i as f64 * step).collect()
    } else {
        text.split(',')
            .map(|part| part.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|_| bad("bad number"))?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad("empty or non-finite"));
    }
    Ok(values)
}

fn parse_usize_grid(text: &str, flag: &str) -> Result<Vec<usize>, CliError> {
    parse_grid(text, flag)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && (v - v.round()).abs() < 1e-9 {
                Ok(v.round() as usize)
            } else {
                Err(CliError::Config(format!("--{flag} expects integers, got {v}")))
            }
        })
        .collect()
}

/// Writes a text product to --out or stdout.
fn write_product(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Loads a problem file into its cost diagonal. The format is picked by
/// extension: `.cnf` DIMACS (MaxSAT), `.json` QUBO, anything else an edge
/// list (MaxCut).
fn load_problem(path: &Path) -> Result<(DiagonalObservable, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let extension = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match extension.as_str() {
        "cnf" => {
            let formula = CnfFormula::from_dimacs(&text).map_err(config_err)?;
            let diag = maxsat_diagonal(&formula).map_err(config_err)?;
            Ok((diag, format!("maxsat over {} variables", formula.n_vars())))
        }
        "json" => {
            let qubo = QuboProblem::from_json(&text).map_err(config_err)?;
            let diag = qubo.to_diagonal().map_err(config_err)?;
            Ok((diag, format!("qubo over {} variables", qubo.n_vars())))
        }
        _ => {
            let (edges, n_nodes) = parse_edge_list(&text).map_err(config_err)?;
            let qubo = maxcut_qubo(&edges, n_nodes).map_err(config_err)?;
            let diag = qubo.to_diagonal().map_err(config_err)?;
            Ok((diag, format!("maxcut over {n_nodes} nodes")))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    // One shared pool honoring the documented precedence; campaign builds
    // its own pool from the resolved count as well.
    let workers = resolve_workers(cli.workers).map_err(config_err)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(runtime_err)?;

    match cli.command {
        Command::Satscan { n, ratios, instances } => {
            if n == 0 || n > 40 {
                return Err(CliError::Config(format!("--n must be 1..=40, got {n}")));
            }
            if instances == 0 {
                return Err(CliError::Config("--instances must be ≥ 1".into()));
            }
            let grid = parse_grid(&ratios, "ratios")?;
            let rows = sat_phase_experiment(n, &grid, instances, cli.seed)
                .map_err(runtime_err)?;
            let mut csv =
                String::from("ratio,n,instances,p_sat,median_backtracks,median_decisions\n");
            for row in rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    format_metric(row.ratio),
                    row.n,
                    row.instances,
                    format_metric(row.p_sat),
                    format_metric(row.median_backtracks),
                    format_metric(row.median_decisions),
                );
            }
            write_product(&cli.out, &csv)
        }

        Command::Anneal { n, g, protocols, instances, dt } => {
            let g_grid = parse_grid(&g, "g")?;
            let families: Vec<ProtocolFamily> = parse_usize_grid(&protocols, "protocols")?
                .into_iter()
                .map(|index| match index {
                    1 => Ok(ProtocolFamily::InverseTimeProjector),
                    2 => Ok(ProtocolFamily::InverseTimeTransverse),
                    3 => Ok(ProtocolFamily::InverseSquareProjector),
                    other => Err(CliError::Config(format!(
                        "--protocols entries must be 1, 2, or 3, got {other}"
                    ))),
                })
                .collect::<Result<_, _>>()?;
            if !(dt.is_finite() && dt > 0.0) || n == 0 {
                return Err(CliError::Config("need --dt > 0 and --n ≥ 1".into()));
            }
            let rows = protocol_comparison(n, &families, &g_grid, instances, cli.seed, dt)
                .map_err(runtime_err)?;
            let mut csv = String::from(
                "protocol,g,instance_seed,n,excitation,fidelity,residual_energy\n",
            );
            for row in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    row.protocol.label(),
                    format_metric(row.strength),
                    row.instance_seed,
                    row.n_qubits,
                    format_metric(row.excitation),
                    format_metric(row.fidelity),
                    format_metric(row.residual_energy),
                );
            }
            for &family in &families {
                for &g in &g_grid {
                    if let Some(mean) = mean_excitation(&rows, family, g) {
                        eprintln!(
                            "mean excitation {} at g = {g}: {mean:.6}",
                            family.label()
                        );
                    }
                }
            }
            write_product(&cli.out, &csv)
        }

        Command::Qaoa {
            problem,
            p,
            starts,
            budget,
            hardness,
            n,
            ratios,
            p_list,
            instances,
        } => {
            if hardness {
                let ratio_grid = parse_grid(&ratios, "ratios")?;
                let depths = parse_usize_grid(&p_list, "p-list")?;
                let rows =
                    hardness_sweep_qaoa(n, &ratio_grid, &depths, instances, budget, cli.seed)
                        .map_err(runtime_err)?;
                let mut csv = String::from("ratio,p,instance,qaoa_ratio,sat_optimum\n");
                for row in rows {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{}",
                        format_metric(row.ratio),
                        row.p,
                        row.instance,
                        format_metric(row.qaoa_ratio),
                        format_metric(row.sat_optimum),
                    );
                }
                return write_product(&cli.out, &csv);
            }

            let path = problem.ok_or_else(|| {
                CliError::Config("--problem <file> is required without --hardness".into())
            })?;
            let (diag, description) = load_problem(&path)?;
            let outcome = optimize_qaoa(
                &diag,
                p,
                QaoaStrategy::MultistartLocal { n_starts: starts },
                budget,
                cli.seed,
            )
            .map_err(runtime_err)?;
            eprintln!(
                "{description}: p = {p}, ⟨C⟩ = {:.6}, ratio = {:.6}, {} evaluations{}",
                outcome.expectation,
                outcome.approximation_ratio,
                outcome.n_evaluations,
                if outcome.converged { "" } else { " (budget exhausted)" },
            );
            let n_qubits = diag.n_qubits();
            let mut csv = String::from("index,bits,energy,probability\n");
            for (index, &probability) in outcome.sample_distribution.iter().enumerate() {
                let bits: String = (0..n_qubits)
                    .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
                    .collect();
                let _ = writeln!(
                    csv,
                    "{index},{bits},{},{}",
                    format_metric(diag.values()[index]),
                    format_metric(probability),
                );
            }
            write_product(&cli.out, &csv)
        }

        Command::Dqc { ode, qubits, map, layers, iters } => {
            if ode != "decay" {
                return Err(CliError::Config(format!(
                    "unknown --ode '{ode}'; registered: decay"
                )));
            }
            if qubits == 0 || layers == 0 || iters == 0 {
                return Err(CliError::Config(
                    "--qubits, --layers, and --iters must be ≥ 1".into(),
                ));
            }
            let run = run_decay_experiment(qubits, map.into(), layers, iters, cli.seed)
                .map_err(|e| match e {
                    HarnessError::Dqc(DqcError::Diverged { .. }) => runtime_err(e),
                    other => runtime_err(other),
                })?;
            let mut csv = String::from("iter,loss,max_grid_error\n");
            for row in &run.trace {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    row.iter,
                    format_metric(row.loss),
                    format_metric(row.max_grid_error),
                );
            }
            eprintln!(
                "trained {qubits}-qubit {:?} model: final max grid error {:.3e}",
                map, run.max_grid_error
            );
            write_product(&cli.out, &csv)
        }

        Command::Paintshop { sequence, cars } => {
            let seq = match &sequence {
                Some(letters) => PaintShopSequence::from_letters(letters).map_err(config_err)?,
                None => PaintShopSequence::random(cars, cli.seed),
            };
            let report = paintshop_report(&seq, cli.seed).map_err(runtime_err)?;
            write_product(&cli.out, &report)
        }

        Command::Campaign { format } => {
            let path = cli.config.ok_or_else(|| {
                CliError::Config("campaign needs --config <json file>".into())
            })?;
            let mut config = ExperimentConfig::from_json_file(&path).map_err(config_err)?;
            if cli.seed != 0 {
                config.seed = cli.seed;
            }
            if cli.workers.is_some() {
                config.workers = cli.workers;
            }
            if cli.out.is_some() {
                config.out = cli.out.clone();
            }
            config.validate().map_err(config_err)?;
            let records = run_campaign(&config).map_err(runtime_err)?;
            let report_format = match format {
                Format::Csv => ReportFormat::Csv,
                Format::Json => ReportFormat::Json,
            };
            match &config.out {
                Some(out) => emit_report(&records, report_format, out).map_err(runtime_err),
                None => {
                    let text = match report_format {
                        ReportFormat::Csv => nisqlab::harness::render_csv(&records),
                        ReportFormat::Json => nisqlab::harness::render_json(&records),
                    }
                    .map_err(runtime_err)?;
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

/// One CSV row per solver on the same sequence.
fn paintshop_report(seq: &PaintShopSequence, seed: u64) -> Result<String, HarnessError> {
    use nisqlab::baselines::{
        brute_force_minimum, greedy_paintshop, simulated_annealing_restarts, Cooling, SaSchedule,
    };
    use nisqlab::problems::paintshop_qubo;

    let letters: String = seq
        .cars()
        .iter()
        .map(|&car| (b'A' + (car % 26) as u8) as char)
        .collect();
    let qubo = paintshop_qubo(seq);
    let (exact_bits, exact_changes) = brute_force_minimum(&qubo)?;
    let schedule = SaSchedule::new(2.0, 0.01, 2_000, Cooling::Geometric)?;
    let sa = simulated_annealing_restarts(&qubo, &schedule, seed, 5);
    let (greedy_bits, greedy_changes) = greedy_paintshop(seq);

    let coloring = |bits: &[u8]| bits.iter().map(|b| char::from(b'0' + b)).collect::<String>();
    let mut csv = String::from("sequence,method,changes,first_occurrence_colors\n");
    let _ = writeln!(csv, "{letters},exact,{},{}", exact_changes, coloring(&exact_bits));
    let _ = writeln!(csv, "{letters},annealed,{},{}", sa.best_energy, coloring(&sa.best));
    let _ = writeln!(csv, "{letters},greedy,{},{}", greedy_changes, coloring(&greedy_bits));
    Ok(csv)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {}", error.message());
            ExitCode::from(error.exit_code())
        }
    }
}
