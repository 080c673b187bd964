use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use sixlevel::config::RunConfig;
use sixlevel::dynamics::{evolve, numeric_susceptibilities, steady_state, AmplitudeState};
use sixlevel::entanglement::{residual_entanglement, residual_entanglement_from_concurrences, three_tangle_oracle};
use sixlevel::gates::{
    build_qpg, conjugate_on_trigger, equivalent_up_to_phase, rotation, toffoli_reference, EquivalenceMode,
    GateMatrix, ThreeQubitState,
};
use sixlevel::propagation::{
    beta_factors, group_velocities, length_for_phase, match_velocities, phase_table, velocity_assumption_warnings,
    xi_factors, PhaseTable,
};
use sixlevel::report::{gate_entanglement, scenario_report};
use sixlevel::susceptibility::{analytic_susceptibilities, suppression_report};
use sixlevel::sweep::run_sweep;
use sixlevel::{Error, PaperScenario};

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "sixlevel", version, about = "Six-level EIT phase-gate simulator")]
struct Cli {
    /// JSON run configuration; the frozen 87Rb scenario is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files. Without it results go to stdout only.
    #[arg(long, global = true, env = "SIXLEVEL_OUT_DIR")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form susceptibilities, optionally checked against the steady state.
    Susceptibility {
        /// Also fit the coefficients from the exact steady state.
        #[arg(long)]
        numeric: bool,
    },
    /// Group velocities and walk-off factors.
    Velocities {
        /// Run the velocity-matching search described by `matching` in the config.
        #[arg(long = "match")]
        run_match: bool,
    },
    /// Phase table at the configured length (or --length).
    Phases {
        #[arg(long)]
        length: Option<f64>,
    },
    /// Phase gate from a phase table, with the Toffoli construction check.
    Gate {
        /// Phase table JSON as written by `phases`; computed from the config when omitted.
        #[arg(long)]
        phases: Option<PathBuf>,
    },
    /// Residual three-way entanglement of a pure three-qubit state.
    Entangle {
        /// JSON array of 8 [re, im] pairs in |PST> order.
        #[arg(long, conflicts_with = "amplitudes_file", required_unless_present = "amplitudes_file")]
        amplitudes: Option<String>,
        /// File holding the same JSON array.
        #[arg(long)]
        amplitudes_file: Option<PathBuf>,
        /// Rescale the input to unit norm instead of rejecting it.
        #[arg(long)]
        normalize: bool,
    },
    /// Time evolution from the ground state, compared with the steady state.
    Dynamics {
        /// End time in s (overrides the config).
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Parameter sweep described by `sweep` in the config.
    Sweep,
    /// End-to-end report for the frozen 87Rb scenario.
    Paper,
}

enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    let Some(path) = path else { return Ok(RunConfig::default()) };
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    RunConfig::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::Number(n) => out.push((prefix.into(), n.as_f64().map(sixlevel::fmt_sci).unwrap_or_else(|| n.to_string()))),
        Value::String(s) => out.push((prefix.into(), s.clone())),
        Value::Bool(b) => out.push((prefix.into(), b.to_string())),
        Value::Null => out.push((prefix.into(), String::new())),
    }
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> CliResult<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    wtr.write_record(header).map_err(io)?;
    for r in rows {
        wtr.write_record(r).map_err(io)?;
    }
    String::from_utf8(wtr.into_inner().map_err(|e| CliError::Io(e.to_string()))?).map_err(|e| CliError::Io(e.to_string()))
}

fn render(v: &Value, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(v).expect("json") + "\n"),
        Format::Csv => {
            let mut pairs = Vec::new();
            flatten("", v, &mut pairs);
            let rows: Vec<Vec<String>> = pairs.into_iter().map(|(k, x)| vec![k, x]).collect();
            csv_text(&["key".into(), "value".into()], &rows)
        }
    }
}

fn write_out(out: Option<&Path>, name: &str, text: &str) -> CliResult<()> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

/// Writes to stdout; a closed pipe on the reading side is not an error.
fn print_out(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    }
}

fn emit(cli: &Cli, name: &str, v: &Value) -> CliResult<()> {
    let text = render(v, cli.format)?;
    print_out(&text)?;
    let ext = if cli.format == Format::Json { "json" } else { "csv" };
    write_out(cli.out.as_deref(), &format!("{name}.{ext}"), &text)
}

fn relative_errors(numeric: &[Complex64; 7], analytic: &[Complex64; 7]) -> Vec<Option<f64>> {
    numeric
        .iter()
        .zip(analytic)
        .map(|(n, a)| (a.norm() > 0.0).then(|| (n - a).norm() / a.norm()))
        .collect()
}

fn cmd_susceptibility(cfg: &RunConfig, numeric: bool) -> CliResult<Value> {
    let analytic = analytic_susceptibilities(&cfg.drive, &cfg.atom)?;
    let mut v = json!({
        "analytic": analytic,
        "suppression": suppression_report(&cfg.drive, &cfg.atom)?,
        "chi3_st": [cfg.options.chi_st.chi3_st(&analytic, &cfg.atom).re, cfg.options.chi_st.chi3_st(&analytic, &cfg.atom).im],
        "chi_st_policy": cfg.options.chi_st,
    });
    if numeric {
        let n = numeric_susceptibilities(&cfg.drive, &cfg.atom, &cfg.options.fit_grid.grid())?;
        v["numeric"] = json!({
            "set": n.set,
            "fit_residual": n.residual,
            "relative_error": relative_errors(&n.set.as_array(), &analytic.as_array()),
        });
    }
    Ok(v)
}

fn cmd_velocities(cfg: &RunConfig, run_match: bool) -> CliResult<Value> {
    let g = group_velocities(&cfg.drive, &cfg.atom);
    let mut v = json!({
        "velocities": g,
        "mismatch": g.mismatch(),
        "beta": beta_factors(&cfg.drive, &cfg.atom),
        "warnings": velocity_assumption_warnings(&cfg.drive, &cfg.atom),
        "xi": xi_factors(&g, &cfg.geometry).ok(),
    });
    if run_match {
        let spec = cfg
            .matching
            .as_ref()
            .ok_or_else(|| CliError::Config("--match needs a `matching` section in the config".into()))?;
        let r = match_velocities(&cfg.drive, &cfg.atom, &spec.free, &spec.options())?;
        if !r.reached_target {
            log::warn!("velocity matching stopped at mismatch {:e} above target {:e}", r.mismatch, spec.target);
        }
        v["matching"] = json!({ "result": r, "velocities": group_velocities(&r.drive, &cfg.atom) });
    }
    Ok(v)
}

fn table_for(cfg: &RunConfig, length: Option<f64>) -> CliResult<PhaseTable> {
    let geom = length.map_or(cfg.geometry, |l| cfg.geometry.with_length(l));
    Ok(phase_table(&cfg.drive, &cfg.atom, &geom, cfg.options.chi_st)?)
}

fn cmd_phases(cfg: &RunConfig, length: Option<f64>) -> CliResult<Value> {
    let t = table_for(cfg, length)?;
    let target = length_for_phase(&cfg.drive, &cfg.atom, &cfg.geometry, cfg.options.chi_st, cfg.options.target_phase).ok();
    Ok(json!({
        "table": t,
        "total_nonlinear": t.total_nonlinear_phase()?,
        "conditional": t.conditional_phase()?,
        "target_phase": cfg.options.target_phase,
        "length_for_target_phase": target,
    }))
}

fn cmd_gate(cfg: &RunConfig, phases: Option<&Path>) -> CliResult<Value> {
    let table: PhaseTable = match phases {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            // accept both a bare table and the output of `phases`
            let inner = v.get("table").cloned().unwrap_or(v);
            serde_json::from_value(inner).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => table_for(cfg, None)?,
    };
    let u = build_qpg(&table)?;
    let r = rotation(PI / 2.0, PI);
    let ccx = toffoli_reference();
    let from_gate = conjugate_on_trigger(&u, &r);
    let from_ccz = conjugate_on_trigger(&GateMatrix::controlled_controlled_z(), &r);
    let tol = 1e-12;
    Ok(json!({
        "matrix": u,
        "conditional_phase": table.conditional_phase()?,
        "zeta_on_plus_state": gate_entanglement(&table)?,
        "toffoli": {
            "rotation": { "theta": r.theta, "phi": r.phi },
            "tolerance": tol,
            "from_gate": {
                "matrix": from_gate,
                "global": equivalent_up_to_phase(&from_gate, &ccx, EquivalenceMode::Global, tol),
                "local_diagonal": equivalent_up_to_phase(&from_gate, &ccx, EquivalenceMode::LocalDiagonal, tol),
            },
            "from_controlled_z": {
                "matrix": from_ccz,
                "global": equivalent_up_to_phase(&from_ccz, &ccx, EquivalenceMode::Global, tol),
                "local_diagonal": equivalent_up_to_phase(&from_ccz, &ccx, EquivalenceMode::LocalDiagonal, tol),
            },
        },
    }))
}

fn cmd_entangle(amplitudes: Option<&str>, file: Option<&Path>, normalize: bool) -> CliResult<Value> {
    let text = match (amplitudes, file) {
        (Some(s), _) => s.to_string(),
        (None, Some(p)) => fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        (None, None) => return Err(CliError::Config("no amplitudes given".into())),
    };
    let pairs: Vec<[f64; 2]> =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("amplitudes: {e}")))?;
    let amp: [Complex64; 8] = pairs
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect::<Vec<_>>()
        .try_into()
        .map_err(|v: Vec<Complex64>| CliError::Config(format!("amplitudes: expected 8 pairs, got {}", v.len())))?;
    let state = if normalize { ThreeQubitState::normalized(amp)? } else { ThreeQubitState::new(amp)? };
    let r = residual_entanglement(&state)?;
    Ok(json!({
        "zeta": r.zeta,
        "tau_hyperdeterminant": three_tangle_oracle(&state),
        "zeta_from_concurrences": residual_entanglement_from_concurrences(&state)?,
        "lambda_ps": r.lambda_ps,
        "lambda_pt": r.lambda_pt,
    }))
}

fn cmd_dynamics(cli: &Cli, cfg: &RunConfig, t_end: Option<f64>) -> CliResult<Value> {
    let spec = cfg.options.dynamics;
    let t_end = match t_end {
        Some(t) => t,
        None => spec.end_time(&cfg.atom)?,
    };
    let traj = evolve(&AmplitudeState::ground(), &cfg.drive, &cfg.atom, t_end, &spec.evolve_options())?;
    let fin = *traj.final_state();
    let steady = steady_state(&cfg.drive, &cfg.atom)?;
    if cli.out.is_some() {
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
        write_out(cli.out.as_deref(), "dynamics_trajectory.csv", &String::from_utf8_lossy(&buf))?;
    }
    Ok(json!({
        "t_end": t_end,
        "ground": spec.ground,
        "samples": traj.times.len(),
        "final_state": fin,
        "final_norm_sqr": fin.norm_sqr(),
        "steady_state": steady,
        "distance_to_steady_state": fin.distance(&steady),
    }))
}

fn cmd_sweep(cli: &Cli, cfg: &RunConfig) -> CliResult<()> {
    let spec = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("`sweep` section missing from config".into()))?;
    let table = run_sweep(cfg, spec, cli.jobs)?;
    match cli.format {
        Format::Csv => {
            let text = csv_text(&table.header, &table.rows)?;
            print_out(&text)?;
            write_out(cli.out.as_deref(), "sweep.csv", &text)
        }
        Format::Json => emit(cli, "sweep", &json!({ "header": table.header, "rows": table.rows })),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Susceptibility { numeric } => emit(cli, "susceptibility", &cmd_susceptibility(&cfg, *numeric)?),
        Command::Velocities { run_match } => emit(cli, "velocities", &cmd_velocities(&cfg, *run_match)?),
        Command::Phases { length } => emit(cli, "phases", &cmd_phases(&cfg, *length)?),
        Command::Gate { phases } => emit(cli, "gate", &cmd_gate(&cfg, phases.as_deref())?),
        Command::Entangle { amplitudes, amplitudes_file, normalize } => {
            emit(cli, "entangle", &cmd_entangle(amplitudes.as_deref(), amplitudes_file.as_deref(), *normalize)?)
        }
        Command::Dynamics { t_end } => {
            let v = cmd_dynamics(cli, &cfg, *t_end)?;
            emit(cli, "dynamics", &v)
        }
        Command::Sweep => cmd_sweep(cli, &cfg),
        Command::Paper => {
            let report = scenario_report(&PaperScenario::frozen(), cfg.options.chi_st, cfg.options.target_phase)?;
            if !report.target.zeta_within_tolerance {
                log::warn!("zeta at the target length is {}", report.target.point.zeta);
            }
            emit(cli, "paper", &to_value(&report))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(CliError::Io(m)) => {
            eprintln!("i/o error: {m}");
            ExitCode::from(EXIT_IO)
        }
    }
}
