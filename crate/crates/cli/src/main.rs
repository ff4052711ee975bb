use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use stgap_core::machine::{
    build_benchmark, condition_study, convergence_study, run_scenario, Machine, MachineConfig, ScenarioResult,
    Scheme,
};
use stgap_core::SimError;

#[derive(Parser)]
#[command(name = "sim", version, about = "Transient machine simulation with an analytic air-gap element")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write torque.csv and run-summary.json.
    Run {
        #[command(flatten)]
        common: Common,
        /// Time integration scheme (overrides the config).
        #[arg(long)]
        scheme: Option<String>,
        /// Number of time intervals (overrides the config).
        #[arg(long)]
        nt: Option<usize>,
        /// Also write states.json.
        #[arg(long)]
        states: bool,
    },
    /// Condition numbers of the unscaled and scaled mode systems.
    Condition {
        /// Take the gap radii from this config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 44.3e-3)]
        r1: f64,
        #[arg(long, default_value_t = 44.7e-3)]
        r2: f64,
        #[arg(long, default_value_t = 207)]
        k_max: usize,
    },
    /// Static L² errors under uniform refinement (the config mesh is the finest level).
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Static-sweep, implicit-Euler and space-time torque traces side by side.
    TorqueCompare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        nt: Option<usize>,
    },
    /// Print the configuration of a built-in benchmark.
    Config {
        /// One of: annulus-harmonic, pm-benchmark.
        name: String,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

/// What a run was asked to do; echoed into the summary.
#[derive(Debug, Clone, Serialize)]
struct RunManifest {
    config: PathBuf,
    scheme: Scheme,
    n_intervals: usize,
    t_end: f64,
    out: PathBuf,
}

enum Failure {
    Config(String),
    Solver(String),
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Solver(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return report(Failure::Config(format!("thread pool: {e}")));
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    let (kind, message, code) = match f {
        Failure::Config(m) => ("config", m, 2),
        Failure::Solver(m) => ("solver", m, 3),
    };
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::from(code)
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Run {
            common,
            scheme,
            nt,
            states,
        } => cmd_run(&common, scheme.as_deref(), nt, states),
        Command::Condition {
            config,
            out,
            r1,
            r2,
            k_max,
        } => {
            let (r1, r2) = match config {
                Some(p) => {
                    let c = load_config(&p)?;
                    (c.geometry.gap[0], c.geometry.gap[1])
                }
                None => (r1, r2),
            };
            cmd_condition(&out, r1, r2, k_max)
        }
        Command::Convergence { common, levels } => cmd_convergence(&common, levels),
        Command::TorqueCompare { common, nt } => cmd_torque_compare(&common, nt),
        Command::Config { name } => {
            println!("{}", build_benchmark(&name)?.to_json());
            Ok(())
        }
    }
}

fn load_config(path: &Path) -> CliResult<MachineConfig> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    MachineConfig::from_json(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn prepare_out(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    let p = dir.join(name);
    fs::write(&p, contents).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))
}

/// 17 significant digits.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn torque_csv(r: &ScenarioResult) -> String {
    let mut s = String::from("t,delta_deg,torque\n");
    for ((t, d), tq) in r.trajectory.times.iter().zip(&r.deltas).zip(&r.torques) {
        let _ = writeln!(s, "{},{},{}", num(*t), num(d.to_degrees()), num(*tq));
    }
    s
}

fn cmd_run(common: &Common, scheme: Option<&str>, nt: Option<usize>, write_states: bool) -> CliResult<()> {
    let config = load_config(&common.config)?;
    let scheme = match scheme {
        Some(s) => Scheme::parse(s)?,
        None => config.solver.scheme,
    };
    prepare_out(&common.out)?;
    let machine = Machine::build(&config)?;
    let mesh = config.time_mesh(nt)?;
    let result = run_scenario(&machine, &mesh, scheme)?;
    let manifest = RunManifest {
        config: common.config.clone(),
        scheme,
        n_intervals: mesh.n_intervals(),
        t_end: *mesh.breakpoints().last().expect("non-empty mesh"),
        out: common.out.clone(),
    };
    write_file(&common.out, "torque.csv", &torque_csv(&result))?;
    let layout = machine.dae.layout();
    let mean = result.torques.iter().sum::<f64>() / result.torques.len() as f64;
    let summary = json!({
        "name": config.name,
        "manifest": manifest,
        "dofs": {
            "rotor": layout.n_rotor,
            "stator": layout.n_stator,
            "gap": layout.n_gap,
            "unknowns": layout.n_total(),
        },
        "timings": {
            "assembly_seconds": result.assembly_seconds,
            "solve_seconds": result.solve_seconds,
        },
        "residuals": {
            "constraint_max_relative": result.max_constraint_residual,
            "spacetime_max_relative": result.spacetime_residual,
        },
        "torque": {
            "mean": mean,
            "min": result.torques.iter().copied().fold(f64::INFINITY, f64::min),
            "max": result.torques.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        },
        "static_l2_error": machine.static_error()?.map(|(a, r)| json!({ "absolute": a, "relative": r })),
    });
    write_file(&common.out, "run-summary.json", &pretty(&summary))?;
    if write_states {
        let states = json!({
            "times": result.trajectory.times,
            "states": result.trajectory.states,
        });
        write_file(&common.out, "states.json", &states.to_string())?;
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes") + "\n"
}

fn cmd_condition(out: &Path, r1: f64, r2: f64, k_max: usize) -> CliResult<()> {
    let rows = condition_study(r1, r2, k_max)?;
    prepare_out(out)?;
    let mut s = String::from("k,kappa_unscaled,kappa_scaled\n");
    for r in &rows {
        let _ = writeln!(s, "{},{},{}", r.k, num(r.kappa_unscaled), num(r.kappa_scaled));
    }
    write_file(out, "condition.csv", &s)
}

fn cmd_convergence(common: &Common, levels: usize) -> CliResult<()> {
    let config = load_config(&common.config)?;
    let rows = convergence_study(&config, levels)?;
    prepare_out(&common.out)?;
    let mut s = String::from("h,l2_error,order\n");
    for r in &rows {
        let order = r.order.map(num).unwrap_or_default();
        let _ = writeln!(s, "{},{},{}", num(r.h), num(r.l2_error), order);
    }
    write_file(&common.out, "convergence.csv", &s)
}

fn cmd_torque_compare(common: &Common, nt: Option<usize>) -> CliResult<()> {
    let config = load_config(&common.config)?;
    prepare_out(&common.out)?;
    let machine = Machine::build(&config)?;
    let mesh = config.time_mesh(nt)?;
    let schemes = [Scheme::StaticSweep, Scheme::ImplicitEuler, Scheme::SpaceTimeForward];
    let runs = schemes
        .iter()
        .map(|&s| run_scenario(&machine, &mesh, s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = String::from("t,delta_deg,static_sweep,implicit_euler,space_time\n");
    for i in 0..runs[0].torques.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            num(runs[0].trajectory.times[i]),
            num(runs[0].deltas[i].to_degrees()),
            num(runs[0].torques[i]),
            num(runs[1].torques[i]),
            num(runs[2].torques[i]),
        );
    }
    write_file(&common.out, "torque-compare.csv", &s)?;
    let peak = runs[2].torques.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let gap = runs[1]
        .torques
        .iter()
        .zip(&runs[2].torques)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let summary = json!({
        "name": config.name,
        "n_intervals": mesh.n_intervals(),
        "euler_vs_spacetime_max_relative": gap / peak.max(f64::MIN_POSITIVE),
        "spacetime_minus_static_max": runs[2].torques.iter().zip(&runs[0].torques).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max),
    });
    write_file(&common.out, "compare-summary.json", &pretty(&summary))
}
