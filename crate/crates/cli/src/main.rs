use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orbitspace::Point;
use orbitspace_cli::config::{parse_grid, parse_point, PolicyChoice, RhoChoice};
use orbitspace_cli::{run, CliError, Command, Format, RunConfig, Scenario};

#[derive(Debug, Parser)]
#[command(name = "orbitspace", version, about = "Orbits of generalized derivatives of planar quasiconformal maps")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate the map at each --x.
    Eval,
    /// Numerical Beltrami coefficient on a log-polar grid over t_lo <= |z| <= t_hi.
    Beltrami,
    /// Rescaled orbit curve of --x, from --t-hi down to --t-lo.
    Trace,
    /// Omega-limit estimate of the orbit curve of --x.
    Omega,
    /// Synthesize a piecewise annulus map whose orbit of 1 accumulates on --target.
    Realize,
    /// Check a map (or a realize report) against --target. Exits 1 on failure.
    Verify,
    /// Run a built-in experiment.
    Scenario {
        #[arg(value_enum)]
        name: Scenario,
    },
}

#[derive(Debug, Args)]
struct Opts {
    /// Map descriptor: a JSON file path or inline JSON.
    #[arg(long, global = true)]
    map: Option<String>,
    /// Target set: a JSON file path or inline JSON.
    #[arg(long, global = true)]
    target: Option<String>,
    /// Probe point `re,im`; repeat for eval.
    #[arg(long, global = true, value_parser = parse_point, allow_hyphen_values = true)]
    x: Vec<Point>,
    /// Largest t of a trace; outer radius of the Beltrami grid.
    #[arg(long, global = true)]
    t_hi: Option<f64>,
    /// Smallest t of a trace; inner radius of the Beltrami grid.
    #[arg(long, global = true)]
    t_lo: Option<f64>,
    /// Trace samples per decade of t.
    #[arg(long, global = true)]
    per_decade: Option<usize>,
    /// Grid size `N` or `NxM` (radii x angles).
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Finite-difference step relative to |z|.
    #[arg(long, global = true)]
    fd_step: Option<f64>,
    /// Hausdorff tolerance between the orbit estimate and the target.
    #[arg(long, global = true)]
    tol_hausdorff: Option<f64>,
    /// Tail stabilization tolerance; twice the sampling gap when omitted.
    #[arg(long, global = true)]
    tol_converge: Option<f64>,
    /// Trace depth for realize, verify and scenarios.
    #[arg(long, global = true)]
    depth: Option<f64>,
    /// How the mean radius rho_f(t) is computed.
    #[arg(long, global = true, value_enum)]
    rho: Option<RhoChoice>,
    /// Seed for the raster grid offset (--rho raster only).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Ring constant C of the target.
    #[arg(long, global = true)]
    bound: Option<f64>,
    /// Number of cover passes.
    #[arg(long, global = true)]
    k_max: Option<usize>,
    #[arg(long, global = true, value_enum)]
    policy: Option<PolicyChoice>,
    /// Distortion margin of the small-twist policy.
    #[arg(long, global = true)]
    margin: Option<f64>,
    /// Levels of the Dehn twist schedule.
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Output format; CSV for eval, beltrami, trace and omega by default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

fn resolve(cli: Cli) -> RunConfig {
    let (command, scenario) = match cli.command {
        Cmd::Eval => (Command::Eval, None),
        Cmd::Beltrami => (Command::Beltrami, None),
        Cmd::Trace => (Command::Trace, None),
        Cmd::Omega => (Command::Omega, None),
        Cmd::Realize => (Command::Realize, None),
        Cmd::Verify => (Command::Verify, None),
        Cmd::Scenario { name } => (Command::Scenario, Some(name)),
    };
    let o = cli.opts;
    let mut c = RunConfig::new(command);
    c.scenario = scenario;
    c.map = o.map;
    c.target = o.target;
    if !o.x.is_empty() {
        c.x = o.x;
    }
    c.t_hi = o.t_hi.unwrap_or(c.t_hi);
    c.t_lo = o.t_lo.unwrap_or(c.t_lo);
    c.per_decade = o.per_decade.unwrap_or(c.per_decade);
    c.grid = o.grid.unwrap_or(c.grid);
    c.fd_step = o.fd_step.unwrap_or(c.fd_step);
    c.tol_hausdorff = o.tol_hausdorff.unwrap_or(c.tol_hausdorff);
    c.tol_converge = o.tol_converge;
    c.depth = o.depth.unwrap_or_else(|| scenario.map_or(c.depth, RunConfig::scenario_depth));
    c.rho = o.rho.unwrap_or(c.rho);
    c.seed = o.seed;
    c.bound = o.bound;
    c.k_max = o.k_max.unwrap_or(c.k_max);
    c.policy = o.policy.unwrap_or(c.policy);
    c.margin = o.margin.unwrap_or(c.margin);
    c.levels = o.levels.unwrap_or(c.levels);
    c.out = o.out;
    c.format = o.format.unwrap_or(c.format);
    c
}

fn write_output(config: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &config.out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn main() -> ExitCode {
    let config = resolve(Cli::parse());
    let result = run(&config).and_then(|out| write_output(&config, &out.bytes).map(|()| out.passed));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("orbitspace: verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("orbitspace: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
