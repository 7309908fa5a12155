//! Command-line front end. Every command writes CSV or JSON artifacts into
//! `--out` together with a manifest recording its parameters.

mod check;
mod output;

use std::f64::consts::TAU;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dynamics::{delta_q_grid, sweep_grid, HeatGrid};
use crate::error::{Error, Result};
use crate::randomwalk::{run_walk, WalkConfig, DEFAULT_STEP_MAX};
use crate::states::{polytope_vertices, rho_abc, slice_grid, slice_vertices, MarginalVector, RhoACParams};
use crate::thermo::product_thermal_state;
use crate::witness::witness_region_scan;

pub use check::{run_checks, CheckReport, CheckResult, CHECK_IDS};
pub use output::{format_value, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "thermal-arrow", version, about = "Heat flow and the thermodynamic arrow in correlated qubits")]
pub struct Cli {
    /// Worker threads for grid sweeps; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Heat into A, B and C over a (t, s) grid.
    Heatmap(HeatmapArgs),
    /// Product minus entangled heat into A, and the cells where A loses heat to B and C.
    Deltaq(GridArgs),
    /// Scan the correlated-state parameters for I(A:C) > ln 2.
    WitnessRegion(WitnessArgs),
    /// Random heat exchanges on the constant-energy slice.
    Walk(WalkArgs),
    /// Vertices of the marginal polytope and of a constant-energy slice.
    Polytope(PolytopeArgs),
    /// Run the invariant suites and write a JSON report.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Entangled,
    Product,
}

impl StateKind {
    fn name(self) -> &'static str {
        match self {
            StateKind::Entangled => "entangled",
            StateKind::Product => "product",
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.15)]
    pub lambda_a: f64,
    #[arg(long, default_value_t = 0.2)]
    pub lambda_b: f64,
    #[arg(long, default_value_t = 0.3)]
    pub lambda_c: f64,
    #[arg(long, default_value_t = 0.4)]
    pub gamma: f64,
    #[arg(long, default_value_t = TAU)]
    pub t_max: f64,
    #[arg(long, default_value_t = TAU)]
    pub s_max: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct HeatmapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = StateKind::Entangled)]
    pub state: StateKind,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct WitnessArgs {
    /// Spacing of the (lambda_A, lambda_C, gamma) scan.
    #[arg(long, default_value_t = 0.02)]
    pub resolution: f64,
    #[arg(long, default_value_t = 0.2)]
    pub lambda_b: f64,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct WalkArgs {
    #[arg(long, default_value_t = 0.1)]
    pub lambda_a: f64,
    #[arg(long, default_value_t = 0.2)]
    pub lambda_b: f64,
    #[arg(long, default_value_t = 0.3)]
    pub lambda_c: f64,
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    #[arg(long, default_value_t = DEFAULT_STEP_MAX)]
    pub step_max: f64,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub constrained: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct PolytopeArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    /// Spacing of the slice grid.
    #[arg(long, default_value_t = 0.05)]
    pub resolution: f64,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples per suite.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Test hook: push one sample of the named suite across its bound.
    #[arg(long, hide = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inject_fault: Option<String>,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

/// Parse `args`, run the command and map the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_INTERNAL
            }
        }
    }
}

/// Run a parsed command. Returns the exit code for runs that complete but
/// report failures (a `check` with violations).
pub fn run(cli: &Cli) -> Result<i32> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Error::Io(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Heatmap(a) => cmd_heatmap(a).map(|_| EXIT_OK),
        Command::Deltaq(a) => cmd_deltaq(a).map(|_| EXIT_OK),
        Command::WitnessRegion(a) => cmd_witness_region(a).map(|_| EXIT_OK),
        Command::Walk(a) => cmd_walk(a).map(|_| EXIT_OK),
        Command::Polytope(a) => cmd_polytope(a).map(|_| EXIT_OK),
        Command::Check(a) => {
            let report = cmd_check(a)?;
            Ok(if report.total_violations == 0 { EXIT_OK } else { EXIT_INTERNAL })
        }
    })
}

fn check_finite(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        if !v.is_finite() {
            return Err(Error::param(format!("--{name} must be a finite number")));
        }
    }
    Ok(())
}

fn grid_for(a: &GridArgs, state: StateKind) -> Result<HeatGrid> {
    check_finite(&[("t-max", a.t_max), ("s-max", a.s_max)])?;
    let rho = match state {
        StateKind::Entangled => rho_abc(&RhoACParams::new(a.lambda_a, a.lambda_c, a.gamma)?, a.lambda_b)?,
        StateKind::Product => product_thermal_state(&[a.lambda_a, a.lambda_b, a.lambda_c])?,
    };
    sweep_grid(&rho, (0.0, a.t_max), (0.0, a.s_max), a.resolution, state.name())
}

fn grid_rows<'a>(g: &'a HeatGrid, column: &'a [f64]) -> impl Iterator<Item = Vec<String>> + 'a {
    g.t_values.iter().enumerate().flat_map(move |(it, &t)| {
        g.s_values
            .iter()
            .enumerate()
            .map(move |(is, &s)| vec![format_value(t), format_value(s), format_value(column[g.index(it, is)])])
    })
}

pub fn cmd_heatmap(a: &HeatmapArgs) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let grid = grid_for(&a.grid, a.state)?;
    let out = &a.grid.out;
    let mut files = Vec::new();
    for (site, label) in ["A", "B", "C"].iter().enumerate() {
        let path = out.join(format!("heat_{}_{label}.csv", a.state.name()));
        output::write_csv(&path, &["t", "s", "Q"], grid_rows(&grid, grid.heat(site)))?;
        files.push(path);
    }
    let manifest = RunManifest::new("heatmap", a, None, &files, started);
    manifest.write(&out.join(format!("heatmap_{}.manifest.json", a.state.name())))?;
    Ok(files)
}

pub fn cmd_deltaq(a: &GridArgs) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let entangled = grid_for(a, StateKind::Entangled)?;
    let product = grid_for(a, StateKind::Product)?;
    let d = delta_q_grid(&entangled, &product)?;
    let ns = d.s_values.len();
    let rows = (0..d.delta_q_a.len()).map(|k| {
        vec![
            format_value(d.t_values[k / ns]),
            format_value(d.s_values[k % ns]),
            format_value(d.delta_q_a[k]),
            if d.violation_mask[k] { "1" } else { "0" }.to_string(),
        ]
    });
    let path = a.out.join("deltaq.csv");
    output::write_csv(&path, &["t", "s", "delta_q_a", "mask"], rows)?;
    let files = vec![path];
    RunManifest::new("deltaq", a, None, &files, started).write(&a.out.join("deltaq.manifest.json"))?;
    Ok(files)
}

pub fn cmd_witness_region(a: &WitnessArgs) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let points = witness_region_scan(a.resolution, a.lambda_b)?;
    let rows = points.iter().map(|p| {
        vec![
            format_value(p.lambda_a),
            format_value(p.lambda_c),
            format_value(p.gamma),
            format_value(p.mutual_information),
            if p.capable { "1" } else { "0" }.to_string(),
        ]
    });
    let path = a.out.join("witness_region.csv");
    output::write_csv(&path, &["lambda_a", "lambda_c", "gamma", "I", "capable"], rows)?;
    let files = vec![path];
    RunManifest::new("witness-region", a, None, &files, started).write(&a.out.join("witness_region.manifest.json"))?;
    Ok(files)
}

pub fn cmd_walk(a: &WalkArgs) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    check_finite(&[("lambda-a", a.lambda_a), ("lambda-b", a.lambda_b), ("lambda-c", a.lambda_c)])?;
    let config = WalkConfig {
        initial: MarginalVector::new(vec![a.lambda_a, a.lambda_b, a.lambda_c])?,
        constrained: a.constrained,
        step_max: a.step_max,
        num_steps: a.steps,
        seed: a.seed,
    };
    let walk = run_walk(&config)?;
    let rows = walk.points.iter().enumerate().map(|(k, p)| {
        let l = p.lambdas();
        let accepted = k > 0 && walk.accepted[k - 1];
        vec![
            k.to_string(),
            format_value(l[0]),
            format_value(l[1]),
            format_value(l[2]),
            walk.regions[k].to_string(),
            if accepted { "1" } else { "0" }.to_string(),
        ]
    });
    let stem = if a.constrained { "walk_constrained" } else { "walk_unconstrained" };
    let path = a.out.join(format!("{stem}.csv"));
    output::write_csv(&path, &["step", "lambda_a", "lambda_b", "lambda_c", "region", "accepted"], rows)?;
    let files = vec![path];
    RunManifest::new("walk", a, Some(a.seed), &files, started).write(&a.out.join(format!("{stem}.manifest.json")))?;
    Ok(files)
}

fn point_rows(points: impl IntoIterator<Item = Vec<f64>>) -> impl Iterator<Item = Vec<String>> {
    points.into_iter().map(|p| p.into_iter().map(format_value).collect())
}

pub fn cmd_polytope(a: &PolytopeArgs) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    check_finite(&[("energy", a.energy), ("resolution", a.resolution)])?;
    if a.n > 8 {
        return Err(Error::param(format!("--n {} is too large (at most 8)", a.n)));
    }
    let header: Vec<String> = (1..=a.n).map(|i| format!("lambda_{i}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();

    let vertices = polytope_vertices(a.n)?;
    let slice = slice_vertices(a.n, a.energy)?;
    let grid = slice_grid(a.n, a.energy, a.resolution)?;
    let files =
        vec![a.out.join("polytope_vertices.csv"), a.out.join("slice_vertices.csv"), a.out.join("slice_grid.csv")];
    output::write_csv(&files[0], &header, point_rows(vertices))?;
    output::write_csv(&files[1], &header, point_rows(slice))?;
    output::write_csv(&files[2], &header, point_rows(grid.into_iter().map(|p| p.lambdas().to_vec())))?;
    RunManifest::new("polytope", a, None, &files, started).write(&a.out.join("polytope.manifest.json"))?;
    Ok(files)
}

pub fn cmd_check(a: &CheckArgs) -> Result<CheckReport> {
    let started = Instant::now();
    if a.trials == 0 {
        return Err(Error::param("--trials must be at least 1"));
    }
    if let Some(id) = &a.inject_fault {
        if !CHECK_IDS.contains(&id.as_str()) {
            return Err(Error::param(format!("unknown check '{id}'")));
        }
    }
    let report = run_checks(a.seed, a.trials, a.inject_fault.as_deref())?;
    let path = a.out.join("check_report.json");
    output::write_json(&path, &report)?;
    let files = vec![path];
    RunManifest::new("check", a, Some(a.seed), &files, started).write(&a.out.join("check.manifest.json"))?;
    for c in &report.checks {
        eprintln!(
            "{:<22} samples {:>6}  violations {:>4}  max residual {:.3e}",
            c.id, c.samples, c.violations, c.max_residual
        );
    }
    Ok(report)
}
