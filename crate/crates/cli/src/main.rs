//! `covertnet` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or invalid parameters, 3 domain failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use covertnet::units::{self, QuantityKind};

const UNITS_HELP: &str = "\
Units: times accept s, ms, us, ns, ps (bare numbers are seconds). \
Gaps accept Hz, kHz, MHz, GHz and are angular frequencies without a 2π factor (100kHz = 1e5 s⁻¹). \
Separations are light-travel times and accept time suffixes or m, km (1km = 1/299792.458 s). \
Ranges are written lo..hi.";

#[derive(Debug, Parser)]
#[command(name = "covertnet", version, about = "Covert quantum network simulator", after_help = UNITS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Singlet fraction and EOF of the vacuum channel over a separation grid (CSV).
    #[command(after_help = UNITS_HELP)]
    Sweep(SweepArgs),
    /// Recurrence distillation from a Werner pool to a target fidelity (JSON).
    Distill(DistillArgs),
    /// Teleport a state or a gate through one resource (JSON).
    Teleport(TeleportArgs),
    /// Build a graph or hypergraph state and verify its stabilizers.
    Graph(GraphArgs),
    /// Run blind computation on a brickwork layout (JSON transcript).
    Bfk(BfkArgs),
    /// Route, swap and teleport across a topology file (JSON report).
    Netrun(NetrunArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Channel application counts, comma separated.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    iterations: Vec<u64>,
    /// Dimensionless coupling λ².
    #[arg(long)]
    lambda2: f64,
    /// Switching width.
    #[arg(long, value_parser = time)]
    sigma: f64,
    /// Detector gap.
    #[arg(long, value_parser = frequency)]
    delta: f64,
    /// Separation range `lo..hi` or a single value.
    #[arg(long = "L", value_parser = separation_range)]
    separation: (f64, f64),
    /// Grid points across the separation range.
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Geometric instead of linear spacing.
    #[arg(long)]
    log: bool,
    #[arg(long, default_value_t = covertnet::vacuum::DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct DistillArgs {
    /// Werner fidelity of the raw pool.
    #[arg(long = "F", value_parser = unit_interval)]
    fidelity: f64,
    #[arg(long, value_parser = unit_interval)]
    target: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResourceKind {
    Ideal,
    Werner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TeleportProtocol {
    State,
    Cnot,
    ZPrimitive,
    XPrimitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputState {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
    /// Uniformly random on the Bloch sphere, drawn from the seed.
    Random,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    #[arg(long, value_enum, default_value_t = ResourceKind::Ideal)]
    resource: ResourceKind,
    /// Werner fidelity for `--resource werner`.
    #[arg(long = "F", value_parser = unit_interval)]
    fidelity: Option<f64>,
    #[arg(long, value_enum, default_value_t = TeleportProtocol::State)]
    protocol: TeleportProtocol,
    /// Input qubit (the control for `cnot`).
    #[arg(long, value_enum, default_value_t = InputState::Random)]
    input: InputState,
    /// Target qubit for `cnot`.
    #[arg(long, value_enum, default_value_t = InputState::Random)]
    target: InputState,
    #[arg(long)]
    seed: u64,
    /// Also write the message transcript as JSON lines.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    /// Erdős–Rényi graph; needs `--vertices`, `--p`, `--seed`.
    Random,
    /// Tiling of cluster-lattice cells; `--cells X,Y,Z`.
    Raussendorf,
    /// Triangulated square lattice of CCZ triangles; `--rows`, `--cols`.
    UnionJack,
    /// Brickwork layout; `--cols` columns by `--rows` rows.
    Brickwork,
    /// Adjacency text from `--input`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Json,
    Adjacency,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long, value_enum)]
    kind: GraphKind,
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long, value_parser = unit_interval)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cell counts `X,Y,Z`.
    #[arg(long, value_parser = cells, default_value = "1,1,1")]
    cells: [u32; 3],
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
    format: GraphFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct BfkArgs {
    /// Brickwork columns.
    #[arg(long)]
    n: usize,
    /// Brickwork rows.
    #[arg(long)]
    m: usize,
    #[arg(long)]
    seed: u64,
    /// Run description JSON; all angles zero when absent.
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Also write the message transcript as JSON lines.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct NetrunArgs {
    /// Topology TOML file.
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    src: u32,
    #[arg(long)]
    dst: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = InputState::Random)]
    input: InputState,
    /// Also write the message transcript as JSON lines.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

fn time(s: &str) -> Result<f64, String> {
    let v = units::parse_time(s).map_err(|e| e.to_string())?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{s} must be positive"))
    }
}

fn frequency(s: &str) -> Result<f64, String> {
    units::parse_frequency(s).map_err(|e| e.to_string())
}

fn separation_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = units::parse_range(QuantityKind::Separation, s).map_err(|e| e.to_string())?;
    if lo < 0.0 {
        return Err(format!("{s}: separations must be non-negative"));
    }
    Ok((lo, hi))
}

fn cells(s: &str) -> Result<[u32; 3], String> {
    let parts: Vec<u32> = s.split(',').map(|p| p.trim().parse::<u32>()).collect::<Result<_, _>>().map_err(|e| format!("{s}: {e}"))?;
    <[u32; 3]>::try_from(parts).map_err(|_| format!("{s}: expected three comma-separated counts"))
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{s}: {e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{s} lies outside [0, 1]"))
    }
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => commands::sweep(&a),
        Command::Distill(a) => commands::distill(&a),
        Command::Teleport(a) => commands::teleport(&a),
        Command::Graph(a) => commands::graph(&a),
        Command::Bfk(a) => commands::bfk(&a),
        Command::Netrun(a) => commands::netrun(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
