use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use covertnet::bfk::{run_blind_computation, BfkError, BfkRunDescription, BfkSeeds, MbqcPattern};
use covertnet::entanglement::{distill_to_target, DistillationTrace};
use covertnet::graphstates::{
    brickwork_graph, build_graph_state, failing_stabilizers, tile_cells, union_jack_lattice, GraphSpec,
};
use covertnet::netsim::{route_and_teleport, NetError, Topology};
use covertnet::protocols::{
    one_bit_teleport, teleport_cnot, teleport_state, BellResource, Message, NodeId, OneBitKind, Provenance,
    Transcript,
};
use covertnet::qsim::{self, DenseState, Gate};
use covertnet::vacuum::{sweep_distance, sweep_to_csv, DetectorConfig, VacuumError};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::{
    BfkArgs, CliError, DistillArgs, GraphArgs, GraphFormat, GraphKind, InputState, NetrunArgs, ResourceKind,
    SweepArgs, TeleportArgs, TeleportProtocol,
};

pub const JSON_SCHEMA_VERSION: u32 = 1;

/// Largest graph whose stabilizers are checked on the tableau.
const VERIFY_LIMIT: usize = 2048;

type CliResult = Result<(), CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn write_to(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| domain(format!("writing {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(domain)
        }
    }
}

fn write_json(path: &Option<PathBuf>, value: &impl Serialize) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).map_err(domain)?;
    text.push('\n');
    write_to(path.as_deref(), &text)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("reading {}: {e}", path.display())))
}

fn write_transcript(path: &Option<PathBuf>, messages: &[Message]) -> CliResult {
    let Some(path) = path else { return Ok(()) };
    let text: String = messages
        .iter()
        .map(|m| serde_json::to_string(m).expect("message serialises") + "\n")
        .collect();
    write_to(Some(path), &text)
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_owned()
}

fn input_state<R: Rng + ?Sized>(kind: InputState, rng: &mut R) -> DenseState {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = match kind {
        InputState::Zero => (c(1.0, 0.0), c(0.0, 0.0)),
        InputState::One => (c(0.0, 0.0), c(1.0, 0.0)),
        InputState::Plus => (c(h, 0.0), c(h, 0.0)),
        InputState::Minus => (c(h, 0.0), c(-h, 0.0)),
        InputState::PlusI => (c(h, 0.0), c(0.0, h)),
        InputState::MinusI => (c(h, 0.0), c(0.0, -h)),
        InputState::Random => {
            let cos_theta = 1.0 - 2.0 * rng.gen::<f64>();
            let phi = 2.0 * PI * rng.gen::<f64>();
            let half = cos_theta.acos() / 2.0;
            (c(half.cos(), 0.0), Complex64::from_polar(half.sin(), phi))
        }
    };
    DenseState::qubit(a, b).expect("normalised input")
}

pub fn sweep(a: &SweepArgs) -> CliResult {
    let template = DetectorConfig {
        coupling_sq: a.lambda2,
        gap: a.delta,
        width: a.sigma,
        separation: a.separation.0,
        iterations: a.iterations[0],
    };
    template.validate().map_err(usage)?;
    if !(a.tol > 0.0) {
        return Err(usage(format!("tolerance must be positive, got {}", a.tol)));
    }
    let separations =
        covertnet::units::grid(a.separation.0, a.separation.1, a.points, a.log).map_err(usage)?;
    let rows = sweep_distance(&template, &separations, &a.iterations, a.tol).map_err(|e| match e {
        VacuumError::InvalidConfig(_) => usage(e),
        other => domain(other),
    })?;
    write_to(a.output.out.as_deref(), &sweep_to_csv(&rows))?;
    let failed: Vec<&String> = rows.iter().filter_map(|r| r.outcome.as_ref().err()).collect();
    match failed.first() {
        None => Ok(()),
        Some(first) => Err(domain(format!("{} sweep rows failed; first: {first}", failed.len()))),
    }
}

#[derive(Serialize)]
struct DistillReport {
    schema_version: u32,
    #[serde(flatten)]
    trace: DistillationTrace,
}

pub fn distill(a: &DistillArgs) -> CliResult {
    let trace = distill_to_target(a.fidelity, a.target).map_err(domain)?;
    write_json(&a.output.out, &DistillReport { schema_version: JSON_SCHEMA_VERSION, trace })
}

pub fn teleport(a: &TeleportArgs) -> CliResult {
    let (alice, bob) = (NodeId(0), NodeId(1));
    let one_bit = matches!(a.protocol, TeleportProtocol::ZPrimitive | TeleportProtocol::XPrimitive);
    let resource = match (a.resource, a.fidelity) {
        (_, Some(_)) if one_bit => return Err(usage("one-bit primitives consume no Bell pair; drop --F")),
        (ResourceKind::Ideal, None) => BellResource::ideal(alice, bob).map_err(domain)?,
        (ResourceKind::Ideal, Some(_)) => return Err(usage("--F applies only to --resource werner")),
        (ResourceKind::Werner, Some(f)) => BellResource::werner(f, Provenance::Distilled, alice, bob).map_err(domain)?,
        (ResourceKind::Werner, None) => return Err(usage("--resource werner needs --F")),
    };
    let resource_json = (!one_bit).then(|| json!({ "kind": value_name(a.resource), "fidelity": resource.fidelity() }));

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let input = input_state(a.input, &mut rng);
    let (output_fidelity, transcript): (f64, Transcript) = match a.protocol {
        TeleportProtocol::State => {
            let (out, t) = teleport_state(&input, resource, &mut rng).map_err(domain)?;
            (out.expectation_pure(&input), t)
        }
        TeleportProtocol::Cnot => {
            let target = input_state(a.target, &mut rng);
            let mut ideal = input.tensor(&target).map_err(domain)?;
            ideal.apply_gate(Gate::CNOT, &[0, 1]).map_err(domain)?;
            let (out, t) = teleport_cnot(&input, &target, resource, &mut rng).map_err(domain)?;
            (out.expectation_pure(&ideal), t)
        }
        TeleportProtocol::ZPrimitive | TeleportProtocol::XPrimitive => {
            let kind = if a.protocol == TeleportProtocol::ZPrimitive {
                OneBitKind::ZPrimitive
            } else {
                OneBitKind::XPrimitive
            };
            let (out, t) = one_bit_teleport(kind, &input, alice, bob, &mut rng).map_err(domain)?;
            (qsim::fidelity(&out, &input).map_err(domain)?, t)
        }
    };
    write_transcript(&a.transcript, transcript.messages())?;
    write_json(
        &a.output.out,
        &json!({
            "schema_version": JSON_SCHEMA_VERSION,
            "protocol": value_name(a.protocol),
            "resource": resource_json,
            "seed": a.seed,
            "output_fidelity": output_fidelity,
            "covert_bits": transcript.covert_bits(),
            "bell_pairs_consumed": transcript.bell_pairs_consumed(),
            "messages": transcript.messages(),
        }),
    )
}

fn require<T: Copy>(v: Option<T>, flag: &str, kind: GraphKind) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("--kind {} needs {flag}", value_name(kind))))
}

fn verify(g: &GraphSpec) -> Result<Option<Vec<usize>>, CliError> {
    if g.vertex_count() > VERIFY_LIMIT {
        return Ok(None);
    }
    failing_stabilizers(g, &build_graph_state(g)).map(Some).map_err(domain)
}

pub fn graph(a: &GraphArgs) -> CliResult {
    let kind_name = value_name(a.kind);
    if a.kind == GraphKind::UnionJack {
        if a.format == GraphFormat::Adjacency {
            return Err(usage("the Union Jack state is a hypergraph; use --format json"));
        }
        let rows = require(a.rows, "--rows", a.kind)?;
        let cols = require(a.cols, "--cols", a.kind)?;
        let complex = union_jack_lattice(rows, cols).map_err(usage)?;
        return write_json(
            &a.output.out,
            &json!({
                "schema_version": JSON_SCHEMA_VERSION,
                "kind": kind_name,
                "vertices": complex.vertex_count(),
                "triangles": complex.triangles(),
            }),
        );
    }

    let mut extra = serde_json::Map::new();
    let g = match a.kind {
        GraphKind::Random => {
            let n = require(a.vertices, "--vertices", a.kind)?;
            let p = require(a.p, "--p", a.kind)?;
            let seed = require(a.seed, "--seed", a.kind)?;
            if n > covertnet::graphstates::MAX_LATTICE_QUBITS {
                return Err(usage(format!("{n} vertices exceeds the lattice cap")));
            }
            extra.insert("seed".into(), json!(seed));
            GraphSpec::random(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
        }
        GraphKind::Raussendorf => {
            let lattice = tile_cells(a.cells[0], a.cells[1], a.cells[2]).map_err(usage)?;
            extra.insert("cells".into(), json!(a.cells));
            extra.insert("coords".into(), json!(lattice.coords));
            lattice.graph
        }
        GraphKind::Brickwork => {
            let cols = require(a.cols, "--cols", a.kind)?;
            let rows = require(a.rows, "--rows", a.kind)?;
            let layout = brickwork_graph(cols, rows).map_err(usage)?;
            extra.insert("layout".into(), json!(layout.layout));
            extra.insert("columns".into(), json!(cols));
            extra.insert("rows".into(), json!(rows));
            layout.graph
        }
        GraphKind::File => {
            let path = a.input.as_ref().ok_or_else(|| usage("--kind file needs --input"))?;
            GraphSpec::from_adjacency_text(&read(path)?).map_err(usage)?
        }
        GraphKind::UnionJack => unreachable!("handled above"),
    };

    match a.format {
        GraphFormat::Adjacency => write_to(a.output.out.as_deref(), &g.to_adjacency_text()),
        GraphFormat::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("schema_version".into(), json!(JSON_SCHEMA_VERSION));
            doc.insert("kind".into(), json!(kind_name));
            doc.insert("vertices".into(), json!(g.vertex_count()));
            doc.insert("edges".into(), json!(g.edges().collect::<Vec<_>>()));
            doc.insert("failing_stabilizers".into(), json!(verify(&g)?));
            doc.extend(extra);
            write_json(&a.output.out, &doc)
        }
    }
}

fn bfk_pattern(a: &BfkArgs) -> Result<MbqcPattern, CliError> {
    let Some(path) = &a.pattern else {
        return MbqcPattern::zeros(a.n, a.m).map_err(usage);
    };
    let d = BfkRunDescription::from_json(&read(path)?).map_err(usage)?;
    if (d.n, d.m) != (a.n, a.m) {
        return Err(usage(format!("pattern is {}×{}, command line asks for {}×{}", d.n, d.m, a.n, a.m)));
    }
    if let Some(s) = d.seed.filter(|&s| s != a.seed) {
        return Err(usage(format!("pattern seed {s} conflicts with --seed {}", a.seed)));
    }
    d.pattern().map_err(usage)
}

pub fn bfk(a: &BfkArgs) -> CliResult {
    let pattern = bfk_pattern(a)?;
    let seeds = BfkSeeds::from_master(a.seed);
    let run = run_blind_computation(&pattern, &seeds).map_err(|e| match e {
        BfkError::NonOctantAngle(_) | BfkError::InvalidPattern(_) => usage(e),
        other => domain(other),
    })?;
    let t = &run.transcript;
    write_transcript(&a.transcript, t.messages.messages())?;
    write_json(
        &a.output.out,
        &json!({
            "schema_version": JSON_SCHEMA_VERSION,
            "n": a.n,
            "m": a.m,
            "seed": a.seed,
            "layout": t.layout,
            "covert_bits": t.covert_bits(),
            "bell_pairs_consumed": t.bell_pairs_consumed(),
            "corrected": run.corrected,
            "sites": t.sites,
            "messages": t.messages.messages(),
        }),
    )
}

pub fn netrun(a: &NetrunArgs) -> CliResult {
    let topology = Topology::from_toml(&read(&a.topology)?).map_err(usage)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let input = input_state(a.input, &mut rng);
    let (_, report) = route_and_teleport(NodeId(a.src), NodeId(a.dst), &input, &topology, &mut rng).map_err(|e| match e {
        NetError::UnknownNode(_) => usage(e),
        other => domain(other),
    })?;
    write_transcript(&a.transcript, &report.messages)?;
    let mut text = report.to_json();
    text.push('\n');
    write_to(a.output.out.as_deref(), &text)?;
    match report.budget_violations.first() {
        None => Ok(()),
        Some(v) => Err(domain(format!(
            "covert-bit budget exceeded on {} link(s); first {}-{} used {} of {}",
            report.budget_violations.len(),
            v.a,
            v.b,
            v.used,
            v.budget
        ))),
    }
}
