//! Batch workflow: poses → curve → mechanism → collision report → design.
//!
//! Exit codes: 0 success, 1 collisions found, 2 the method failed on valid
//! input, 3 invalid input (including usage errors).

pub mod json;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::builder::TypedValueParser;
use clap::{Parser, Subcommand, ValueEnum};
use ratlink::collision::{collision_check_with_workers, EventRecord, COLLISION_TOL};
use ratlink::design::{apply_design_cps, export_design, get_design, load_design_json, DesignFormat};
use ratlink::input::{curve_rows, parse_curve, parse_poses};
use ratlink::mechanism::{Configuration, RationalMechanism, DEFAULT_JOINT_LENGTH};
use ratlink::quatcore::{DualQuaternion, Vec3};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_METHOD: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ratlink", version, about = "Synthesis of rational single-loop linkages")]
pub struct Cli {
    /// Significant digits of floats in JSON output.
    #[arg(long, global = true, default_value_t = json::DEFAULT_DIGITS, value_parser = clap::value_parser!(u8).range(1..=17).map(usize::from))]
    pub precision: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Interpolate 2 to 4 poses by a rational motion (pose file → curve file).
    Interpolate {
        poses: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Factorize a curve into a closed linkage (curve file → .rlmech).
    Factorize {
        curve: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a mechanism for self-collisions over the full motion.
    Collide {
        mechanism: PathBuf,
        /// Contact distance in model units.
        #[arg(long, env = "RATLINK_TOL", default_value_t = COLLISION_TOL)]
        tol: f64,
        /// Worker threads; defaults to the available cores.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Export DH parameters and connection points.
    Design {
        mechanism: PathBuf,
        /// Defaults to the scale stored in the mechanism.
        #[arg(long)]
        scale: Option<f64>,
        /// Physical joint segment length in millimetres.
        #[arg(long, default_value_t = DEFAULT_JOINT_LENGTH)]
        joint_length: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Set a mechanism's connection points from a design JSON file.
    ApplyDesign {
        mechanism: PathBuf,
        design: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample poses and joint frames at evenly spaced drive angles.
    Sample {
        mechanism: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP service, optionally with a preloaded mechanism.
    Serve {
        mechanism: Option<PathBuf>,
        #[arg(long, default_value_t = ratlink_service::DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Worker threads per collision job.
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A failed command: exit code and message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<ratlink::Error> for Failure {
    fn from(e: ratlink::Error) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_METHOD };
        Self { code, message: format!("{}: {e}", e.name()) }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

/// Prefixes library errors with the file they came from.
fn in_file<T>(path: &Path, r: ratlink::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let f = Failure::from(e);
        Failure { message: format!("{}: {}", path.display(), f.message), ..f }
    })
}

fn load_mechanism(path: &Path) -> Result<RationalMechanism, Failure> {
    in_file(path, RationalMechanism::from_json(&read(path)?))
}

/// Text written by a successful command and its exit code.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: EXIT_OK }
    }
}

#[derive(Serialize)]
struct CurveFile {
    coordinates: Vec<Vec<Value>>,
    metadata: Map<String, Value>,
}

pub fn cmd_interpolate(poses: &Path, digits: usize) -> Result<Outcome, Failure> {
    let input = in_file(poses, parse_poses(&read(poses)?))?;
    let ip = input.poses.interpolate()?;
    let mut metadata = input.metadata;
    metadata.insert("node_params".into(), json!(ip.nodes));
    metadata.insert("max_residual".into(), json!(ip.max_residual));
    let file = CurveFile { coordinates: curve_rows(&ip.curve), metadata };
    Ok(Outcome::ok(json::to_string(&file, digits)))
}

pub fn cmd_factorize(curve: &Path) -> Result<Outcome, Failure> {
    let input = in_file(curve, parse_curve(&read(curve)?))?;
    let m = RationalMechanism::from_curve(input.curve)?.with_metadata(input.metadata);
    Ok(Outcome::ok(m.to_json()))
}

#[derive(Serialize)]
struct CollisionReport {
    collision_free: bool,
    tolerance: f64,
    event_count: usize,
    events: Vec<EventRecord>,
}

pub fn cmd_collide(mechanism: &Path, tol: f64, workers: usize, digits: usize) -> Result<Outcome, Failure> {
    let m = load_mechanism(mechanism)?;
    let events = collision_check_with_workers(&m, tol, workers)?;
    let report = CollisionReport {
        collision_free: events.is_empty(),
        tolerance: tol,
        event_count: events.len(),
        events: events.iter().map(EventRecord::from).collect(),
    };
    let code = if report.collision_free { EXIT_OK } else { EXIT_FINDINGS };
    Ok(Outcome { text: json::to_string(&report, digits), code })
}

pub fn cmd_design(mechanism: &Path, scale: Option<f64>, joint_length: f64, format: Format) -> Result<Outcome, Failure> {
    let m = load_mechanism(mechanism)?;
    let table = get_design(&m, scale.unwrap_or(m.scale()), joint_length)?;
    let format = match format {
        Format::Csv => DesignFormat::Csv,
        Format::Json => DesignFormat::Json,
    };
    Ok(Outcome::ok(export_design(&table, format)))
}

pub fn cmd_apply_design(mechanism: &Path, design: &Path) -> Result<Outcome, Failure> {
    let m = load_mechanism(mechanism)?;
    let table = in_file(design, load_design_json(&read(design)?))?;
    let cps: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.cp0, r.cp1)).collect();
    let m = apply_design_cps(&m, &cps, table.scale)?;
    Ok(Outcome::ok(m.to_json()))
}

#[derive(Serialize)]
struct SampleRecord {
    #[serde(flatten)]
    configuration: Configuration,
    tool_origin: [f64; 3],
}

#[derive(Serialize)]
struct Trajectory {
    steps: usize,
    records: Vec<SampleRecord>,
}

/// Drive angles `(k + ½)·2π/N`, which avoid the home configuration.
pub fn sample_angles(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| (k as f64 + 0.5) * std::f64::consts::TAU / steps as f64).collect()
}

pub fn cmd_sample(mechanism: &Path, steps: usize, digits: usize) -> Result<Outcome, Failure> {
    if steps == 0 {
        return Err(Failure::input("InvalidInput: --steps must be at least 1"));
    }
    let m = load_mechanism(mechanism)?;
    let records = sample_angles(steps)
        .into_iter()
        .map(|angle| {
            let configuration = m.configuration(angle)?;
            let tool_origin = DualQuaternion::from_array(configuration.tool).act_on_point(&Vec3::zero())?.to_array();
            Ok(SampleRecord { configuration, tool_origin })
        })
        .collect::<ratlink::Result<Vec<_>>>()?;
    Ok(Outcome::ok(json::to_string(&Trajectory { steps, records }, digits)))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn serve(
    mechanism: Option<&Path>,
    host: &str,
    port: u16,
    workers: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let mut config = ratlink_service::ServiceConfig::default();
    if let Some(w) = workers {
        config.workers = w.max(1);
    }
    let state = ratlink_service::AppState::new(config);
    if let Some(path) = mechanism {
        let id = state.insert_mechanism(load_mechanism(path)?);
        let _ = writeln!(out, "session {id}");
    }
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::input(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| Failure::input(format!("cannot bind {host}:{port}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| Failure::input(e.to_string()))?;
        let _ = writeln!(out, "listening on http://{addr}");
        let _ = out.flush();
        ratlink_service::serve(listener, state).await.map_err(|e| Failure { code: EXIT_METHOD, message: e.to_string() })
    })
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<Outcome, Failure> {
    let digits = cli.precision;
    let (outcome, output) = match cli.command {
        Command::Interpolate { poses, output } => (cmd_interpolate(&poses, digits)?, output),
        Command::Factorize { curve, output } => (cmd_factorize(&curve)?, output),
        Command::Collide { mechanism, tol, workers, output } => {
            (cmd_collide(&mechanism, tol, workers.unwrap_or_else(default_workers), digits)?, output)
        }
        Command::Design { mechanism, scale, joint_length, format, output } => {
            (cmd_design(&mechanism, scale, joint_length, format)?, output)
        }
        Command::ApplyDesign { mechanism, design, output } => (cmd_apply_design(&mechanism, &design)?, output),
        Command::Sample { mechanism, steps, output } => (cmd_sample(&mechanism, steps, digits)?, output),
        Command::Serve { mechanism, port, host, workers } => {
            serve(mechanism.as_deref(), &host, port, workers, out)?;
            return Ok(Outcome::ok(String::new()));
        }
    };
    match output {
        Some(path) => fs::write(&path, &outcome.text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(outcome.text.as_bytes()).map_err(|e| Failure::input(e.to_string()))?,
    }
    Ok(outcome)
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Usage errors exit with [`EXIT_INPUT`].
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(o) => o.code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
