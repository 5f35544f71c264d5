//! The `ampenc` command-line front-end.
//!
//! Input is either JSON, `{"L": 5, "values": [3, 1, 2, 0]}`, or CSV with one
//! unsigned integer per line and the width given by `--L`.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid input, 3 zero success
//! probability (including all-zero data).
//!
//! Every JSON report starts with a `header` holding the tool version, the
//! command and the defaults in force, then `params` and `data`, followed by
//! the command's payload. The sweep CSV columns are
//! `profile,n,L,rho,epsilon,scale,p_success,expected_trials,depth,time_model`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{EncodingReport, success_probability, time_model};
use crate::circuit::{ResourceReport, depth, resource_report};
use crate::compiler::{CompiledProtocol, compile};
use crate::data::{DataSet, Mode, ProtocolParams, density};
use crate::error::{Error, Result};
use crate::simulator::{Backend, SampleOptions, TrialStats, prepare, sample_trials_with};
use crate::tolerance;

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_MAX_N: u32 = 8;

#[derive(Debug, Parser)]
#[command(name = "ampenc", version, about = "Encode classical data into qubit amplitudes and check the result")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile, simulate, post-select and compare against the closed form.
    Encode(EncodeArgs),
    /// Repeat-until-success sampling of the flag measurement.
    Sample(SampleArgs),
    /// Qubit, gate and depth counts of the compiled circuit.
    Resources(InputArgs),
    /// Closed-form report only, no simulation.
    Analyze(InputArgs),
    /// Grid over CPU width, error budget and data profile; CSV rows.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Data file (JSON or CSV).
    #[arg(long)]
    pub data: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Value width in bits (required for CSV).
    #[arg(long = "L")]
    pub bits: Option<u32>,
    /// Largest tolerated relative amplitude error; picks R = c_max / sqrt(6 epsilon). [default: 1e-3]
    #[arg(long, conflicts_with = "scale")]
    pub epsilon: Option<f64>,
    /// Explicit rotation scale R.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Largest accepted CPU width.
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    pub max_n: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output_format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the compiled circuit in text form.
    #[arg(long)]
    pub dump_circuit: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = Mode::Faithful)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Backend::Auto)]
    pub backend: Backend,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Backend::Auto)]
    pub backend: Backend,
    /// Re-run the whole circuit for every trial.
    #[arg(long)]
    pub resimulate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Every value equal to `2^L - 1`.
    Uniform,
    /// Only `c_0 = 2^L - 1` is nonzero.
    Onehot,
    /// Linear ramp from 1 to `2^L - 1`.
    Ramp,
    /// Seeded uniform random values.
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// CPU widths: `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "2..6")]
    pub n: String,
    #[arg(long, value_delimiter = ',', default_value = "1e-3")]
    pub epsilon: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "uniform,onehot")]
    pub profile: Vec<Profile>,
    #[arg(long = "L", default_value_t = 8)]
    pub bits: u32,
    #[arg(long, value_enum, default_value_t = Mode::Faithful)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Backend::Auto)]
    pub backend: Backend,
    /// Seed for the `random` profile.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    pub max_n: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub output_format: OutputFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub epsilon: f64,
    pub trials: u64,
    pub max_n: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub defaults: Defaults,
}

impl Header {
    fn new(command: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            defaults: Defaults { epsilon: DEFAULT_EPSILON, trials: DEFAULT_TRIALS, max_n: DEFAULT_MAX_N },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    #[serde(rename = "L")]
    pub bits: u32,
    pub n: u32,
    pub original_len: usize,
    pub c_max: u64,
    /// Padded values.
    pub values: Vec<u64>,
}

impl DataSummary {
    fn of(data: &DataSet) -> Self {
        Self {
            bits: data.width(),
            n: data.qubits(),
            original_len: data.original_len(),
            c_max: data.c_max(),
            values: data.raw_values(),
        }
    }

    /// Rebuild the data set the summary describes.
    pub fn to_data(&self) -> Result<DataSet> {
        DataSet::new(&self.values, self.bits)
    }
}

/// Report written by `encode` and `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodeOutput {
    pub header: Header,
    pub params: ProtocolParams,
    pub backend: Option<Backend>,
    pub data: DataSummary,
    pub warnings: Vec<String>,
    pub report: EncodingReport,
    pub resources: Option<ResourceReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutput {
    pub header: Header,
    pub params: ProtocolParams,
    pub backend: Backend,
    pub data: DataSummary,
    pub warnings: Vec<String>,
    pub stats: TrialStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourcesOutput {
    pub header: Header,
    pub data: DataSummary,
    pub resources: ResourceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub profile: Profile,
    pub n: u32,
    #[serde(rename = "L")]
    pub bits: u32,
    pub rho: f64,
    pub epsilon: f64,
    pub scale: f64,
    pub p_success: f64,
    pub expected_trials: f64,
    pub depth: usize,
    pub time_model: f64,
}

#[derive(Deserialize)]
struct JsonInput {
    #[serde(rename = "L")]
    bits: u32,
    values: Vec<u64>,
}

/// Read, validate and pad a data file.
pub fn ingest(path: &Path, format: Option<InputFormat>, bits: Option<u32>) -> Result<DataSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::InputDomain(format!("{}: {e}", path.display())))?;
    let format = format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
        _ => InputFormat::Csv,
    });
    match format {
        InputFormat::Json => {
            let input: JsonInput =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            if let Some(b) = bits.filter(|&b| b != input.bits) {
                return Err(Error::InputDomain(format!("--L {b} disagrees with L = {} in the file", input.bits)));
            }
            DataSet::new(&input.values, input.bits)
        }
        InputFormat::Csv => {
            let bits = bits.ok_or_else(|| Error::InputDomain("CSV input needs --L".into()))?;
            let mut reader =
                csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
            let mut values = Vec::new();
            for (i, record) in reader.records().enumerate() {
                let record = record.map_err(|e| Error::Parse(e.to_string()))?;
                let field = record.get(0).unwrap_or("");
                if record.len() != 1 {
                    return Err(Error::Parse(format!("row {i}: expected one value per line")));
                }
                values.push(field.parse::<u64>().map_err(|e| Error::Parse(format!("row {i}: `{field}`: {e}")))?);
            }
            DataSet::new(&values, bits)
        }
    }
}

fn check_width(data: &DataSet, max_n: u32) -> Result<()> {
    if data.qubits() > max_n {
        return Err(Error::Configuration(format!(
            "data needs {} CPU qubits, above the limit of {max_n} (raise --max-n)",
            data.qubits()
        )));
    }
    Ok(())
}

fn resolve_params(input: &InputArgs, data: &DataSet, warnings: &mut Vec<String>) -> Result<ProtocolParams> {
    match input.scale {
        Some(r) => {
            let params = ProtocolParams::with_scale(r, input.epsilon.unwrap_or(DEFAULT_EPSILON))?;
            if params.wraps(data) {
                warnings.push(format!(
                    "scale {r} is below c_max = {}: rotations wrap around and large values are suppressed",
                    data.c_max()
                ));
            }
            Ok(params)
        }
        None => ProtocolParams::from_epsilon(data, input.epsilon.unwrap_or(DEFAULT_EPSILON)),
    }
}

fn load(input: &InputArgs) -> Result<(DataSet, ProtocolParams, Vec<String>)> {
    let data = ingest(&input.data, input.format, input.bits)?;
    check_width(&data, input.max_n)?;
    let mut warnings = Vec::new();
    let params = resolve_params(input, &data, &mut warnings)?;
    Ok((data, params, warnings))
}

fn dump_circuit(input: &InputArgs, protocol: &CompiledProtocol) -> Result<()> {
    if let Some(path) = &input.dump_circuit {
        fs::write(path, protocol.circuit.to_text())
            .map_err(|e| Error::Internal(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_text(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).map_err(|e| Error::Internal(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn encode_csv(out: &EncodeOutput) -> Result<String> {
    csv_text(|w| {
        w.write_record(["k", "value", "target", "oracle", "prepared", "relative_error"])?;
        let r = &out.report;
        for k in 0..r.target_state.len() {
            let prepared = r.prepared_state.as_ref().map(|p| p[k].re.to_string()).unwrap_or_default();
            w.write_record([
                k.to_string(),
                out.data.values[k].to_string(),
                r.target_state[k].re.to_string(),
                r.oracle_state[k].re.to_string(),
                prepared,
                r.relative_errors[k].to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Build the `encode` or `analyze` report.
pub fn cmd_encode(args: &EncodeArgs) -> Result<EncodeOutput> {
    let input = &args.input;
    let (data, params, warnings) = load(input)?;
    let params = params.mode(args.mode);
    let mut report = EncodingReport::analytic(&data, params.rotation_scale, params.epsilon)?;
    let protocol = compile(&data, &params)?;
    dump_circuit(input, &protocol)?;
    let resources = resource_report(&protocol.circuit, &data);
    let backend = match args.mode {
        Mode::Oracle => None,
        Mode::Faithful => {
            let backend = args.backend.resolve(protocol.layout());
            let post = prepare(&protocol, backend)?;
            report = report.with_prepared(post.cpu_state, post.p_success)?;
            let dp = (report.p_success - report.p_success_analytic).abs();
            let da = report.max_oracle_deviation.unwrap_or(0.0);
            if dp > tolerance::ORACLE || da > tolerance::ORACLE {
                return Err(Error::Internal(format!(
                    "simulation disagrees with closed form (probability {dp:e}, amplitude {da:e})"
                )));
            }
            Some(backend)
        }
    };
    Ok(EncodeOutput {
        header: Header::new("encode"),
        params,
        backend,
        data: DataSummary::of(&data),
        warnings,
        report,
        resources: Some(resources),
    })
}

pub fn cmd_analyze(input: &InputArgs) -> Result<EncodeOutput> {
    let (data, params, warnings) = load(input)?;
    let params = params.mode(Mode::Oracle);
    let report = EncodingReport::analytic(&data, params.rotation_scale, params.epsilon)?;
    Ok(EncodeOutput {
        header: Header::new("analyze"),
        params,
        backend: None,
        data: DataSummary::of(&data),
        warnings,
        report,
        resources: None,
    })
}

pub fn cmd_sample(args: &SampleArgs) -> Result<SampleOutput> {
    let input = &args.input;
    let (data, params, warnings) = load(input)?;
    let params = params.seed(args.seed);
    let protocol = compile(&data, &params)?;
    dump_circuit(input, &protocol)?;
    let backend = args.backend.resolve(protocol.layout());
    let stats = sample_trials_with(
        &protocol,
        args.trials,
        args.seed,
        SampleOptions { backend, resimulate: args.resimulate },
    )?;
    Ok(SampleOutput { header: Header::new("sample"), params, backend, data: DataSummary::of(&data), warnings, stats })
}

pub fn cmd_resources(input: &InputArgs) -> Result<ResourcesOutput> {
    let data = ingest(&input.data, input.format, input.bits)?;
    check_width(&data, input.max_n)?;
    // Resource counts do not depend on R beyond which gates exist; any
    // valid scale compiles the same gate structure.
    let params = match input.scale {
        Some(r) => ProtocolParams::with_scale(r, input.epsilon.unwrap_or(DEFAULT_EPSILON))?,
        None if data.c_max() == 0 => ProtocolParams::with_scale(1.0, input.epsilon.unwrap_or(DEFAULT_EPSILON))?,
        None => ProtocolParams::from_epsilon(&data, input.epsilon.unwrap_or(DEFAULT_EPSILON))?,
    };
    let protocol = compile(&data, &params)?;
    dump_circuit(input, &protocol)?;
    Ok(ResourcesOutput {
        header: Header::new("resources"),
        data: DataSummary::of(&data),
        resources: resource_report(&protocol.circuit, &data),
    })
}

/// Parse `a..b` (inclusive) or `a,b,c`.
pub fn parse_widths(spec: &str) -> Result<Vec<u32>> {
    let bad = || Error::InputDomain(format!("bad width list `{spec}`"));
    let widths: Vec<u32> = if let Some((a, b)) = spec.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if widths.is_empty() || widths.contains(&0) {
        return Err(bad());
    }
    Ok(widths)
}

/// Synthetic data of `2^n` values following `profile`.
pub fn profile_data(profile: Profile, n: u32, bits: u32, seed: u64) -> Result<DataSet> {
    let len = 1usize << n;
    let top = (1u64 << bits) - 1;
    let values: Vec<u64> = match profile {
        Profile::Uniform => vec![top; len],
        Profile::Onehot => (0..len).map(|k| if k == 0 { top } else { 0 }).collect(),
        Profile::Ramp => (0..len as u64).map(|k| 1 + k * (top - 1) / (len as u64 - 1).max(1)).collect(),
        Profile::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(n));
            let mut v: Vec<u64> = (0..len).map(|_| rng.random_range(0..=top)).collect();
            if v.iter().all(|&c| c == 0) {
                v[0] = top;
            }
            v
        }
    };
    DataSet::new(&values, bits)
}

fn sweep_row(profile: Profile, n: u32, epsilon: f64, args: &SweepArgs) -> Result<SweepRow> {
    let data = profile_data(profile, n, args.bits, args.seed)?;
    let params = ProtocolParams::from_epsilon(&data, epsilon)?.mode(args.mode);
    let protocol = compile(&data, &params)?;
    let p_success = match args.mode {
        Mode::Oracle => success_probability(&data, params.rotation_scale),
        Mode::Faithful => prepare(&protocol, args.backend)?.p_success,
    };
    let rho = density(&data)?;
    Ok(SweepRow {
        profile,
        n,
        bits: args.bits,
        rho,
        epsilon,
        scale: params.rotation_scale,
        p_success,
        expected_trials: p_success.recip(),
        depth: depth(&protocol.circuit),
        time_model: time_model(n, rho, epsilon),
    })
}

/// One row per `(profile, n, epsilon)`, in argument order.
pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<SweepRow>> {
    let widths = parse_widths(&args.n)?;
    if let Some(&n) = widths.iter().find(|&&n| n > args.max_n) {
        return Err(Error::Configuration(format!("n = {n} is above the limit of {} (raise --max-n)", args.max_n)));
    }
    if args.epsilon.is_empty() || args.profile.is_empty() {
        return Err(Error::InputDomain("empty sweep grid".into()));
    }
    let grid: Vec<(Profile, u32, f64)> = args
        .profile
        .iter()
        .flat_map(|&p| widths.iter().flat_map(move |&n| args.epsilon.iter().map(move |&e| (p, n, e))))
        .collect();
    grid.into_par_iter().map(|(p, n, e)| sweep_row(p, n, e, args)).collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    csv_text(|w| {
        for row in rows {
            w.serialize(row)?;
        }
        Ok(())
    })
}

/// Run a parsed command and return the text it produces.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Encode(args) => {
            let out = cmd_encode(args)?;
            match args.input.output_format {
                OutputFormat::Json => to_json(&out),
                OutputFormat::Csv => encode_csv(&out),
            }
        }
        Command::Analyze(input) => {
            let out = cmd_analyze(input)?;
            match input.output_format {
                OutputFormat::Json => to_json(&out),
                OutputFormat::Csv => encode_csv(&out),
            }
        }
        Command::Sample(args) => {
            let out = cmd_sample(args)?;
            match args.input.output_format {
                OutputFormat::Json => to_json(&out),
                OutputFormat::Csv => csv_text(|w| w.serialize(&out.stats)),
            }
        }
        Command::Resources(input) => {
            let out = cmd_resources(input)?;
            match input.output_format {
                OutputFormat::Json => to_json(&out),
                OutputFormat::Csv => csv_text(|w| {
                    let r = &out.resources;
                    w.write_record(["metric", "value"])?;
                    let mut rows = vec![
                        ("quantum_qubits".to_string(), r.quantum_qubits),
                        ("extra_qubits".into(), r.extra_qubits),
                        ("classical_memory_bits".into(), r.classical_memory_bits),
                        ("simulation_gate_total".into(), r.simulation_gate_total),
                        ("query_model_gate_total".into(), r.query_model_gate_total),
                        ("depth_total".into(), r.depth_total),
                        ("compression_depth".into(), r.compression_depth),
                    ];
                    rows.extend(r.gate_counts.iter().map(|(k, v)| (format!("gates_{k}"), *v)));
                    for (k, v) in rows {
                        w.write_record([k, v.to_string()])?;
                    }
                    Ok(())
                }),
            }
        }
        Command::Sweep(args) => {
            let rows = cmd_sweep(args)?;
            match args.output_format {
                OutputFormat::Json => to_json(&rows),
                OutputFormat::Csv => sweep_csv(&rows),
            }
        }
    }
}

fn output_path(cli: &Cli) -> Option<&Path> {
    match &cli.command {
        Command::Encode(a) => a.input.output.as_deref(),
        Command::Sample(a) => a.input.output.as_deref(),
        Command::Resources(a) | Command::Analyze(a) => a.output.as_deref(),
        Command::Sweep(a) => a.output.as_deref(),
    }
}

fn warnings_of(text: &str) -> Vec<String> {
    serde_json::from_str::<serde_json::Value>(text)
        .ok()
        .and_then(|v| v.get("warnings").cloned())
        .and_then(|w| serde_json::from_value(w).ok())
        .unwrap_or_default()
}

/// Parse arguments, run, write output; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli).and_then(|text| {
        for w in warnings_of(&text) {
            eprintln!("warning: {w}");
        }
        match output_path(&cli) {
            Some(path) => fs::write(path, &text).map_err(|e| Error::Internal(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
