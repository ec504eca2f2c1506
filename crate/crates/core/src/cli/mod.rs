//! Command-line front end.

pub mod io;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::dense::{
    build_alif_matrix, build_rif_dense, report_from_eigenvalues, salif_scale, spectral_diagnostics, DenseOperator,
    Normalization, SpectralReport,
};
use crate::engine::{
    convergence_trace, decompose, AnalyticLengths, ExtremaLengths, LengthProvider, Method, MethodConfig,
    TableLengths, DENSE_BUDGET, NOISE_ROUND_FACTOR,
};
use crate::error::Error;
use crate::filter::{circulant_row, make_filter, spectral_symbol, FilterKind};
use crate::resample::{compute_resampling, default_length_from_extrema, length_from_freq, LengthFunction};
use crate::signal::{relative_error, ImfDiagnostics, Signal, StoppingConfig, Warning};
use crate::synthetic::{add_noise, gen_example, measured_snr_db, ExampleSignal};

/// SNR of the noisy benchmark variant of example 2.
pub const EXAMPLE3_SNR_DB: f64 = 8.6;

/// Failure of a CLI command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io(String),
    Input(String),
    Usage(String),
    Violations(usize),
}

impl CliError {
    pub(crate) fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::Trend(_)) => 3,
            CliError::Lib(Error::Internal(_)) | CliError::Io(_) | CliError::Input(_) => 1,
            CliError::Lib(_) | CliError::Usage(_) => 2,
            CliError::Violations(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(m) | CliError::Input(m) | CliError::Usage(m) => f.write_str(m),
            CliError::Violations(k) => write!(f, "{k} eigenvalues violate |1 - λ| ≤ 1"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Where per-round length functions come from.
#[derive(Debug, Clone, PartialEq)]
pub enum LengthSpec {
    /// `ξ / f` from a generated example's frequency curves.
    Analytic,
    /// Extrema spacing of the current residual.
    Extrema,
    /// CSV, one column per round; extrema heuristic afterwards.
    File(PathBuf),
    /// Constant value for the first round; extrema heuristic afterwards.
    Const(f64),
}

impl LengthSpec {
    fn describe(&self) -> String {
        match self {
            LengthSpec::Analytic => "analytic".into(),
            LengthSpec::Extrema => "extrema".into(),
            LengthSpec::File(p) => format!("file:{}", p.display()),
            LengthSpec::Const(v) => format!("const:{v}"),
        }
    }
}

impl FromStr for LengthSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "analytic" => Ok(LengthSpec::Analytic),
            "extrema" => Ok(LengthSpec::Extrema),
            _ => {
                if let Some(p) = s.strip_prefix("file:") {
                    Ok(LengthSpec::File(PathBuf::from(p)))
                } else if let Some(v) = s.strip_prefix("const:") {
                    v.parse().map(LengthSpec::Const).map_err(|e| format!("bad constant '{v}': {e}"))
                } else {
                    Err(format!("expected analytic|extrema|file:<path>|const:<value>, got '{s}'"))
                }
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "iterfilt", version, about = "Iterative filtering signal decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic example signal and its ground-truth components.
    Generate(GenerateArgs),
    /// Decompose a signal into IMFs and a trend.
    Decompose(DecomposeArgs),
    /// Time methods on the synthetic examples and score them against ground truth.
    Benchmark(BenchmarkArgs),
    /// Eigen-analysis of the sifting operator for a given length function.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Example id (1 or 2).
    pub id: u32,
    #[arg(long)]
    pub n: Option<usize>,
    /// Target SNR in dB; `inf` for no noise.
    #[arg(long)]
    pub snr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Signal file: CSV (`value` or `time,value`) or PCM-16 mono WAV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Synthetic example id; with `--input`, supplies only the frequency curves.
    #[arg(long)]
    pub example: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub snr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    #[arg(long, default_value = "frif")]
    pub method: Method,
    #[arg(long, default_value = "triangular")]
    pub filter: FilterKind,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long = "max-iter", default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 2.0)]
    pub xi: f64,
    #[arg(long = "max-imfs", default_value_t = 12)]
    pub max_imfs: usize,
    /// analytic | extrema | file:<path> | const:<value>
    #[arg(long, default_value = "extrema")]
    pub length: LengthSpec,
    /// With analytic lengths, add a first round at this multiple of the top frequency.
    #[arg(long = "noise-round")]
    pub noise_round: Option<f64>,
}

impl EngineArgs {
    fn config(&self) -> CliResult<MethodConfig> {
        Ok(MethodConfig {
            method: self.method,
            filter: self.filter,
            stopping: StoppingConfig::new(self.delta, self.max_iter)?,
            xi: self.xi,
            max_imfs: self.max_imfs,
        })
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Comma-separated example ids; 3 is example 2 with noise at 8.6 dB.
    #[arg(long, default_value = "1,2")]
    pub examples: String,
    /// Comma-separated methods.
    #[arg(long, default_value = "frif")]
    pub methods: String,
    #[arg(long, default_value = "triangular")]
    pub filter: FilterKind,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long = "max-iter", default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 2.0)]
    pub xi: f64,
    /// Grid size used for dense methods when the example's own size exceeds the budget.
    #[arg(long = "dense-n", default_value_t = 2000)]
    pub dense_n: usize,
    /// Inner steps recorded in each convergence trace; 0 disables traces.
    #[arg(long = "trace-steps", default_value_t = 500)]
    pub trace_steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value = "alif")]
    pub method: Method,
    #[arg(long, default_value = "triangular")]
    pub filter: FilterKind,
    #[arg(long, default_value_t = 2.0)]
    pub xi: f64,
    /// analytic | extrema | file:<path> | const:<value>
    #[arg(long, default_value = "extrema")]
    pub length: LengthSpec,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Decompose(a) => cmd_decompose(&a),
        Command::Benchmark(a) => cmd_benchmark(&a),
        Command::Diagnose(a) => cmd_diagnose(&a),
    }
}

fn default_n(id: u32) -> usize {
    if id == 1 {
        10_000
    } else {
        8_000
    }
}

fn create_dir(p: &Path) -> CliResult<()> {
    fs::create_dir_all(p).map_err(|e| CliError::io(p, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    io::write_file(path, text.as_bytes())
}

fn value_header() -> Vec<String> {
    vec!["value".into()]
}

#[derive(Serialize)]
struct GenerateManifest {
    example: u32,
    n: usize,
    seed: u64,
    snr_db: Option<f64>,
    realized_snr_db: Option<f64>,
    files: Vec<String>,
}

pub fn cmd_generate(a: &GenerateArgs) -> CliResult<()> {
    let n = a.n.unwrap_or_else(|| default_n(a.id));
    let ex = gen_example(a.id, n)?;
    create_dir(&a.out)?;
    let (signal, realized) = match a.snr {
        Some(snr) if snr.is_finite() => {
            let noisy = add_noise(&ex.signal, snr, a.seed)?;
            let r = measured_snr_db(&ex.signal, &noisy);
            info!("realized SNR = {r:.6} dB");
            (noisy, Some((r * 1e6).round() / 1e6))
        }
        Some(snr) => (add_noise(&ex.signal, snr, a.seed)?, None),
        None => (ex.signal.clone(), None),
    };
    let mut files = vec!["signal.csv".to_string()];
    io::write_columns(&a.out.join("signal.csv"), &value_header(), &[&signal])?;
    for (i, c) in ex.components.iter().enumerate() {
        let name = format!("component_{}.csv", i + 1);
        io::write_columns(&a.out.join(&name), &value_header(), &[c])?;
        files.push(name);
    }
    write_json(
        &a.out.join("manifest.json"),
        &GenerateManifest {
            example: a.id,
            n,
            seed: a.seed,
            snr_db: a.snr.filter(|s| s.is_finite()),
            realized_snr_db: realized,
            files,
        },
    )?;
    if let Some(r) = realized {
        println!("realized SNR = {r:.6} dB");
    }
    println!("wrote example {} (n = {n}) to {}", a.id, a.out.display());
    Ok(())
}

struct Loaded {
    signal: Signal,
    example: Option<ExampleSignal>,
}

fn load_source(src: &SourceArgs) -> CliResult<Loaded> {
    match (&src.input, src.example) {
        (Some(path), id) => {
            if src.snr.is_some() {
                return Err(CliError::Usage("--snr applies to generated examples only".into()));
            }
            let values = io::read_signal(path)?;
            let n = values.len();
            if let Some(want) = src.n.filter(|&m| m != n) {
                return Err(CliError::Usage(format!("--n {want} but {} has {n} samples", path.display())));
            }
            let example = id.map(|id| gen_example(id, n)).transpose()?;
            Ok(Loaded {
                signal: Signal::new(values)?,
                example,
            })
        }
        (None, Some(id)) => {
            let ex = gen_example(id, src.n.unwrap_or_else(|| default_n(id)))?;
            let signal = match src.snr {
                Some(snr) => add_noise(&ex.signal, snr, src.seed)?,
                None => ex.signal.clone(),
            };
            Ok(Loaded {
                signal,
                example: Some(ex),
            })
        }
        (None, None) => Err(CliError::Usage("need --input <path> or --example <id>".into())),
    }
}

fn read_length_columns(path: &Path, n: usize) -> CliResult<Vec<LengthFunction>> {
    let (_, rows) = io::read_table(path)?;
    if rows.len() != n {
        return Err(CliError::Lib(Error::Config(format!(
            "{} has {} rows, signal has {n} samples",
            path.display(),
            rows.len()
        ))));
    }
    let width = rows.first().map_or(0, Vec::len);
    (0..width)
        .map(|j| LengthFunction::new(rows.iter().map(|r| r[j]).collect()).map_err(CliError::from))
        .collect()
}

fn analytic_curves(loaded: &Loaded) -> CliResult<Vec<Vec<f64>>> {
    loaded
        .example
        .as_ref()
        .map(ExampleSignal::curves_in_imf_order)
        .ok_or_else(|| CliError::Usage("--length analytic needs --example <id>".into()))
}

fn make_provider(spec: &LengthSpec, loaded: &Loaded, noise_round: Option<f64>) -> CliResult<Box<dyn LengthProvider>> {
    let n = loaded.signal.len();
    Ok(match spec {
        LengthSpec::Analytic => {
            let p = AnalyticLengths::new(analytic_curves(loaded)?);
            Box::new(match noise_round {
                Some(f) => p.with_noise_round(f),
                None => p,
            })
        }
        LengthSpec::Extrema => Box::new(ExtremaLengths),
        LengthSpec::File(p) => Box::new(TableLengths::new(read_length_columns(p, n)?)),
        LengthSpec::Const(v) => Box::new(TableLengths::new(vec![LengthFunction::constant(n, *v)?])),
    })
}

#[derive(Serialize)]
struct DecomposeReport<'a> {
    method: Method,
    filter: &'static str,
    n: usize,
    delta: f64,
    max_iter: usize,
    xi: f64,
    max_imfs: usize,
    length_source: String,
    num_imfs: usize,
    imfs: &'a [ImfDiagnostics],
    warnings: &'a [Warning],
    stop_reason: &'a Option<String>,
}

pub fn cmd_decompose(a: &DecomposeArgs) -> CliResult<()> {
    let loaded = load_source(&a.source)?;
    let cfg = a.engine.config()?;
    let mut provider = make_provider(&a.engine.length, &loaded, a.engine.noise_round)?;
    let res = decompose(&loaded.signal, &cfg, provider.as_mut())?;
    if res.imfs.is_empty() {
        return Err(Error::Trend("no IMF could be extracted".into()).into());
    }
    create_dir(&a.out)?;

    let mut header: Vec<String> = (1..=res.imfs.len()).map(|k| format!("IMF{k}")).collect();
    header.push("residual".into());
    let mut cols: Vec<&[f64]> = res.imfs.iter().map(|s| s.values()).collect();
    cols.push(res.residual.values());
    io::write_columns(&a.out.join("imfs.csv"), &header, &cols)?;

    let grid = loaded.signal.grid();
    for (k, imf) in res.imfs.iter().enumerate() {
        io::write_columns(
            &a.out.join(format!("imf_{}.csv", k + 1)),
            &["x".into(), "value".into()],
            &[&grid, imf],
        )?;
    }
    write_json(
        &a.out.join("diagnostics.json"),
        &DecomposeReport {
            method: cfg.method,
            filter: cfg.filter.name(),
            n: loaded.signal.len(),
            delta: cfg.stopping.delta,
            max_iter: cfg.stopping.max_iter,
            xi: cfg.xi,
            max_imfs: cfg.max_imfs,
            length_source: a.engine.length.describe(),
            num_imfs: res.imfs.len(),
            imfs: &res.diagnostics,
            warnings: &res.warnings,
            stop_reason: &res.stop_reason,
        },
    )?;
    let iters: Vec<String> = res.diagnostics.iter().map(|d| d.iterations.to_string()).collect();
    println!(
        "{} IMFs via {} (iterations {}) written to {}",
        res.imfs.len(),
        cfg.method,
        iters.join(", "),
        a.out.display()
    );
    Ok(())
}

/// Benchmark row.
#[derive(Debug, Clone, Serialize)]
struct BenchRow {
    example: u32,
    method: Method,
    n: usize,
    wall_s: f64,
    num_imfs: usize,
    iterations: String,
    errors: String,
    trend_error: f64,
}

fn bench_instance(id: u32, n: usize, seed: u64) -> CliResult<(ExampleSignal, Signal, Option<f64>)> {
    match id {
        1 | 2 => {
            let ex = gen_example(id, n)?;
            let s = ex.signal.clone();
            Ok((ex, s, None))
        }
        3 => {
            let ex = gen_example(2, n)?;
            let s = add_noise(&ex.signal, EXAMPLE3_SNR_DB, seed)?;
            Ok((ex, s, Some(NOISE_ROUND_FACTOR)))
        }
        other => Err(CliError::Usage(format!("unknown example id {other}"))),
    }
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> CliResult<Vec<T>>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| CliError::Usage(format!("bad {what} '{t}': {e}"))))
        .collect()
}

pub fn cmd_benchmark(a: &BenchmarkArgs) -> CliResult<()> {
    let methods: Vec<Method> = parse_list(&a.methods, "method")?;
    let examples: Vec<u32> = parse_list(&a.examples, "example id")?;
    if methods.is_empty() {
        return Err(CliError::Usage("empty method list".into()));
    }
    if examples.is_empty() {
        return Err(CliError::Usage("empty example list".into()));
    }
    if a.dense_n > DENSE_BUDGET {
        return Err(CliError::Usage(format!("--dense-n must be at most {DENSE_BUDGET}")));
    }
    create_dir(&a.out)?;
    let stopping = StoppingConfig::new(a.delta, a.max_iter)?;
    let mut rows = Vec::new();
    for &id in &examples {
        for &method in &methods {
            let native = if id == 1 { 10_000 } else { 8_000 };
            let n = if method.is_dense() && native > DENSE_BUDGET {
                warn!("{method} on example {id}: n = {native} exceeds the dense budget, resampling at n = {}", a.dense_n);
                a.dense_n
            } else {
                native
            };
            let (ex, signal, noise) = bench_instance(id, n, a.seed)?;
            let cfg = MethodConfig {
                method,
                filter: a.filter,
                stopping,
                xi: a.xi,
                max_imfs: 12,
            };
            let curves = ex.curves_in_imf_order();
            let mut provider = AnalyticLengths::new(curves.clone());
            if let Some(f) = noise {
                provider = provider.with_noise_round(f);
            }
            let t0 = Instant::now();
            let res = decompose(&signal, &cfg, &mut provider)?;
            let wall = t0.elapsed().as_secs_f64();

            let truths = ex.truths_in_imf_order();
            let offset = usize::from(noise.is_some());
            let errs: Vec<String> = truths[..truths.len() - 1]
                .iter()
                .enumerate()
                .map(|(k, t)| match res.imfs.get(k + offset) {
                    Some(imf) => relative_error(imf, t).map(|e| format!("{e:.6}")),
                    None => Ok("nan".into()),
                })
                .collect::<Result<_, _>>()?;
            let trend_error = if noise.is_some() {
                f64::NAN
            } else {
                relative_error(&res.residual, truths[truths.len() - 1])?
            };
            let iters: Vec<String> = res.diagnostics.iter().map(|d| d.iterations.to_string()).collect();
            rows.push(BenchRow {
                example: id,
                method,
                n,
                wall_s: wall,
                num_imfs: res.imfs.len(),
                iterations: iters.join(";"),
                errors: errs.join(";"),
                trend_error,
            });

            if a.trace_steps > 0 {
                let (ell, _) = length_from_freq(&curves[0], a.xi)?;
                let trace = convergence_trace(&signal, &cfg, &ell, truths[0], a.trace_steps)?;
                let steps: Vec<f64> = (1..=trace.len()).map(|m| m as f64).collect();
                io::write_columns(
                    &a.out.join(format!("trace_ex{id}_{}.csv", method.name())),
                    &["step".into(), "rel_error".into()],
                    &[&steps, &trace],
                )?;
            }
        }
    }

    let mut csv = String::from("example,method,n,wall_s,num_imfs,iterations,errors,trend_error\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{:.6},{},{},{},{:.6e}\n",
            r.example, r.method, r.n, r.wall_s, r.num_imfs, r.iterations, r.errors, r.trend_error
        ));
    }
    io::write_file(&a.out.join("benchmark.csv"), csv.as_bytes())?;

    let mut txt = format!(
        "{:<8} {:<10} {:>6} {:>10} {:>5}  {:<16} {:<24} {:>12}\n",
        "example", "method", "n", "wall [s]", "imfs", "iterations", "errors", "trend err"
    );
    for r in &rows {
        txt.push_str(&format!(
            "{:<8} {:<10} {:>6} {:>10.4} {:>5}  {:<16} {:<24} {:>12.3e}\n",
            r.example,
            r.method.name(),
            r.n,
            r.wall_s,
            r.num_imfs,
            r.iterations,
            r.errors,
            r.trend_error
        ));
    }
    io::write_file(&a.out.join("benchmark.txt"), txt.as_bytes())?;
    print!("{txt}");
    Ok(())
}

fn circulant_dense(entries: &[f64]) -> DMatrix<f64> {
    let n = entries.len();
    DMatrix::from_fn(n, n, |i, j| entries[(j + n - i) % n])
}

fn diagnose_length(a: &DiagnoseArgs) -> CliResult<LengthFunction> {
    if let LengthSpec::Const(v) = a.length {
        if a.source.input.is_none() && a.source.example.is_none() {
            let n = a
                .source
                .n
                .ok_or_else(|| CliError::Usage("--length const:<v> without a signal needs --n".into()))?;
            return Ok(LengthFunction::constant(n, v)?);
        }
    }
    if let LengthSpec::File(p) = &a.length {
        if a.source.input.is_none() && a.source.example.is_none() {
            let (_, rows) = io::read_table(p)?;
            return Ok(LengthFunction::new(rows.iter().map(|r| r[0]).collect())?);
        }
    }
    let loaded = load_source(&a.source)?;
    let n = loaded.signal.len();
    Ok(match &a.length {
        LengthSpec::Analytic => length_from_freq(&analytic_curves(&loaded)?[0], a.xi)?.0,
        LengthSpec::Extrema => default_length_from_extrema(&loaded.signal, a.xi)?.0,
        LengthSpec::File(p) => read_length_columns(p, n)?.remove(0),
        LengthSpec::Const(v) => LengthFunction::constant(n, *v)?,
    })
}

#[derive(Serialize)]
struct DiagnoseOutput<'a> {
    method: Method,
    filter: &'static str,
    operator: &'static str,
    #[serde(flatten)]
    report: &'a SpectralReport,
}

pub fn cmd_diagnose(a: &DiagnoseArgs) -> CliResult<()> {
    let ell = diagnose_length(a)?;
    let n = ell.len();
    let k = make_filter(a.filter);
    let (operator, report) = match a.method {
        Method::Alif => ("K", spectral_diagnostics(&build_alif_matrix(&k, &ell, n)?)?),
        Method::Salif => {
            let op = build_alif_matrix(&k, &ell, n)?;
            let s = salif_scale(&op.matrix);
            let sym = DenseOperator {
                matrix: op.matrix.tr_mul(&op.matrix) / (s * s),
                normalization: Normalization::Raw,
                scale_used: s,
            };
            ("KᵀK/s²", spectral_diagnostics(&sym)?)
        }
        Method::RifDense => ("AD/ρ", spectral_diagnostics(&build_rif_dense(&k, &ell, n)?.scaled)?),
        Method::If => {
            let row = circulant_row(&k, n, 1.0 / ell.mean())?;
            let op = DenseOperator {
                matrix: circulant_dense(row.entries()),
                normalization: Normalization::RowStochastic,
                scale_used: row.scale(),
            };
            ("circulant K", spectral_diagnostics(&op)?)
        }
        Method::Frif => {
            let map = compute_resampling(&ell)?;
            let row = circulant_row(&k, n, map.m_total())?;
            let ev = spectral_symbol(&row)?.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
            ("warped circulant K", report_from_eigenvalues(ev))
        }
    };
    let out = DiagnoseOutput {
        method: a.method,
        filter: a.filter.name(),
        operator,
        report: &report,
    };
    let text = serde_json::to_string_pretty(&out).map_err(|e| CliError::Io(e.to_string()))?;
    println!("{text}");
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        io::write_file(&dir.join("spectral_report.json"), format!("{text}\n").as_bytes())?;
        let re: Vec<f64> = report.eigenvalues.iter().map(|c| c.re).collect();
        let im: Vec<f64> = report.eigenvalues.iter().map(|c| c.im).collect();
        io::write_columns(&dir.join("eigenvalues.csv"), &["re".into(), "im".into()], &[&re, &im])?;
    }
    if report.num_violations > 0 {
        return Err(CliError::Violations(report.num_violations));
    }
    Ok(())
}
