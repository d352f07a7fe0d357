//! The `cvqkd` command line.
//!
//! Every subcommand reads the same configuration (see [`config`]); data
//! files go to `output_dir` and are replaced atomically. Errors are printed
//! to standard error as one JSON object `{"error": {...}}`.
//!
//! Exit codes: 0 success, 1 usage, 2 domain or computation error, 3 I/O.

pub mod config;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::fer::{fit_fer_with, FitOptions, ReferenceChannel, MAX_COMPONENTS};
use crate::model::skr_finite;
use crate::optimize::{
    compare_methods, optimize_va_with, reoptimize_live, select_code, sweep, CodeCandidate, SearchOptions, SweepAxis,
    SweepRow, SweepSpec, SWEEP_CSV_HEADER,
};
use crate::recon::{measure_fer_with, peg_construct_named, published_ensemble, DegreeDistribution, MeasureOptions, ParityCheckMatrix};
use config::{ConfigSource, RunConfig, CONFIG_ENV};

#[derive(Debug, Parser)]
#[command(name = "cvqkd", version, about = "CV-QKD key rates, FER curves and modulation-variance optimisation")]
struct Cli {
    /// Configuration file (default: $CVQKD_CONFIG if set).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one configuration key; may be repeated.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Seed for every random choice (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Key rate at one modulation variance, as JSON on stdout.
    Skr {
        #[arg(long = "va", allow_negative_numbers = true)]
        v_a: f64,
    },
    /// Optimal modulation variance for the configured code.
    Optimize,
    /// One optimisation per grid point along an axis.
    Sweep(SweepArgs),
    /// Fixed-SNR, assumed-efficiency and full optimisation side by side.
    Compare,
    /// Rank the codes of the registry by their optimal key rate.
    SelectCode,
    /// Fit a Gaussian-mixture FER model to measured points.
    FitFer(FitArgs),
    /// Monte Carlo FER of a parity-check matrix over a V_A grid.
    MeasureFer(MeasureArgs),
    /// Build a parity-check matrix by progressive edge growth.
    Peg(PegArgs),
    /// Plan V_A on one block and apply it to the next.
    Reoptimize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// v_a, xi, vel, N or code.
    #[arg(long)]
    axis: String,
    /// `a,b,c` or `lo:step:hi` (may be mixed); `inf` means asymptotic on N.
    /// Defaults to the registry rates on the code axis.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// CSV with header `va,trials,failures`.
    points: PathBuf,
    #[arg(long, default_value_t = MAX_COMPONENTS)]
    components: usize,
    #[arg(long, default_value = "fitted")]
    code_id: String,
    /// Model file (default: <output_dir>/fer_model.json).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// Parity-check matrix in alist format.
    alist: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Frames per point (overrides `trials`).
    #[arg(long)]
    trials: Option<u64>,
    /// Points file (default: <output_dir>/fer_points.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PegArgs {
    /// Degree distribution, e.g. `v = r1 x1^3; u = 0.5 x1^6`.
    #[arg(long, conflicts_with = "rate", required_unless_present = "rate")]
    dist: Option<String>,
    /// Use the built-in ensemble of this rate (0.05, 0.1 or 0.15).
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    n_vars: usize,
    /// Output file (default: <output_dir>/peg.alist).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Run(Error::Io { .. }) => 3,
            Failure::Run(_) => 2,
        }
    }

    /// Machine-readable form written to standard error.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = serde_json::Map::new();
        match self {
            Failure::Usage(msg) => {
                body.insert("kind".into(), "usage".into());
                body.insert("message".into(), msg.trim_end().into());
            }
            Failure::Run(e) => {
                body.insert("kind".into(), e.kind().into());
                body.insert("message".into(), e.to_string().into());
                match e {
                    Error::InvalidParameter { name, reason } => {
                        body.insert("parameter".into(), (*name).into());
                        body.insert("reason".into(), reason.clone().into());
                    }
                    Error::Io { path, source } => {
                        let reason = match source.kind() {
                            std::io::ErrorKind::NotFound => "file-not-found".to_string(),
                            other => other.to_string(),
                        };
                        body.insert("path".into(), path.display().to_string().into());
                        body.insert("reason".into(), reason.into());
                    }
                    Error::Parse { source_name, line, .. } => {
                        body.insert("source".into(), source_name.clone().into());
                        body.insert("line".into(), (*line).into());
                    }
                    _ => {}
                }
            }
        }
        body.insert("exit_code".into(), self.exit_code().into());
        json!({ "error": body })
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the process command line and returns the exit code.
pub fn main() -> i32 {
    run(std::env::args_os())
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            return report(&Failure::Usage(e.to_string()));
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(f) => report(&f),
    }
}

fn report(f: &Failure) -> i32 {
    eprintln!("{}", f.to_json());
    f.exit_code()
}

fn load_config(cli: &Cli) -> CliResult<RunConfig> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    let mut src = match path {
        Some(p) => ConfigSource::from_file(&p)?,
        None => ConfigSource::default(),
    };
    for s in &cli.set {
        src.set(s).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if let Some(seed) = cli.seed {
        src.set(&format!("seed={seed}"))?;
    }
    Ok(src.resolve()?)
}

fn execute(cli: Cli) -> CliResult<()> {
    let cfg = load_config(&cli)?;
    match cli.command {
        Command::Skr { v_a } => cmd_skr(&cfg, v_a),
        Command::Optimize => cmd_optimize(&cfg),
        Command::Sweep(a) => cmd_sweep(&cfg, &a),
        Command::Compare => cmd_compare(&cfg),
        Command::SelectCode => cmd_select_code(&cfg),
        Command::FitFer(a) => cmd_fit_fer(&cfg, &a),
        Command::MeasureFer(a) => cmd_measure_fer(&cfg, &a),
        Command::Peg(a) => cmd_peg(&cfg, &a),
        Command::Reoptimize => cmd_reoptimize(&cfg),
    }
}

/// Parses `a,b,lo:step:hi,...` into an ordered list of values.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = |item: &str, why: &str| Failure::Usage(format!("grid item `{item}`: {why}"));
    let number = |s: &str| -> CliResult<f64> {
        let s = s.trim();
        match s {
            "inf" | "infinity" | "asymptotic" => Ok(f64::INFINITY),
            _ => s.parse::<f64>().map_err(|_| bad(s, "not a number")),
        }
    };
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts[..] {
            [x] => out.push(number(x)?),
            [lo, step, hi] => {
                let (lo, step, hi) = (number(lo)?, number(step)?, number(hi)?);
                if !(step > 0.0 && step.is_finite() && lo.is_finite() && hi.is_finite()) {
                    return Err(bad(item, "range needs finite bounds and a positive step"));
                }
                let count = ((hi - lo) / step + 1e-9).floor();
                if count < 0.0 || count > 1e7 {
                    return Err(bad(item, "range is empty or too long"));
                }
                // Snap to 12 decimals so 0.1-style steps print cleanly.
                out.extend((0..=count as usize).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12));
            }
            _ => return Err(bad(item, "expected a value or lo:step:hi")),
        }
    }
    if out.is_empty() {
        return Err(Failure::Usage("grid is empty".into()));
    }
    Ok(out)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> crate::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> crate::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> crate::Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    write_atomic(path, &bytes)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    print!("{}", to_json(value)?);
    Ok(())
}

fn num(x: f64) -> String {
    // No "-0" in tables.
    if x == 0.0 { "0".into() } else { x.to_string() }
}

fn configured_curve(cfg: &RunConfig) -> CliResult<Box<dyn crate::fer::FerCurve>> {
    let model = cfg.fer_model.load()?;
    Ok(cfg.fer_source(model).curve_for(&cfg.params, cfg.protocol)?)
}

fn cmd_skr(cfg: &RunConfig, v_a: f64) -> CliResult<()> {
    let curve = configured_curve(cfg)?;
    let b = skr_finite(&cfg.params, cfg.protocol, &cfg.finite_size, v_a, cfg.code_rate, curve.fer(v_a))?;
    print_json(&b)
}

fn cmd_optimize(cfg: &RunConfig) -> CliResult<()> {
    let curve = configured_curve(cfg)?;
    let r = optimize_va_with(
        &cfg.params,
        cfg.protocol,
        &cfg.finite_size,
        cfg.code_rate,
        curve.as_ref(),
        &SearchOptions::default(),
    )?;
    let b = &r.breakdown;
    write_csv(
        &cfg.output_dir.join("optimize.csv"),
        &["va_opt", "skr_opt", "beta", "fer", "snr", "feasible", "degenerate"],
        &[vec![
            num(r.v_a_opt),
            num(r.skr_opt),
            num(b.beta),
            num(b.fer),
            num(b.snr),
            r.feasible.to_string(),
            r.degenerate.to_string(),
        ]],
    )?;
    write_json(&cfg.output_dir.join("optimize.json"), &r)?;
    print_json(&r)
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    axis: SweepAxis,
    rows: &'a [SweepRow],
}

fn cmd_sweep(cfg: &RunConfig, args: &SweepArgs) -> CliResult<()> {
    let axis: SweepAxis = args.axis.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let mut codes = Vec::new();
    if axis == SweepAxis::Code {
        for c in &cfg.codes {
            codes.push((c.rate, c.fer_model.load()?));
        }
    }
    let grid = match (&args.grid, axis) {
        (Some(g), _) => parse_grid(g)?,
        (None, SweepAxis::Code) if !codes.is_empty() => codes.iter().map(|(r, _)| *r).collect(),
        (None, _) => return Err(Failure::Usage("--grid is required for this axis".into())),
    };
    let mut spec = SweepSpec::new(
        cfg.params,
        cfg.protocol,
        cfg.finite_size,
        cfg.code_rate,
        cfg.fer_source(cfg.fer_model.load()?),
        axis,
        grid,
    );
    spec.codes = codes;
    let rows = sweep(&spec).map_err(|e| match e {
        Error::InvalidParameter { name: "grid", .. } => Failure::Usage(e.to_string()),
        e => Failure::Run(e),
    })?;

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.axis),
                num(r.va_opt),
                num(r.skr_opt),
                num(r.beta),
                num(r.fer),
                num(r.snr),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let stem = format!("sweep_{}", axis.name());
    write_csv(&cfg.output_dir.join(format!("{stem}.csv")), &SWEEP_CSV_HEADER, &table)?;
    write_json(&cfg.output_dir.join(format!("{stem}.json")), &SweepOutput { axis, rows: &rows })?;

    if let Some(first) = rows.iter().find_map(|r| r.error.as_ref()).filter(|_| rows.iter().all(|r| r.error.is_some())) {
        return Err(Failure::Run(Error::Domain(format!("every grid point failed; first: {first}"))));
    }
    Ok(())
}

fn cmd_compare(cfg: &RunConfig) -> CliResult<()> {
    let curve = configured_curve(cfg)?;
    let c = compare_methods(
        &cfg.params,
        cfg.protocol,
        &cfg.finite_size,
        cfg.code_rate,
        curve.as_ref(),
        &cfg.methods,
        &SearchOptions::default(),
    )?;
    let improvement = [Some(c.improvement_over_one), Some(c.improvement_over_two), None];
    let table: Vec<Vec<String>> = c
        .records()
        .iter()
        .zip(improvement)
        .map(|(r, imp)| {
            vec![
                r.method.clone(),
                num(r.v_a),
                num(r.beta),
                num(r.snr),
                num(r.fer),
                num(r.skr),
                imp.map(num).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(
        &cfg.output_dir.join("compare.csv"),
        &["method", "v_a", "beta", "snr", "fer", "skr", "improvement_pct"],
        &table,
    )?;
    let out = json!({ "computed": c, "tabulated": c.tabulated() });
    write_json(&cfg.output_dir.join("compare.json"), &out)?;
    print_json(&out)
}

fn cmd_select_code(cfg: &RunConfig) -> CliResult<()> {
    if cfg.codes.is_empty() {
        return Err(Failure::Usage(
            "no codes registered; add code.<id>.rate and code.<id>.fer_model keys".into(),
        ));
    }
    let mut curves = Vec::new();
    for c in &cfg.codes {
        if let Some(path) = &c.alist {
            // Registered matrices must exist and parse.
            ParityCheckMatrix::load_alist(path)?;
        }
        curves.push(cfg.fer_source(c.fer_model.load()?).curve_for(&cfg.params, cfg.protocol)?);
    }
    let candidates: Vec<CodeCandidate<'_>> = cfg
        .codes
        .iter()
        .zip(&curves)
        .map(|(c, f)| CodeCandidate {
            code_id: c.id.clone(),
            code_rate: c.rate,
            fer: f.as_ref(),
        })
        .collect();
    let ranking = select_code(&cfg.params, cfg.protocol, &cfg.finite_size, &candidates, &SearchOptions::default())?;
    let table: Vec<Vec<String>> = ranking
        .iter()
        .map(|r| {
            vec![
                r.code_id.clone(),
                num(r.code_rate),
                num(r.result.v_a_opt),
                num(r.result.skr_opt),
                num(r.delta),
            ]
        })
        .collect();
    write_csv(
        &cfg.output_dir.join("select_code.csv"),
        &["code_id", "code_rate", "va_opt", "skr_opt", "delta"],
        &table,
    )?;
    write_json(&cfg.output_dir.join("select_code.json"), &ranking)?;
    print_json(&ranking)
}

fn cmd_fit_fer(cfg: &RunConfig, args: &FitArgs) -> CliResult<()> {
    let data = crate::fer::FerMeasurementSet::load(&args.points)?;
    let opts = FitOptions {
        max_components: args.components,
        seed: cfg.seed,
        code_id: args.code_id.clone(),
        reference: ReferenceChannel::new(&cfg.params, cfg.protocol),
        ..FitOptions::default()
    };
    let report = fit_fer_with(&data, &opts)?;
    let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.join("fer_model.json"));
    write_atomic(&out, report.model.to_json_string()?.as_bytes())?;
    eprintln!("wrote {}", out.display());
    print_json(&report)
}

fn cmd_measure_fer(cfg: &RunConfig, args: &MeasureArgs) -> CliResult<()> {
    let grid = parse_grid(&args.grid)?;
    let h = ParityCheckMatrix::load_alist(&args.alist)?;
    let trials = args.trials.unwrap_or(cfg.trials);
    let opts = MeasureOptions {
        dim: cfg.dim,
        max_iter: cfg.max_iter,
        ..MeasureOptions::default()
    };
    eprintln!(
        "{}: n={} m={} rate={:.4}, {} points x {} frames",
        h.code_id,
        h.n_vars(),
        h.n_checks(),
        h.code_rate(),
        grid.len(),
        trials
    );
    let mut points = Vec::with_capacity(grid.len());
    for (i, &v) in grid.iter().enumerate() {
        let e = measure_fer_with(&h, &cfg.params, v, trials, cfg.seed.wrapping_add(i as u64), &opts)?;
        eprintln!(
            "[{}/{}] va={} failures={}/{} fer={:.4} ci=[{:.4}, {:.4}]",
            i + 1,
            grid.len(),
            v,
            e.failures,
            e.trials,
            e.fer,
            e.ci_low,
            e.ci_high
        );
        points.push(e.point());
    }
    let set = crate::fer::FerMeasurementSet::new(points)?;
    let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.join("fer_points.csv"));
    let mut bytes = Vec::new();
    set.write_csv(&mut bytes)?;
    write_atomic(&out, &bytes)?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn cmd_peg(cfg: &RunConfig, args: &PegArgs) -> CliResult<()> {
    let dist = match (&args.dist, args.rate) {
        (Some(text), _) => DegreeDistribution::parse(text)?,
        (None, Some(rate)) => published_ensemble(rate)?,
        (None, None) => return Err(Failure::Usage("give --dist or --rate".into())),
    };
    let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.join("peg.alist"));
    let code_id = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "peg".into());
    let h = peg_construct_named(&dist, args.n_vars, cfg.seed, code_id)?;
    write_atomic(&out, h.to_alist().as_bytes())?;
    eprintln!(
        "wrote {} (n={} m={} edges={})",
        out.display(),
        h.n_vars(),
        h.n_checks(),
        h.n_edges()
    );
    Ok(())
}

fn cmd_reoptimize(cfg: &RunConfig) -> CliResult<()> {
    let second = cfg.second.ok_or_else(|| {
        Failure::Usage("reoptimize needs the second block's channel (second.* keys)".into())
    })?;
    let model = cfg.fer_model.load()?;
    let report = reoptimize_live(
        &cfg.params,
        &second,
        cfg.applied_va,
        cfg.protocol,
        &cfg.finite_size,
        cfg.code_rate,
        &model,
        &SearchOptions::default(),
    )?;
    write_json(&cfg.output_dir.join("reoptimize.json"), &report)?;
    print_json(&report)
}
