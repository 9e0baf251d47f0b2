//! Command-line front end.
//!
//! Every subcommand writes its result to `--out` (or stdout) and reports
//! failures as a JSON object on stderr with a nonzero exit status.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{
    compare, fp_fn_path, hub_recovery, path_for, replicate_seed, run_method, MethodId, MetricsRow,
    DEFAULT_CV_FOLDS,
};
use crate::numcore::io::{read_csv_vector, read_matrix, write_binary_matrix, write_csv_matrix, write_csv_vector};
use crate::numcore::{standardize, Seed};
use crate::penreg::{fold_assignment, Family};
use crate::simgen::{gen_hub_graph, gen_scenario, HubGraphSpec, HubSetting, ScenarioKind, ScenarioSpec, SimData};
use crate::par;

pub const THREADS_ENV: &str = "HUBNET_THREADS";

/// Exit status for invalid input or arguments.
pub const EXIT_INVALID: i32 = 2;
/// Exit status for failures while running.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "hubnet", version, about = "Hub-weighted sparse regression toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic data set.
    Simulate(SimulateArgs),
    /// Fit one method to X/y files.
    Fit(FitArgs),
    /// Compare methods over simulated replicates.
    Bench(BenchArgs),
    /// Score hub detection along the θ grid.
    Recover(RecoverArgs),
    /// False positive / false negative rates along a λ path.
    Paths(PathsArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// a, b, c, d, fig1 or fig2.
    #[arg(long)]
    pub scenario: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    /// Share of non-hub features driven by the hubs (scenarios a and b).
    #[arg(long, default_value_t = 0.2)]
    pub t_frac: f64,
    /// Test rows; defaults to n.
    #[arg(long)]
    pub n_test: Option<usize>,
}

impl ScenarioArgs {
    fn spec(&self, seed: Seed) -> Result<ScenarioSpec> {
        let kind: ScenarioKind = self.scenario.parse()?;
        let base = match kind {
            ScenarioKind::Fig1 | ScenarioKind::Fig2 => ScenarioSpec::figure(kind, seed),
            _ => ScenarioSpec::new(kind, 100, 500, 10, seed),
        };
        let n = self.n.unwrap_or(base.n);
        let spec = ScenarioSpec {
            n,
            p: self.p.unwrap_or(base.p),
            s: self.s.unwrap_or(base.s),
            t_frac: self.t_frac,
            n_test: self.n_test.unwrap_or(n),
            ..base
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    /// Supervised scenario (a, b, c, d, fig1, fig2).
    #[arg(long, conflicts_with = "setting")]
    pub scenario: Option<String>,
    /// Response-free hub graph setting (s1, s2, s3).
    #[arg(long)]
    pub setting: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub t_frac: f64,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write feature matrices in the HNM1 binary format instead of CSV.
    #[arg(long)]
    pub binary: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct FitArgs {
    /// Feature matrix, CSV or HNM1 binary.
    #[arg(long)]
    pub x: PathBuf,
    /// Response, one value per line.
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, default_value = "hubnet")]
    pub method: String,
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    #[arg(long, default_value_t = DEFAULT_CV_FOLDS)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the full edge-out coefficient matrix in the output.
    #[arg(long)]
    pub include_b: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: ScenarioArgs,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    /// Comma-separated subset of lasso, elasticnet, adaptive_lasso, hubnet.
    #[arg(long, default_value = "lasso,elasticnet,adaptive_lasso,hubnet")]
    pub methods: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_CV_FOLDS)]
    pub folds: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct RecoverArgs {
    /// s1, s2 or s3.
    #[arg(long, default_value = "s1")]
    pub setting: String,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub p: usize,
    #[arg(long, default_value_t = 4)]
    pub s: usize,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    /// Comma-separated edge-out mixes.
    #[arg(long, default_value = "0,0.5")]
    pub gamma: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct PathsArgs {
    #[command(flatten)]
    pub data: ScenarioArgs,
    #[arg(long, default_value = "hubnet")]
    pub method: String,
    #[arg(long, default_value_t = 3)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_CV_FOLDS)]
    pub folds: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => return report(&e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            emit_error("Usage", &e.render().to_string());
            return EXIT_INVALID;
        }
    };
    if let Err(e) = configure_threads() {
        return report(&e);
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => report(&e),
    }
}

fn emit_error(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message.trim_end() } });
    let _ = writeln!(io::stderr(), "{body}");
}

fn report(e: &Error) -> i32 {
    emit_error(e.kind(), &e.to_string());
    match e {
        Error::InvalidSpec(_) => EXIT_INVALID,
        _ => EXIT_FAILURE,
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|t| *t > 0)
            .ok_or_else(|| Error::InvalidSpec(format!("{THREADS_ENV}={v:?} is not a positive integer")))?;
        par::init_threads(threads);
    }
    Ok(())
}

/// Splices the flags of a `--config` JSON object in front of the explicit
/// flags, so explicit flags win. Keys use flag names, with `_` or `-`;
/// booleans toggle switches and arrays become comma-separated lists. A
/// `command` key supplies the subcommand when none is given.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config: Option<PathBuf> = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--config") => {
                let v = it.next().ok_or_else(|| Error::InvalidSpec("--config needs a path".into()))?;
                config = Some(v.into());
            }
            Some(s) if s.starts_with("--config=") => config = Some(s["--config=".len()..].into()),
            _ => rest.push(a),
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::InvalidSpec(format!("{} is not a JSON object", path.display())))?;

    let mut flags: Vec<OsString> = Vec::new();
    let mut command: Option<String> = None;
    for (key, v) in obj {
        if key == "command" {
            command = v.as_str().map(str::to_owned);
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let text = match v {
            serde_json::Value::Null | serde_json::Value::Bool(false) => continue,
            serde_json::Value::Bool(true) => {
                flags.push(flag.into());
                continue;
            }
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Array(items) => items
                .iter()
                .map(|i| match i {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            serde_json::Value::Object(_) => {
                return Err(Error::InvalidSpec(format!("config key {key:?} holds an object")))
            }
        };
        flags.push(flag.into());
        flags.push(text.into());
    }

    let has_command = rest.get(1).and_then(|a| a.to_str()).is_some_and(|s| !s.starts_with('-'));
    let mut out = Vec::with_capacity(rest.len() + flags.len() + 1);
    let mut rest = rest.into_iter();
    out.extend(rest.next());
    if has_command {
        out.extend(rest.next());
    } else if let Some(c) = command {
        out.push(c.into());
    }
    out.extend(flags);
    out.extend(rest);
    Ok(out)
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit(a),
        Command::Bench(a) => bench(a),
        Command::Recover(a) => recover(a),
        Command::Paths(a) => paths(a),
    }
}

/// Opens `out` (or stdout) for writing.
fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(io::BufWriter::new(fs::File::create(p)?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn write_rows<R: Serialize>(out: Option<&Path>, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let seed = Seed(a.seed);
    let data = match (&a.scenario, &a.setting) {
        (Some(scenario), None) => {
            let args = ScenarioArgs {
                scenario: scenario.clone(),
                n: a.n,
                p: a.p,
                s: a.s,
                t_frac: a.t_frac,
                n_test: a.n_test,
            };
            gen_scenario(&args.spec(seed)?)?
        }
        (None, Some(setting)) => gen_hub_graph(&HubGraphSpec {
            setting: setting.parse()?,
            n: a.n.unwrap_or(100),
            p: a.p.unwrap_or(200),
            s: a.s.unwrap_or(4),
            seed,
        })?,
        _ => return Err(Error::InvalidSpec("give exactly one of --scenario or --setting".into())),
    };
    export(&data, &a.out, a.binary)
}

/// Writes `x_train`, `y_train`, `x_test`, `y_test` (the last three only when
/// present) and the `sim.json` sidecar into `dir`.
pub fn export(data: &SimData, dir: &Path, binary: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    let write_x = |name: &str, m| -> Result<()> {
        if binary {
            write_binary_matrix(dir.join(format!("{name}.hnm")), m)
        } else {
            write_csv_matrix(dir.join(format!("{name}.csv")), m)
        }
    };
    write_x("x_train", &data.x_train)?;
    if !data.y_train.is_empty() {
        write_csv_vector(dir.join("y_train.csv"), &data.y_train)?;
        write_x("x_test", &data.x_test)?;
        write_csv_vector(dir.join("y_test.csv"), &data.y_test)?;
    }
    write_json(Some(&dir.join("sim.json")), &data.sidecar())
}

fn fit(a: FitArgs) -> Result<()> {
    let method: MethodId = a.method.parse()?;
    let family: Family = a.family.parse()?;
    let raw = read_matrix(&a.x)?;
    let y = read_csv_vector(&a.y)?;
    if y.len() != raw.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} responses for {} rows",
            y.len(),
            raw.rows()
        )));
    }
    if a.folds < 2 || a.folds > raw.rows() {
        return Err(Error::InvalidSpec(format!("{} folds with {} rows", a.folds, raw.rows())));
    }
    let (x, scaling) = standardize(&raw)?;
    let folds = fold_assignment(x.rows(), a.folds, Seed(a.seed));
    let run = run_method(method, &x, &y, family, &folds)?;
    let hub = run.hub.as_ref().map(|h| {
        serde_json::json!({
            "selection": h.selection,
            "weights": h.weights,
            "edgeout": h.edgeout.to_json(a.include_b),
        })
    });
    let body = serde_json::json!({
        "method": method,
        "family": family,
        "standardization": { "means": scaling.means, "sds": scaling.sds },
        "beta0": run.fit.beta0,
        "beta": run.fit.beta,
        "support": run.fit.support(),
        "lambda_min": run.cv.lambda_min,
        "cv": {
            "lambdas": run.cv.lambdas,
            "cvm": run.cv.cvm,
            "cvsd": run.cv.cvsd,
            "nonzero": run.cv.nonzero,
            "index_min": run.cv.index_min,
        },
        "hub": hub,
    });
    write_json(a.out.as_deref(), &body)
}

fn bench(a: BenchArgs) -> Result<()> {
    let spec = a.data.spec(Seed(a.seed))?;
    let methods = MethodId::parse_list(&a.methods)?;
    let rows: Vec<MetricsRow> = compare(&spec, &methods, a.reps, Seed(a.seed), a.folds)?;
    write_rows(a.out.as_deref(), &rows)
}

#[derive(Serialize)]
struct RecoveryRow {
    rep: usize,
    gamma: f64,
    theta_index: usize,
    theta: f64,
    correct_hubs: usize,
    false_hubs: usize,
    max_hub_rank: usize,
}

fn parse_gammas(s: &str) -> Result<Vec<f64>> {
    let gammas: Vec<f64> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|g| (0.0..=1.0).contains(g))
                .ok_or_else(|| Error::InvalidSpec(format!("gamma {t:?} is not in [0, 1]")))
        })
        .collect::<Result<_>>()?;
    if gammas.is_empty() {
        return Err(Error::InvalidSpec("empty gamma list".into()));
    }
    Ok(gammas)
}

fn recover(a: RecoverArgs) -> Result<()> {
    let setting: HubSetting = a.setting.parse()?;
    let gammas = parse_gammas(&a.gamma)?;
    if a.reps == 0 {
        return Err(Error::InvalidSpec("reps must be at least 1".into()));
    }
    let base = HubGraphSpec { setting, n: a.n, p: a.p, s: a.s, seed: Seed(a.seed) };
    base.validate()?;
    let per_rep = par::try_map_range(a.reps, |r| -> Result<Vec<RecoveryRow>> {
        let data = gen_hub_graph(&HubGraphSpec { seed: replicate_seed(Seed(a.seed), r), ..base })?;
        let mut rows = Vec::new();
        for &gamma in &gammas {
            let curve = hub_recovery(&data, gamma, None)?;
            for k in 0..curve.grid.len() {
                rows.push(RecoveryRow {
                    rep: r,
                    gamma,
                    theta_index: k,
                    theta: curve.grid[k],
                    correct_hubs: curve.correct_hubs[k],
                    false_hubs: curve.false_hubs[k],
                    max_hub_rank: curve.max_hub_rank[k],
                });
            }
        }
        Ok(rows)
    })?;
    write_rows(a.out.as_deref(), &per_rep.into_iter().flatten().collect::<Vec<_>>())
}

#[derive(Serialize)]
struct PathRow {
    lambda: f64,
    nonzero: usize,
    fp: f64,
    #[serde(rename = "fn")]
    fn_rate: f64,
}

fn paths(a: PathsArgs) -> Result<()> {
    let method: MethodId = a.method.parse()?;
    let seed = Seed(a.seed);
    let spec = a.data.spec(seed)?;
    if a.folds < 2 || a.folds > spec.n {
        return Err(Error::InvalidSpec(format!("{} folds with n = {}", a.folds, spec.n)));
    }
    let data = gen_scenario(&spec)?;
    let run = path_for(&data, method, a.folds, seed)?;
    let curve = fp_fn_path(&run.path, &data)?;
    let rows: Vec<PathRow> = (0..curve.lambdas.len())
        .map(|k| PathRow {
            lambda: curve.lambdas[k],
            nonzero: curve.nonzero[k],
            fp: curve.fp_path[k],
            fn_rate: curve.fn_path[k],
        })
        .collect();
    write_rows(a.out.as_deref(), &rows)
}
