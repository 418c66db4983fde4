//! `basinlab` command line: generate, measure, sweep, stats.
//!
//! Exit codes: 0 success, 2 invalid flags, 3 generation / input / plan
//! failure, 4 a requested metric errored (the report is still written).

use crate::dataset::{
    histograms, read_basin_image, read_manifest, run_sweep, write_basin_image, write_histograms,
    LabelBudgets, SweepPlan,
};
use crate::grid::{BasinGrid, Region};
use crate::metrics::{
    repeat_metric, wada_test, Estimator, MetricError, MetricResult, WadaReport,
    UNRESOLVED_WARNING_FRACTION,
};
use crate::systems::{compute_basin, IntegratorConfig, SystemKind, SystemSpec};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;
pub const EXIT_METRIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "basinlab", version, about = "Basins of attraction: generate, measure, build datasets")]
pub struct Cli {
    /// Base seed for every Monte Carlo estimator.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "BASINLAB_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Output file (generate, measure, stats) or directory (sweep).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Multiplies every Monte Carlo box budget; must be in (0, 1].
    #[arg(long, global = true, default_value_t = 1.0, value_parser = parse_scale)]
    pub budget_scale: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a basin and write it as an 8-bit grayscale PNG.
    Generate(GenerateArgs),
    /// Measure FDim, Sb, Sbb and the Wada property of a basin image.
    Measure(MeasureArgs),
    /// Run a sweep plan into a dataset directory with a CSV manifest.
    Sweep(SweepArgs),
    /// Histogram manifest labels per split into a CSV table.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// duffing, pendulum, henon_heiles, newton or magnetic_pendulum.
    #[arg(long, value_parser = parse_system)]
    pub system: SystemKind,
    /// Duffing forcing amplitude.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Forcing frequency (duffing, pendulum).
    #[arg(long)]
    pub omega: Option<f64>,
    /// Pendulum forcing amplitude F.
    #[arg(long)]
    pub forcing: Option<f64>,
    /// Hénon-Heiles energy E.
    #[arg(long)]
    pub energy: Option<f64>,
    /// Newton polynomial coefficients a0,a1,...,aN (constant term first).
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub coeffs: Option<Vec<f64>>,
    /// Newton relaxation parameter as re,im.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    pub b: Option<(f64, f64)>,
    /// Magnetic pendulum drag b.
    #[arg(long, allow_hyphen_values = true)]
    pub drag: Option<f64>,
    /// Magnetic pendulum: distance of the magnets from the centre.
    #[arg(long)]
    pub magnet_radius: Option<f64>,
    /// Magnetic pendulum: number of magnets (2, 3 or 4).
    #[arg(long)]
    pub magnets: Option<usize>,
    /// x_min,x_max,y_min,y_max (defaults to the system's standard window).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_bounds)]
    pub region: Option<[f64; 4]>,
    /// Pixels per axis.
    #[arg(long, default_value_t = 333)]
    pub res: usize,
    /// JSON file overriding integrator settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Basin image (8-bit grayscale PNG, pixel value = label).
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated subset of fdim,sb,sbb,wada.
    #[arg(long, value_delimiter = ',', default_value = "fdim,sb,sbb,wada", value_parser = ["fdim", "sb", "sbb", "wada"])]
    pub metrics: Vec<String>,
    /// Monte Carlo repeats per metric; consecutive seeds from --seed.
    #[arg(long, default_value_t = crate::metrics::DEFAULT_REPEATS, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub repeats: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep plan (JSON).
    #[arg(long)]
    pub plan: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Manifest CSV written by `sweep`.
    #[arg(long)]
    pub manifest: PathBuf,
}

fn parse_system(s: &str) -> Result<SystemKind, String> {
    SystemKind::parse(s).ok_or_else(|| {
        let names: Vec<_> = SystemKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown system {s:?}; expected one of {}", names.join(", "))
    })
}

fn parse_scale(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("budget scale must be in (0, 1], got {v}"))
    }
}

fn parse_reals(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("not a number: {x:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_reals(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_bounds(s: &str) -> Result<[f64; 4], String> {
    let v = parse_reals(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return EXIT_FAILURE;
        }
    };
    pool.install(|| match &cli.command {
        Command::Generate(a) => cmd_generate(&cli, a),
        Command::Measure(a) => cmd_measure(&cli, a),
        Command::Sweep(a) => cmd_sweep(&cli, a),
        Command::Stats(a) => cmd_stats(&cli, a),
    })
}

fn usage_error(msg: impl std::fmt::Display) -> i32 {
    let mut cmd = <Cli as clap::CommandFactory>::command();
    let err = cmd.error(clap::error::ErrorKind::MissingRequiredArgument, msg);
    let _ = err.print();
    EXIT_USAGE
}

fn generate_spec(a: &GenerateArgs) -> Result<SystemSpec, String> {
    let mut pairs: Vec<(String, f64)> = Vec::new();
    let mut need = |name: &str, flag: &str, v: Option<f64>| match v {
        Some(x) => {
            pairs.push((name.to_string(), x));
            Ok(())
        }
        None => Err(format!("--system {} requires --{flag}", a.system)),
    };
    match a.system {
        SystemKind::Duffing => {
            need("gamma", "gamma", a.gamma)?;
            need("omega", "omega", a.omega)?;
        }
        SystemKind::Pendulum => {
            need("F", "forcing", a.forcing)?;
            need("omega", "omega", a.omega)?;
        }
        SystemKind::HenonHeiles => need("E", "energy", a.energy)?,
        SystemKind::MagneticPendulum => {
            need("b", "drag", a.drag)?;
            need("a", "magnet-radius", a.magnet_radius)?;
            need("n", "magnets", a.magnets.map(|n| n as f64))?;
        }
        SystemKind::Newton => {
            let coeffs = a.coeffs.as_ref().ok_or("--system newton requires --coeffs")?;
            for (i, c) in coeffs.iter().enumerate() {
                need(&format!("a{i}"), "coeffs", Some(*c))?;
            }
            let (re, im) = a.b.unwrap_or((1.0, 0.0));
            need("b_re", "b", Some(re))?;
            need("b_im", "b", Some(im))?;
        }
    }
    let spec = SystemSpec::from_params(a.system, &pairs).map_err(|e| e.to_string())?;
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn load_config(kind: SystemKind, path: Option<&Path>) -> Result<IntegratorConfig, String> {
    let mut config = serde_json::to_value(IntegratorConfig::for_system(kind)).expect("config serializes");
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let overrides: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let obj = config.as_object_mut().expect("object");
        for (k, v) in overrides {
            if !obj.contains_key(&k) {
                return Err(format!("{}: unknown integrator setting {k:?}", path.display()));
            }
            obj.insert(k, v);
        }
    }
    let config: IntegratorConfig = serde_json::from_value(config).map_err(|e| e.to_string())?;
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn cmd_generate(cli: &Cli, a: &GenerateArgs) -> i32 {
    let spec = match generate_spec(a) {
        Ok(s) => s,
        Err(msg) => return usage_error(msg),
    };
    let region = match a.region {
        Some([x0, x1, y0, y1]) => Region::new(x0, x1, y0, y1, a.res),
        None => a.system.default_region(a.res),
    };
    let region = match region {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    let config = match load_config(a.system, a.config.as_deref()) {
        Ok(c) => c,
        Err(msg) => return usage_error(msg),
    };
    let out = cli.output.clone().unwrap_or_else(|| PathBuf::from(format!("{}.png", a.system)));

    let start = Instant::now();
    let grid = match compute_basin(&spec, &region, &config) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: generation failed: {e}");
            return EXIT_FAILURE;
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    if let Err(e) = write_basin_image(&grid, &out) {
        eprintln!("error: {e}");
        return EXIT_FAILURE;
    }
    println!(
        "{}: {}x{} {}, {} labels, unresolved {:.3}%, {:.2} s",
        out.display(),
        grid.width(),
        grid.height(),
        a.system,
        grid.num_labels(),
        100.0 * grid.unresolved_fraction(),
        elapsed
    );
    if grid.unresolved_fraction() > UNRESOLVED_WARNING_FRACTION {
        log::warn!("more than {:.0}% of pixels are unresolved", 100.0 * UNRESOLVED_WARNING_FRACTION);
    }
    EXIT_OK
}

/// One scalar metric in the JSON report.
#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MetricEntry {
    Ok(MetricResult),
    Error { error: String, message: String },
}

impl From<&Result<MetricResult, MetricError>> for MetricEntry {
    fn from(r: &Result<MetricResult, MetricError>) -> Self {
        match r {
            Ok(m) => MetricEntry::Ok(m.clone()),
            Err(e) => MetricEntry::Error { error: e.code().to_string(), message: e.to_string() },
        }
    }
}

/// Machine-readable output of `measure`. Contains nothing run-dependent
/// beyond the inputs, so identical invocations give identical bytes.
#[derive(Debug, Serialize)]
pub struct MeasureReport {
    pub input: String,
    pub width: usize,
    pub height: usize,
    pub num_labels: usize,
    pub unresolved_fraction: f64,
    pub seed: u64,
    pub budget_scale: f64,
    pub budgets: LabelBudgets,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fdim: Option<MetricEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sb: Option<MetricEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sbb: Option<MetricEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wada: Option<WadaReport>,
}

fn cmd_measure(cli: &Cli, a: &MeasureArgs) -> i32 {
    let grid = match read_basin_image(&a.input) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    let mut budgets = LabelBudgets { repeats: a.repeats, ..LabelBudgets::scaled(cli.budget_scale) };
    budgets.fdim.seed = cli.seed;
    budgets.entropy.seed = cli.seed;
    let (report, failed) = measure(&grid, &a.input, &a.metrics, &budgets, cli.seed, cli.budget_scale);

    print_report(&report);
    let out = cli.output.clone().unwrap_or_else(|| a.input.with_extension("json"));
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Err(e) = std::fs::write(&out, json) {
        eprintln!("error: {}: {e}", out.display());
        return EXIT_FAILURE;
    }
    println!("report: {}", out.display());
    if failed {
        EXIT_METRIC
    } else {
        EXIT_OK
    }
}

/// Run the selected metrics; the flag is true if any of them errored.
pub fn measure(
    grid: &BasinGrid,
    input: &Path,
    metrics: &[String],
    budgets: &LabelBudgets,
    seed: u64,
    budget_scale: f64,
) -> (MeasureReport, bool) {
    let wants = |m: &str| metrics.iter().any(|x| x == m);
    let scalar = |m: &str, est: Estimator| {
        wants(m).then(|| repeat_metric(&est, grid, budgets.repeats, seed))
    };
    let fdim = scalar("fdim", Estimator::FractalDimension(budgets.fdim.clone()));
    let sb = scalar("sb", Estimator::BasinEntropy(budgets.entropy.clone()));
    let sbb = scalar("sbb", Estimator::BoundaryBasinEntropy(budgets.entropy.clone()));
    let failed = [&fdim, &sb, &sbb].iter().any(|r| matches!(r, Some(Err(_))));
    let report = MeasureReport {
        input: input.display().to_string(),
        width: grid.width(),
        height: grid.height(),
        num_labels: grid.num_labels(),
        unresolved_fraction: grid.unresolved_fraction(),
        seed,
        budget_scale,
        budgets: budgets.clone(),
        fdim: fdim.as_ref().map(MetricEntry::from),
        sb: sb.as_ref().map(MetricEntry::from),
        sbb: sbb.as_ref().map(MetricEntry::from),
        wada: wants("wada").then(|| wada_test(grid, &budgets.wada)),
    };
    (report, failed)
}

fn print_report(r: &MeasureReport) {
    println!(
        "{}: {}x{}, {} labels, unresolved {:.3}%",
        r.input,
        r.width,
        r.height,
        r.num_labels,
        100.0 * r.unresolved_fraction
    );
    for (name, entry) in [("FDim", &r.fdim), ("Sb", &r.sb), ("Sbb", &r.sbb)] {
        match entry {
            Some(MetricEntry::Ok(m)) => {
                println!("  {name:<5} {:.6} ± {:.6} ({} repeats)", m.mean, m.std, m.repeats)
            }
            Some(MetricEntry::Error { error, message }) => println!("  {name:<5} error {error}: {message}"),
            None => {}
        }
    }
    if let Some(w) = &r.wada {
        let detail = match w.pairs.iter().find(|p| !p.passed) {
            Some(p) => format!(" (merging {} and {} changes the boundary)", p.label_a, p.label_b),
            None if w.pairs.is_empty() => " (fewer than three basins)".to_string(),
            None => String::new(),
        };
        println!("  Wada  {}{detail}", w.verdict.is_wada());
        if let Some(warning) = &w.warning {
            println!("  warning: {warning}");
        }
    }
}

fn cmd_sweep(cli: &Cli, a: &SweepArgs) -> i32 {
    let plan = match std::fs::read_to_string(&a.plan) {
        Ok(text) => SweepPlan::from_json(&text),
        Err(e) => {
            eprintln!("error: {}: {e}", a.plan.display());
            return EXIT_FAILURE;
        }
    };
    let plan = match plan {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {}: {e}", a.plan.display());
            return EXIT_FAILURE;
        }
    };
    let out = cli.output.clone().unwrap_or_else(|| PathBuf::from("dataset"));
    // The command-line scale multiplies whatever the plan asks for.
    let mut plan = plan;
    plan.budgets.budget_scale *= cli.budget_scale;
    for e in &mut plan.entries {
        if let Some(b) = &mut e.budgets {
            b.budget_scale *= cli.budget_scale;
        }
    }
    match run_sweep(&plan, &out, cli.seed) {
        Ok(s) => {
            println!(
                "{}: {} records ({} points computed, {} reused, {} failed)",
                s.manifest_path.display(),
                s.records.len(),
                s.computed,
                s.reused,
                s.failed
            );
            for (split, n) in s.split_counts() {
                println!("  {split:<10} {n}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn cmd_stats(cli: &Cli, a: &StatsArgs) -> i32 {
    let records = match read_manifest(&a.manifest) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    let hists = histograms(&records);
    let result = match &cli.output {
        Some(path) => std::fs::File::create(path)
            .map_err(csv::Error::from)
            .and_then(|f| write_histograms(&hists, std::io::BufWriter::new(f))),
        None => write_histograms(&hists, std::io::stdout().lock()),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
