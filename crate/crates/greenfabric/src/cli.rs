//! Command-line front end.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use greenfabric_core::{
    aggregate, alpha_from_breakdown, builtin_case, builtin_paper_dataset, calibrated_aggregates, cdc,
    device_preset, embodied_intensity, evaluate_cdc_table, fit_aggregates, hybrid_retained_savings,
    min_dsas_to_replace, savings_factor, savings_table, sweep_alpha, sweep_grid,
    AggregateRatios, AggregateSource, AlphaRange, CaseId, CdcQuery, DeviceBreakdown, DeviceClass,
    FootprintWeights, KernelDataset, MeanKind, ScaleMode, ScenarioSpec, SweepMetadata, SweepResult,
};

use crate::config::load_scenarios;
use crate::error::{Error, Result};
use crate::io::{load_breakdowns, load_dataset_path, load_tech_nodes, read_file, DataFormat, NamedBreakdown};
use crate::report::{emit_curve_csv, emit_table, Cell, OutputFormat, RenderedReport};
use crate::svg::{render_chart, ChartKind, ChartLabels};

/// Environment variable naming the default dataset file.
pub const DATASET_ENV: &str = "GREENFABRIC_DATASET";

#[derive(Debug, Parser)]
#[command(
    name = "greenfabric",
    version,
    about = "Decide whether a reconfigurable fabric should replace a set of dedicated accelerators"
)]
pub struct Cli {
    /// Output format for data written to stdout or --out.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Write data to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also render an SVG chart to this file.
    #[arg(long, global = true, value_name = "PATH.svg")]
    pub plot: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical DSA count for one set of aggregates.
    Cdc(CdcArgs),
    /// CDC curves over alpha for a grid of area and energy ratios.
    Sweep(SweepArgs),
    /// CDC tables for the built-in exclusion cases or a scenario config.
    Scenario(ScenarioArgs),
    /// Footprint savings of the fabric over a range of concurrency levels.
    Savings(SavingsArgs),
    /// Savings when some DSAs are kept next to a smaller fabric.
    Hybrid(HybridArgs),
    /// Embodied weight alpha from a lifecycle breakdown or a device class.
    Alpha(AlphaArgs),
    /// Fit aggregate area and energy ratios to two CDC points.
    Calibrate(CalibrateArgs),
    /// Inspect kernel datasets and tech-node files.
    Dataset(DatasetArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UtilMode {
    #[value(alias = "average")]
    Avg,
    Conservative,
}

#[derive(Debug, Args)]
pub struct DatasetSource {
    /// Kernel dataset (.csv or .json); the built-in set when absent.
    #[arg(long, value_name = "PATH", env = DATASET_ENV)]
    pub dataset: Option<PathBuf>,
}

impl DatasetSource {
    fn load(&self) -> Result<KernelDataset> {
        match &self.dataset {
            Some(path) => load_dataset_path(path),
            None => Ok(builtin_paper_dataset()),
        }
    }
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Fabric scaling for concurrent kernels.
    #[arg(long, value_enum)]
    pub util_mode: Option<UtilMode>,
    /// Mean utilization for the avg mode; defaults to the dataset mean.
    #[arg(long, value_parser = parse_utilization)]
    pub util: Option<f64>,
}

impl ScalingArgs {
    /// Scale mode and whether the dataset mean utilization feeds it.
    fn mode(&self, default: UtilMode) -> (ScaleMode, bool) {
        let mode = self.util_mode.unwrap_or(if self.util.is_some() { UtilMode::Avg } else { default });
        match (mode, self.util) {
            (UtilMode::Conservative, _) => (ScaleMode::Conservative, false),
            (UtilMode::Avg, Some(u)) => (ScaleMode::FixedUtilization(u), false),
            (UtilMode::Avg, None) => (ScaleMode::AverageUtilization, true),
        }
    }

    fn check(&self) -> Result<()> {
        if self.util.is_some() && self.util_mode == Some(UtilMode::Conservative) {
            return Err(Error::Usage("--util has no effect with --util-mode conservative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct CdcArgs {
    /// Embodied share of the footprint, in (0, 1].
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: f64,
    /// Aggregate DSA area relative to the fabric.
    #[arg(long, value_parser = parse_ratio)]
    pub area: f64,
    /// Aggregate DSA energy relative to the fabric.
    #[arg(long, value_parser = parse_ratio)]
    pub energy: f64,
    /// DSAs active at the same time.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Explicit fabric scale factor n'.
    #[arg(long, value_parser = parse_scale, conflicts_with_all = ["util_mode", "util"])]
    pub scale: Option<f64>,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    #[command(flatten)]
    pub data: DatasetSource,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Alpha range as LO:HI:STEP.
    #[arg(long, value_parser = parse_alpha_range)]
    pub alpha: AlphaRange,
    /// Area ratios, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.35, 0.45], value_parser = parse_ratio)]
    pub areas: Vec<f64>,
    /// Energy ratios, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.35, 0.45], value_parser = parse_ratio)]
    pub energies: Vec<f64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    #[command(flatten)]
    pub data: DatasetSource,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Built-in cases, comma separated (I, II, III).
    #[arg(long, value_delimiter = ',', value_parser = parse_case, conflicts_with = "config")]
    pub case: Vec<CaseId>,
    /// Scenario configuration document (JSON).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Alpha values, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.5, 0.7, 0.9], value_parser = parse_alpha)]
    pub alphas: Vec<f64>,
    /// Concurrency; overrides the config document when given.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: Option<u32>,
    /// Use aggregates fitted to the reference CDC points of each case.
    #[arg(long, conflicts_with_all = ["config", "mean"])]
    pub calibrated: bool,
    /// Mean used to aggregate kernel ratios.
    #[arg(long, value_parser = parse_mean)]
    pub mean: Option<MeanKind>,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    #[command(flatten)]
    pub data: DatasetSource,
}

#[derive(Debug, Args)]
pub struct SavingsArgs {
    /// Size of the DSA population N.
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u32).range(1..))]
    pub dsas: u32,
    #[arg(long, default_value_t = 0.7, value_parser = parse_alpha)]
    pub alpha: f64,
    /// Concurrency range as LO:HI.
    #[arg(long, default_value = "1:5", value_parser = parse_levels)]
    pub n: RangeInclusive<u32>,
    /// Case whose kernels form the DSA population.
    #[arg(long, default_value = "I", value_parser = parse_case)]
    pub case: CaseId,
    #[arg(long)]
    pub calibrated: bool,
    /// Mean utilization for the sharing column; defaults to the kernel mean.
    #[arg(long, value_parser = parse_utilization)]
    pub util: Option<f64>,
    #[command(flatten)]
    pub data: DatasetSource,
}

#[derive(Debug, Args)]
pub struct HybridArgs {
    /// Kernels kept as dedicated DSAs, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub retain: Vec<String>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u32).range(1..))]
    pub dsas: u32,
    #[arg(long, default_value_t = 0.7, value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, default_value = "I", value_parser = parse_case)]
    pub case: CaseId,
    #[arg(long)]
    pub calibrated: bool,
    #[arg(long, value_parser = parse_utilization)]
    pub util: Option<f64>,
    #[command(flatten)]
    pub data: DatasetSource,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["breakdown", "device", "file"])))]
pub struct AlphaArgs {
    /// Lifecycle shares in percent: production=,transport=,use=,eol=
    #[arg(long, value_parser = parse_breakdown)]
    pub breakdown: Option<DeviceBreakdown>,
    /// Device class preset.
    #[arg(long, value_parser = parse_device)]
    pub device: Option<DeviceClass>,
    /// File of device breakdowns (.csv or .json).
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Two points as ALPHA:CDC,ALPHA:CDC.
    #[arg(long, value_parser = parse_points)]
    pub points: [(f64, f64); 2],
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Fabric scale used by the reference points; defaults to n.
    #[arg(long, value_parser = parse_scale)]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetAction {
    /// Load and check a dataset.
    Validate,
    /// Print the kernels of a dataset.
    Show,
    /// Embodied intensity of each record of a tech-node file.
    Intensity,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    #[arg(value_enum)]
    pub action: DatasetAction,
    /// Dataset or tech-node file; the built-in dataset when absent.
    #[arg(value_name = "PATH", env = DATASET_ENV)]
    pub path: Option<PathBuf>,
}

// ------------------------------------------------------------ value parsers

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v == 0.0 {
        return Err("alpha = 0 is a pole of the critical DSA count".into());
    }
    if !(v > 0.0 && v <= 1.0) {
        return Err(format!("alpha must lie in (0, 1], got {v}"));
    }
    Ok(v)
}

fn parse_ratio(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("ratio must be > 0, got {v}"))
    }
}

fn parse_utilization(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("utilization must lie in (0, 1], got {v}"))
    }
}

fn parse_scale(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v >= 1.0 {
        Ok(v)
    } else {
        Err(format!("scale must be >= 1, got {v}"))
    }
}

fn parse_alpha_range(s: &str) -> std::result::Result<AlphaRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(format!("expected LO:HI:STEP, got '{s}'"));
    };
    let lo = parse_alpha(lo)?;
    let hi = parse_alpha(hi)?;
    let step = parse_f64(step)?;
    AlphaRange::new(lo, hi, step).map_err(|e| e.to_string())
}

fn parse_levels(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let parse = |p: &str| p.trim().parse::<u32>().map_err(|_| format!("'{p}' is not a whole number"));
    let (lo, hi) = match s.split_once(':') {
        Some((lo, hi)) => (parse(lo)?, parse(hi)?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("expected LO:HI with 1 <= LO <= HI, got '{s}'"));
    }
    Ok(lo..=hi)
}

fn parse_case(s: &str) -> std::result::Result<CaseId, String> {
    s.parse().map_err(|e: greenfabric_core::ModelError| e.to_string())
}

fn parse_mean(s: &str) -> std::result::Result<MeanKind, String> {
    s.parse().map_err(|e: greenfabric_core::ModelError| e.to_string())
}

fn parse_device(s: &str) -> std::result::Result<DeviceClass, String> {
    s.parse().map_err(|e: greenfabric_core::ModelError| e.to_string())
}

fn parse_breakdown(s: &str) -> std::result::Result<DeviceBreakdown, String> {
    let (mut p, mut t, mut u, mut e) = (None, None, None, None);
    for pair in s.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected KEY=VALUE, got '{pair}'"))?;
        let value = parse_f64(value)?;
        let slot = match key.trim().to_ascii_lowercase().as_str() {
            "production" | "p" => &mut p,
            "transport" | "t" => &mut t,
            "use" | "u" => &mut u,
            "eol" | "end_of_life" | "e" => &mut e,
            other => return Err(format!("unknown breakdown key '{other}'")),
        };
        *slot = Some(value);
    }
    let get = |v: Option<f64>, k: &str| v.ok_or_else(|| format!("missing breakdown key '{k}'"));
    DeviceBreakdown::new(get(p, "production")?, get(t, "transport")?, get(u, "use")?, get(e, "eol")?)
        .map_err(|err| err.to_string())
}

fn parse_points(s: &str) -> std::result::Result<[(f64, f64); 2], String> {
    let points = s
        .split(',')
        .map(|p| {
            let (a, c) = p
                .split_once(':')
                .ok_or_else(|| format!("expected ALPHA:CDC, got '{p}'"))?;
            Ok((parse_alpha(a)?, parse_ratio(c)?))
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    points
        .try_into()
        .map_err(|v: Vec<_>| format!("expected exactly two points, got {}", v.len()))
}

// ---------------------------------------------------------------- execution

/// What a subcommand produced: a report, optionally curves for CSV and SVG.
struct Outcome {
    report: RenderedReport,
    curves: Vec<SweepResult>,
    curve_csv: bool,
    chart: Option<(ChartKind, String, String)>,
}

impl Outcome {
    fn table(report: RenderedReport) -> Self {
        Self {
            report,
            curves: Vec::new(),
            curve_csv: false,
            chart: None,
        }
    }

    fn with_chart(mut self, curves: Vec<SweepResult>, kind: ChartKind, x: &str, y: &str) -> Self {
        self.curves = curves;
        self.chart = Some((kind, x.to_string(), y.to_string()));
        self
    }
}

/// Runs a parsed invocation, writing data to `--out` or `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    if let Some(plot) = &cli.plot {
        if matches!(
            cli.command,
            Command::Alpha(_) | Command::Calibrate(_) | Command::Dataset(_)
        ) {
            return Err(Error::Usage("--plot is not supported by this subcommand".into()));
        }
        if plot.extension().and_then(|e| e.to_str()) != Some("svg") {
            return Err(Error::Usage(format!("--plot expects a .svg path, got '{}'", plot.display())));
        }
    }
    let outcome = match &cli.command {
        Command::Cdc(a) => run_cdc(a)?,
        Command::Sweep(a) => run_sweep(a)?,
        Command::Scenario(a) => run_scenario(a)?,
        Command::Savings(a) => run_savings(a)?,
        Command::Hybrid(a) => run_hybrid(a)?,
        Command::Alpha(a) => run_alpha(a)?,
        Command::Calibrate(a) => run_calibrate(a)?,
        Command::Dataset(a) => run_dataset(a)?,
    };

    match &cli.out {
        Some(path) => {
            let file = File::create(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            emit(&outcome, cli.format, &mut w).and_then(|_| w.flush()).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
        }
        None => emit(&outcome, cli.format, stdout).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        })?,
    }

    if let Some(path) = &cli.plot {
        let (kind, x, y) = outcome
            .chart
            .as_ref()
            .expect("plot support checked before running");
        let labels = ChartLabels {
            title: &outcome.report.title,
            x_label: x,
            y_label: y,
        };
        let svg = render_chart(*kind, &outcome.curves, &labels)?;
        write_file(path, svg.as_bytes())?;
    }
    Ok(())
}

fn emit(outcome: &Outcome, format: OutputFormat, out: &mut dyn Write) -> std::io::Result<()> {
    if format == OutputFormat::Csv && outcome.curve_csv {
        for note in &outcome.report.footnotes {
            writeln!(out, "# {note}")?;
        }
        return emit_curve_csv(&outcome.curves, out);
    }
    emit_table(&outcome.report, format, out)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn mean_utilization(ds: &KernelDataset) -> Result<f64> {
    Ok(aggregate(&ds.kernels, MeanKind::Arithmetic)?.utilization())
}

fn run_cdc(a: &CdcArgs) -> Result<Outcome> {
    a.scaling.check()?;
    let (mode, uses_dataset) = match a.scale {
        Some(s) => (ScaleMode::explicit(s)?, false),
        None => a.scaling.mode(UtilMode::Conservative),
    };
    let ds = if uses_dataset { Some(a.data.load()?) } else { None };
    let util = match (&ds, mode) {
        (Some(ds), _) => mean_utilization(ds)?,
        (None, ScaleMode::FixedUtilization(u)) => u,
        _ => 1.0,
    };
    let agg = AggregateRatios::new(a.area, a.energy, util, 1, MeanKind::Arithmetic)?;
    let query = CdcQuery::with_mode(FootprintWeights::explicit(a.alpha)?, agg, a.n, mode)?;
    let value = cdc(&query)?;
    let min_replace = min_dsas_to_replace(&query)?;

    let mut report = RenderedReport::new(
        "critical DSA count",
        ["alpha", "area", "energy", "n", "scale", "cdc", "min_replace"],
    );
    report.push_row(vec![
        Cell::num(a.alpha, 2),
        Cell::num(a.area, 4),
        Cell::num(a.energy, 4),
        Cell::Int(a.n.into()),
        Cell::scale(query.scale()),
        Cell::value(value),
        Cell::Int(min_replace as i64),
    ]);
    report.footnote(format!(
        "the fabric wins once more than {value:.2} DSAs would be deployed ({min_replace} or more)"
    ));
    if let Some(ds) = &ds {
        report.note_estimates(&ds.kernels);
    }

    let range = AlphaRange::new(0.1, 1.0, 0.05)?;
    let curve = sweep_alpha(range, &agg, a.n, mode)?.with_label(format!("A={} E={}", a.area, a.energy));
    Ok(Outcome::table(report).with_chart(vec![curve], ChartKind::Line, "alpha", "CDC"))
}

fn run_sweep(a: &SweepArgs) -> Result<Outcome> {
    a.scaling.check()?;
    let (mode, uses_dataset) = a.scaling.mode(UtilMode::Conservative);
    let ds = if uses_dataset { Some(a.data.load()?) } else { None };
    let util = match (&ds, mode) {
        (Some(ds), _) => mean_utilization(ds)?,
        (None, ScaleMode::FixedUtilization(u)) => u,
        _ => 1.0,
    };
    let curves = sweep_grid(&a.alpha.values(), &a.areas, &a.energies, a.n, mode, util)?;
    let mut report = RenderedReport::new(format!("CDC sweep, n = {}", a.n), ["series", "alpha", "cdc"]);
    for c in &curves {
        for &(alpha, v) in c.samples() {
            report.push_row(vec![Cell::text(c.label()), Cell::num(alpha, 2), Cell::value(v)]);
        }
    }
    if let Some(ds) = &ds {
        report.note_estimates(&ds.kernels);
    }
    let mut out = Outcome::table(report).with_chart(curves, ChartKind::Line, "alpha", "CDC");
    out.curve_csv = true;
    Ok(out)
}

fn scenario_specs(a: &ScenarioArgs, ds: &KernelDataset) -> Result<Vec<(ScenarioSpec, Option<CaseId>)>> {
    if let Some(path) = &a.config {
        let specs = load_scenarios(read_file(path)?)?;
        return Ok(specs
            .into_iter()
            .map(|mut s| {
                if let Some(n) = a.n {
                    s.concurrency = n;
                }
                if a.scaling.util_mode.is_some() || a.scaling.util.is_some() {
                    s.scale_mode = a.scaling.mode(UtilMode::Conservative).0;
                }
                (s, None)
            })
            .collect());
    }
    let cases = if a.case.is_empty() { CaseId::ALL.to_vec() } else { a.case.clone() };
    let mut out = Vec::new();
    for case in cases {
        let mut spec = builtin_case(case);
        spec.concurrency = a.n.unwrap_or(1);
        spec.scale_mode = a.scaling.mode(UtilMode::Conservative).0;
        if a.calibrated {
            spec.aggregates = AggregateSource::Fixed(calibrated_aggregates(case, ds)?);
        } else if let Some(kind) = a.mean {
            spec.aggregates = AggregateSource::Mean(kind);
        }
        out.push((spec, Some(case)));
    }
    Ok(out)
}

fn run_scenario(a: &ScenarioArgs) -> Result<Outcome> {
    a.scaling.check()?;
    let ds = a.data.load()?;
    let specs = scenario_specs(a, &ds)?;
    let mut tables = Vec::with_capacity(specs.len());
    for (spec, _) in &specs {
        tables.push(evaluate_cdc_table(spec, &ds, &a.alphas)?);
    }
    let n = specs.first().map_or(1, |(s, _)| s.concurrency);
    let mut headers = vec!["alpha".to_string()];
    headers.extend(tables.iter().map(|t| t.label().to_string()));
    let mut report = RenderedReport::new(format!("CDC by scenario, n = {n}"), headers);
    for (i, &alpha) in a.alphas.iter().enumerate() {
        let mut row = vec![Cell::num(alpha, 2)];
        row.extend(tables.iter().map(|t| Cell::value(t.samples()[i].1)));
        report.push_row(row);
    }
    let mut used: Vec<&greenfabric_core::KernelProfile> = Vec::new();
    for (spec, case) in &specs {
        if let (true, Some(case)) = (a.calibrated, case) {
            let agg = spec.aggregates(&ds)?;
            report.footnote(format!(
                "{case}: calibrated aggregates A={:.4} E={:.4}",
                agg.area(),
                agg.energy()
            ));
        }
        for k in spec.included(&ds)? {
            if !used.iter().any(|u| u.name == k.name) {
                used.push(k);
            }
        }
    }
    report.note_estimates(used);
    // Parameters must increase for charts; sort a copy if the user did not.
    let mut curves = tables;
    let mut sorted = a.alphas.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted != a.alphas {
        curves = curves
            .into_iter()
            .map(|t| {
                let mut s = t.samples().to_vec();
                s.sort_by(|x, y| x.0.total_cmp(&y.0));
                SweepResult::new("alpha", "cdc", t.label(), s, t.metadata().clone())
            })
            .collect::<greenfabric_core::Result<_>>()?;
    }
    Ok(Outcome::table(report).with_chart(curves, ChartKind::GroupedBar, "alpha", "CDC"))
}

fn population_spec(
    case: CaseId,
    dsas: u32,
    alpha: f64,
    calibrated: bool,
    util: Option<f64>,
    ds: &KernelDataset,
) -> Result<ScenarioSpec> {
    let mut spec = builtin_case(case);
    spec.dsa_population = dsas;
    spec.weights = FootprintWeights::explicit(alpha)?;
    if calibrated {
        spec.aggregates = AggregateSource::Fixed(calibrated_aggregates(case, ds)?);
    }
    if let Some(u) = util {
        spec.scale_mode = ScaleMode::fixed_utilization(u)?;
    }
    Ok(spec)
}

fn run_savings(a: &SavingsArgs) -> Result<Outcome> {
    let ds = a.data.load()?;
    let spec = population_spec(a.case, a.dsas, a.alpha, a.calibrated, a.util, &ds)?;
    let rows = savings_table(&spec, &ds, a.n.clone())?;
    let mut report = RenderedReport::new(
        format!("footprint savings, N = {}, alpha = {}", a.dsas, a.alpha),
        ["n", "dsa_footprint", "conservative", "n_prime", "avg_utilization"],
    );
    for r in &rows {
        report.push_row(vec![
            Cell::Int(r.concurrency.into()),
            Cell::value(r.dsa_footprint),
            Cell::value(r.improvement_conservative),
            r.scale_avg_util.map_or(Cell::Empty, Cell::scale),
            r.improvement_avg_util.map_or(Cell::Empty, Cell::value),
        ]);
    }
    report.note_estimates(spec.included(&ds)?);

    let meta = SweepMetadata {
        alpha: Some(a.alpha),
        population: Some(a.dsas),
        ..SweepMetadata::default()
    };
    let mut curves = vec![SweepResult::new(
        "n",
        "improvement",
        "conservative",
        rows.iter().map(|r| (f64::from(r.concurrency), r.improvement_conservative)).collect(),
        meta.clone(),
    )?];
    let shared: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.improvement_avg_util.map(|v| (f64::from(r.concurrency), v)))
        .collect();
    if !shared.is_empty() {
        curves.push(SweepResult::new("n", "improvement", "average utilization", shared, meta)?);
    }
    Ok(Outcome::table(report).with_chart(curves, ChartKind::Line, "n", "improvement"))
}

fn run_hybrid(a: &HybridArgs) -> Result<Outcome> {
    let ds = a.data.load()?;
    let mut spec = population_spec(a.case, a.dsas, a.alpha, a.calibrated, a.util, &ds)?.with_concurrency(a.n);
    spec.scale_mode = spec.scale_mode.sharing();
    let retain: Vec<&str> = a.retain.iter().map(|s| s.trim()).collect();
    let hybrid = hybrid_retained_savings(&spec, &ds, &retain)?;
    let baseline = savings_factor(&spec, &ds)?;

    let mut report = RenderedReport::new(
        format!("hybrid fabric, N = {}, n = {}, alpha = {}", a.dsas, a.n, a.alpha),
        ["retained", "fabric_scale", "retained_footprint", "improvement", "fabric_only"],
    );
    report.push_row(vec![
        Cell::text(hybrid.retained.join(",")),
        Cell::scale(hybrid.fabric_scale),
        Cell::num(hybrid.retained_footprint, 4),
        Cell::value(hybrid.improvement),
        baseline.improvement_avg_util.map_or(Cell::Empty, Cell::value),
    ]);
    report.note_estimates(spec.included(&ds)?);
    Ok(Outcome::table(report))
}

fn run_alpha(a: &AlphaArgs) -> Result<Outcome> {
    let mut report = RenderedReport::new(
        "embodied weight",
        ["source", "alpha", "alpha_low", "alpha_high", "use_share"],
    );
    let breakdown_row = |name: &str, b: &DeviceBreakdown| -> Result<Vec<Cell>> {
        let w = alpha_from_breakdown(b)?;
        Ok(vec![
            Cell::text(name),
            Cell::num(w.alpha(), 3),
            Cell::Empty,
            Cell::Empty,
            Cell::num(b.use_share(), 3),
        ])
    };
    if let Some(b) = &a.breakdown {
        report.push_row(breakdown_row("breakdown", b)?);
    } else if let Some(class) = a.device {
        let band = device_preset(class);
        report.push_row(vec![
            Cell::text(class.as_str()),
            Cell::num(band.midpoint(), 3),
            Cell::num(band.low, 3),
            Cell::num(band.high, 3),
            Cell::num(1.0 - band.midpoint(), 3),
        ]);
    } else if let Some(path) = &a.file {
        let records: Vec<NamedBreakdown> = load_breakdowns(read_file(path)?, DataFormat::from_path(path)?)?;
        for r in &records {
            report.push_row(breakdown_row(&r.device, &r.breakdown)?);
        }
    }
    Ok(Outcome::table(report))
}

fn run_calibrate(a: &CalibrateArgs) -> Result<Outcome> {
    let scale = a.scale.unwrap_or(f64::from(a.n));
    let agg = fit_aggregates(a.points, a.n, scale)?;
    let mut report = RenderedReport::new("calibrated aggregates", ["area", "energy", "alpha", "cdc"]);
    for &(alpha, _) in &a.points {
        let q = CdcQuery::new(FootprintWeights::explicit(alpha)?, agg, a.n, scale)?;
        report.push_row(vec![
            Cell::num(agg.area(), 4),
            Cell::num(agg.energy(), 4),
            Cell::num(alpha, 2),
            Cell::value(cdc(&q)?),
        ]);
    }
    Ok(Outcome::table(report))
}

fn run_dataset(a: &DatasetArgs) -> Result<Outcome> {
    match a.action {
        DatasetAction::Intensity => {
            let path = a
                .path
                .as_ref()
                .ok_or_else(|| Error::Usage("dataset intensity needs a tech-node file".into()))?;
            let records = load_tech_nodes(read_file(path)?, DataFormat::from_path(path)?)?;
            let mut report = RenderedReport::new(
                "embodied intensity per area",
                ["node", "rel_area_per_cell", "rel_embodied_per_cell", "intensity"],
            );
            for r in &records {
                report.push_row(vec![
                    Cell::text(&r.node_name),
                    Cell::num(r.rel_area_per_cell, 3),
                    Cell::num(r.rel_embodied_per_cell, 3),
                    Cell::num(embodied_intensity(r)?, 3),
                ]);
            }
            Ok(Outcome::table(report))
        }
        DatasetAction::Validate | DatasetAction::Show => {
            let (ds, source) = match &a.path {
                Some(p) => (load_dataset_path(p)?, p.display().to_string()),
                None => (builtin_paper_dataset(), "built-in dataset".to_string()),
            };
            let validated = greenfabric_core::validate_dataset(&ds);
            if !validated.is_empty() {
                return Err(Error::Invalid {
                    what: "dataset",
                    violations: validated.iter().map(ToString::to_string).collect(),
                });
            }
            if a.action == DatasetAction::Validate {
                let mut report = RenderedReport::new("dataset validation", ["source", "kernels", "status"]);
                report.push_row(vec![
                    Cell::text(source),
                    Cell::Int(ds.kernels.len() as i64),
                    Cell::text("valid"),
                ]);
                report.note_estimates(&ds.kernels);
                return Ok(Outcome::table(report));
            }
            let mut report = RenderedReport::new(
                source,
                ["name", "domain", "area_norm", "energy_norm", "utilization", "memory_kb", "estimated"],
            );
            for k in &ds.kernels {
                report.push_row(vec![
                    Cell::text(&k.name),
                    Cell::text(&k.domain),
                    Cell::num(k.area_norm, 3),
                    Cell::num(k.energy_norm, 3),
                    Cell::num(k.utilization, 2),
                    Cell::num(k.memory_kb, 1),
                    Cell::text(if k.estimated { "yes" } else { "no" }),
                ]);
            }
            let mean = aggregate(&ds.kernels, MeanKind::Arithmetic)?;
            report.footnote(format!(
                "means: area {:.5}, energy {:.5}, utilization {:.2}",
                mean.area(),
                mean.energy(),
                mean.utilization()
            ));
            let f = &ds.fabric;
            report.footnote(format!(
                "fabric: {}x{} PEs, {} banks, {} KB, {} MHz",
                f.rows, f.cols, f.memory_banks, f.memory_kb, f.clock_mhz
            ));
            report.note_estimates(&ds.kernels);
            Ok(Outcome::table(report))
        }
    }
}
