//! Command-line front end.
//!
//! Every subcommand produces one table. CSV output starts with `# key=value`
//! comment lines carrying the schema version and the full run configuration;
//! JSON output carries the same data as fields. Nothing time- or
//! host-dependent is written, so a fixed configuration and seed always give
//! the same bytes.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::channel::{
    conditional_entropy, gilbert_capacity_bound, gilbert_channel, kl_conditional, MarkovPauliChannel,
};
use crate::code_sim::{code_dimension, counting_ratio_check, ensemble_average, exponent_fit, EnsembleMode, FitOutcome};
use crate::config::{load_channel, load_kraus, parse_gilbert_spec, parse_sweep};
use crate::exponent::{capacity_threshold, exponent_sweep, ExponentOptions};
use crate::twirl::{pauli_twirl, weyl_kraus_map};
use crate::types::{class_size_bound, enumerate_types, type_class_size, type_probability, type_probability_bound};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "markov-qcode", version, about = "Error exponents and random stabilizer-code checks for Markov Pauli channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub out: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,

    /// Cap on worker threads.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,

    /// Unit of rates and entropies: d-ary digits or bits.
    #[arg(long, global = true, value_enum, default_value_t = Units::Dary)]
    pub units: Units,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Dary,
    Bits,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChannelArgs {
    /// Channel config file (JSON).
    #[arg(long, conflicts_with = "gilbert", required_unless_present = "gilbert")]
    pub channel: Option<PathBuf>,

    /// Gilbert channel parameters, EPSILON:GAMMA.
    #[arg(long)]
    pub gilbert: Option<String>,
}

impl ChannelArgs {
    fn load(&self) -> anyhow::Result<MarkovPauliChannel> {
        match (&self.channel, &self.gilbert) {
            (Some(path), _) => Ok(load_channel(path)?),
            (None, Some(spec)) => {
                let (e, g) = parse_gilbert_spec(spec)?;
                Ok(gilbert_channel(e, g)?)
            }
            (None, None) => bail!("one of --channel or --gilbert is required"),
        }
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Error exponent E(R,P) at one rate or over a sweep.
    Exponent {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Rate, in the selected units.
        #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
        rate: Option<f64>,
        /// START:STEP:END, in the selected units.
        #[arg(long)]
        sweep: Option<String>,
        /// Largest accepted duality gap (d-ary).
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Independent solves that must agree.
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rate threshold 1 − H(P|q).
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Gilbert closed form against the stationary-distribution path.
    Gilbert {
        /// EPSILON:GAMMA.
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
        gilbert: Option<String>,
        /// Evaluate an N×N grid of (ε, γ) = (i/(N+1), j/(N+1)).
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Every realisable Markov type of length n with class sizes and bounds.
    Types {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        n: usize,
    },
    /// Average failure bound of random stabilizer codes.
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Code lengths, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Rate in the selected units; k = ⌈R n⌉.
        #[arg(long, conflicts_with = "k", required_unless_present = "k")]
        rate: Option<f64>,
        /// Number of logical systems, overriding --rate.
        #[arg(long)]
        k: Option<usize>,
        /// Number of random codes per length.
        #[arg(long, conflicts_with = "exhaustive", required_unless_present = "exhaustive")]
        samples: Option<usize>,
        /// Average over every code instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Pauli distribution of a single-system channel.
    Twirl {
        /// Kraus file (JSON).
        #[arg(long, conflicts_with = "depolarizing", required_unless_present = "depolarizing")]
        kraus: Option<PathBuf>,
        /// Built-in Weyl-aligned depolarizing map with this error probability.
        #[arg(long)]
        depolarizing: Option<f64>,
        /// Dimension for --depolarizing.
        #[arg(long, default_value_t = 2)]
        d: u32,
    },
    /// Counting identity over all self-orthogonal subspaces.
    CheckCounting {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
    },
}

/// Column-oriented result with free-form metadata.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub metadata: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.push((key.to_string(), value.into()));
    }
}

fn num(x: f64) -> Value {
    // Non-finite values have no JSON number; keep them as text.
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(format!("{x}")), Value::Number)
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Parses arguments, runs, and writes the result.
pub fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let text = render(cli.clone())?;
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Runs the subcommand and formats its output.
pub fn render(mut cli: Cli) -> anyhow::Result<String> {
    resolve_seed(&mut cli);
    let table = execute(&cli)?;
    let config = serde_json::to_value(&cli)?;
    match cli.out {
        Format::Csv => to_csv(&config, &table),
        Format::Json => to_json(&config, &table),
    }
}

fn resolve_seed(cli: &mut Cli) {
    let seed = match &mut cli.command {
        Command::Exponent { seed, .. } | Command::Simulate { seed, .. } => seed,
        _ => return,
    };
    if seed.is_none() {
        let s: u64 = rand::random();
        eprintln!("generated seed {s}");
        *seed = Some(s);
    }
}

fn to_csv(config: &Value, table: &Table) -> anyhow::Result<String> {
    let mut out = format!("# schema_version={SCHEMA_VERSION}\n# config={config}\n");
    for (k, v) in &table.metadata {
        out.push_str(&format!("# {k}={}\n", cell_text(v)));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell_text))?;
    }
    out.push_str(std::str::from_utf8(&w.into_inner()?)?);
    Ok(out)
}

fn to_json(config: &Value, table: &Table) -> anyhow::Result<String> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Object(table.columns.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>()))
        .collect();
    let metadata: Map<String, Value> = table.metadata.iter().cloned().collect();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "metadata": metadata,
        "columns": table.columns,
        "rows": rows,
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc)?))
}

fn execute(cli: &Cli) -> anyhow::Result<Table> {
    let units = cli.units;
    match &cli.command {
        Command::Exponent {
            channel,
            rate,
            sweep,
            tol,
            restarts,
            seed,
        } => {
            let ch = channel.load()?;
            let scale = unit_scale(units, ch.d());
            let grid: Vec<f64> = match (rate, sweep) {
                (Some(r), _) => vec![*r],
                (None, Some(s)) => parse_sweep(s)?,
                (None, None) => bail!("one of --rate or --sweep is required"),
            };
            let grid_dary: Vec<f64> = grid.iter().map(|r| r / scale).collect();
            let options = ExponentOptions {
                tol: *tol,
                restarts: *restarts,
                seed: seed.expect("seed resolved"),
                ..ExponentOptions::default()
            };
            let threshold = capacity_threshold(ch.transition())?;
            let results = exponent_sweep(ch.transition(), &grid_dary, &options)?;
            let mut t = Table::new(&["R", "E", "threshold", "kkt_residual", "tilt", "iterations"]);
            t.meta("units", units_name(units));
            for (r, res) in grid.iter().zip(results) {
                t.rows.push(vec![
                    num(*r),
                    num(res.value * scale),
                    num(threshold * scale),
                    num(res.kkt_residual * scale),
                    num(res.tilt),
                    json!(res.iterations),
                ]);
            }
            Ok(t)
        }
        Command::Capacity { channel } => {
            let ch = channel.load()?;
            let scale = unit_scale(units, ch.d());
            let mut t = Table::new(&["capacity_lower_bound"]);
            t.meta("units", units_name(units));
            t.meta("d", ch.d());
            t.rows.push(vec![num(capacity_threshold(ch.transition())? * scale)]);
            Ok(t)
        }
        Command::Gilbert { gilbert, grid } => {
            let points: Vec<(f64, f64)> = match (gilbert, grid) {
                (Some(s), _) => vec![parse_gilbert_spec(s)?],
                (None, Some(0)) => bail!("--grid must be positive"),
                (None, Some(n)) => {
                    let step = 1.0 / (*n as f64 + 1.0);
                    (1..=*n)
                        .flat_map(|i| (1..=*n).map(move |j| (i as f64 * step, j as f64 * step)))
                        .collect()
                }
                (None, None) => bail!("one of --gilbert or --grid is required"),
            };
            // Both forms are reported in bits, as the closed form is.
            let mut t = Table::new(&["epsilon", "gamma", "q0", "q1", "q2", "q3", "closed_form_bits", "stationary_path_bits", "abs_diff"]);
            for (e, g) in points {
                let ch = gilbert_channel(e, g)?;
                let q = ch.stationary_distribution()?;
                let closed = gilbert_capacity_bound(e, g)?;
                let path = 1.0 - conditional_entropy(ch.transition(), &q);
                let mut row = vec![num(e), num(g)];
                row.extend(q.iter().map(|&x| num(x)));
                row.extend([num(closed), num(path), num((closed - path).abs())]);
                t.rows.push(row);
            }
            Ok(t)
        }
        Command::Types { channel, n } => {
            let ch = channel.load()?;
            let scale = unit_scale(units, ch.d());
            let m = ch.m();
            let mut cols = vec!["n".to_string(), "initial".to_string()];
            for u in 0..m {
                for v in 0..m {
                    cols.push(format!("c_{u}_{v}"));
                }
            }
            cols.extend(["class_size", "Hc", "D", "prob", "eq3_bound", "eq4_bound"].map(String::from));
            let mut t = Table {
                columns: cols,
                ..Table::default()
            };
            t.meta("units", units_name(units));
            for q in enumerate_types(m, *n, None)? {
                let mut row = vec![json!(n), json!(q.initial())];
                row.extend(q.counts().iter().map(|&c| json!(c)));
                let size = type_class_size(&q)?;
                let size = u64::try_from(size).map_or_else(|_| Value::String(size.to_string()), |s| json!(s));
                row.extend([
                    size,
                    num(q.conditional_entropy(ch.d()) * scale),
                    num(kl_conditional(&q.joint(), ch.transition()) * scale),
                    num(type_probability(&ch, &q)?),
                    num(class_size_bound(&q, ch.d())),
                    num(type_probability_bound(&ch, &q)),
                ]);
                t.rows.push(row);
            }
            Ok(t)
        }
        Command::Simulate {
            channel,
            n,
            rate,
            k,
            samples,
            exhaustive,
            seed,
        } => {
            let ch = channel.load()?;
            let scale = unit_scale(units, ch.d());
            let seed = seed.expect("seed resolved");
            let mode = match (samples, exhaustive) {
                (_, true) => EnsembleMode::Exhaustive,
                (Some(count), false) => EnsembleMode::Sampled { count: *count, seed },
                (None, false) => bail!("one of --samples or --exhaustive is required"),
            };
            let mut t = Table::new(&["n", "k", "R", "samples", "mean_failure_bound", "ci95", "analytic_bound", "seed"]);
            t.meta("units", units_name(units));
            let mut points = Vec::new();
            for &len in n {
                let dim = match (k, rate) {
                    (Some(k), _) => *k,
                    (None, Some(r)) => code_dimension(len, r / scale),
                    (None, None) => bail!("one of --rate or --k is required"),
                };
                let report = ensemble_average(len, dim, &ch, mode)?;
                points.push((len, report.mean));
                t.rows.push(vec![
                    json!(len),
                    json!(dim),
                    num(report.rate * scale),
                    json!(report.samples),
                    num(report.mean),
                    num(report.ci95),
                    report.analytic_bound.map_or(Value::Null, num),
                    json!(seed),
                ]);
            }
            if points.len() >= 3 {
                match exponent_fit(&points, ch.d()) {
                    Ok(fit) => match fit.outcome {
                        FitOutcome::ExactZero => t.meta("exponent_fit", "exact zero, exponent unbounded"),
                        FitOutcome::Slope { slope, rms_residual, .. } => {
                            t.meta("exponent_fit_slope", num(slope * scale));
                            t.meta("exponent_fit_rms_residual", num(rms_residual * scale));
                            if !fit.excluded.is_empty() {
                                t.meta("exponent_fit_excluded_n", format!("{:?}", fit.excluded));
                            }
                        }
                    },
                    Err(e) => t.meta("exponent_fit", format!("unavailable: {e}")),
                }
            }
            Ok(t)
        }
        Command::Twirl { kraus, depolarizing, d } => {
            let map = match (kraus, depolarizing) {
                (Some(path), _) => load_kraus(path)?,
                (None, Some(e)) => {
                    let m = (*d * *d) as usize;
                    let mut probs = vec![e / (m as f64 - 1.0); m];
                    probs[0] = 1.0 - e;
                    weyl_kraus_map(*d, &probs)?
                }
                (None, None) => bail!("one of --kraus or --depolarizing is required"),
            };
            let p = pauli_twirl(&map);
            let d = map.d() as usize;
            let mut t = Table::new(&["symbol", "i", "j", "probability"]);
            t.meta("d", map.d());
            t.meta("sum", num(p.iter().sum()));
            for (s, &x) in p.iter().enumerate() {
                t.rows.push(vec![json!(s), json!(s % d), json!(s / d), num(x)]);
            }
            Ok(t)
        }
        Command::CheckCounting { n, k, d } => {
            let r = counting_ratio_check(*n, *k, *d)?;
            let zero = r.counts.first().copied().unwrap_or(0);
            let mut t = Table::new(&[
                "n", "k", "d", "ensemble_size", "numerator", "denominator", "ratio", "mismatches", "zero_count", "result",
            ]);
            t.rows.push(vec![
                json!(n),
                json!(k),
                json!(d),
                json!(r.ensemble_size),
                json!(r.expected.0),
                json!(r.expected.1),
                Value::String(format!("{:.6}", r.ratio())),
                json!(r.mismatches),
                json!(zero),
                Value::String(if r.passed() { "PASS" } else { "FAIL" }.into()),
            ]);
            Ok(t)
        }
    }
}

fn unit_scale(units: Units, d: u32) -> f64 {
    match units {
        Units::Dary => 1.0,
        Units::Bits => (d as f64).log2(),
    }
}

fn units_name(units: Units) -> &'static str {
    match units {
        Units::Dary => "dary",
        Units::Bits => "bits",
    }
}
