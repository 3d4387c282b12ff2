//! The `cghz` command line: `eval`, `sweep`, `random-compare`, `synthesize`.
//!
//! Tabular output is CSV with values in `{:.16e}` form, so identical command
//! lines give byte-identical files. Exit codes: 0 success, 1 usage or input
//! error, 2 resource cap, 3 engine disagreement or failed consistency check.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::analytic::{self, Threshold};
use crate::channels::NoiseParameter;
use crate::circuits::{gate_accounting, simulate_circuit, synthesize_full_preparation};
use crate::error::{Error, Result};
use crate::linalg::trace_norm;
use crate::oracle;
use crate::spectral::{self, Generator};
use crate::states::{cghz, ghz, random_orthogonal_pair, BlockConfig, Sign, StateVector};

/// Largest `N·m` for which `synthesize --verify` simulates the circuit.
pub const VERIFY_QUBIT_CAP: usize = 10;
/// Engines must agree to this absolute tolerance under `--engine all`.
pub const CROSS_ENGINE_TOL: f64 = 1e-8;
/// Slack on the strict comparison in `random-compare`.
pub const EXCEED_SLACK: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "cghz", version, about = "Noise robustness of concatenated GHZ states")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Evaluation engine; `auto` tries analytic, then spectral, then oracle.
    #[arg(long, value_enum, default_value_t = Engine::Auto, global = true)]
    pub engine: Engine,
    /// Emit JSON with run metadata instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Auto,
    Analytic,
    Spectral,
    Oracle,
    All,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Auto => "auto",
            Engine::Analytic => "analytic",
            Engine::Spectral => "spectral",
            Engine::Oracle => "oracle",
            Engine::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Coherence,
    Bound,
    Fidelity,
    Threshold,
    Negativity,
    Fisher,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::Coherence => "coherence",
            Quantity::Bound => "bound",
            Quantity::Fidelity => "fidelity",
            Quantity::Threshold => "threshold",
            Quantity::Negativity => "negativity",
            Quantity::Fisher => "fisher",
        }
    }

    /// Engines able to compute this quantity, in `auto` preference order.
    fn engines(self) -> &'static [Engine] {
        match self {
            Quantity::Coherence | Quantity::Fidelity => &[Engine::Analytic, Engine::Oracle],
            Quantity::Bound | Quantity::Threshold => &[Engine::Analytic],
            Quantity::Negativity | Quantity::Fisher => &[Engine::Spectral, Engine::Oracle],
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one quantity at one point.
    Eval(EvalArgs),
    /// Evaluate a quantity over a grid and write CSV.
    Sweep(SweepArgs),
    /// Compare the C-GHZ block against Haar-random orthogonal pairs.
    RandomCompare(RandomArgs),
    /// Emit the MS-gate preparation circuit.
    Synthesize(SynthArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub quantity: Quantity,
    /// Number of blocks.
    #[arg(long = "N")]
    pub blocks: Option<usize>,
    /// Qubits per block.
    #[arg(long = "m")]
    pub block_size: usize,
    /// Survival probability; alternatively give `--kappa` and `--t`.
    #[arg(long = "p", required_unless_present = "kappa")]
    pub p: Option<f64>,
    #[arg(long, requires = "t")]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_enum, default_value_t = Generator::BlockX)]
    pub generator: Generator,
    /// Search cap for `threshold`.
    #[arg(long, default_value_t = analytic::DEFAULT_THRESHOLD_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub quantity: Quantity,
    /// `a..b`, `2^a..2^b` or a comma list.
    #[arg(long = "N", default_value = "2")]
    pub blocks: String,
    /// Comma list, or `log2` for `m = ceil(log2 N)`.
    #[arg(long = "m")]
    pub block_size: String,
    /// Comma list.
    #[arg(long = "p")]
    pub p: String,
    #[arg(long, value_enum, default_value_t = Generator::BlockX)]
    pub generator: Generator,
    /// Append exponential tail fits for every `(m, p)` series.
    #[arg(long)]
    pub fit: bool,
    #[arg(long, default_value_t = analytic::DEFAULT_THRESHOLD_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long = "m", default_value_t = 3)]
    pub block_size: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long = "p")]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long = "N")]
    pub blocks: usize,
    #[arg(long = "m")]
    pub block_size: usize,
    /// Simulate the circuit and report the fidelity with the C-GHZ state.
    #[arg(long)]
    pub verify: bool,
}

/// A computed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Real(f64),
    Threshold(Threshold),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Real(v) => format!("{v:.16e}"),
            Value::Threshold(Threshold::Bounded(n)) => n.to_string(),
            Value::Threshold(Threshold::UnboundedInTestedRange { cap }) => format!(">{cap}"),
            Value::Threshold(Threshold::NotDistillable) => "none".into(),
        }
    }

    fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Real(v) => Some(*v),
            Value::Threshold(Threshold::Bounded(n)) => Some(*n as f64),
            _ => None,
        }
    }

    fn to_json(self) -> serde_json::Value {
        match self {
            Value::Real(v) => json!(v),
            Value::Threshold(Threshold::Bounded(n)) => json!(n),
            other => json!(other.render()),
        }
    }
}

/// One point of a quantity.
#[derive(Debug, Clone, Copy)]
pub struct Point {
    pub quantity: Quantity,
    pub blocks: Option<usize>,
    pub block_size: usize,
    pub p: NoiseParameter,
    pub generator: Generator,
    pub cap: u64,
}

impl Point {
    fn config(&self) -> Result<BlockConfig> {
        let n = self
            .blocks
            .ok_or_else(|| Error::Input(format!("{} needs --N", self.quantity.name())))?;
        BlockConfig::new(n, self.block_size)
    }
}

/// Evaluates `point` with one concrete engine.
pub fn evaluate(point: &Point, engine: Engine) -> Result<Value> {
    let q = point.quantity;
    if !q.engines().contains(&engine) {
        return Err(Error::Input(format!(
            "engine {} cannot evaluate {}",
            engine.name(),
            q.name()
        )));
    }
    let p = point.p;
    let real = |v: Result<f64>| v.map(Value::Real);
    match (q, engine) {
        (Quantity::Threshold, _) => Ok(Value::Threshold(analytic::distill_threshold_with_cap(
            point.block_size,
            p,
            point.cap,
        )?)),
        (Quantity::Coherence, Engine::Analytic) => real(Ok(analytic::coherence_norm(point.config()?, p))),
        (Quantity::Coherence, _) => real(Ok(trace_norm(&oracle::decohered_coherence(point.config()?, p)?))),
        (Quantity::Bound, _) => real(Ok(analytic::coherence_bound(point.config()?, p))),
        (Quantity::Fidelity, Engine::Analytic) => real(analytic::distill_fidelity(point.config()?, p)),
        (Quantity::Fidelity, _) => {
            let cfg = point.config()?;
            if cfg.blocks < 2 {
                return Err(Error::input("distillation needs at least two blocks"));
            }
            real(oracle::distill_protocol_average(cfg, p, (0, cfg.blocks - 1)).map(|(f, _)| f))
        }
        (Quantity::Negativity, Engine::Spectral) => real(spectral::negativity(point.config()?, p)),
        (Quantity::Negativity, _) => {
            let cfg = point.config()?;
            real(oracle::negativity_dense(&oracle::decohered_cghz(cfg, p)?, cfg))
        }
        (Quantity::Fisher, Engine::Spectral) => {
            real(spectral::fisher_information(point.config()?, p, point.generator))
        }
        (Quantity::Fisher, _) => {
            let cfg = point.config()?;
            let generator = match point.generator {
                Generator::BlockX => oracle::block_x_generator(cfg)?,
                Generator::SingleZ => oracle::single_z_generator(cfg)?,
            };
            real(oracle::fisher_dense(&oracle::decohered_cghz(cfg, p)?, &generator))
        }
    }
}

/// `auto`: first engine in preference order that is not over its resource cap.
fn evaluate_auto(point: &Point) -> (Engine, Result<Value>) {
    let engines = point.quantity.engines();
    let mut last = None;
    for &e in engines {
        match evaluate(point, e) {
            Err(err @ Error::Resource { .. }) => last = Some((e, Err(err))),
            other => return (e, other),
        }
    }
    last.expect("every quantity has an engine")
}

/// Evaluations of one point: one row, or one per engine under `all`.
struct Evaluated {
    rows: Vec<(Engine, Result<Value>)>,
    discrepancy: Option<f64>,
}

fn evaluate_point(point: &Point, engine: Engine) -> Evaluated {
    match engine {
        Engine::Auto => Evaluated { rows: vec![evaluate_auto(point)], discrepancy: None },
        Engine::All => {
            let rows: Vec<(Engine, Result<Value>)> = point
                .quantity
                .engines()
                .iter()
                .map(|&e| (e, evaluate(point, e)))
                .collect();
            let vals: Vec<f64> = rows
                .iter()
                .filter_map(|(_, r)| r.as_ref().ok().and_then(Value::as_f64))
                .collect();
            let discrepancy = (vals.len() > 1).then(|| {
                let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            });
            Evaluated { rows, discrepancy }
        }
        e => Evaluated { rows: vec![(e, evaluate(point, e))], discrepancy: None },
    }
}

/// `a..b`, `2^a..2^b` (inclusive) or `a,b,c`.
pub fn parse_block_spec(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::Input(format!("cannot parse N specification '{spec}'"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if let Some((lo, hi)) = spec.split_once("..") {
        let (lo, hi) = (lo.trim(), hi.trim());
        if let (Some(a), Some(b)) = (lo.strip_prefix("2^"), hi.strip_prefix("2^")) {
            let (a, b) = (num(a)?, num(b)?);
            if a > b || b >= usize::BITS as usize {
                return Err(bad());
            }
            return Ok((a..=b).map(|k| 1usize << k).collect());
        }
        let (a, b) = (num(lo)?, num(hi)?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    spec.split(',').map(num).collect()
}

/// Block sizes: a fixed list, or `ceil(log2 N)` per point.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockSizeSpec {
    List(Vec<usize>),
    Log2,
}

impl BlockSizeSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        if spec.trim() == "log2" {
            return Ok(BlockSizeSpec::Log2);
        }
        spec.split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Input(format!("cannot parse m list '{spec}'")))
            })
            .collect::<Result<_>>()
            .map(BlockSizeSpec::List)
    }
}

/// `max(1, ceil(log2 N))`.
pub fn log2_block_size(n: usize) -> usize {
    (n.next_power_of_two().trailing_zeros() as usize).max(1)
}

fn parse_p_list(spec: &str) -> Result<Vec<NoiseParameter>> {
    spec.split(',')
        .map(|s| {
            let v = s
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("cannot parse p list '{spec}'")))?;
            NoiseParameter::new(v)
        })
        .collect()
}

const HEADER: [&str; 7] = ["quantity", "N", "m", "p", "engine", "value", "error"];

fn csv_row(point: &Point, m_label: &str, engine: Engine, result: &Result<Value>) -> Vec<String> {
    let (value, error) = match result {
        Ok(v) => (v.render(), String::new()),
        Err(e) => (String::new(), e.to_string()),
    };
    vec![
        point.quantity.name().to_string(),
        point.blocks.map(|n| n.to_string()).unwrap_or_default(),
        m_label.to_string(),
        format!("{}", point.p.p()),
        engine.name().to_string(),
        value,
        error,
    ]
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource { .. } => 2,
        Error::Consistency(_) => 3,
        _ => 1,
    }
}

fn json_envelope(command: &str, seed: u64, records: serde_json::Value) -> serde_json::Value {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "timestamp_unix": now,
        "records": records,
    })
}

fn noise_from(p: Option<f64>, kappa: Option<f64>, t: Option<f64>) -> Result<NoiseParameter> {
    match (p, kappa, t) {
        (Some(p), None, _) => NoiseParameter::new(p),
        (None, Some(k), Some(t)) => NoiseParameter::from_rate(k, t),
        _ => Err(Error::input("give either --p or both --kappa and --t")),
    }
}

fn write_output(global: &GlobalOpts, stdout: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    match &global.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn cmd_eval(global: &GlobalOpts, args: &EvalArgs, stdout: &mut dyn Write) -> Result<()> {
    let point = Point {
        quantity: args.quantity,
        blocks: args.blocks,
        block_size: args.block_size,
        p: noise_from(args.p, args.kappa, args.t)?,
        generator: args.generator,
        cap: args.cap,
    };
    let start = Instant::now();
    let ev = evaluate_point(&point, global.engine);
    let runtime = start.elapsed().as_secs_f64();
    // a single-engine failure is the command's failure
    if ev.rows.len() == 1 {
        if let Err(e) = &ev.rows[0].1 {
            return Err(e.clone());
        }
    }
    let m_label = args.block_size.to_string();
    let bytes = if global.json {
        let records: Vec<serde_json::Value> = ev
            .rows
            .iter()
            .map(|(e, r)| {
                json!({
                    "quantity": point.quantity.name(),
                    "N": point.blocks,
                    "m": point.block_size,
                    "p": point.p.p(),
                    "engine": e.name(),
                    "value": r.as_ref().ok().map(|v| v.to_json()),
                    "error": r.as_ref().err().map(|e| e.to_string()),
                    "runtime_s": runtime,
                })
            })
            .collect();
        let mut env = json_envelope("eval", global.seed, json!(records));
        if let Some(d) = ev.discrepancy {
            env["max_discrepancy"] = json!(d);
        }
        let mut s = serde_json::to_vec_pretty(&env).map_err(|e| Error::Io(e.to_string()))?;
        s.push(b'\n');
        s
    } else {
        let mut rows: Vec<Vec<String>> = ev.rows.iter().map(|(e, r)| csv_row(&point, &m_label, *e, r)).collect();
        if global.engine == Engine::All {
            let d = ev.discrepancy.map(|d| format!("{d:.16e}")).unwrap_or_default();
            rows.iter_mut().for_each(|r| r.push(d.clone()));
            let mut header = HEADER.to_vec();
            header.push("max_discrepancy");
            csv_bytes(&header, &rows)?
        } else {
            csv_bytes(&HEADER, &rows)?
        }
    };
    write_output(global, stdout, &bytes)?;
    match ev.discrepancy {
        Some(d) if d > CROSS_ENGINE_TOL => Err(Error::Consistency(format!(
            "engines disagree by {d:e} (tolerance {CROSS_ENGINE_TOL:e})"
        ))),
        _ => Ok(()),
    }
}

/// CSV rows of a sweep in deterministic `(m, p, N)` order, one fit summary per
/// `(m, p)` series when requested, and the largest cross-engine discrepancy.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<Vec<String>>,
    pub fits: Vec<[String; 2]>,
    pub max_discrepancy: Option<f64>,
}

pub fn sweep_rows(args: &SweepArgs, engine: Engine) -> Result<SweepOutput> {
    let ns = parse_block_spec(&args.blocks)?;
    let ms = BlockSizeSpec::parse(&args.block_size)?;
    let ps = parse_p_list(&args.p)?;
    let threshold = args.quantity == Quantity::Threshold;
    // series key: (m label, p); points within a series ordered by N
    let mut series: Vec<(String, NoiseParameter, Vec<Point>)> = Vec::new();
    let ms_list: Vec<Option<usize>> = match &ms {
        BlockSizeSpec::List(v) => v.iter().map(|&m| Some(m)).collect(),
        BlockSizeSpec::Log2 => vec![None],
    };
    for m in &ms_list {
        for &p in &ps {
            let label = m.map(|m| m.to_string()).unwrap_or_else(|| "log2".into());
            let blocks: Vec<Option<usize>> = if threshold { vec![None] } else { ns.iter().map(|&n| Some(n)).collect() };
            let points = blocks
                .into_iter()
                .map(|n| Point {
                    quantity: args.quantity,
                    blocks: n,
                    block_size: m.unwrap_or_else(|| log2_block_size(n.unwrap_or(2))),
                    p,
                    generator: args.generator,
                    cap: args.cap,
                })
                .collect();
            series.push((label, p, points));
        }
    }
    let flat: Vec<(usize, Point)> = series
        .iter()
        .enumerate()
        .flat_map(|(i, (_, _, pts))| pts.iter().map(move |pt| (i, *pt)))
        .collect();
    let evaluated: Vec<Evaluated> = flat.par_iter().map(|(_, pt)| evaluate_point(pt, engine)).collect();

    let mut rows = Vec::new();
    let mut worst: Option<f64> = None;
    let mut per_series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); series.len()];
    for ((i, pt), ev) in flat.iter().zip(&evaluated) {
        let label = match &ms {
            BlockSizeSpec::Log2 => pt.block_size.to_string(),
            _ => series[*i].0.clone(),
        };
        if let Some(d) = ev.discrepancy {
            worst = Some(worst.map_or(d, |w: f64| w.max(d)));
        }
        for (e, r) in &ev.rows {
            let mut row = csv_row(pt, &label, *e, r);
            if engine == Engine::All {
                row.push(ev.discrepancy.map(|d| format!("{d:.16e}")).unwrap_or_default());
            }
            rows.push(row);
        }
        if let (Some(n), Some(Ok(Value::Real(v)))) = (pt.blocks, ev.rows.first().map(|r| &r.1)) {
            per_series[*i].push((n as f64, *v));
        }
    }
    let mut fits = Vec::new();
    if args.fit {
        for ((label, p, _), pts) in series.iter().zip(&per_series) {
            let key = format!("{},{}", label, p.p());
            let text = match analytic::fit_exponential_tail(pts, None) {
                Ok(f) => format!(
                    "rate={:.16e};amplitude={:.16e};residual={:.16e};window={}..{};points={}",
                    f.rate, f.amplitude, f.residual, f.window.0, f.window.1, f.points
                ),
                Err(e) => format!("error={e}"),
            };
            fits.push([key, text]);
        }
    }
    Ok(SweepOutput { rows, fits, max_discrepancy: worst })
}

fn cmd_sweep(global: &GlobalOpts, args: &SweepArgs, stdout: &mut dyn Write) -> Result<()> {
    let SweepOutput { rows, fits, max_discrepancy: worst } = sweep_rows(args, global.engine)?;
    let bytes = if global.json {
        let header: Vec<&str> = HEADER.to_vec();
        let records: Vec<serde_json::Value> = rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, serde_json::Value> = header
                    .iter()
                    .zip(r)
                    .map(|(k, v)| (k.to_string(), json!(v)))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut env = json_envelope("sweep", global.seed, json!(records));
        if args.fit {
            env["fits"] = json!(fits.iter().map(|[k, v]| json!({"series": k, "fit": v})).collect::<Vec<_>>());
        }
        let mut s = serde_json::to_vec_pretty(&env).map_err(|e| Error::Io(e.to_string()))?;
        s.push(b'\n');
        s
    } else {
        let mut header = HEADER.to_vec();
        if global.engine == Engine::All {
            header.push("max_discrepancy");
        }
        let mut bytes = csv_bytes(&header, &rows)?;
        if args.fit {
            // fit block: one comment line per (m, p) series
            for [k, v] in &fits {
                bytes.extend_from_slice(format!("# fit m,p={k} {v}\n").as_bytes());
            }
        }
        bytes
    };
    write_output(global, stdout, &bytes)?;
    match worst {
        Some(d) if d > CROSS_ENGINE_TOL => Err(Error::Consistency(format!(
            "engines disagree by up to {d:e} (tolerance {CROSS_ENGINE_TOL:e})"
        ))),
        _ => Ok(()),
    }
}

/// Summary of a random-pair comparison.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RandomSummary {
    pub m: usize,
    pub p: f64,
    pub samples: usize,
    pub cghz_block_norm: f64,
    pub max_random_norm: f64,
    pub exceed_count: usize,
    pub exceed_fraction: f64,
}

/// Single-block coherence norms of the C-GHZ pair (sample 0) and
/// `samples - 1` Haar-random orthogonal pairs with per-sample seeds drawn from
/// `seed`. Returns `(sample seed, norm)` rows and the summary.
pub fn random_compare(m: usize, samples: usize, p: NoiseParameter, seed: u64) -> Result<(Vec<(u64, f64)>, RandomSummary)> {
    if !(1..=4).contains(&m) {
        return Err(Error::Input(format!("random-compare supports 1 <= m <= 4 (got {m})")));
    }
    if samples == 0 {
        return Err(Error::input("need at least one sample"));
    }
    let reference = analytic::coherence_norm_block(m, p)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (1..samples).map(|_| master.next_u64()).collect();
    let plus = ghz(m, Sign::Plus)?;
    let minus = ghz(m, Sign::Minus)?;
    let first = oracle::generic_coherence_norm(&plus, &minus, 1, p)?;
    let rest: Vec<Result<(u64, f64)>> = seeds
        .par_iter()
        .map(|&s| {
            let (a, b): (StateVector, StateVector) = random_orthogonal_pair(m, s)?;
            Ok((s, oracle::generic_coherence_norm(&a, &b, 1, p)?))
        })
        .collect();
    let mut rows = vec![(seed, first)];
    for r in rest {
        rows.push(r?);
    }
    let randoms = &rows[1..];
    let max_random = randoms.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let exceed = randoms.iter().filter(|r| r.1 > reference + EXCEED_SLACK).count();
    let summary = RandomSummary {
        m,
        p: p.p(),
        samples,
        cghz_block_norm: reference,
        max_random_norm: max_random,
        exceed_count: exceed,
        exceed_fraction: if randoms.is_empty() { 0.0 } else { exceed as f64 / randoms.len() as f64 },
    };
    Ok((rows, summary))
}

fn cmd_random(global: &GlobalOpts, args: &RandomArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let p = NoiseParameter::new(args.p)?;
    let (rows, summary) = random_compare(args.block_size, args.samples, p, global.seed)?;
    let reference = summary.cghz_block_norm;
    let bytes = if global.json {
        let recs: Vec<serde_json::Value> = rows
            .iter()
            .enumerate()
            .map(|(i, (s, v))| json!({"sample": i, "seed": s, "coherence_norm": v}))
            .collect();
        let mut env = json_envelope("random-compare", global.seed, json!(recs));
        env["summary"] = serde_json::to_value(&summary).map_err(|e| Error::Io(e.to_string()))?;
        let mut s = serde_json::to_vec_pretty(&env).map_err(|e| Error::Io(e.to_string()))?;
        s.push(b'\n');
        s
    } else {
        let table: Vec<Vec<String>> = rows
            .iter()
            .enumerate()
            .map(|(i, (s, v))| {
                let kind = if i == 0 { "cghz" } else { "random" };
                let exceeds = i > 0 && *v > reference + EXCEED_SLACK;
                vec![i.to_string(), kind.into(), s.to_string(), format!("{v:.16e}"), exceeds.to_string()]
            })
            .collect();
        csv_bytes(&["sample", "kind", "seed", "coherence_norm", "exceeds"], &table)?
    };
    write_output(global, stdout, &bytes)?;
    if !global.json {
        let sink: &mut dyn Write = if global.out.is_some() { stdout } else { stderr };
        writeln!(
            sink,
            "m={} p={} samples={} cghz={:.16e} max_random={:.16e} exceed={} fraction={}",
            summary.m,
            summary.p,
            summary.samples,
            summary.cghz_block_norm,
            summary.max_random_norm,
            summary.exceed_count,
            summary.exceed_fraction
        )?;
    }
    Ok(())
}

fn cmd_synthesize(global: &GlobalOpts, args: &SynthArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = BlockConfig::new(args.blocks, args.block_size)?;
    let circuit = synthesize_full_preparation(cfg);
    let acc = gate_accounting(&circuit);
    let fidelity = if !args.verify {
        None
    } else if cfg.total_qubits() > VERIFY_QUBIT_CAP {
        writeln!(
            stderr,
            "warning: verification skipped, N*m = {} exceeds {VERIFY_QUBIT_CAP}",
            cfg.total_qubits()
        )?;
        None
    } else {
        let out = simulate_circuit(&circuit, &StateVector::zero_state(cfg.total_qubits()))?;
        Some(out.fidelity(&cghz(cfg)?))
    };
    let report = format!(
        "N={} m={} ms_count={} zlayer_count={} local_count={} ms_phase={}pi{}",
        cfg.blocks,
        cfg.block_size,
        acc.ms_count,
        acc.zlayer_count,
        acc.local_count,
        acc.total_ms_phase,
        fidelity.map(|f| format!(" fidelity={f:.16e}")).unwrap_or_default()
    );
    if global.json {
        let env = json_envelope(
            "synthesize",
            global.seed,
            json!({
                "N": cfg.blocks,
                "m": cfg.block_size,
                "ms_count": acc.ms_count,
                "zlayer_count": acc.zlayer_count,
                "local_count": acc.local_count,
                "ms_phase_over_pi": acc.total_ms_phase.to_string(),
                "fidelity": fidelity,
                "circuit": circuit.export(),
            }),
        );
        let mut s = serde_json::to_vec_pretty(&env).map_err(|e| Error::Io(e.to_string()))?;
        s.push(b'\n');
        write_output(global, stdout, &s)?;
    } else {
        write_output(global, stdout, circuit.export().as_bytes())?;
        let sink: &mut dyn Write = if global.out.is_some() { stdout } else { stderr };
        writeln!(sink, "{report}")?;
    }
    if let Some(f) = fidelity {
        if f < 1.0 - 1e-10 {
            return Err(Error::Consistency(format!("prepared state fidelity {f} below 1 - 1e-10")));
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(&cli.global, a, stdout),
        Command::Sweep(a) => cmd_sweep(&cli.global, a, stdout),
        Command::RandomCompare(a) => cmd_random(&cli.global, a, stdout, stderr),
        Command::Synthesize(a) => cmd_synthesize(&cli.global, a, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("cghz").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn value_of(csv_text: &str) -> f64 {
        let line = csv_text.lines().nth(1).unwrap();
        line.split(',').nth(5).unwrap().parse().unwrap()
    }

    #[test]
    fn block_specs() {
        assert_eq!(parse_block_spec("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_block_spec("2^4..2^6").unwrap(), vec![16, 32, 64]);
        assert_eq!(parse_block_spec("3,7,9").unwrap(), vec![3, 7, 9]);
        assert!(parse_block_spec("5..2").is_err());
        assert!(parse_block_spec("x").is_err());
        assert_eq!(BlockSizeSpec::parse("log2").unwrap(), BlockSizeSpec::Log2);
        assert_eq!(BlockSizeSpec::parse("1,2").unwrap(), BlockSizeSpec::List(vec![1, 2]));
        assert_eq!((log2_block_size(1), log2_block_size(2), log2_block_size(5), log2_block_size(16)), (1, 1, 3, 4));
    }

    #[test]
    fn eval_examples() {
        let (code, out, _) = run_capture(&["eval", "coherence", "--N", "10", "--m", "1", "--p", "0.9"]);
        assert_eq!(code, 0);
        assert!((value_of(&out) - 0.9f64.powi(10)).abs() < 1e-14);

        let (code, out, _) = run_capture(&["eval", "threshold", "--m", "10", "--p", "0.9"]);
        assert_eq!(code, 0);
        let n: u64 = out.lines().nth(1).unwrap().split(',').nth(5).unwrap().parse().unwrap();
        assert!(n >= 1_000_000_000_000);

        let (code, out, _) = run_capture(&["eval", "negativity", "--N", "2", "--m", "2", "--p", "1"]);
        assert_eq!(code, 0);
        assert!((value_of(&out) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eval_engines() {
        let (code, out, _) = run_capture(&["--engine", "all", "eval", "fisher", "--N", "2", "--m", "2", "--p", "0.9"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out.lines().count(), 3);
        assert!(out.starts_with("quantity,N,m,p,engine,value,error,max_discrepancy"));

        let (code, _, err) = run_capture(&["--engine", "oracle", "eval", "negativity", "--N", "7", "--m", "2", "--p", "0.9"]);
        assert_eq!(code, 2, "{err}");
        assert!(err.contains("oracle"));

        // auto falls back from spectral to nothing, analytic first where it exists
        let (code, out, _) = run_capture(&["eval", "coherence", "--N", "1000000000000", "--m", "10", "--p", "0.9"]);
        assert_eq!(code, 0);
        assert!(out.contains(",analytic,"));

        let (code, _, _) = run_capture(&["--engine", "spectral", "eval", "bound", "--N", "2", "--m", "2", "--p", "0.9"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&["eval", "nonsense", "--m", "1", "--p", "0.5"]).0, 1);
        assert_eq!(run_capture(&["eval", "coherence", "--m", "1", "--p", "1.5", "--N", "2"]).0, 1);
        assert_eq!(run_capture(&["frobnicate"]).0, 1);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn rate_parameterization() {
        let (code, out, _) = run_capture(&["eval", "coherence", "--N", "1", "--m", "1", "--kappa", "0.5", "--t", "2"]);
        assert_eq!(code, 0);
        assert!((value_of(&out) - (-1f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn sweep_is_deterministic_and_ordered() {
        let args = ["sweep", "negativity", "--N", "2..6", "--m", "1,2", "--p", "0.9", "--fit"];
        let (c1, a, _) = run_capture(&args);
        let (c2, b, _) = run_capture(&args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(a, b);
        let rows: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        assert_eq!(rows.len(), 10);
        assert!(rows[0].starts_with("negativity,2,1,0.9,spectral,"));
        assert!(rows[5].starts_with("negativity,2,2,0.9,spectral,"));
        assert_eq!(a.lines().filter(|l| l.starts_with("# fit")).count(), 2);
    }

    #[test]
    fn sweep_records_row_errors() {
        let (code, out, _) = run_capture(&["--engine", "oracle", "sweep", "negativity", "--N", "5..7", "--m", "2", "--p", "0.9"]);
        assert_eq!(code, 0);
        let last = out.lines().last().unwrap();
        assert!(last.starts_with("negativity,7,2,") && last.contains("exceeds"), "{last}");
    }

    #[test]
    fn sweep_log2_block_sizes() {
        let (code, out, _) = run_capture(&["sweep", "coherence", "--N", "2^2..2^4", "--m", "log2", "--p", "0.9"]);
        assert_eq!(code, 0);
        let ms: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
        assert_eq!(ms, ["2", "3", "4"]);
    }

    #[test]
    fn random_compare_contract() {
        let (rows, summary) = random_compare(3, 50, NoiseParameter::new(0.9).unwrap(), 7).unwrap();
        assert_eq!(rows.len(), 50);
        assert!((rows[0].1 - summary.cghz_block_norm).abs() < 1e-12);
        assert_eq!(summary.exceed_count, 0);
        let (_, again) = random_compare(3, 50, NoiseParameter::new(0.9).unwrap(), 7).unwrap();
        assert_eq!(summary, again);
        let (rows, summary) = random_compare(3, 20, NoiseParameter::new(1.0).unwrap(), 1).unwrap();
        assert!(rows.iter().all(|r| (r.1 - 1.0).abs() < 1e-10));
        assert_eq!(summary.exceed_count, 0);
        assert!(random_compare(5, 10, NoiseParameter::new(0.9).unwrap(), 1).is_err());
    }

    #[test]
    fn synthesize_command() {
        let (code, out, err) = run_capture(&["synthesize", "--N", "2", "--m", "2", "--verify"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.starts_with("QUBITS 4\nMS 1/4\n"));
        assert!(err.contains("fidelity=") && err.contains("ms_phase=1/2pi"));

        let (code, _, err) = run_capture(&["synthesize", "--N", "8", "--m", "4"]);
        assert_eq!(code, 0);
        assert!(err.contains("ms_count=9 zlayer_count=7"), "{err}");

        let (code, _, err) = run_capture(&["synthesize", "--N", "4", "--m", "3", "--verify"]);
        assert_eq!(code, 0);
        assert!(err.contains("verification skipped"));
    }

    #[test]
    fn out_file_and_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let p = path.to_str().unwrap();
        let (code, out, _) = run_capture(&["--out", p, "eval", "bound", "--N", "1", "--m", "1", "--p", "0.9"]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("quantity,"));

        let (code, out, _) = run_capture(&["--json", "eval", "fidelity", "--N", "2", "--m", "1", "--p", "0.9"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["command"], "eval");
        assert!((v["records"][0]["value"].as_f64().unwrap() - 0.8575).abs() < 1e-12);
    }
}
