//! Parameter sweeps, per-cell statistics and CSV output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path as FsPath;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::sim::{run_episode, Event, EpisodeOptions, EpisodeOutcome, PlanRecord, PlannerKind, TraceRow};

/// Environment variable that sets the number of sweep workers.
pub const WORKERS_ENV: &str = "ROPT_WORKERS";

/// Named sweep sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepProfile {
    /// Three values per axis and 50 runs per cell.
    Desk,
    /// Finer axes over the full parameter ranges and 200 runs per cell.
    Paper,
}

impl std::str::FromStr for SweepProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(SweepProfile::Desk),
            "paper" => Ok(SweepProfile::Paper),
            other => Err(Error::Input(format!("unknown profile '{other}' (desk, paper)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub planners: Vec<PlannerKind>,
    pub lambdas: Vec<f64>,
    /// Travel benefit values for ROPT (€/km).
    pub travel_benefits: Vec<f64>,
    /// Politeness values for the IIDM variants.
    pub politeness: Vec<f64>,
    pub runs: u32,
    pub seed: u64,
}

impl SweepSpec {
    pub fn profile(profile: SweepProfile) -> Self {
        match profile {
            SweepProfile::Desk => Self {
                planners: PlannerKind::ALL.to_vec(),
                lambdas: vec![2.0, 3.5, 5.0],
                travel_benefits: vec![0.1, 1.0, 10.0],
                politeness: vec![0.5, 1.0, 2.0],
                runs: 50,
                seed: 1,
            },
            SweepProfile::Paper => Self {
                planners: PlannerKind::ALL.to_vec(),
                lambdas: vec![2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0],
                travel_benefits: vec![0.1, 0.3, 1.0, 3.0, 10.0],
                politeness: vec![0.5, 1.0, 2.0, 3.0, 4.0],
                runs: 200,
                seed: 1,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lists_ok = !self.planners.is_empty()
            && !self.lambdas.is_empty()
            && (!self.planners.contains(&PlannerKind::Ropt) || !self.travel_benefits.is_empty())
            && (self.planners.iter().all(|k| *k == PlannerKind::Ropt) || !self.politeness.is_empty());
        if self.runs >= 1 && lists_ok {
            Ok(())
        } else {
            Err(Error::Config("sweep needs at least one run and non-empty value lists".into()))
        }
    }

    pub fn parameters(&self, kind: PlannerKind) -> &[f64] {
        match kind {
            PlannerKind::Ropt => &self.travel_benefits,
            PlannerKind::Iidm | PlannerKind::PredictiveIidm => &self.politeness,
        }
    }

    /// Every `(planner, λ, parameter)` cell in output order.
    pub fn cells(&self) -> Vec<(PlannerKind, f64, f64)> {
        let mut out = Vec::new();
        for &k in &self.planners {
            for &l in &self.lambdas {
                for &p in self.parameters(k) {
                    out.push((k, l, p));
                }
            }
        }
        out
    }
}

/// Seed of run `run` at mean headway `lambda`.
///
/// The seed depends on traffic only, so all planners and parameter values
/// face the same traffic realizations.
pub fn episode_seed(base: u64, lambda: f64, run: u32) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in base.to_le_bytes().into_iter().chain(lambda.to_bits().to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h.wrapping_add(run as u64)
}

/// One row of the episode CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub planner: PlannerKind,
    pub lambda: f64,
    pub param: f64,
    pub merged: bool,
    pub crash: bool,
    pub d_back_min: Option<f64>,
    pub d_front_min: Option<f64>,
    pub n_gap: Option<u32>,
    pub t_gap: Option<f64>,
    pub run: u32,
    pub starved: bool,
    pub duration: f64,
    pub merge_start: Option<f64>,
    pub merge_end: Option<f64>,
}

impl EpisodeRecord {
    pub fn from_outcome(o: &EpisodeOutcome, run: u32) -> Self {
        Self {
            seed: o.seed,
            planner: o.planner.kind,
            lambda: o.lambda,
            param: o.planner.parameter,
            merged: o.merged,
            crash: o.crash,
            d_back_min: o.d_back_min,
            d_front_min: o.d_front_min,
            n_gap: o.n_gap,
            t_gap: o.t_gap,
            run,
            starved: o.starved,
            duration: o.duration,
            merge_start: o.merge_start_time,
            merge_end: o.merge_end_time,
        }
    }
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available cores.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs every cell of `spec`. Records come back in cell order, then run
/// order, independent of the number of workers.
pub fn run_sweep(scenario: &Scenario, spec: &SweepSpec, workers: usize) -> Result<Vec<EpisodeRecord>> {
    spec.validate()?;
    let scenarios: BTreeMap<u64, Scenario> = spec
        .lambdas
        .iter()
        .map(|&l| Ok((l.to_bits(), scenario.with_lambda(l)?)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(PlannerKind, f64, f64, u32)> = spec
        .cells()
        .into_iter()
        .flat_map(|(k, l, p)| (0..spec.runs).map(move |r| (k, l, p, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(k, l, p, r)| {
                let s = &scenarios[&l.to_bits()];
                let seed = episode_seed(spec.seed, l, r);
                let o = run_episode(s, l, k.with_parameter(p), seed, EpisodeOptions::default())?;
                Ok(EpisodeRecord::from_outcome(&o, r))
            })
            .collect()
    })
}

fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

/// Simulation clock values, without the float noise of repeated `t += dt`.
fn fmt_time(t: f64) -> String {
    fmt_f64((t * 1e6).round() / 1e6)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    match s {
        "inf" => return Ok(Some(f64::INFINITY)),
        "-inf" => return Ok(Some(f64::NEG_INFINITY)),
        _ => {}
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::Input(format!("bad number '{s}'")))
}

pub const EPISODE_HEADER: [&str; 15] = [
    "seed",
    "planner",
    "lambda",
    "param",
    "merged",
    "crash",
    "d_back_min",
    "d_front_min",
    "n_gap",
    "t_gap",
    "run",
    "starved",
    "duration",
    "merge_start",
    "merge_end",
];

pub fn write_episodes<W: Write>(records: &[EpisodeRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EPISODE_HEADER)?;
    for r in records {
        w.write_record([
            r.seed.to_string(),
            r.planner.name().to_string(),
            fmt_f64(r.lambda),
            fmt_f64(r.param),
            r.merged.to_string(),
            r.crash.to_string(),
            fmt_opt(r.d_back_min),
            fmt_opt(r.d_front_min),
            r.n_gap.map(|n| n.to_string()).unwrap_or_default(),
            fmt_opt(r.t_gap),
            r.run.to_string(),
            r.starved.to_string(),
            fmt_f64(r.duration),
            fmt_opt(r.merge_start),
            fmt_opt(r.merge_end),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_episodes<R: Read>(input: R) -> Result<Vec<EpisodeRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(EPISODE_HEADER) {
        return Err(Error::Input(format!("unexpected episode header: {header:?}")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Input(format!("bad number '{s}'")));
    let flag = |s: &str| s.parse::<bool>().map_err(|_| Error::Input(format!("bad flag '{s}'")));
    let int = |s: &str| s.parse::<u64>().map_err(|_| Error::Input(format!("bad integer '{s}'")));
    rd.records()
        .map(|row| {
            let row = row?;
            if row.len() != EPISODE_HEADER.len() {
                return Err(Error::Input(format!("episode row has {} fields", row.len())));
            }
            Ok(EpisodeRecord {
                seed: int(&row[0])?,
                planner: row[1].parse()?,
                lambda: num(&row[2])?,
                param: num(&row[3])?,
                merged: flag(&row[4])?,
                crash: flag(&row[5])?,
                d_back_min: parse_opt(&row[6])?,
                d_front_min: parse_opt(&row[7])?,
                n_gap: if row[8].is_empty() { None } else { Some(int(&row[8])? as u32) },
                t_gap: parse_opt(&row[9])?,
                run: int(&row[10])? as u32,
                starved: flag(&row[11])?,
                duration: num(&row[12])?,
                merge_start: parse_opt(&row[13])?,
                merge_end: parse_opt(&row[14])?,
            })
        })
        .collect()
}

pub fn write_episodes_file(records: &[EpisodeRecord], path: impl AsRef<FsPath>) -> Result<()> {
    write_episodes(records, std::fs::File::create(path)?)
}

pub fn read_episodes_file(path: impl AsRef<FsPath>) -> Result<Vec<EpisodeRecord>> {
    read_episodes(std::fs::File::open(path)?)
}

/// Appends one row to an episode CSV, writing the header if the file is new
/// or empty.
pub fn append_episode(record: &EpisodeRecord, path: impl AsRef<FsPath>) -> Result<()> {
    let path = path.as_ref();
    let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
    let file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    let mut buf = Vec::new();
    write_episodes(std::slice::from_ref(record), &mut buf)?;
    let text = if fresh {
        &buf[..]
    } else {
        let header_end = buf.iter().position(|b| *b == b'\n').map_or(0, |i| i + 1);
        &buf[header_end..]
    };
    let mut w = BufWriter::new(file);
    w.write_all(text)?;
    w.flush()?;
    Ok(())
}

/// Ego trace of one episode: `time,ego_l,ego_x,ego_y,ego_v,ego_a,nearest,cars`.
pub fn write_trace<W: Write>(trace: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "ego_l", "ego_x", "ego_y", "ego_v", "ego_a", "nearest", "cars"])?;
    for r in trace {
        w.write_record([
            fmt_time(r.time),
            fmt_f64(r.ego_l),
            fmt_f64(r.ego_x),
            fmt_f64(r.ego_y),
            fmt_f64(r.ego_v),
            fmt_f64(r.ego_a),
            fmt_f64(r.nearest),
            r.cars.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Episode events: `time,event,detail`.
pub fn write_events<W: Write>(events: &[Event], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "event", "detail"])?;
    for e in events {
        let full = e.kind.to_string();
        let detail = full.strip_prefix(e.kind.name()).unwrap_or("").trim();
        w.write_record([fmt_time(e.time), e.kind.name().to_string(), detail.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// ROPT planning diagnostics in long format:
/// `time,candidate,cost,penalty,objective,selected`.
pub fn write_plans<W: Write>(plans: &[PlanRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "candidate", "cost", "penalty", "objective", "selected"])?;
    for p in plans {
        for (kind, cost, penalty) in &p.candidates {
            w.write_record([
                fmt_time(p.time),
                kind.to_string(),
                fmt_f64(*cost),
                fmt_f64(*penalty),
                fmt_f64(cost + penalty),
                (*kind == p.selected).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Statistics of one `(planner, λ, parameter)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub planner: PlannerKind,
    pub lambda: f64,
    pub param: f64,
    pub runs: usize,
    pub crashes: usize,
    pub starved: usize,
    pub crash_rate: f64,
    pub starvation_rate: f64,
    /// Distance statistics use merged runs without a crash only.
    pub d_back_mean: Option<f64>,
    /// Lower bound of d_back_min over those runs.
    pub d_back_min: Option<f64>,
    pub d_front_mean: Option<f64>,
    /// Starved runs count with the gaps they passed up before the timeout.
    pub n_gap_mean: Option<f64>,
    /// Over runs that were not starved and accepted a gap with a leader.
    pub t_gap_mean: Option<f64>,
    pub duration_mean: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Statistics of the rows of one cell; the cell coordinates are taken from
/// the first row.
pub fn cell_stats(rows: &[&EpisodeRecord]) -> Result<CellStats> {
    let first = rows
        .first()
        .ok_or_else(|| Error::Contract("cell statistics need at least one row".into()))?;
    let n = rows.len() as f64;
    let crashes = rows.iter().filter(|r| r.crash).count();
    let starved = rows.iter().filter(|r| r.starved).count();
    let safe = || rows.iter().filter(|r| r.merged && !r.crash);
    let finite = |d: &f64| d.is_finite();
    Ok(CellStats {
        planner: first.planner,
        lambda: first.lambda,
        param: first.param,
        runs: rows.len(),
        crashes,
        starved,
        crash_rate: crashes as f64 / n,
        starvation_rate: starved as f64 / n,
        d_back_mean: mean(safe().filter_map(|r| r.d_back_min).filter(finite)),
        d_back_min: safe().filter_map(|r| r.d_back_min).filter(finite).reduce(f64::min),
        d_front_mean: mean(safe().filter_map(|r| r.d_front_min).filter(finite)),
        n_gap_mean: mean(rows.iter().filter_map(|r| r.n_gap).map(f64::from)),
        t_gap_mean: mean(rows.iter().filter(|r| !r.starved).filter_map(|r| r.t_gap).filter(finite)),
        duration_mean: mean(rows.iter().map(|r| r.duration)).expect("non-empty"),
    })
}

/// Groups records by cell, keeping the order of first appearance.
pub fn aggregate(records: &[EpisodeRecord]) -> Result<Vec<CellStats>> {
    if records.is_empty() {
        return Err(Error::Contract("no episode rows to aggregate".into()));
    }
    let mut order: Vec<(PlannerKind, u64, u64)> = Vec::new();
    let mut groups: BTreeMap<(PlannerKind, u64, u64), Vec<&EpisodeRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.planner, r.lambda.to_bits(), r.param.to_bits());
        groups.entry(key).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        groups.get_mut(&key).expect("inserted").push(r);
    }
    order.into_iter().map(|key| cell_stats(&groups[&key])).collect()
}

pub fn write_stats<W: Write>(stats: &[CellStats], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "planner",
        "lambda",
        "param",
        "runs",
        "crashes",
        "starved",
        "crash_rate",
        "starvation_rate",
        "d_back_mean",
        "d_back_min",
        "d_front_mean",
        "n_gap_mean",
        "t_gap_mean",
        "duration_mean",
    ])?;
    for s in stats {
        w.write_record([
            s.planner.name().to_string(),
            fmt_f64(s.lambda),
            fmt_f64(s.param),
            s.runs.to_string(),
            s.crashes.to_string(),
            s.starved.to_string(),
            fmt_f64(s.crash_rate),
            fmt_f64(s.starvation_rate),
            fmt_opt(s.d_back_mean),
            fmt_opt(s.d_back_min),
            fmt_opt(s.d_front_mean),
            fmt_opt(s.n_gap_mean),
            fmt_opt(s.t_gap_mean),
            fmt_f64(s.duration_mean),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const RISK_PLOTDATA: &str = "risk_indicators.csv";
pub const UTILITY_PLOTDATA: &str = "utility_indicators.csv";
pub const EPISODES_FILE: &str = "episodes.csv";
pub const STATS_FILE: &str = "stats.csv";

type Getter = fn(&CellStats) -> Option<f64>;

const RISK_INDICATORS: [(&str, Getter); 5] = [
    ("crash_rate", |s| Some(s.crash_rate)),
    ("starvation_rate", |s| Some(s.starvation_rate)),
    ("d_back_mean", |s| s.d_back_mean),
    ("d_back_min", |s| s.d_back_min),
    ("d_front_mean", |s| s.d_front_mean),
];

const UTILITY_INDICATORS: [(&str, Getter); 3] = [
    ("n_gap_mean", |s| s.n_gap_mean),
    ("t_gap_mean", |s| s.t_gap_mean),
    ("duration_mean", |s| Some(s.duration_mean)),
];

fn write_indicators<W: Write>(stats: &[CellStats], indicators: &[(&str, Getter)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["indicator", "planner", "lambda", "param", "value"])?;
    for (name, get) in indicators {
        for s in stats {
            w.write_record([
                name.to_string(),
                s.planner.name().to_string(),
                fmt_f64(s.lambda),
                fmt_f64(s.param),
                fmt_opt(get(s)),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the risk and utility plot data into `dir`, in long format:
/// `indicator,planner,lambda,param,value`.
pub fn emit_plotdata(stats: &[CellStats], dir: impl AsRef<FsPath>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    write_indicators(stats, &RISK_INDICATORS, File::create(dir.join(RISK_PLOTDATA))?)?;
    write_indicators(stats, &UTILITY_INDICATORS, File::create(dir.join(UTILITY_PLOTDATA))?)
}

/// Runs a sweep and writes episodes, cell statistics and plot data into
/// `dir`. All output files are created before the first episode runs.
pub fn sweep_to_dir(
    scenario: &Scenario,
    spec: &SweepSpec,
    workers: usize,
    dir: impl AsRef<FsPath>,
) -> Result<(Vec<EpisodeRecord>, Vec<CellStats>)> {
    spec.validate()?;
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let episodes = File::create(dir.join(EPISODES_FILE))?;
    let stats_file = File::create(dir.join(STATS_FILE))?;
    let risk = File::create(dir.join(RISK_PLOTDATA))?;
    let utility = File::create(dir.join(UTILITY_PLOTDATA))?;
    let records = run_sweep(scenario, spec, workers)?;
    write_episodes(&records, BufWriter::new(episodes))?;
    let stats = aggregate(&records)?;
    write_stats(&stats, BufWriter::new(stats_file))?;
    write_indicators(&stats, &RISK_INDICATORS, BufWriter::new(risk))?;
    write_indicators(&stats, &UTILITY_INDICATORS, BufWriter::new(utility))?;
    Ok((records, stats))
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties. `None` when
/// either side is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}
