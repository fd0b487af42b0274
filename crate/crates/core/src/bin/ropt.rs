use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ropt::acceptance;
use ropt::eval::{
    self, append_episode, sweep_to_dir, workers_from_env, EpisodeRecord, SweepProfile, SweepSpec, WORKERS_ENV,
};
use ropt::scenario::{Scenario, ScenarioConfig};
use ropt::sim::{run_episode, EpisodeOptions, PlannerKind};

#[derive(Parser)]
#[command(name = "ropt", version, about = "Merge-in planners and their evaluation at a T-intersection")]
#[command(after_help = "Sweeps and checks use as many workers as the environment variable ROPT_WORKERS says, \
                        or one per core when it is unset.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and print its events.
    Episode(EpisodeArgs),
    /// Run a parameter sweep and write episode, stats and plot-data CSVs.
    Sweep(SweepArgs),
    /// Run the acceptance suite, one line per criterion.
    Check(CheckArgs),
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario TOML; built-in defaults when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

impl ScenarioArg {
    fn load(&self) -> anyhow::Result<Scenario> {
        let config = match &self.scenario {
            Some(p) => ScenarioConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => ScenarioConfig::default(),
        };
        Ok(Scenario::build(config)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Desk,
    Paper,
}

impl From<Profile> for SweepProfile {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Desk => SweepProfile::Desk,
            Profile::Paper => SweepProfile::Paper,
        }
    }
}

#[derive(Args)]
struct EpisodeArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// ropt, iidm or piidm.
    #[arg(long)]
    planner: PlannerKind,
    /// Mean headway (s); the scenario value when omitted.
    #[arg(long)]
    lambda: Option<f64>,
    /// Politeness of the IIDM planners.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// ROPT travel benefit (€/km).
    #[arg(long, default_value_t = 1.0)]
    bt: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for trace.csv, events.csv and the appended episodes.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also record every ROPT planning cycle (plans.csv).
    #[arg(long)]
    diagnostics: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long, value_enum, default_value = "desk")]
    profile: Profile,
    /// Restrict to these planners (comma separated).
    #[arg(long, value_delimiter = ',')]
    planner: Vec<PlannerKind>,
    /// Override the mean headways (comma separated, s).
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Override the politeness values (comma separated).
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Override the travel benefits (comma separated, €/km).
    #[arg(long, value_delimiter = ',')]
    bt: Vec<f64>,
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long, value_enum, default_value = "desk")]
    profile: Profile,
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the sweep CSVs here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Episode(a) => episode(a),
        Command::Sweep(a) => sweep(a),
        Command::Check(a) => check(a),
    }
}

fn episode(a: EpisodeArgs) -> anyhow::Result<ExitCode> {
    let scenario = a.scenario.load()?;
    let lambda = a.lambda.unwrap_or(scenario.config.traffic.lambda);
    let scenario = scenario.with_lambda(lambda)?;
    let param = match a.planner {
        PlannerKind::Ropt => a.bt,
        PlannerKind::Iidm | PlannerKind::PredictiveIidm => a.p,
    };
    let options = EpisodeOptions {
        trace: true,
        diagnostics: a.diagnostics,
    };
    let o = run_episode(&scenario, lambda, a.planner.with_parameter(param), a.seed, options)?;
    println!(
        "{} {}={param} lambda={lambda} seed={}: merged={} crash={} starved={} duration={:.1}s",
        a.planner,
        a.planner.parameter_name(),
        a.seed,
        o.merged,
        o.crash,
        o.starved,
        o.duration
    );
    for e in &o.events {
        println!("  {:7.1}  {}", e.time, e.kind);
    }
    println!(
        "d_back_min={} d_front_min={} n_gap={} t_gap={}",
        opt(o.d_back_min),
        opt(o.d_front_min),
        o.n_gap.map_or("-".into(), |n| n.to_string()),
        opt(o.t_gap)
    );
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
        eval::write_trace(&o.trace, BufWriter::new(File::create(dir.join("trace.csv"))?))?;
        eval::write_events(&o.events, BufWriter::new(File::create(dir.join("events.csv"))?))?;
        if a.diagnostics {
            eval::write_plans(&o.plans, BufWriter::new(File::create(dir.join("plans.csv"))?))?;
        }
        append_episode(&EpisodeRecord::from_outcome(&o, 0), dir.join(eval::EPISODES_FILE))?;
        println!("wrote {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn spec_from(profile: Profile, runs: Option<u32>, seed: Option<u64>) -> SweepSpec {
    let mut spec = SweepSpec::profile(profile.into());
    if let Some(r) = runs {
        spec.runs = r;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec
}

fn workers() -> anyhow::Result<usize> {
    workers_from_env().with_context(|| format!("reading {WORKERS_ENV}"))
}

fn sweep(a: SweepArgs) -> anyhow::Result<ExitCode> {
    let scenario = a.scenario.load()?;
    let mut spec = spec_from(a.profile, a.runs, a.seed);
    if !a.planner.is_empty() {
        spec.planners = a.planner;
    }
    if !a.lambda.is_empty() {
        spec.lambdas = a.lambda;
    }
    if !a.p.is_empty() {
        spec.politeness = a.p;
    }
    if !a.bt.is_empty() {
        spec.travel_benefits = a.bt;
    }
    let workers = workers()?;
    let t = std::time::Instant::now();
    let (records, stats) = sweep_to_dir(&scenario, &spec, workers, &a.out)?;
    println!(
        "{} episodes in {} cells, {:.1} s with {workers} workers",
        records.len(),
        stats.len(),
        t.elapsed().as_secs_f64()
    );
    println!("planner lambda param  crash  starve  d_back  d_back_lb  n_gap  t_gap");
    for s in &stats {
        println!(
            "{:7} {:6} {:5}  {:5.2}  {:6.2}  {:>6}  {:>9}  {:>5}  {:>5}",
            s.planner.name(),
            s.lambda,
            s.param,
            s.crash_rate,
            s.starvation_rate,
            opt(s.d_back_mean),
            opt(s.d_back_min),
            opt(s.n_gap_mean),
            opt(s.t_gap_mean)
        );
    }
    println!("wrote {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn check(a: CheckArgs) -> anyhow::Result<ExitCode> {
    let scenario = a.scenario.load()?;
    let spec = spec_from(a.profile, a.runs, a.seed);
    let workers = workers()?;
    let run = acceptance::run_acceptance_sweep(&scenario, &spec, workers)?;
    if let Some(dir) = &a.out {
        write_sweep(dir, &run)?;
    }
    let mut results = acceptance::sweep_criteria(&scenario, &run)?;
    results.push(acceptance::oracle_suite()?);
    results.push(acceptance::determinism(
        &scenario,
        &acceptance::determinism_spec(spec.seed),
        workers,
    )?);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        return Ok(ExitCode::FAILURE);
    }
    println!("all {} criteria passed", results.len());
    Ok(ExitCode::SUCCESS)
}

fn write_sweep(dir: &Path, run: &acceptance::SweepRun) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    eval::write_episodes_file(&run.records, dir.join(eval::EPISODES_FILE))?;
    eval::write_stats(&run.stats, BufWriter::new(File::create(dir.join(eval::STATS_FILE))?))?;
    eval::emit_plotdata(&run.stats, dir)?;
    if run.records.is_empty() {
        bail!("sweep produced no episodes");
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.2}"))
}
