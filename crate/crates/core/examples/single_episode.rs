//! Simulate one merge-in episode per planner and print the event log and
//! gap metrics.
//!
//!     cargo run --release --example single_episode [lambda] [seed]

use ropt::scenario::{Scenario, ScenarioConfig};
use ropt::sim::{run_episode, EpisodeOptions, PlannerKind};

fn main() -> ropt::Result<()> {
    let mut args = std::env::args().skip(1);
    let lambda: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3.5);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let scenario = Scenario::build(ScenarioConfig::default())?.with_lambda(lambda)?;

    for (kind, param) in [
        (PlannerKind::Ropt, 1.0),
        (PlannerKind::Iidm, 0.5),
        (PlannerKind::PredictiveIidm, 0.5),
    ] {
        let o = run_episode(&scenario, lambda, kind.with_parameter(param), seed, EpisodeOptions::default())?;
        println!(
            "{kind} ({}={param}) lambda={lambda} seed={seed}: merged={} crash={} after {:.1} s",
            kind.parameter_name(),
            o.merged,
            o.crash,
            o.duration
        );
        for e in &o.events {
            println!("  {:6.1}s {}", e.time, e.kind);
        }
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.2}"));
        println!(
            "  d_back_min {} m, d_front_min {} m, n_gap {}, t_gap {} s\n",
            fmt(o.d_back_min),
            fmt(o.d_front_min),
            o.n_gap.map_or("-".into(), |n| n.to_string()),
            fmt(o.t_gap)
        );
    }
    Ok(())
}
