//! A small sweep over headways and planner parameters, aggregated per cell,
//! with the Spearman trend of the mean back distance over lambda.
//!
//!     cargo run --release --example parameter_sweep

use ropt::eval::{aggregate, run_sweep, spearman, SweepProfile, SweepSpec};
use ropt::scenario::{Scenario, ScenarioConfig};
use ropt::sim::PlannerKind;

fn main() -> ropt::Result<()> {
    let scenario = Scenario::build(ScenarioConfig::default())?;
    let mut spec = SweepSpec::profile(SweepProfile::Desk);
    spec.planners = vec![PlannerKind::Iidm, PlannerKind::PredictiveIidm];
    spec.lambdas = vec![2.0, 3.5, 5.0];
    spec.politeness = vec![0.5, 2.0];
    spec.runs = 10;

    let records = run_sweep(&scenario, &spec, 1)?;
    let stats = aggregate(&records)?;
    println!("planner  lambda  p    crash  d_back  n_gap  t_gap");
    for s in &stats {
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.2}"));
        println!(
            "{:7} {:6} {:4} {:6.2} {:>7} {:>6} {:>6}",
            s.planner.name(),
            s.lambda,
            s.param,
            s.crash_rate,
            fmt(s.d_back_mean),
            fmt(s.n_gap_mean),
            fmt(s.t_gap_mean)
        );
    }

    for planner in &spec.planners {
        for &p in &spec.politeness {
            let (x, y): (Vec<f64>, Vec<f64>) = stats
                .iter()
                .filter(|s| s.planner == *planner && s.param == p)
                .filter_map(|s| s.d_back_mean.map(|d| (s.lambda, d)))
                .unzip();
            if let Some(rho) = spearman(&x, &y) {
                println!("{} p={p}: spearman(lambda, d_back) = {rho:+.2}", planner.name());
            }
        }
    }
    Ok(())
}
