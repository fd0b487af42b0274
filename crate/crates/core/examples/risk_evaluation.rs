//! Score a few ego velocity profiles against one crossing car with the
//! survival-weighted risk and benefit terms.
//!
//!     cargo run --example risk_evaluation

use ropt::profiles::{extrapolate_other, rollout, FixedProfile, RampProfile, VelocityProfile};
use ropt::risk::{collision_probability, evaluate, UncertaintyEllipse};
use ropt::scenario::{Scenario, ScenarioConfig};
use ropt::geometry::Point;

fn main() -> ropt::Result<()> {
    let a = UncertaintyEllipse::new(Point::new(0.0, 0.0), 1.0, 0.3, 0.0)?;
    let b = UncertaintyEllipse::new(Point::new(2.0, 0.5), 1.2, 0.3, 0.4)?;
    println!("two ellipses 2 m apart: P_coll = {:.4e}", collision_probability(&a, &b)?);

    let scenario = Scenario::build(ScenarioConfig::default())?;
    let cfg = &scenario.config.ropt;
    let rc = &cfg.rollout;

    // a main-road car 40 m upstream of the conflict point at traffic speed
    let v_f = scenario.config.traffic.speed;
    let l_car = scenario.conflict_main - 40.0;
    let other = extrapolate_other(&scenario.main_path.pose_at(l_car)?, v_f, &scenario.main_path, rc)?;

    let candidates = [
        ("stop", VelocityProfile::Fixed(FixedProfile::stop(0.0, cfg.optimizer.stop_decel))),
        ("go now", VelocityProfile::Fixed(FixedProfile::accelerate(0.0, v_f, cfg.optimizer.accelerate))),
        (
            "wait, then go",
            VelocityProfile::Ramp(RampProfile::double_ramp(0.0, 0.5, 10.0, 4.0, cfg.optimizer.ramp_duration)),
        ),
    ];
    println!("{:>14} {:>12} {:>10} {:>12} {:>10}", "profile", "risk (€)", "benefit", "cost", "S(T)");
    for (name, profile) in &candidates {
        let ego = rollout(profile, &scenario.ego_path, scenario.stop_line, rc)?;
        let r = evaluate(&ego, std::slice::from_ref(&other), &cfg.risk, &cfg.benefit)?;
        let survival = r.survival();
        println!(
            "{name:>14} {:12.4} {:10.4} {:12.4} {:10.4}",
            r.risk,
            r.benefit,
            r.cost,
            survival.last().copied().unwrap_or(1.0)
        );
    }
    Ok(())
}
