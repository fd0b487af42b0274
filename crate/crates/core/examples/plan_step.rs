//! Run ROPT planning cycles for the ego waiting at the stop line while a
//! platoon approaches, and list every candidate of each cycle.
//!
//!     cargo run --release --example plan_step

use ropt::ropt::{plan_step, OtherVehicle, PlannerState, Snapshot};
use ropt::scenario::{Scenario, ScenarioConfig};

fn main() -> ropt::Result<()> {
    let scenario = Scenario::build(ScenarioConfig::default())?;
    let cfg = &scenario.config.ropt;
    let v_f = scenario.config.traffic.speed;

    let mut state = PlannerState::default();
    let mut ego_l = scenario.stop_line;
    let mut ego_v = 0.0;
    for cycle in 0..5 {
        let t = cycle as f64 * 0.5;
        // three cars, 25 m apart, the first 30 m before the conflict point
        let others = (0..3)
            .map(|i| OtherVehicle {
                path: &scenario.main_path,
                longitudinal: scenario.conflict_main - 30.0 - 25.0 * i as f64 + v_f * t,
                velocity: v_f,
            })
            .collect();
        let snapshot = Snapshot {
            ego_path: &scenario.ego_path,
            ego_longitudinal: ego_l,
            ego_velocity: ego_v,
            others,
        };
        let (plan, next) = plan_step(&snapshot, &state, cfg)?;
        println!("t={t:.1}s ego l={ego_l:.2} v={ego_v:.2}: selected {}", plan.kind);
        for c in &plan.candidates {
            let params = c
                .params
                .map(|p| format!("v_r1={:.2} v_r2={:.2} s_r2={:.2}", p[0], p[1], p[2]))
                .unwrap_or_default();
            println!(
                "    {:10} cost {:11.4} penalty {:8.2e} iters {:3} {params}",
                c.kind.to_string(),
                c.cost,
                c.penalty,
                c.iterations
            );
        }
        // follow the plan for half a second
        let dt = 0.5;
        let v_next = plan.profile.velocity_at(dt).max(0.0);
        ego_l += 0.5 * (ego_v + v_next) * dt;
        ego_v = v_next;
        state = next;
        for _ in 0..5 {
            state.advance(0.1);
        }
    }
    Ok(())
}
