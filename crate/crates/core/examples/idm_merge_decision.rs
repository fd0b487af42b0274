//! Car following with the IDM, then the IIDM and predictive IIDM merge
//! decisions for a handful of gaps.
//!
//!     cargo run --example idm_merge_decision

use ropt::idm::{iidm_decide, predictive_iidm_decide, IdmParams, Leader, MainCar, MergeGeometry, MergeModels};
use ropt::scenario::{Scenario, ScenarioConfig};

fn main() -> ropt::Result<()> {
    let idm = IdmParams::default();
    println!("IDM accelerations at v=8 m/s, v_c=10 m/s:");
    for gap in [5.0, 10.0, 20.0, 40.0] {
        let a = idm.accel(8.0, 10.0, Some(Leader { gap, velocity: 8.0 }))?;
        println!("  gap {gap:5.1} m -> {a:7.3} m/s²");
    }
    println!("  free road      -> {:7.3} m/s²", idm.accel(8.0, 10.0, None)?);
    if let Some(s) = idm.equilibrium_gap(8.0, 10.0) {
        println!("  equilibrium gap at 8 m/s: {s:.3} m");
    }

    let scenario = Scenario::build(ScenarioConfig::default())?;
    let cfg = &scenario.config;
    println!(
        "curve-limited cruise speed at the turn: {:.2} m/s",
        cfg.ego_idm.curve_cruise_velocity(&scenario.ego_path, scenario.stop_line)
    );

    let geometry = MergeGeometry {
        ego_path: &scenario.ego_path,
        stop_line: scenario.stop_line,
        conflict_ego: scenario.conflict_ego,
        conflict_main: scenario.conflict_main,
    };
    let v_f = cfg.traffic.speed;
    for p in [0.5, 2.0] {
        let mut params = cfg.iidm;
        params.politeness = p;
        let models = MergeModels {
            ego: &cfg.ego_idm,
            follower: &cfg.follower_idm,
            params: &params,
        };
        println!("politeness {p}:");
        for follower_dist in [10.0, 25.0, 45.0, 70.0] {
            // follower upstream of the conflict point, leader 60 m past it
            let cars = [
                MainCar { longitudinal: scenario.conflict_main + 60.0, velocity: v_f },
                MainCar { longitudinal: scenario.conflict_main - follower_dist, velocity: v_f },
            ];
            let now = iidm_decide(&geometry, scenario.stop_line, 0.0, &cars, &models);
            let ahead = predictive_iidm_decide(&geometry, scenario.stop_line, 0.0, &cars, &models);
            println!(
                "  follower {follower_dist:4.0} m back: incentive {:6.3} follower accel {:>7} -> iidm {} / predictive {}",
                now.incentive,
                now.follower_accel.map_or("-".into(), |a| format!("{a:.3}")),
                if now.accept() { "go" } else { "wait" },
                if ahead.accept() { "go" } else { "wait" },
            );
        }
    }
    Ok(())
}
