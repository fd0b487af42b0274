//! Build the T-intersection paths and inspect arclength, curvature and the
//! conflict point.
//!
//!     cargo run --example path_geometry

use ropt::geometry::{find_intersection, Point, PathSketch};
use ropt::scenario::{Scenario, ScenarioConfig};

fn main() -> ropt::Result<()> {
    let scenario = Scenario::build(ScenarioConfig::default())?;
    let ego = &scenario.ego_path;
    println!(
        "ego path: {} points, {:.1} m, stop line at {:.1} m",
        ego.len(),
        ego.total_length(),
        scenario.stop_line
    );
    println!(
        "conflict point ({:.2}, {:.2}) at ego l={:.2} m, main l={:.2} m, zone [{:.1}, {:.1}]",
        scenario.conflict_point.x,
        scenario.conflict_point.y,
        scenario.conflict_ego,
        scenario.conflict_main,
        scenario.conflict_zone.0,
        scenario.conflict_zone.1
    );

    println!("    l       x       y   heading  curvature");
    let mut l = 0.0;
    while l <= ego.total_length() {
        let p = ego.pose_at(l)?;
        println!(
            "{l:5.1} {:7.2} {:7.2} {:9.3} {:10.4}",
            p.position.x, p.position.y, p.heading, p.curvature
        );
        l += 10.0;
    }

    // a hand-built pair of crossing paths
    let a = PathSketch::new(Point::new(0.0, -20.0), std::f64::consts::FRAC_PI_2, 0.5)
        .straight(40.0)
        .build()?;
    let b = PathSketch::new(Point::new(-20.0, 5.0), 0.0, 0.5).straight(40.0).build()?;
    if let Some(ix) = find_intersection(&a, &b) {
        println!(
            "crossing at ({:.2}, {:.2}), l_a={:.2}, l_b={:.2}",
            ix.position.x, ix.position.y, ix.arclength_a, ix.arclength_b
        );
    }

    // curvature of the turn arc should be close to 1/radius
    let r = scenario.config.layout.turn_radius;
    let mid = scenario.stop_line + 0.25 * std::f64::consts::PI * r;
    println!(
        "curvature mid-turn {:.4} (1/r = {:.4})",
        ego.curvature_at(mid).abs(),
        1.0 / r
    );
    Ok(())
}
