use proptest::prelude::*;

use ropt::eval::{read_episodes, spearman, write_episodes, EpisodeRecord};
use ropt::geometry::Point;
use ropt::idm::{IdmParams, Leader};
use ropt::profiles::RampProfile;
use ropt::risk::{collision_probability, survival, UncertaintyEllipse};
use ropt::scenario::ScenarioConfig;
use ropt::sim::PlannerKind;

fn planner() -> impl Strategy<Value = PlannerKind> {
    prop_oneof![
        Just(PlannerKind::Ropt),
        Just(PlannerKind::Iidm),
        Just(PlannerKind::PredictiveIidm)
    ]
}

fn record() -> impl Strategy<Value = EpisodeRecord> {
    (
        (any::<u64>(), planner(), 0.5..10.0f64, 0.0..20.0f64, any::<bool>(), any::<bool>()),
        (
            proptest::option::of(0.0..200.0f64),
            proptest::option::of(0.0..200.0f64),
            proptest::option::of(0..500u32),
            proptest::option::of(prop_oneof![0.1..60.0f64, Just(f64::INFINITY)]),
        ),
        (0..1000u32, any::<bool>(), 0.0..120.0f64),
        (proptest::option::of(0.0..120.0f64), proptest::option::of(0.0..120.0f64)),
    )
        .prop_map(|(a, b, c, d)| EpisodeRecord {
            seed: a.0,
            planner: a.1,
            lambda: a.2,
            param: a.3,
            merged: a.4,
            crash: a.5,
            d_back_min: b.0,
            d_front_min: b.1,
            n_gap: b.2,
            t_gap: b.3,
            run: c.0,
            starved: c.1,
            duration: c.2,
            merge_start: d.0,
            merge_end: d.1,
        })
}

fn ellipse() -> impl Strategy<Value = UncertaintyEllipse> {
    (-20.0..20.0f64, -20.0..20.0f64, 0.05..3.0f64, 1.0..5.0f64, -4.0..4.0f64)
        .prop_map(|(x, y, lat, ratio, h)| UncertaintyEllipse::new(Point::new(x, y), lat * ratio, lat, h).unwrap())
}

proptest! {
    #[test]
    fn episode_csv_round_trips(rows in proptest::collection::vec(record(), 0..20)) {
        let mut buf = Vec::new();
        write_episodes(&rows, &mut buf).unwrap();
        let back = read_episodes(buf.as_slice()).unwrap();
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn scenario_toml_round_trips(lambda in 1.5..10.0f64, speed in 1.0..30.0f64, dt in 0.01..0.5f64) {
        let mut c = ScenarioConfig::default();
        c.traffic.lambda = lambda;
        c.traffic.speed = speed;
        c.sim.dt = dt;
        c.sim.replan_period = dt;
        let text = c.to_toml_string().unwrap();
        prop_assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn survival_never_increases(rates in proptest::collection::vec(0.0..50.0f64, 1..300), dt in 0.01..1.0f64) {
        let s = survival(&rates, dt);
        prop_assert_eq!(s.len(), rates.len());
        prop_assert_eq!(s[0], 1.0);
        for w in s.windows(2) {
            prop_assert!(w[1] <= w[0] && w[1] >= 0.0);
        }
    }

    #[test]
    fn collision_probability_is_a_symmetric_probability(a in ellipse(), b in ellipse()) {
        let p = collision_probability(&a, &b).unwrap();
        let q = collision_probability(&b, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((p - q).abs() <= 1e-12 * p.max(1e-300));
    }

    #[test]
    fn collision_probability_falls_with_distance(a in ellipse(), shift in 0.1..10.0f64) {
        let near = UncertaintyEllipse { mean: a.mean + Point::new(shift, 0.0), ..a };
        let far = UncertaintyEllipse { mean: a.mean + Point::new(2.0 * shift, 0.0), ..a };
        prop_assert!(collision_probability(&a, &far).unwrap() <= collision_probability(&a, &near).unwrap());
    }

    #[test]
    fn double_ramp_stays_within_its_velocities(
        v0 in 0.0..12.0f64, v1 in 0.0..12.0f64, v2 in 0.0..12.0f64, start in 2.5..10.0f64, s in 0.0..15.0f64,
    ) {
        let p = RampProfile::double_ramp(v0, v1, v2, start, 2.5);
        let v = p.velocity_at(s);
        let lo = v0.min(v1).min(v2) - 1e-9;
        let hi = v0.max(v1).max(v2) + 1e-9;
        prop_assert!(v >= lo && v <= hi, "v({s}) = {v} outside [{lo}, {hi}]");
    }

    #[test]
    fn idm_brakes_harder_for_smaller_gaps(v in 0.0..15.0f64, v_l in 0.0..15.0f64, gap in 0.5..100.0f64) {
        let idm = IdmParams::default();
        let near = idm.accel(v, idm.cruise_speed, Some(Leader { gap, velocity: v_l })).unwrap();
        let far = idm.accel(v, idm.cruise_speed, Some(Leader { gap: gap * 1.5, velocity: v_l })).unwrap();
        prop_assert!(near <= far + 1e-12);
        prop_assert!(far <= idm.accel(v, idm.cruise_speed, None).unwrap() + 1e-12);
    }

    #[test]
    fn spearman_ignores_monotone_transforms(xs in proptest::collection::vec(-100.0..100.0f64, 3..30)) {
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x + 2.0 * x).collect();
        if let Some(rho) = spearman(&xs, &ys) {
            prop_assert!((rho - 1.0).abs() < 1e-9);
        }
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        if let Some(rho) = spearman(&xs, &neg) {
            prop_assert!((rho + 1.0).abs() < 1e-9);
        }
    }
}
