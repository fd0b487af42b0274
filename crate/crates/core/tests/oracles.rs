//! Independent reference computations for the risk terms, the IDM and the
//! simplex optimizer.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ropt::geometry::{PathId, PathPose, Point};
use ropt::idm::{IdmParams, Leader};
use ropt::profiles::{Trajectory, TrajectoryState};
use ropt::risk::{
    evaluate, evaluate_risk, gaussian_overlap, survival, BenefitWeights, RiskParams, SceneRisk, UncertaintyEllipse,
};
use ropt::ropt::{nelder_mead, NelderMeadConfig};

// Gauss-Legendre nodes and weights on [-1, 1].
const GL_X: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

fn cov(e: &UncertaintyEllipse) -> (f64, f64, f64) {
    let (s, c) = e.heading.sin_cos();
    let (l2, t2) = (e.sigma_lon.powi(2), e.sigma_lat.powi(2));
    (l2 * c * c + t2 * s * s, (l2 - t2) * s * c, l2 * s * s + t2 * c * c)
}

/// Log-density of a bivariate normal as `-(A y² - 2 B y + C)/2 - log norm`,
/// returned as the y-polynomial coefficients for fixed `x`.
fn y_poly(x: f64, mx: f64, my: f64, (sxx, sxy, syy): (f64, f64, f64)) -> (f64, f64, f64, f64) {
    let det = sxx * syy - sxy * sxy;
    let (ixx, ixy, iyy) = (syy / det, -sxy / det, sxx / det);
    let dx = x - mx;
    // q = ixx dx² + 2 ixy dx (y - my) + iyy (y - my)²
    let a = iyy;
    let b = iyy * my - ixy * dx;
    let c = ixx * dx * dx - 2.0 * ixy * dx * my + iyy * my * my;
    (a, b, c, 1.0 / (2.0 * PI * det.sqrt()))
}

/// Overlap integral with y integrated in closed form and x by composite
/// Gauss-Legendre.
fn overlap_by_quadrature(e1: &UncertaintyEllipse, e2: &UncertaintyEllipse) -> f64 {
    let (c1, c2) = (cov(e1), cov(e2));
    let sx = c1.0.sqrt().min(c2.0.sqrt());
    let centre = if c1.0 < c2.0 { e1.mean.x } else { e2.mean.x };
    let (lo, hi) = (centre - 12.0 * sx, centre + 12.0 * sx);
    let panels = 400;
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let mid = lo + (i as f64 + 0.5) * h;
        for (xi, wi) in GL_X.iter().zip(GL_W) {
            let x = mid + 0.5 * h * xi;
            let (a1, b1, k1, n1) = y_poly(x, e1.mean.x, e1.mean.y, c1);
            let (a2, b2, k2, n2) = y_poly(x, e2.mean.x, e2.mean.y, c2);
            let (a, b, c) = (a1 + a2, b1 + b2, k1 + k2);
            let g = n1 * n2 * (2.0 * PI / a).sqrt() * (-0.5 * (c - b * b / a)).exp();
            total += wi * 0.5 * h * g;
        }
    }
    total
}

fn random_ellipse(rng: &mut impl Rng, spread: f64) -> UncertaintyEllipse {
    let lat = rng.random_range(0.2..1.5);
    let lon = lat * rng.random_range(1.0..4.0);
    let mean = Point::new(rng.random_range(-spread..spread), rng.random_range(-spread..spread));
    UncertaintyEllipse::new(mean, lon, lat, rng.random_range(-PI..PI)).unwrap()
}

#[test]
fn closed_form_overlap_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = random_ellipse(&mut rng, 2.0);
        let b = random_ellipse(&mut rng, 2.0);
        let exact = gaussian_overlap(&a, &b).unwrap();
        let numeric = overlap_by_quadrature(&a, &b);
        worst = worst.max((exact - numeric).abs() / numeric);
    }
    assert!(worst <= 1e-6, "worst relative error {worst:e}");
}

#[test]
fn survival_of_random_rates_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.random_range(1..200);
        let rates: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..20.0)).collect();
        let s = survival(&rates, 0.1);
        assert_eq!(s[0], 1.0);
        assert!(s.windows(2).all(|w| w[1] <= w[0] && w[1] >= 0.0));
        // closed form at the last step
        let tail: f64 = rates[..n - 1].iter().sum::<f64>() * 0.1;
        assert_relative_eq!(s[n - 1], (-tail).exp(), max_relative = 1e-12);
    }
}

/// Gap at which the IDM acceleration vanishes, found by bisection.
fn bisect_equilibrium(idm: &IdmParams, v: f64, v_c: f64) -> f64 {
    let f = |s: f64| idm.accel(v, v_c, Some(Leader { gap: s, velocity: v })).unwrap();
    let (mut lo, mut hi) = (1e-3, 1e4);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn idm_equilibrium_gap_has_zero_acceleration() {
    let idm = IdmParams::default();
    for v in [0.5, 2.0, 5.0, 8.0, 9.5] {
        let s = idm.equilibrium_gap(v, idm.cruise_speed).unwrap();
        let a = idm.accel(v, idm.cruise_speed, Some(Leader { gap: s, velocity: v })).unwrap();
        assert!(a.abs() <= 1e-6, "v={v}: residual {a:e}");
        assert_relative_eq!(s, bisect_equilibrium(&idm, v, idm.cruise_speed), max_relative = 1e-9);
    }
    // no equilibrium at or above the desired speed
    assert!(idm.equilibrium_gap(idm.cruise_speed, idm.cruise_speed).is_none());
}

fn rosenbrock(x: &[f64]) -> f64 {
    (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
}

/// Textbook downhill simplex, kept separate from the library version.
fn reference_simplex(f: impl Fn(&[f64]) -> f64, x0: [f64; 2], iterations: usize) -> ([f64; 2], f64) {
    let mut s: Vec<([f64; 2], f64)> = [x0, [x0[0] + 0.5, x0[1]], [x0[0], x0[1] + 0.5]]
        .into_iter()
        .map(|p| (p, f(&p)))
        .collect();
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..iterations {
        s.sort_by(|a, b| a.1.total_cmp(&b.1));
        let c = [(s[0].0[0] + s[1].0[0]) / 2.0, (s[0].0[1] + s[1].0[1]) / 2.0];
        let worst = s[2].0;
        let r = lerp(c, worst, -1.0);
        let fr = f(&r);
        if fr < s[0].1 {
            let e = lerp(c, worst, -2.0);
            let fe = f(&e);
            s[2] = if fe < fr { (e, fe) } else { (r, fr) };
        } else if fr < s[1].1 {
            s[2] = (r, fr);
        } else {
            let k = if fr < s[2].1 { lerp(c, r, 0.5) } else { lerp(c, worst, 0.5) };
            let fk = f(&k);
            if fk < fr.min(s[2].1) {
                s[2] = (k, fk);
            } else {
                let best = s[0].0;
                for v in s.iter_mut().skip(1) {
                    v.0 = lerp(best, v.0, 0.5);
                    v.1 = f(&v.0);
                }
            }
        }
    }
    s.sort_by(|a, b| a.1.total_cmp(&b.1));
    (s[0].0, s[0].1)
}

#[test]
fn nelder_mead_solves_rosenbrock() {
    let config = NelderMeadConfig {
        max_iterations: 500,
        tolerance: 1e-10,
        value_tolerance: 0.0,
        initial_step: 0.5,
    };
    let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &config).unwrap();
    assert!(m.f < 1e-4, "f* = {}", m.f);
    let (x_ref, f_ref) = reference_simplex(rosenbrock, [-1.2, 1.0], 2000);
    assert!(f_ref < 1e-8);
    assert!((m.x[0] - x_ref[0]).abs() < 1e-2 && (m.x[1] - x_ref[1]).abs() < 2e-2);
}

fn state(t: f64, x: f64, y: f64, heading: f64, v: f64, a: f64, kappa: f64, sigma: (f64, f64)) -> TrajectoryState {
    TrajectoryState {
        time: t,
        longitudinal: 0.0,
        velocity: v,
        acceleration: a,
        jerk: 0.0,
        pose: PathPose {
            path_id: PathId(0),
            longitudinal: 0.0,
            position: Point::new(x, y),
            heading,
            curvature: kappa,
        },
        sigma_lon: sigma.0,
        sigma_lat: sigma.1,
    }
}

/// Straight line motion with constant acceleration.
fn straight(n: usize, dt: f64, start: (f64, f64), heading: f64, v0: f64, a: f64, kappa: f64) -> Trajectory {
    let states = (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            let v = (v0 + a * t).max(0.0);
            let d = v0 * t + 0.5 * a * t * t;
            let sigma = (1.0 + 0.05 * t, 0.3 + 0.01 * t);
            state(t, start.0 + d * heading.cos(), start.1 + d * heading.sin(), heading, v, a, kappa, sigma)
        })
        .collect();
    Trajectory { dt, states }
}

/// Ten fixed scenes: a crossing ego against zero to three main-road cars.
fn scenes() -> Vec<(Trajectory, Vec<Trajectory>)> {
    let dt = 0.25;
    let n = 41;
    (0..10)
        .map(|i| {
            let f = i as f64;
            let ego = straight(n, dt, (0.0, -10.0), PI / 2.0, 1.0 + 0.5 * f, 0.4, 0.02 * f);
            let others = (0..i % 4)
                .map(|j| straight(n, dt, (-20.0 - 15.0 * j as f64 - f, 0.0), 0.0, 8.0 + f * 0.2, 0.0, 0.0))
                .collect();
            (ego, others)
        })
        .collect()
}

/// Left Riemann trace written out step by step.
fn scripted_cost(ego: &Trajectory, others: &[Trajectory], p: &RiskParams, w: &BenefitWeights) -> (f64, f64) {
    let dt = ego.dt;
    let logistic = |d_max: f64, k: f64, beta: f64, speed: f64| d_max / (1.0 + (-k * (speed - beta)).exp());
    let mut surv = 1.0;
    let (mut risk, mut benefit) = (0.0, 0.0);
    for k in 0..ego.len() {
        let e = &ego.states[k];
        let ee = UncertaintyEllipse::new(e.pose.position, e.sigma_lon, e.sigma_lat, e.pose.heading).unwrap();
        let (ce, se) = (e.pose.heading.cos(), e.pose.heading.sin());
        let mut probs = Vec::new();
        let mut damages = Vec::new();
        for o in others {
            let s = &o.states[k];
            let oe = UncertaintyEllipse::new(s.pose.position, s.sigma_lon, s.sigma_lat, s.pose.heading).unwrap();
            let (c1, c2) = (cov(&ee), cov(&oe));
            let (a, b, d) = (c1.0 + c2.0, c1.1 + c2.1, c1.2 + c2.2);
            let det = a * d - b * b;
            let (dx, dy) = (s.pose.position.x - e.pose.position.x, s.pose.position.y - e.pose.position.y);
            let q = (d * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
            probs.push((-q / 2.0).exp() / (2.0 * PI * det.sqrt()));
            let rvx = s.velocity * s.pose.heading.cos() - e.velocity * ce;
            let rvy = s.velocity * s.pose.heading.sin() - e.velocity * se;
            damages.push(logistic(p.collision.d_max, p.collision.k, p.collision.beta, rvx.hypot(rvy)));
        }
        let p_sum: f64 = probs.iter().sum();
        let p_coll = p_sum.min(1.0);
        let mean_damage = if p_sum > 0.0 {
            probs.iter().zip(&damages).map(|(a, b)| a * b).sum::<f64>() / p_sum
        } else {
            0.0
        };
        let ay = e.pose.curvature * e.velocity * e.velocity;
        let margin = (p.ay_max - ay.abs()).max(0.0);
        let p_curv = ((-margin * margin / (2.0 * p.sigma_curve.powi(2))).exp()
            / (2.0 * PI * p.sigma_curve.powi(2)).sqrt())
        .min(1.0);
        let curve_damage = logistic(p.curve.d_max, p.curve.k, p.curve.beta, e.velocity);
        if k + 1 < ego.len() {
            risk += (p_coll * mean_damage + p_curv * curve_damage) * surv;
            benefit += (w.travel * e.velocity - w.comfort * e.acceleration.abs() - w.jerk * e.jerk.abs()) * surv * dt;
        }
        surv *= (-(p.escape_rate * dt + p_coll + p_curv)).exp();
    }
    (risk, benefit)
}

#[test]
fn risk_matches_scripted_trace() {
    let params = RiskParams::default();
    let weights = BenefitWeights::default();
    for (i, (ego, others)) in scenes().iter().enumerate() {
        let (r_ref, b_ref) = scripted_cost(ego, others, &params, &weights);
        let r = evaluate_risk(ego, others, &params).unwrap();
        assert_relative_eq!(r.risk, r_ref, max_relative = 1e-9);
        let full = evaluate(ego, others, &params, &weights).unwrap();
        assert_relative_eq!(full.cost, r_ref - b_ref, max_relative = 1e-9, epsilon = 1e-12);
        let scene = SceneRisk::new(others, ego.dt, ego.len()).unwrap();
        let c = scene.cost(ego, &params, &weights).unwrap();
        assert!(
            (c - (r_ref - b_ref)).abs() <= 1e-9 * (r_ref - b_ref).abs().max(1e-3),
            "scene {i}: {c} vs {}",
            r_ref - b_ref
        );
    }
}
