//! Velocity profiles and their conversion into predicted trajectories.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Path, PathPose};

/// Linear change of velocity to `end_velocity` over `duration`, beginning at
/// `start` (profile time, s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ramp {
    pub start: f64,
    pub end_velocity: f64,
    pub duration: f64,
}

/// Piecewise-linear velocity profile made of consecutive ramps.
///
/// Ramp times live in the profile's own clock, which started `offset` seconds
/// before "now"; evaluating at prediction time `s` reads the profile at
/// `s + offset`. A ramp that is still running when the next one starts is cut
/// off there, and the next ramp begins from the velocity reached so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampProfile {
    pub v0: f64,
    pub ramps: Vec<Ramp>,
    pub offset: f64,
}

impl RampProfile {
    /// Two ramps of duration `ramp_duration`: the first from `v0` to `v_r1`
    /// starting now, the second to `v_r2` starting at `s_r2`.
    pub fn double_ramp(v0: f64, v_r1: f64, v_r2: f64, s_r2: f64, ramp_duration: f64) -> Self {
        Self {
            v0,
            ramps: vec![
                Ramp {
                    start: 0.0,
                    end_velocity: v_r1,
                    duration: ramp_duration,
                },
                Ramp {
                    start: s_r2,
                    end_velocity: v_r2,
                    duration: ramp_duration,
                },
            ],
            offset: 0.0,
        }
    }

    /// Velocity in the profile's own clock, before clamping.
    pub fn raw_velocity(&self, t: f64) -> f64 {
        let mut v = self.v0;
        for (i, r) in self.ramps.iter().enumerate() {
            if t <= r.start {
                return v;
            }
            let end = r.start + r.duration;
            let cut = self.ramps.get(i + 1).map_or(end, |n| n.start.min(end).max(r.start));
            let from = v;
            let at = |tt: f64| {
                if r.duration <= 0.0 {
                    r.end_velocity
                } else {
                    from + (r.end_velocity - from) * ((tt - r.start) / r.duration).min(1.0)
                }
            };
            if t <= cut {
                return at(t);
            }
            v = at(cut);
        }
        v
    }

    pub fn velocity_at(&self, s: f64) -> f64 {
        self.raw_velocity(s + self.offset).max(0.0)
    }

    /// The same profile advanced by `dt` seconds of execution.
    pub fn advanced(&self, dt: f64) -> Self {
        Self {
            offset: self.offset + dt,
            ..self.clone()
        }
    }

    /// Drops ramps that finished before the current time and are no longer
    /// needed to evaluate the future, folding them into `v0`.
    pub fn compacted(&self) -> Self {
        let mut p = self.clone();
        while p.ramps.len() > 2 && p.ramps[1].start <= p.offset {
            p.v0 = p.raw_velocity(p.ramps[1].start);
            p.ramps.remove(0);
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FixedKind {
    Constant,
    Stop,
    Accelerate,
}

/// One of the three sampled standard profiles.
///
/// `Constant` holds `v0`; `Stop` ramps linearly to rest at `anchor_time`;
/// `Accelerate` ramps linearly to `anchor_velocity` at `anchor_time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedProfile {
    pub kind: FixedKind,
    pub v0: f64,
    pub anchor_time: f64,
    pub anchor_velocity: f64,
}

impl FixedProfile {
    pub fn constant(v0: f64) -> Self {
        Self {
            kind: FixedKind::Constant,
            v0,
            anchor_time: 0.0,
            anchor_velocity: v0,
        }
    }

    /// Stop with constant deceleration `decel` (positive, m/s²).
    pub fn stop(v0: f64, decel: f64) -> Self {
        Self {
            kind: FixedKind::Stop,
            v0,
            anchor_time: v0 / decel,
            anchor_velocity: 0.0,
        }
    }

    /// Reach `target` with constant acceleration `accel` (positive, m/s²).
    pub fn accelerate(v0: f64, target: f64, accel: f64) -> Self {
        Self {
            kind: FixedKind::Accelerate,
            v0,
            anchor_time: (target - v0).abs() / accel,
            anchor_velocity: target,
        }
    }

    pub fn velocity_at(&self, s: f64) -> f64 {
        let v = match self.kind {
            FixedKind::Constant => self.v0,
            FixedKind::Stop | FixedKind::Accelerate => {
                if s >= self.anchor_time {
                    self.anchor_velocity
                } else {
                    self.v0 + (self.anchor_velocity - self.v0) * s / self.anchor_time
                }
            }
        };
        v.max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VelocityProfile {
    Ramp(RampProfile),
    Fixed(FixedProfile),
}

impl VelocityProfile {
    pub fn velocity_at(&self, s: f64) -> f64 {
        match self {
            VelocityProfile::Ramp(r) => r.velocity_at(s),
            VelocityProfile::Fixed(f) => f.velocity_at(s),
        }
    }
}

/// Prediction settings shared by ego rollouts and other-car extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RolloutConfig {
    /// Prediction horizon (s).
    pub horizon: f64,
    /// Prediction step (s).
    pub dt: f64,
    /// Initial longitudinal position uncertainty (m).
    pub sigma0_lon: f64,
    /// Lateral position uncertainty (m), constant over the horizon.
    pub sigma0_lat: f64,
    /// Velocity uncertainty factor: σ_lon grows by `growth * v * dt` per step.
    pub growth: f64,
}

impl Default for RolloutConfig {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            dt: 0.25,
            sigma0_lon: 1.0,
            sigma0_lat: 0.3,
            growth: 0.05,
        }
    }
}

impl RolloutConfig {
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryState {
    pub time: f64,
    pub longitudinal: f64,
    pub velocity: f64,
    pub acceleration: f64,
    pub jerk: f64,
    pub pose: PathPose,
    pub sigma_lon: f64,
    pub sigma_lat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<TrajectoryState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.states.last().map_or(0.0, |s| s.time)
    }

    pub fn distance(&self) -> f64 {
        match (self.states.first(), self.states.last()) {
            (Some(a), Some(b)) => b.longitudinal - a.longitudinal,
            _ => 0.0,
        }
    }
}

/// Integrates a velocity sequence along `path`.
///
/// Position follows `l(k+1) = l(k) + v(k)·dt`, the longitudinal uncertainty
/// `σ(k+1) = σ(k) + c·v(k)·dt`. Acceleration and jerk are forward
/// differences, with the last value repeated so that cumulative sums of jerk
/// reproduce the acceleration sequence.
pub fn integrate(velocities: &[f64], path: &Path, l0: f64, config: &RolloutConfig) -> Result<Trajectory> {
    if !(0.0..=path.total_length() + 1e-9).contains(&l0) {
        return Err(Error::Domain(format!(
            "start position {l0} outside path [0, {}]",
            path.total_length()
        )));
    }
    if !(config.dt > 0.0) || velocities.is_empty() {
        return Err(Error::Input("rollout needs dt > 0 and at least one step".into()));
    }
    let n = velocities.len();
    let dt = config.dt;
    let mut accel = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        accel[k] = (velocities[k + 1] - velocities[k]) / dt;
    }
    if n >= 2 {
        accel[n - 1] = accel[n - 2];
    }
    let mut jerk = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        jerk[k] = (accel[k + 1] - accel[k]) / dt;
    }

    let mut states = Vec::with_capacity(n);
    let mut l = l0;
    let mut sigma = config.sigma0_lon;
    for k in 0..n {
        let v = velocities[k];
        states.push(TrajectoryState {
            time: k as f64 * dt,
            longitudinal: l,
            velocity: v,
            acceleration: accel[k],
            jerk: jerk[k],
            pose: path.pose_extended(l),
            sigma_lon: sigma,
            sigma_lat: config.sigma0_lat,
        });
        l += v * dt;
        sigma += config.growth * v * dt;
    }
    Ok(Trajectory { dt, states })
}

/// Samples `profile` at every prediction step and integrates it along `path`.
pub fn rollout(profile: &VelocityProfile, path: &Path, l0: f64, config: &RolloutConfig) -> Result<Trajectory> {
    if !(config.horizon > 0.0) {
        return Err(Error::Input("horizon must be positive".into()));
    }
    let velocities = sample(profile, config, None);
    integrate(&velocities, path, l0, config)
}

/// Profile velocities at each prediction step. `current` replaces the
/// first sample with a measured velocity.
pub fn sample(profile: &VelocityProfile, config: &RolloutConfig, current: Option<f64>) -> Vec<f64> {
    let n = config.steps();
    let mut v: Vec<f64> = (0..=n).map(|k| profile.velocity_at(k as f64 * config.dt)).collect();
    if let Some(c) = current {
        v[0] = c.max(0.0);
    }
    v
}

/// Constant-velocity prediction of another vehicle from its current pose.
pub fn extrapolate_other(pose: &PathPose, velocity: f64, path: &Path, config: &RolloutConfig) -> Result<Trajectory> {
    let profile = VelocityProfile::Fixed(FixedProfile::constant(velocity));
    rollout(&profile, path, pose.longitudinal, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use approx::assert_abs_diff_eq;

    fn straight(len: f64) -> Path {
        let pts: Vec<Point> = (0..=10).map(|i| Point::new(len * i as f64 / 10.0, 0.0)).collect();
        Path::new(&pts).unwrap()
    }

    fn cfg(horizon: f64, dt: f64) -> RolloutConfig {
        RolloutConfig {
            horizon,
            dt,
            ..Default::default()
        }
    }

    #[test]
    fn double_ramp_midpoint() {
        let p = RampProfile::double_ramp(0.0, 5.0, 5.0, 2.5, 2.5);
        assert_abs_diff_eq!(p.velocity_at(1.25), 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.velocity_at(2.5), 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.velocity_at(40.0), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn overlapping_second_ramp_starts_from_reached_velocity() {
        // second ramp starts at 1 s, when the first has reached 2 m/s
        let p = RampProfile::double_ramp(0.0, 5.0, 0.0, 1.0, 2.5);
        assert_abs_diff_eq!(p.velocity_at(1.0), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.velocity_at(2.25), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.velocity_at(3.5), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn offset_shifts_profile_time() {
        let p = RampProfile::double_ramp(0.0, 5.0, 5.0, 2.5, 2.5).advanced(0.5);
        assert_abs_diff_eq!(p.velocity_at(0.75), 2.5, epsilon = 1e-12);
    }

    #[test]
    fn negative_velocities_are_clamped() {
        let p = RampProfile::double_ramp(2.0, -4.0, -4.0, 2.5, 2.5);
        assert_eq!(p.velocity_at(2.0), 0.0);
        assert!(p.raw_velocity(2.0) < 0.0);
    }

    #[test]
    fn fixed_profiles() {
        let c = FixedProfile::constant(7.0);
        for s in [0.0, 1.0, 123.0] {
            assert_eq!(c.velocity_at(s), 7.0);
        }
        let stop = FixedProfile {
            kind: FixedKind::Stop,
            v0: 6.0,
            anchor_time: 3.0,
            anchor_velocity: 0.0,
        };
        assert_eq!(stop.velocity_at(3.0), 0.0);
        assert_eq!(stop.velocity_at(5.0), 0.0);
        assert_abs_diff_eq!(stop.velocity_at(1.5), 3.0, epsilon = 1e-12);
        let acc = FixedProfile::accelerate(2.0, 12.0, 2.0);
        assert_abs_diff_eq!(acc.anchor_time, 5.0);
        assert_eq!(acc.velocity_at(5.0), 12.0);
        assert_eq!(acc.velocity_at(9.0), 12.0);
    }

    #[test]
    fn constant_rollout_positions() {
        let path = straight(100.0);
        let prof = VelocityProfile::Fixed(FixedProfile::constant(10.0));
        let t = rollout(&prof, &path, 0.0, &cfg(1.0, 0.1)).unwrap();
        assert_eq!(t.len(), 11);
        for (k, s) in t.states.iter().enumerate() {
            assert_abs_diff_eq!(s.longitudinal, k as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn uncertainty_growth_one_step() {
        let path = straight(100.0);
        let prof = VelocityProfile::Fixed(FixedProfile::constant(10.0));
        let config = RolloutConfig {
            horizon: 1.0,
            dt: 0.1,
            sigma0_lon: 0.5,
            sigma0_lat: 0.3,
            growth: 0.1,
        };
        let t = rollout(&prof, &path, 0.0, &config).unwrap();
        assert_abs_diff_eq!(t.states[1].sigma_lon, 0.6, epsilon = 1e-12);
        assert!(t.states.iter().all(|s| s.sigma_lat == 0.3));
    }

    #[test]
    fn double_ramp_distance_matches_trapezoid() {
        // 0 -> 5 m/s over 2.5 s, then hold: area over 5 s is 6.25 + 12.5.
        let path = straight(100.0);
        let prof = VelocityProfile::Ramp(RampProfile::double_ramp(0.0, 5.0, 5.0, 2.5, 2.5));
        let t = rollout(&prof, &path, 0.0, &cfg(5.0, 0.1)).unwrap();
        let exact = 0.5 * 2.5 * 5.0 + 2.5 * 5.0;
        // l at step N covers the left Riemann sum over [0, 5)
        assert!((t.states.last().unwrap().longitudinal - exact).abs() <= 5.0 * 0.1);
    }

    #[test]
    fn rollout_rejects_start_outside_path() {
        let path = straight(50.0);
        let prof = VelocityProfile::Fixed(FixedProfile::constant(1.0));
        assert!(matches!(
            rollout(&prof, &path, 60.0, &cfg(1.0, 0.1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn extrapolation_of_other_cars() {
        let path = straight(200.0);
        let pose = path.pose_at(0.0).unwrap();
        let config = cfg(6.0, 0.25);
        let t = extrapolate_other(&pose, 10.0, &path, &config).unwrap();
        assert_abs_diff_eq!(t.distance(), 60.0, epsilon = 1e-9);

        let still = extrapolate_other(&pose, 0.0, &path, &config).unwrap();
        assert_eq!(still.distance(), 0.0);
        assert!(still.states.iter().all(|s| s.sigma_lon == config.sigma0_lon));

        // 40 m upstream of a conflict point at l = 100
        let pose = path.pose_at(60.0).unwrap();
        let t = extrapolate_other(&pose, 10.0, &path, &cfg(10.0, 0.25)).unwrap();
        let k = t.states.iter().position(|s| s.longitudinal >= 100.0 - 1e-9).unwrap();
        assert_abs_diff_eq!(t.states[k].time, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn rollout_continues_past_path_end() {
        let path = straight(10.0);
        let prof = VelocityProfile::Fixed(FixedProfile::constant(10.0));
        let t = rollout(&prof, &path, 5.0, &cfg(2.0, 0.25)).unwrap();
        let last = t.states.last().unwrap();
        assert_abs_diff_eq!(last.pose.position.x, 25.0, epsilon = 1e-9);
    }
}
