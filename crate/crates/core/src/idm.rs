//! Intelligent driver model and the merge decision of the IIDM baselines.
//!
//! Main-road vehicles are described by their arclength on the main road. The
//! ego, while still on its approach, is projected onto the main road at the
//! position it would have if its remaining distance to the conflict point
//! were measured along the main road.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdmParams {
    /// Maximal acceleration a (m/s²).
    pub accel: f64,
    /// Desired deceleration b (m/s², positive).
    pub decel: f64,
    /// Acceleration exponent δ.
    pub delta: f64,
    /// Cruising velocity v_c (m/s).
    pub cruise_speed: f64,
    /// Minimal distance d0 (m).
    pub min_gap: f64,
    /// Time headway T (s).
    pub headway: f64,
    /// Lateral acceleration allowed in curves (m/s²).
    pub ay_max: f64,
    /// Curvature above which a path section counts as a curve (1/m).
    pub kappa_threshold: f64,
}

impl Default for IdmParams {
    fn default() -> Self {
        Self {
            accel: 2.0,
            decel: 2.0,
            delta: 4.0,
            cruise_speed: 10.0,
            min_gap: 2.0,
            headway: 1.5,
            ay_max: 4.0,
            kappa_threshold: 0.05,
        }
    }
}

/// The vehicle ahead: bumper-free centre gap and velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leader {
    pub gap: f64,
    pub velocity: f64,
}

impl IdmParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.accel > 0.0
            && self.decel > 0.0
            && self.delta >= 1.0
            && self.cruise_speed > 0.0
            && self.min_gap > 0.0
            && self.headway > 0.0
            && self.ay_max > 0.0
            && self.kappa_threshold > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid IDM parameters: {self:?}")))
        }
    }

    /// Free-road term `a (1 - (v / v_c)^δ)`.
    pub fn free_term(&self, v: f64, v_c: f64) -> f64 {
        self.accel * (1.0 - (v / v_c).powf(self.delta))
    }

    /// Desired distance `d0 + v T + v Δv / (2 sqrt(a b))` with `Δv = v - v_l`.
    pub fn desired_distance(&self, v: f64, v_l: f64) -> f64 {
        self.min_gap + v * self.headway + v * (v - v_l) / (2.0 * (self.accel * self.decel).sqrt())
    }

    /// IDM acceleration towards the cruising velocity `v_c`, reduced by the
    /// interaction term when a leader is present.
    pub fn accel(&self, v: f64, v_c: f64, leader: Option<Leader>) -> Result<f64> {
        let free = self.free_term(v, v_c);
        match leader {
            None => Ok(free),
            Some(l) if !(l.gap > 0.0) => Err(Error::Domain(format!("leader gap {} is not positive", l.gap))),
            Some(l) => {
                let r = (self.min_gap + v * self.headway) / l.gap
                    + v * (v - l.velocity) / (2.0 * l.gap * (self.accel * self.decel).sqrt());
                Ok(free - self.accel * r * r)
            }
        }
    }

    /// Gap at which a vehicle following a leader of equal speed `v` keeps
    /// its speed. `None` if `v >= v_c`.
    pub fn equilibrium_gap(&self, v: f64, v_c: f64) -> Option<f64> {
        let r = 1.0 - (v / v_c).powf(self.delta);
        (r > 0.0).then(|| (self.min_gap + v * self.headway) / r.sqrt())
    }

    /// Cruising velocity at `l`, limited by the sharpest curve ahead to
    /// `sqrt(a_y / κ_max)`.
    pub fn curve_cruise_velocity(&self, path: &Path, l: f64) -> f64 {
        match path.max_curvature_ahead(l, self.kappa_threshold) {
            Some(k) if k > 0.0 => self.cruise_speed.min((self.ay_max / k).sqrt()),
            _ => self.cruise_speed,
        }
    }
}

/// A vehicle on the main road.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainCar {
    pub longitudinal: f64,
    pub velocity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IidmParams {
    /// Politeness factor p.
    pub politeness: f64,
    /// Incentive threshold Δa_th (m/s²).
    pub threshold: f64,
    /// Lowest acceptable follower acceleration b_s (m/s², negative).
    pub safe_decel: f64,
    /// Strongest deceleration of the stop maneuver (m/s², positive).
    pub stop_decel_max: f64,
    /// Braking applied when a started merge becomes unsafe (m/s², positive).
    pub abort_brake: f64,
    /// Distance before the conflict point within which merging is considered (m).
    pub projection_window: f64,
    /// Prediction horizon of the predictive variant (s).
    pub horizon: f64,
    /// Prediction step of the predictive variant (s).
    pub dt: f64,
}

impl Default for IidmParams {
    fn default() -> Self {
        Self {
            politeness: 0.5,
            threshold: 0.1,
            safe_decel: -2.0,
            stop_decel_max: 4.0,
            abort_brake: 4.0,
            projection_window: 30.0,
            horizon: 10.0,
            dt: 0.1,
        }
    }
}

impl IidmParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.politeness >= 0.0
            && self.safe_decel < 0.0
            && self.stop_decel_max > 0.0
            && self.abort_brake > 0.0
            && self.projection_window > 0.0
            && self.horizon > 0.0
            && self.dt > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid IIDM parameters: {self:?}")))
        }
    }
}

/// Inputs of one merge assessment.
#[derive(Debug, Clone, Copy)]
pub struct MergeQuery {
    /// Ego position projected onto the main road.
    pub projected: f64,
    pub ego_velocity: f64,
    /// Ego acceleration of the stop maneuver (a_d).
    pub stay_accel: f64,
    /// Curve-limited cruising velocity of the ego.
    pub ego_v_c: f64,
    /// Current acceleration of the main-road follower (a_f).
    pub follower_accel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeAssessment {
    /// ã_d - a_d + p (ã_f - a_f).
    pub incentive: f64,
    /// ã_d, the ego's acceleration behind the main-road leader.
    pub ego_accel: f64,
    /// ã_f, the follower's acceleration behind the projected ego; `None`
    /// without a follower.
    pub follower_accel: Option<f64>,
    pub incentive_ok: bool,
    pub safe: bool,
}

impl MergeAssessment {
    pub fn accept(&self) -> bool {
        self.incentive_ok && self.safe
    }
}

/// Leader (at or ahead) and follower (strictly behind) of a main-road position.
pub fn neighbours(cars: &[MainCar], at: f64) -> (Option<MainCar>, Option<MainCar>) {
    let mut leader: Option<MainCar> = None;
    let mut follower: Option<MainCar> = None;
    for &c in cars {
        if c.longitudinal >= at {
            if leader.is_none_or(|l| c.longitudinal < l.longitudinal) {
                leader = Some(c);
            }
        } else if follower.is_none_or(|f| c.longitudinal > f.longitudinal) {
            follower = Some(c);
        }
    }
    (leader, follower)
}

/// Incentive and safety criterion for merging at `q.projected`.
///
/// The ego is judged with `ego_idm`, the main-road follower with
/// `follower_idm` at that model's cruising velocity. A leader level with the
/// projected ego makes the merge unattractive rather than an error.
pub fn assess_merge(
    q: &MergeQuery,
    cars: &[MainCar],
    ego_idm: &IdmParams,
    follower_idm: &IdmParams,
    params: &IidmParams,
) -> MergeAssessment {
    let (leader, follower) = neighbours(cars, q.projected);
    let ego_accel = ego_idm
        .accel(
            q.ego_velocity,
            q.ego_v_c,
            leader.map(|l| Leader {
                gap: l.longitudinal - q.projected,
                velocity: l.velocity,
            }),
        )
        .unwrap_or(f64::NEG_INFINITY);
    let follower_accel = follower.map(|f| {
        follower_idm
            .accel(
                f.velocity,
                follower_idm.cruise_speed,
                Some(Leader {
                    gap: q.projected - f.longitudinal,
                    velocity: q.ego_velocity,
                }),
            )
            .unwrap_or(f64::NEG_INFINITY)
    });
    let follower_gain = follower_accel.map_or(0.0, |a| a - q.follower_accel);
    let incentive = ego_accel - q.stay_accel + params.politeness * follower_gain;
    MergeAssessment {
        incentive,
        ego_accel,
        follower_accel,
        incentive_ok: incentive > params.threshold,
        safe: follower_accel.is_none_or(|a| a >= params.safe_decel),
    }
}

/// Ego geometry needed to project it onto the main road.
#[derive(Debug, Clone, Copy)]
pub struct MergeGeometry<'a> {
    pub ego_path: &'a Path,
    /// Ego stop line arclength.
    pub stop_line: f64,
    /// Conflict point arclength on the ego path.
    pub conflict_ego: f64,
    /// Conflict point arclength on the main road.
    pub conflict_main: f64,
}

impl MergeGeometry<'_> {
    pub fn project(&self, ego_l: f64) -> f64 {
        self.conflict_main - (self.conflict_ego - ego_l)
    }
}

/// Models shared by the plain and the predictive decision.
#[derive(Debug, Clone, Copy)]
pub struct MergeModels<'a> {
    pub ego: &'a IdmParams,
    pub follower: &'a IdmParams,
    pub params: &'a IidmParams,
}

/// Acceleration of the stop maneuver: constant deceleration to rest at
/// `stop_l`, at most `max_decel`; zero at rest.
pub fn stop_line_accel(ego_l: f64, ego_v: f64, stop_l: f64, max_decel: f64) -> f64 {
    if ego_v <= 1e-9 {
        return 0.0;
    }
    let d = stop_l - ego_l;
    if d <= 0.0 {
        return -max_decel;
    }
    (-ego_v * ego_v / (2.0 * d)).max(-max_decel)
}

/// Ego IDM acceleration on its merge path, following the main-road leader of
/// its projected position.
pub fn merge_accel(geometry: &MergeGeometry<'_>, ego_l: f64, ego_v: f64, cars: &[MainCar], ego_idm: &IdmParams) -> f64 {
    let projected = geometry.project(ego_l);
    let v_c = ego_idm.curve_cruise_velocity(geometry.ego_path, ego_l.min(geometry.ego_path.total_length()));
    let (leader, _) = neighbours(cars, projected);
    ego_idm
        .accel(
            ego_v,
            v_c,
            leader.map(|c| Leader {
                gap: (c.longitudinal - projected).max(1e-6),
                velocity: c.velocity,
            }),
        )
        .expect("gap kept positive")
}

/// Plain IIDM decision at the current state.
pub fn iidm_decide(
    geometry: &MergeGeometry<'_>,
    ego_l: f64,
    ego_v: f64,
    cars: &[MainCar],
    models: &MergeModels<'_>,
) -> MergeAssessment {
    let q = MergeQuery {
        projected: geometry.project(ego_l),
        ego_velocity: ego_v,
        stay_accel: stop_line_accel(ego_l, ego_v, geometry.stop_line, models.params.stop_decel_max),
        ego_v_c: models
            .ego
            .curve_cruise_velocity(geometry.ego_path, ego_l.min(geometry.ego_path.total_length())),
        follower_accel: 0.0,
    };
    assess_merge(&q, cars, models.ego, models.follower, models.params)
}

/// Result of checking a merge over a predicted horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedMerge {
    /// Assessment at the current state.
    pub now: MergeAssessment,
    /// First predicted time (s) at which incentive or safety fails.
    pub failure: Option<f64>,
}

impl PredictedMerge {
    pub fn accept(&self) -> bool {
        self.failure.is_none()
    }
}

/// Predictive IIDM: both criteria must hold at every step of the horizon.
///
/// The ego is rolled out along its merge path with its curve-limited IDM,
/// main-road cars keep their current velocity.
pub fn predictive_iidm_decide(
    geometry: &MergeGeometry<'_>,
    ego_l: f64,
    ego_v: f64,
    cars: &[MainCar],
    models: &MergeModels<'_>,
) -> PredictedMerge {
    let p = models.params;
    let steps = (p.horizon / p.dt).round() as usize;
    let mut l = ego_l;
    let mut v = ego_v;
    let mut predicted: Vec<MainCar> = cars.to_vec();
    let mut now = None;
    let mut failure = None;
    for k in 0..=steps {
        let a = iidm_decide(geometry, l, v, &predicted, models);
        if k == 0 {
            now = Some(a);
        }
        if !a.accept() {
            failure = Some(k as f64 * p.dt);
            break;
        }
        let acc = merge_accel(geometry, l, v, &predicted, models.ego);
        v = (v + acc * p.dt).max(0.0);
        l += v * p.dt;
        for c in &mut predicted {
            c.longitudinal += c.velocity * p.dt;
        }
    }
    PredictedMerge {
        now: now.expect("at least one predicted step"),
        failure,
    }
}
