//! Scenario description: intersection layout, traffic, simulation settings
//! and planner parameters, loadable from TOML.

use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{find_intersection, Path, PathId, PathSketch, Point};
use crate::idm::{IdmParams, IidmParams};
use crate::ropt::RoptConfig;

/// T-intersection layout. The main road runs along +x through the origin;
/// the ego approaches from below and turns right onto it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutConfig {
    /// Straight approach from the start of the ego path to the stop line (m).
    pub approach_length: f64,
    pub turn_radius: f64,
    /// Ego path length on the main road after the turn (m).
    pub exit_length: f64,
    /// Main road length upstream of the intersection (m).
    pub main_upstream: f64,
    /// Main road length downstream of the intersection (m).
    pub main_downstream: f64,
    /// Polyline resolution (m).
    pub resolution: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            approach_length: 40.0,
            turn_radius: 10.0,
            exit_length: 300.0,
            main_upstream: 300.0,
            main_downstream: 300.0,
            resolution: 0.5,
        }
    }
}

/// Distribution of time headways between main-road vehicles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeadwayModel {
    /// `h_min + Exp(λ - h_min)`: a Poisson arrival stream with a minimum
    /// headway. Mean headway is λ.
    ShiftedExponential { min_headway: f64 },
    /// `λ + U(-jitter, jitter)`.
    Regular { jitter: f64 },
    /// Fixed headway sequence, repeated cyclically.
    Scripted { headways: Vec<f64> },
}

impl Default for HeadwayModel {
    fn default() -> Self {
        HeadwayModel::ShiftedExponential { min_headway: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrafficConfig {
    /// Mean time headway λ (s).
    pub lambda: f64,
    /// Cruise speed of main-road traffic (m/s).
    pub speed: f64,
    pub headways: HeadwayModel,
    /// Spawn point, measured upstream of the conflict point (m).
    pub spawn_distance: f64,
    /// Removal point, measured downstream of the conflict point (m).
    pub despawn_distance: f64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            lambda: 3.5,
            speed: 10.0,
            headways: HeadwayModel::default(),
            spawn_distance: 150.0,
            despawn_distance: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Simulation step (s).
    pub dt: f64,
    /// Episode length limit (s).
    pub timeout: f64,
    /// Centre distance below which two vehicles collide (m).
    pub crash_distance: f64,
    /// Lateral distance to the main road that counts as inside the conflict zone (m).
    pub conflict_zone_width: f64,
    /// Speed band around the traffic speed that counts as merged (m/s).
    pub merge_speed_tolerance: f64,
    /// Time the ego has to stay in that band with non-shrinking neighbour
    /// distances (s).
    pub merge_hold: f64,
    /// Shrinkage of a neighbour distance per step still tolerated (m).
    pub merge_slack: f64,
    /// Distance past the conflict point after which the merge is complete
    /// regardless of speed (m).
    pub merge_distance: f64,
    /// Time between ROPT replanning cycles (s).
    pub replan_period: f64,
    /// Other vehicles farther away than this are not passed to ROPT (m).
    pub perception_range: f64,
    /// Strongest ego deceleration the vehicle can realise (m/s², positive).
    pub max_brake: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            timeout: 120.0,
            crash_distance: 1.0,
            conflict_zone_width: 2.5,
            merge_speed_tolerance: 0.5,
            merge_hold: 3.0,
            merge_slack: 0.05,
            merge_distance: 80.0,
            replan_period: 0.1,
            perception_range: 120.0,
            max_brake: 8.0,
        }
    }
}

fn default_follower_idm() -> IdmParams {
    IdmParams {
        headway: 0.8,
        decel: 3.0,
        ..IdmParams::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub layout: LayoutConfig,
    pub traffic: TrafficConfig,
    pub sim: SimConfig,
    /// Model the IIDM planners assume for the main-road follower. Its
    /// cruising velocity is the traffic speed.
    pub follower_idm: IdmParams,
    /// Ego IDM used by the IIDM planners.
    pub ego_idm: IdmParams,
    pub iidm: IidmParams,
    pub ropt: RoptConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            layout: LayoutConfig::default(),
            traffic: TrafficConfig::default(),
            sim: SimConfig::default(),
            follower_idm: default_follower_idm(),
            ego_idm: IdmParams::default(),
            iidm: IidmParams::default(),
            ropt: RoptConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let l = &self.layout;
        if !(l.approach_length > 0.0
            && l.turn_radius > 0.0
            && l.exit_length > 0.0
            && l.main_upstream > l.turn_radius
            && l.main_downstream > l.turn_radius
            && l.resolution > 0.0)
        {
            return Err(Error::Config(format!("invalid layout: {l:?}")));
        }
        let t = &self.traffic;
        if !(t.lambda > 0.0 && t.speed > 0.0 && t.spawn_distance > 0.0 && t.despawn_distance > 0.0) {
            return Err(Error::Config(format!("invalid traffic: {t:?}")));
        }
        if t.spawn_distance >= l.main_upstream || t.despawn_distance >= l.main_downstream {
            return Err(Error::Config("spawn/despawn points must lie on the main road".into()));
        }
        match &t.headways {
            HeadwayModel::ShiftedExponential { min_headway } => {
                if !(*min_headway > 0.0 && t.lambda > *min_headway) {
                    return Err(Error::Config(format!(
                        "mean headway {} must exceed the minimum headway {min_headway}",
                        t.lambda
                    )));
                }
            }
            HeadwayModel::Regular { jitter } => {
                if !(*jitter >= 0.0 && t.lambda > *jitter) {
                    return Err(Error::Config("headway jitter must be below λ".into()));
                }
            }
            HeadwayModel::Scripted { headways } => {
                if headways.is_empty() || headways.iter().any(|h| !(*h > 0.0)) {
                    return Err(Error::Config("scripted headways must be positive".into()));
                }
            }
        }
        let s = &self.sim;
        if !(s.dt > 0.0 && s.timeout > 0.0 && s.crash_distance > 0.0 && s.replan_period >= s.dt) {
            return Err(Error::Config(format!("invalid simulation settings: {s:?}")));
        }
        if !(s.max_brake > 0.0 && s.merge_hold >= 0.0 && s.merge_slack >= 0.0) {
            return Err(Error::Config(format!("invalid simulation settings: {s:?}")));
        }
        self.follower_idm.validate()?;
        self.ego_idm.validate()?;
        self.iidm.validate()?;
        self.ropt.optimizer.validate()?;
        self.ropt.risk.validate()?;
        Ok(())
    }
}

/// Layout geometry derived from a [`ScenarioConfig`].
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub ego_path: Path,
    pub main_path: Path,
    /// Ego start and stop line (ego arclength).
    pub stop_line: f64,
    /// Conflict point arclength on the ego path.
    pub conflict_ego: f64,
    /// Conflict point arclength on the main road.
    pub conflict_main: f64,
    pub conflict_point: Point,
    /// Ego arclength interval counted as inside the conflict zone.
    pub conflict_zone: (f64, f64),
}

impl Scenario {
    pub fn build(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let l = &config.layout;
        let r = l.turn_radius;
        let ego_path = PathSketch::new(Point::new(-r, -r - l.approach_length), std::f64::consts::FRAC_PI_2, l.resolution)
            .straight(l.approach_length)
            .arc(r, -std::f64::consts::FRAC_PI_2)
            .straight(l.exit_length)
            .build()?
            .with_id(PathId(0));
        let main_path = PathSketch::new(Point::new(-l.main_upstream, 0.0), 0.0, l.resolution)
            .straight(l.main_upstream + l.main_downstream)
            .build()?
            .with_id(PathId(1));
        let ix = find_intersection(&ego_path, &main_path)
            .ok_or_else(|| Error::Construction("ego path does not reach the main road".into()))?;
        let stop_line = l.approach_length;
        let zone_start = {
            let mut s = stop_line;
            while s < ix.arclength_a {
                let p = ego_path.pose_at(s)?.position;
                if main_path.distance_to(&p) < config.sim.conflict_zone_width {
                    break;
                }
                s += l.resolution * 0.5;
            }
            s.min(ix.arclength_a)
        };
        Ok(Self {
            stop_line,
            conflict_ego: ix.arclength_a,
            conflict_main: ix.arclength_b,
            conflict_point: ix.position,
            conflict_zone: (zone_start, ix.arclength_a + config.sim.conflict_zone_width),
            ego_path,
            main_path,
            config,
        })
    }

    pub fn in_conflict_zone(&self, ego_l: f64) -> bool {
        (self.conflict_zone.0..=self.conflict_zone.1).contains(&ego_l)
    }

    /// Ego position projected onto the main road.
    pub fn project_ego(&self, ego_l: f64) -> f64 {
        self.conflict_main - (self.conflict_ego - ego_l)
    }

    pub fn spawn_l(&self) -> f64 {
        self.conflict_main - self.config.traffic.spawn_distance
    }

    pub fn despawn_l(&self) -> f64 {
        self.conflict_main + self.config.traffic.despawn_distance
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        let mut c = self.config.clone();
        c.traffic.lambda = lambda;
        Self::build(c)
    }
}
