//! Risk-optimal velocity planning.
//!
//! Each planning step extrapolates the other cars at constant velocity, then
//! builds `k` double-ramp candidates (each refined by Nelder-Mead over the
//! end velocities of its last two ramps and the start of the last one) and
//! three fixed profiles, and selects the candidate with the lowest cost plus
//! constraint penalty. A ramp candidate that stays selected is carried over
//! to the next step, shifted by the time it has already been executed.

pub mod nelder_mead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Path;
use crate::profiles::{
    extrapolate_other, integrate, sample, FixedProfile, Ramp, RampProfile, RolloutConfig, Trajectory,
    VelocityProfile,
};
use crate::risk::{BenefitWeights, RiskParams, SceneRisk};

pub use nelder_mead::{nelder_mead, Minimum, NelderMeadConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Number of multi-start ramp candidates.
    pub k: usize,
    pub v_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    /// Fixed duration of every ramp (s).
    pub ramp_duration: f64,
    pub max_iterations: usize,
    /// Simplex diameter at which the search stops (normalized units).
    pub tolerance: f64,
    /// Spread of vertex costs at which the search stops (€).
    pub value_tolerance: f64,
    /// Initial simplex edge (normalized units).
    pub initial_step: f64,
    /// € per unit of constraint violation integrated over time.
    pub penalty_weight: f64,
    /// Deceleration of the fixed stop profile (m/s², positive).
    pub stop_decel: f64,
    /// Acceleration of the fixed accelerate profile (m/s², positive).
    pub accelerate: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            k: 5,
            v_max: 12.0,
            a_min: -5.0,
            a_max: 3.0,
            ramp_duration: 2.5,
            max_iterations: 100,
            tolerance: 1e-3,
            value_tolerance: 1e-6,
            initial_step: 0.1,
            penalty_weight: 1e6,
            stop_decel: 2.0,
            accelerate: 2.0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k >= 1
            && self.v_max > 2.0
            && self.a_min < 0.0
            && self.a_max > 0.0
            && self.ramp_duration > 0.0
            && self.stop_decel > 0.0
            && self.accelerate > 0.0
        {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid optimizer config: {self:?}")))
        }
    }

    /// Seed velocities evenly spaced in `[2, v_max]`.
    pub fn seed_velocities(&self) -> Vec<f64> {
        if self.k == 1 {
            return vec![2.0];
        }
        (0..self.k)
            .map(|j| 2.0 + (self.v_max - 2.0) * j as f64 / (self.k - 1) as f64)
            .collect()
    }
}

/// Everything the planner needs besides the scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RoptConfig {
    pub optimizer: OptimizerConfig,
    pub rollout: RolloutConfig,
    pub risk: RiskParams,
    pub benefit: BenefitWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CandidateKind {
    Ramp(usize),
    Constant,
    Stop,
    Accelerate,
}

impl std::fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CandidateKind::Ramp(j) => write!(f, "ramp{j}"),
            CandidateKind::Constant => f.write_str("constant"),
            CandidateKind::Stop => f.write_str("stop"),
            CandidateKind::Accelerate => f.write_str("accelerate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub profile: VelocityProfile,
}

/// Continuation bookkeeping between planning steps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlannerState {
    pub active_candidate: Option<usize>,
    /// Optimized profile of the active ramp candidate, in its own clock.
    pub active_profile: Option<RampProfile>,
    /// Time the active candidate has been selected (s).
    pub offset: f64,
}

impl PlannerState {
    /// Accounts for `dt` seconds of executing the selected profile.
    pub fn advance(&mut self, dt: f64) {
        self.offset += dt;
        if let Some(p) = self.active_profile.as_mut() {
            p.offset += dt;
        }
    }

    /// Parameters `(v_r1, v_r2, s_r2)` of the active ramp profile.
    pub fn active_params(&self) -> Option<[f64; 3]> {
        self.active_profile.as_ref().map(ramp_params)
    }
}

fn ramp_params(p: &RampProfile) -> [f64; 3] {
    let n = p.ramps.len();
    [p.ramps[n - 2].end_velocity, p.ramps[n - 1].end_velocity, p.ramps[n - 1].start]
}

/// Carries a previously optimized profile into the current step.
///
/// Once the first of its two optimized ramps has run for a full ramp
/// duration a new ramp is inserted: after the last ramp if that one has
/// already started, before it otherwise. The new ramp keeps the velocity the
/// profile already had, so the continued profile is unchanged until the
/// optimizer moves it.
pub fn continue_profile(profile: &RampProfile, ramp_duration: f64) -> RampProfile {
    let mut p = profile.clone();
    let n = p.ramps.len();
    let pen = p.ramps[n - 2];
    let last = p.ramps[n - 1];
    let o = p.offset;
    if o + 1e-9 >= pen.start + ramp_duration {
        if last.start < pen.start + ramp_duration {
            p.ramps.push(Ramp {
                start: last.start + ramp_duration,
                end_velocity: last.end_velocity,
                duration: ramp_duration,
            });
        } else {
            let v = p.raw_velocity(pen.start + ramp_duration);
            p.ramps.insert(
                n - 1,
                Ramp {
                    start: pen.start + ramp_duration,
                    end_velocity: v,
                    duration: ramp_duration,
                },
            );
        }
    }
    if p.ramps.len() > 3 {
        p = p.compacted();
    }
    p
}

/// Candidate set for the current step: `k` ramp candidates, then constant,
/// stop and accelerate.
pub fn candidate_profiles(v0: f64, state: &PlannerState, config: &OptimizerConfig) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = config
        .seed_velocities()
        .into_iter()
        .enumerate()
        .map(|(j, vr)| {
            let profile = match (state.active_candidate, &state.active_profile) {
                (Some(a), Some(p)) if a == j => continue_profile(p, config.ramp_duration),
                _ => RampProfile::double_ramp(v0, vr, vr, config.ramp_duration, config.ramp_duration),
            };
            Candidate {
                kind: CandidateKind::Ramp(j),
                profile: VelocityProfile::Ramp(profile),
            }
        })
        .collect();
    out.push(Candidate {
        kind: CandidateKind::Constant,
        profile: VelocityProfile::Fixed(FixedProfile::constant(v0)),
    });
    out.push(Candidate {
        kind: CandidateKind::Stop,
        profile: VelocityProfile::Fixed(FixedProfile::stop(v0, config.stop_decel)),
    });
    out.push(Candidate {
        kind: CandidateKind::Accelerate,
        profile: VelocityProfile::Fixed(FixedProfile::accelerate(v0, config.v_max, config.accelerate)),
    });
    out
}

/// Constraint penalty (€) of a rolled-out trajectory.
pub fn penalty(trajectory: &Trajectory, config: &OptimizerConfig) -> f64 {
    let n = trajectory.len();
    let violation: f64 = trajectory.states[..n.saturating_sub(1)]
        .iter()
        .map(|s| {
            (s.velocity - config.v_max).max(0.0)
                + (-s.velocity).max(0.0)
                + (s.acceleration - config.a_max).max(0.0)
                + (config.a_min - s.acceleration).max(0.0)
        })
        .sum();
    config.penalty_weight * violation * trajectory.dt
}

/// Another vehicle as seen by the planner.
#[derive(Debug, Clone, Copy)]
pub struct OtherVehicle<'a> {
    pub path: &'a Path,
    pub longitudinal: f64,
    pub velocity: f64,
}

#[derive(Debug, Clone)]
pub struct Snapshot<'a> {
    pub ego_path: &'a Path,
    pub ego_longitudinal: f64,
    pub ego_velocity: f64,
    pub others: Vec<OtherVehicle<'a>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    pub kind: CandidateKind,
    /// `(v_r1, v_r2, s_r2)` after optimization, ramp candidates only.
    pub params: Option<[f64; 3]>,
    pub cost: f64,
    pub penalty: f64,
    pub iterations: usize,
}

impl CandidateReport {
    pub fn objective(&self) -> f64 {
        self.cost + self.penalty
    }
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub selected: usize,
    pub kind: CandidateKind,
    pub profile: VelocityProfile,
    pub trajectory: Trajectory,
    pub candidates: Vec<CandidateReport>,
}

impl Plan {
    pub fn objective(&self) -> f64 {
        self.candidates[self.selected].objective()
    }
}

/// Scene-bound objective shared by all candidates of one step.
struct Evaluator<'a> {
    scene: SceneRisk,
    snapshot: &'a Snapshot<'a>,
    config: &'a RoptConfig,
}

impl Evaluator<'_> {
    fn trajectory(&self, profile: &VelocityProfile) -> Result<Trajectory> {
        let v = sample(profile, &self.config.rollout, Some(self.snapshot.ego_velocity));
        integrate(&v, self.snapshot.ego_path, self.snapshot.ego_longitudinal, &self.config.rollout)
    }

    fn evaluate(&self, profile: &VelocityProfile) -> Result<(f64, f64, Trajectory)> {
        let t = self.trajectory(profile)?;
        let c = self.scene.cost(&t, &self.config.risk, &self.config.benefit)?;
        let p = penalty(&t, &self.config.optimizer);
        Ok((c, p, t))
    }
}

/// Maps normalized search coordinates onto the last two ramps of `base`.
fn apply_params(base: &RampProfile, x: &[f64], config: &RoptConfig) -> (RampProfile, f64) {
    let mut box_violation = 0.0;
    let mut clamped = [0.0; 3];
    for (c, &xi) in clamped.iter_mut().zip(x) {
        let v = xi.clamp(0.0, 1.0);
        box_violation += (xi - v).abs();
        *c = v;
    }
    let mut p = base.clone();
    let n = p.ramps.len();
    let pen_start = p.ramps[n - 2].start;
    p.ramps[n - 2].end_velocity = clamped[0] * config.optimizer.v_max;
    p.ramps[n - 1].end_velocity = clamped[1] * config.optimizer.v_max;
    p.ramps[n - 1].start = pen_start + clamped[2] * config.rollout.horizon;
    (p, box_violation)
}

fn normalized_params(p: &RampProfile, config: &RoptConfig) -> [f64; 3] {
    let n = p.ramps.len();
    [
        p.ramps[n - 2].end_velocity / config.optimizer.v_max,
        p.ramps[n - 1].end_velocity / config.optimizer.v_max,
        (p.ramps[n - 1].start - p.ramps[n - 2].start) / config.rollout.horizon,
    ]
}

/// One ROPT planning cycle.
pub fn plan_step(snapshot: &Snapshot<'_>, state: &PlannerState, config: &RoptConfig) -> Result<(Plan, PlannerState)> {
    let total = snapshot.ego_path.total_length();
    if !(0.0..=total).contains(&snapshot.ego_longitudinal) || !snapshot.ego_velocity.is_finite() {
        return Err(Error::Input(format!(
            "ego at l={} v={} is off its path [0, {total}]",
            snapshot.ego_longitudinal, snapshot.ego_velocity
        )));
    }
    let rc = &config.rollout;
    let others = snapshot
        .others
        .iter()
        .map(|o| extrapolate_other(&o.path.pose_at(o.longitudinal)?, o.velocity, o.path, rc))
        .collect::<Result<Vec<_>>>()?;
    let steps = rc.steps() + 1;
    let eval = Evaluator {
        scene: SceneRisk::new(&others, rc.dt, steps)?,
        snapshot,
        config,
    };

    let candidates = candidate_profiles(snapshot.ego_velocity, state, &config.optimizer);
    let nm = NelderMeadConfig {
        max_iterations: config.optimizer.max_iterations,
        tolerance: config.optimizer.tolerance,
        value_tolerance: config.optimizer.value_tolerance,
        initial_step: config.optimizer.initial_step,
    };

    let mut reports = Vec::with_capacity(candidates.len());
    let mut best: Option<(usize, f64, VelocityProfile, Trajectory)> = None;
    for (idx, cand) in candidates.into_iter().enumerate() {
        let (profile, report) = match &cand.profile {
            VelocityProfile::Ramp(base) => {
                let objective = |x: &[f64]| {
                    let (p, box_violation) = apply_params(base, x, config);
                    match eval.evaluate(&VelocityProfile::Ramp(p)) {
                        Ok((c, pen, _)) => c + pen + config.optimizer.penalty_weight * box_violation,
                        Err(_) => f64::INFINITY,
                    }
                };
                let m = nelder_mead(objective, &normalized_params(base, config), &nm)?;
                let (p, _) = apply_params(base, &m.x, config);
                let profile = VelocityProfile::Ramp(p);
                let (c, pen, _) = eval.evaluate(&profile)?;
                let params = match &profile {
                    VelocityProfile::Ramp(r) => Some(ramp_params(r)),
                    _ => None,
                };
                (
                    profile,
                    CandidateReport {
                        kind: cand.kind,
                        params,
                        cost: c,
                        penalty: pen,
                        iterations: m.iterations,
                    },
                )
            }
            VelocityProfile::Fixed(_) => {
                let (c, pen, _) = eval.evaluate(&cand.profile)?;
                (
                    cand.profile.clone(),
                    CandidateReport {
                        kind: cand.kind,
                        params: None,
                        cost: c,
                        penalty: pen,
                        iterations: 0,
                    },
                )
            }
        };
        let obj = report.objective();
        if !obj.is_finite() {
            return Err(Error::Evaluation(format!("candidate {} has non-finite objective", cand.kind)));
        }
        if best.as_ref().is_none_or(|b| obj < b.1) {
            let t = eval.trajectory(&profile)?;
            best = Some((idx, obj, profile, t));
        }
        reports.push(report);
    }

    let (selected, _, profile, trajectory) = best.expect("at least one candidate");
    let kind = reports[selected].kind;
    let next = PlannerState {
        active_candidate: Some(selected),
        active_profile: match &profile {
            VelocityProfile::Ramp(r) => Some(r.clone()),
            VelocityProfile::Fixed(_) => None,
        },
        offset: if state.active_candidate == Some(selected) {
            state.offset
        } else {
            0.0
        },
    };
    Ok((
        Plan {
            selected,
            kind,
            profile,
            trajectory,
            candidates: reports,
        },
        next,
    ))
}
