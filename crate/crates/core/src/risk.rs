//! Survival-analysis risk of a predicted ego trajectory.
//!
//! Every prediction step contributes Poisson event rates from collisions
//! (Gaussian position overlap with each other car) and from losing control in
//! curves (lateral acceleration close to its limit). Rates are integrated into
//! a survival function, which discounts both the expected damage `R` and the
//! travel benefit `B`. Candidates are ranked by `C = R - B`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::profiles::Trajectory;

/// Gaussian position uncertainty of one vehicle at one prediction step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyEllipse {
    pub mean: Point,
    pub sigma_lon: f64,
    pub sigma_lat: f64,
    pub heading: f64,
}

impl UncertaintyEllipse {
    pub fn new(mean: Point, sigma_lon: f64, sigma_lat: f64, heading: f64) -> Result<Self> {
        if !(sigma_lat > 0.0 && sigma_lon >= sigma_lat) || !heading.is_finite() {
            return Err(Error::Input(format!(
                "ellipse needs sigma_lon >= sigma_lat > 0, got {sigma_lon}, {sigma_lat}"
            )));
        }
        Ok(Self {
            mean,
            sigma_lon,
            sigma_lat,
            heading,
        })
    }

    /// `R diag(σ_lon², σ_lat²) Rᵀ` in world coordinates.
    pub fn covariance(&self) -> Matrix2<f64> {
        covariance(self.sigma_lon, self.sigma_lat, self.heading)
    }
}

fn covariance(sigma_lon: f64, sigma_lat: f64, heading: f64) -> Matrix2<f64> {
    let (s, c) = heading.sin_cos();
    let rot = Matrix2::new(c, -s, s, c);
    let local = Matrix2::new(sigma_lon * sigma_lon, 0.0, 0.0, sigma_lat * sigma_lat);
    rot * local * rot.transpose()
}

/// Closed-form integral of the product of two Gaussian densities, without
/// clamping. This is a density overlap and may exceed 1 for tight ellipses.
pub fn gaussian_overlap(e1: &UncertaintyEllipse, e2: &UncertaintyEllipse) -> Result<f64> {
    let sum = e1.covariance() + e2.covariance();
    let det = sum.determinant();
    if !(det > 1e-18) {
        return Err(Error::Evaluation(format!("singular combined covariance (det {det})")));
    }
    let inv = sum
        .try_inverse()
        .ok_or_else(|| Error::Evaluation("combined covariance not invertible".into()))?;
    let d: Vector2<f64> = e2.mean - e1.mean;
    let q = d.dot(&(inv * d));
    Ok((-0.5 * q).exp() / (4.0 * PI * PI * det).sqrt())
}

/// Collision probability of two vehicles, clamped to at most 1.
pub fn collision_probability(e1: &UncertaintyEllipse, e2: &UncertaintyEllipse) -> Result<f64> {
    Ok(gaussian_overlap(e1, e2)?.min(1.0))
}

/// How lateral acceleration is derived from speed and curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LateralAccelModel {
    /// `a_y = κ v²`.
    #[default]
    KappaVSquared,
    /// `a_y = sqrt(κ v)` as printed in the original formulation.
    Literal,
}

/// Direction of the logistic damage curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DamageSign {
    /// Damage rises with speed: `D_max / (1 + exp(-k (v - β)))`.
    #[default]
    Increasing,
    /// `D_max / (1 + exp(k (v - β)))` as printed in the original formulation.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DamageParams {
    /// Maximal damage (€).
    pub d_max: f64,
    /// Damage increase factor (s/m).
    pub k: f64,
    /// Damage midpoint (m/s).
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DamageChannel {
    Collision,
    Curve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RiskParams {
    /// Constant escape rate τ0⁻¹ (1/s).
    pub escape_rate: f64,
    /// Maximal lateral acceleration (m/s²).
    pub ay_max: f64,
    /// Spread of the curve-loss density (m/s²).
    pub sigma_curve: f64,
    pub collision: DamageParams,
    pub curve: DamageParams,
    pub lateral_model: LateralAccelModel,
    pub damage_sign: DamageSign,
}

impl Default for RiskParams {
    fn default() -> Self {
        Self {
            escape_rate: 0.2,
            ay_max: 4.0,
            sigma_curve: 0.5,
            collision: DamageParams {
                d_max: 1.0e4,
                k: 0.5,
                beta: 8.0,
            },
            curve: DamageParams {
                d_max: 5.0e3,
                k: 0.5,
                beta: 12.0,
            },
            lateral_model: LateralAccelModel::KappaVSquared,
            damage_sign: DamageSign::Increasing,
        }
    }
}

impl RiskParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.escape_rate >= 0.0
            && self.ay_max > 0.0
            && self.sigma_curve > 0.0
            && self.collision.d_max >= 0.0
            && self.curve.d_max >= 0.0
            && self.collision.k >= 0.0
            && self.curve.k >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid risk parameters: {self:?}")))
        }
    }

    pub fn lateral_acceleration(&self, v: f64, kappa: f64) -> f64 {
        match self.lateral_model {
            LateralAccelModel::KappaVSquared => kappa * v * v,
            LateralAccelModel::Literal => (kappa * v).abs().sqrt(),
        }
    }
}

/// Probability of losing control at speed `v` on curvature `kappa`.
pub fn curve_probability(v: f64, kappa: f64, params: &RiskParams) -> f64 {
    let ay = params.lateral_acceleration(v, kappa).abs();
    let margin = (params.ay_max - ay).max(0.0);
    let s2 = params.sigma_curve * params.sigma_curve;
    let q = margin * margin / s2;
    if q > 2.0 * NEGLIGIBLE_EXPONENT {
        return 0.0;
    }
    let p = (-0.5 * q).exp() / (2.0 * PI * s2).sqrt();
    p.min(1.0)
}

/// Logistic damage (€) of an event at the given relative speed.
pub fn damage(channel: DamageChannel, speed: f64, params: &RiskParams) -> f64 {
    let d = match channel {
        DamageChannel::Collision => &params.collision,
        DamageChannel::Curve => &params.curve,
    };
    let sign = match params.damage_sign {
        DamageSign::Increasing => -1.0,
        DamageSign::Literal => 1.0,
    };
    d.d_max / (1.0 + (sign * d.k * (speed - d.beta)).exp())
}

/// Per-step quantities of one risk evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RiskStep {
    pub p_coll: f64,
    pub p_curv: f64,
    pub rate_coll: f64,
    pub rate_curv: f64,
    /// Survival up to the start of this step.
    pub survival: f64,
    /// Probability-weighted collision damage over all other cars (€).
    pub damage_coll: f64,
    pub damage_curv: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RiskBreakdown {
    pub steps: Vec<RiskStep>,
    pub risk: f64,
    pub benefit: f64,
    pub cost: f64,
}

impl RiskBreakdown {
    pub fn survival(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.survival).collect()
    }
}

/// Driver-specific benefit weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenefitWeights {
    /// Travel benefit b^t (€/m).
    pub travel: f64,
    /// Comfort weight b^c on |acceleration| (€·s/m).
    pub comfort: f64,
    /// Comfort weight b^j on |jerk| (€·s²/m).
    pub jerk: f64,
}

impl Default for BenefitWeights {
    fn default() -> Self {
        Self {
            travel: per_km(1.0),
            comfort: 2.0e-4,
            jerk: 0.0,
        }
    }
}

/// Converts €/km into €/m.
pub fn per_km(euro_per_km: f64) -> f64 {
    euro_per_km / 1000.0
}

fn check_alignment(ego: &Trajectory, others: &[Trajectory]) -> Result<()> {
    for (i, o) in others.iter().enumerate() {
        if o.len() != ego.len() || (o.dt - ego.dt).abs() > 1e-12 {
            return Err(Error::Contract(format!(
                "trajectory {i} has {} steps of {} s, ego has {} steps of {} s",
                o.len(),
                o.dt,
                ego.len(),
                ego.dt
            )));
        }
    }
    Ok(())
}

/// Full per-step risk evaluation of `ego` against all `others`.
///
/// The event interval of each step equals the prediction step. Survival at
/// step `k` integrates the total rate over the steps before it, and `R` is
/// the left Riemann sum over the horizon, so the final state only marks the
/// end of the last interval.
pub fn evaluate_risk(ego: &Trajectory, others: &[Trajectory], params: &RiskParams) -> Result<RiskBreakdown> {
    check_alignment(ego, others)?;
    let dt = ego.dt;
    let n = ego.len();
    let mut steps = Vec::with_capacity(n);
    let mut integral: f64 = 0.0;
    let mut risk = 0.0;
    for k in 0..n {
        let e = &ego.states[k];
        let ego_ellipse = UncertaintyEllipse {
            mean: e.pose.position,
            sigma_lon: e.sigma_lon,
            sigma_lat: e.sigma_lat,
            heading: e.pose.heading,
        };
        let ego_vel = velocity_vector(e.velocity, e.pose.heading);
        let mut p_sum = 0.0;
        let mut pd_sum = 0.0;
        for o in others {
            let s = &o.states[k];
            let other = UncertaintyEllipse {
                mean: s.pose.position,
                sigma_lon: s.sigma_lon,
                sigma_lat: s.sigma_lat,
                heading: s.pose.heading,
            };
            let p = gaussian_overlap(&ego_ellipse, &other)?;
            let rel = (velocity_vector(s.velocity, s.pose.heading) - ego_vel).norm();
            p_sum += p;
            pd_sum += p * damage(DamageChannel::Collision, rel, params);
        }
        let p_coll = p_sum.min(1.0);
        let damage_coll = if p_sum > 0.0 { pd_sum / p_sum } else { 0.0 };
        let p_curv = curve_probability(e.velocity, e.pose.curvature, params);
        let damage_curv = damage(DamageChannel::Curve, e.velocity, params);
        let rate_coll = p_coll / dt;
        let rate_curv = p_curv / dt;
        let survival = (-integral).exp();
        if k + 1 < n {
            risk += (rate_coll * damage_coll + rate_curv * damage_curv) * survival * dt;
        }
        integral += (params.escape_rate + rate_coll + rate_curv) * dt;
        steps.push(RiskStep {
            p_coll,
            p_curv,
            rate_coll,
            rate_curv,
            survival,
            damage_coll,
            damage_curv,
        });
    }
    Ok(RiskBreakdown {
        steps,
        risk,
        benefit: 0.0,
        cost: risk,
    })
}

/// Survival-weighted travel benefit minus comfort costs.
pub fn evaluate_benefit(ego: &Trajectory, survival: &[f64], weights: &BenefitWeights) -> Result<f64> {
    if survival.len() != ego.len() {
        return Err(Error::Contract(format!(
            "survival has {} entries, trajectory has {}",
            survival.len(),
            ego.len()
        )));
    }
    let n = ego.len();
    Ok(ego.states[..n.saturating_sub(1)]
        .iter()
        .zip(survival)
        .map(|(s, surv)| {
            (weights.travel * s.velocity.abs()
                - weights.comfort * s.acceleration.abs()
                - weights.jerk * s.jerk.abs())
                * surv
                * ego.dt
        })
        .sum())
}

/// Survival `S(k) = exp(-Σ_{k'<k} τ(k') Δs)` of a sequence of total event
/// rates. `S(0) = 1`.
pub fn survival(rates: &[f64], dt: f64) -> Vec<f64> {
    let mut integral: f64 = 0.0;
    rates
        .iter()
        .map(|r| {
            let s = (-integral).exp();
            integral += r * dt;
            s
        })
        .collect()
}

pub fn cost(risk: f64, benefit: f64) -> f64 {
    risk - benefit
}

/// Risk, benefit and cost of one candidate in a single call.
pub fn evaluate(
    ego: &Trajectory,
    others: &[Trajectory],
    params: &RiskParams,
    weights: &BenefitWeights,
) -> Result<RiskBreakdown> {
    let mut b = evaluate_risk(ego, others, params)?;
    b.benefit = evaluate_benefit(ego, &b.survival(), weights)?;
    b.cost = cost(b.risk, b.benefit);
    Ok(b)
}

fn velocity_vector(v: f64, heading: f64) -> Vector2<f64> {
    Vector2::new(v * heading.cos(), v * heading.sin())
}

/// Precomputed other-car predictions for repeated cost evaluation of many
/// ego candidates over the same scene.
#[derive(Debug, Clone)]
pub struct SceneRisk {
    dt: f64,
    steps: usize,
    /// Per step, per car: mean, covariance entries (xx, xy, yy), velocity.
    cars: Vec<Vec<CarStep>>,
}

#[derive(Debug, Clone, Copy)]
struct CarStep {
    x: f64,
    y: f64,
    sxx: f64,
    sxy: f64,
    syy: f64,
    vx: f64,
    vy: f64,
}

impl CarStep {
    fn from_state(s: &crate::profiles::TrajectoryState) -> Self {
        let (sin, cos) = s.pose.heading.sin_cos();
        let lon2 = s.sigma_lon * s.sigma_lon;
        let lat2 = s.sigma_lat * s.sigma_lat;
        CarStep {
            x: s.pose.position.x,
            y: s.pose.position.y,
            sxx: lon2 * cos * cos + lat2 * sin * sin,
            sxy: (lon2 - lat2) * sin * cos,
            syy: lon2 * sin * sin + lat2 * cos * cos,
            vx: s.velocity * cos,
            vy: s.velocity * sin,
        }
    }
}

/// Exponent beyond which a Gaussian overlap is treated as exactly zero.
const NEGLIGIBLE_EXPONENT: f64 = 40.0;

impl SceneRisk {
    pub fn new(others: &[Trajectory], dt: f64, steps: usize) -> Result<Self> {
        let mut cars = vec![Vec::with_capacity(others.len()); steps];
        for (i, o) in others.iter().enumerate() {
            if o.len() != steps || (o.dt - dt).abs() > 1e-12 {
                return Err(Error::Contract(format!("trajectory {i} misaligned with scene")));
            }
            for (k, s) in o.states.iter().enumerate() {
                cars[k].push(CarStep::from_state(s));
            }
        }
        Ok(Self { dt, steps, cars })
    }

    /// Cost `R - B` of `ego`. Matches [`evaluate`] up to the omission of
    /// overlaps below `exp(-40)`.
    pub fn cost(&self, ego: &Trajectory, params: &RiskParams, weights: &BenefitWeights) -> Result<f64> {
        if ego.len() != self.steps || (ego.dt - self.dt).abs() > 1e-12 {
            return Err(Error::Contract("ego trajectory misaligned with scene".into()));
        }
        let dt = self.dt;
        let n = self.steps;
        let mut survival = 1.0;
        let mut risk = 0.0;
        let mut benefit = 0.0;
        for k in 0..n {
            let e = &ego.states[k];
            let me = CarStep::from_state(e);
            let mut p_sum = 0.0;
            let mut pd_sum = 0.0;
            for c in &self.cars[k] {
                let a = me.sxx + c.sxx;
                let b = me.sxy + c.sxy;
                let d = me.syy + c.syy;
                let dx = c.x - me.x;
                let dy = c.y - me.y;
                let dist2 = dx * dx + dy * dy;
                // λ_max(S) <= trace(S), so q >= dist2 / trace
                if dist2 > 2.0 * NEGLIGIBLE_EXPONENT * (a + d) {
                    continue;
                }
                let det = a * d - b * b;
                if !(det > 1e-18) {
                    return Err(Error::Evaluation("singular combined covariance".into()));
                }
                let q = (d * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
                if q > 2.0 * NEGLIGIBLE_EXPONENT {
                    continue;
                }
                let p = (-0.5 * q).exp() / (2.0 * PI * det.sqrt());
                let rvx = c.vx - me.vx;
                let rvy = c.vy - me.vy;
                let rel = (rvx * rvx + rvy * rvy).sqrt();
                p_sum += p;
                pd_sum += p * damage(DamageChannel::Collision, rel, params);
            }
            let scale = if p_sum > 1.0 { 1.0 / p_sum } else { 1.0 };
            let coll_term = pd_sum * scale / dt;
            let p_coll = p_sum.min(1.0);
            let p_curv = curve_probability(e.velocity, e.pose.curvature, params);
            let curv_term = if p_curv > 0.0 {
                p_curv / dt * damage(DamageChannel::Curve, e.velocity, params)
            } else {
                0.0
            };
            if k + 1 < n {
                risk += (coll_term + curv_term) * survival * dt;
                benefit += (weights.travel * e.velocity.abs()
                    - weights.comfort * e.acceleration.abs()
                    - weights.jerk * e.jerk.abs())
                    * survival
                    * dt;
            }
            survival *= (-(params.escape_rate + (p_coll + p_curv) / dt) * dt).exp();
        }
        Ok(risk - benefit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Path;
    use crate::profiles::{extrapolate_other, rollout, FixedProfile, RolloutConfig, VelocityProfile};
    use approx::assert_relative_eq;

    fn unit(x: f64, y: f64) -> UncertaintyEllipse {
        UncertaintyEllipse::new(Point::new(x, y), 1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn coincident_unit_gaussians() {
        let p = collision_probability(&unit(0.0, 0.0), &unit(0.0, 0.0)).unwrap();
        assert_relative_eq!(p, 1.0 / (4.0 * PI), max_relative = 1e-12);
    }

    #[test]
    fn far_apart_gaussians_vanish() {
        let p = collision_probability(&unit(0.0, 0.0), &unit(100.0, 0.0)).unwrap();
        assert!(p < 1e-30);
    }

    #[test]
    fn ellipse_rejects_bad_sigmas() {
        assert!(UncertaintyEllipse::new(Point::zeros(), 0.2, 0.5, 0.0).is_err());
        assert!(UncertaintyEllipse::new(Point::zeros(), 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn tight_ellipses_are_clamped() {
        let e = UncertaintyEllipse::new(Point::zeros(), 0.1, 0.05, 0.0).unwrap();
        assert!(gaussian_overlap(&e, &e).unwrap() > 1.0);
        assert_eq!(collision_probability(&e, &e).unwrap(), 1.0);
    }

    #[test]
    fn curve_probability_cases() {
        let params = RiskParams {
            sigma_curve: 1.0,
            ..Default::default()
        };
        let straight = curve_probability(10.0, 0.0, &params);
        assert_relative_eq!(straight, (2.0 * PI).powf(-0.5) * (-8.0f64).exp(), max_relative = 1e-12);
        // |a_y| = a_y,max: peak of the density
        let v = (4.0f64 / 0.1).sqrt();
        assert_relative_eq!(curve_probability(v, 0.1, &params), (2.0 * PI).powf(-0.5), max_relative = 1e-12);
        assert_relative_eq!(curve_probability(10.0, 0.03, &params), 0.2420, max_relative = 1e-3);
        // signed curvature of a right turn
        assert_relative_eq!(curve_probability(10.0, -0.03, &params), 0.2420, max_relative = 1e-3);
        let tight = RiskParams {
            sigma_curve: 0.2,
            ..Default::default()
        };
        assert_eq!(curve_probability(v, 0.1, &tight), 1.0);
    }

    #[test]
    fn literal_lateral_model() {
        let params = RiskParams {
            lateral_model: LateralAccelModel::Literal,
            ..Default::default()
        };
        assert_relative_eq!(params.lateral_acceleration(10.0, 0.1), 1.0);
    }

    #[test]
    fn damage_logistic_shape() {
        let p = RiskParams::default();
        assert_relative_eq!(damage(DamageChannel::Collision, 8.0, &p), 5.0e3);
        assert_relative_eq!(damage(DamageChannel::Curve, 12.0, &p), 2.5e3);
        let big_k = RiskParams {
            collision: DamageParams {
                d_max: 1e4,
                k: 5.0,
                beta: 8.0,
            },
            ..Default::default()
        };
        assert!(damage(DamageChannel::Collision, 0.0, &big_k) < 1e-10);
        assert_relative_eq!(damage(DamageChannel::Collision, 1e3, &p), 1e4);
        let literal = RiskParams {
            damage_sign: DamageSign::Literal,
            ..Default::default()
        };
        assert!(damage(DamageChannel::Collision, 20.0, &literal) < damage(DamageChannel::Collision, 0.0, &literal));
    }

    fn straight_path() -> Path {
        let pts: Vec<Point> = (0..=20).map(|i| Point::new(20.0 * i as f64, 0.0)).collect();
        Path::new(&pts).unwrap()
    }

    #[test]
    fn empty_road_has_no_risk() {
        let path = straight_path();
        let cfg = RolloutConfig::default();
        let ego = rollout(&VelocityProfile::Fixed(FixedProfile::constant(10.0)), &path, 0.0, &cfg).unwrap();
        let params = RiskParams {
            escape_rate: 0.0,
            ..Default::default()
        };
        let b = evaluate_risk(&ego, &[], &params).unwrap();
        assert!(b.risk < 1e-6);
        assert!(b.steps.iter().all(|s| (s.survival - 1.0).abs() < 1e-9));
    }

    #[test]
    fn constant_rate_survival_decay() {
        let path = straight_path();
        let cfg = RolloutConfig::default();
        let ego = rollout(&VelocityProfile::Fixed(FixedProfile::constant(0.0)), &path, 0.0, &cfg).unwrap();
        let params = RiskParams {
            escape_rate: 0.1,
            ..Default::default()
        };
        let b = evaluate_risk(&ego, &[], &params).unwrap();
        let last = b.steps.last().unwrap();
        assert_relative_eq!(ego.states.last().unwrap().time, 10.0);
        assert_relative_eq!(last.survival, (-1.0f64).exp(), max_relative = 1e-9);
        assert!(b.steps.windows(2).all(|w| w[1].survival <= w[0].survival));
    }

    #[test]
    fn benefit_cases() {
        let path = straight_path();
        let cfg = RolloutConfig::default();
        let ego = rollout(&VelocityProfile::Fixed(FixedProfile::constant(10.0)), &path, 0.0, &cfg).unwrap();
        let w = BenefitWeights {
            travel: per_km(1.0),
            comfort: 0.0,
            jerk: 0.0,
        };
        let ones = vec![1.0; ego.len()];
        assert_relative_eq!(evaluate_benefit(&ego, &ones, &w).unwrap(), 0.1, max_relative = 1e-12);
        let halves = vec![0.5; ego.len()];
        assert_relative_eq!(evaluate_benefit(&ego, &halves, &w).unwrap(), 0.05, max_relative = 1e-12);
        let still = rollout(&VelocityProfile::Fixed(FixedProfile::constant(0.0)), &path, 0.0, &cfg).unwrap();
        assert_eq!(evaluate_benefit(&still, &ones, &w).unwrap(), 0.0);
        assert!(evaluate_benefit(&still, &ones[1..], &w).is_err());
    }

    #[test]
    fn cost_arithmetic() {
        assert_relative_eq!(cost(0.0, 0.1), -0.1);
        assert_eq!(cost(0.3, 0.3), 0.0);
        assert_relative_eq!(cost(2.5, 0.3), 2.2);
    }

    #[test]
    fn mismatched_horizons_are_rejected() {
        let path = straight_path();
        let ego = rollout(
            &VelocityProfile::Fixed(FixedProfile::constant(5.0)),
            &path,
            0.0,
            &RolloutConfig::default(),
        )
        .unwrap();
        let short = RolloutConfig {
            horizon: 5.0,
            ..Default::default()
        };
        let other = extrapolate_other(&path.pose_at(50.0).unwrap(), 5.0, &path, &short).unwrap();
        assert!(matches!(
            evaluate_risk(&ego, &[other], &RiskParams::default()),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn scene_cost_matches_full_evaluation() {
        let path = straight_path();
        let cfg = RolloutConfig::default();
        let ego = rollout(&VelocityProfile::Fixed(FixedProfile::constant(8.0)), &path, 0.0, &cfg).unwrap();
        let others: Vec<Trajectory> = [12.0, 30.0, 150.0]
            .iter()
            .map(|&l| extrapolate_other(&path.pose_at(l).unwrap(), 6.0, &path, &cfg).unwrap())
            .collect();
        let params = RiskParams::default();
        let w = BenefitWeights::default();
        let full = evaluate(&ego, &others, &params, &w).unwrap();
        let scene = SceneRisk::new(&others, cfg.dt, ego.len()).unwrap();
        let fast = scene.cost(&ego, &params, &w).unwrap();
        assert_relative_eq!(full.cost, fast, max_relative = 1e-10);
        assert!(full.risk > 0.0);
    }
}
