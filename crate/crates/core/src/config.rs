//! Scenario configuration for the simulator and the assignment CLI.
//!
//! A scenario is a JSON document listing sensors, targets (each with an
//! optional motion model), the selection strategy and a handful of scalar
//! knobs. [`ScenarioConfig::validate`] checks everything the simulator needs;
//! [`ScenarioConfig::validate_static`] checks only the static geometry so the
//! same file can drive a one-shot assignment without motion or strategy
//! fields.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::consts::{COLLISION_TOL, DEFAULT_NOISE_VAR};
use crate::error::{Error, Result};
use crate::geometry::{Point2, SensorPose, TargetBelief};
use crate::measures::DistanceMode;
use crate::sim::{MotionModel, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfig {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetScenarioConfig {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub u_max: f64,
    /// Stationary when omitted.
    #[serde(default)]
    pub motion: Option<MotionModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub sensors: Vec<SensorConfig>,
    pub targets: Vec<TargetScenarioConfig>,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub distance_mode: DistanceMode,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub steps: u64,
    #[serde(default = "default_noise_var")]
    pub noise_var: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_dt() -> f64 {
    1.0
}

fn default_noise_var() -> f64 {
    DEFAULT_NOISE_VAR
}

impl ScenarioConfig {
    /// Reads and parses a scenario file. Parse errors surface as
    /// [`Error::Config`], filesystem errors as [`Error::Io`].
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Sensor poses in id order.
    pub fn sensor_poses(&self) -> Vec<SensorPose<f64>> {
        let mut out: Vec<_> = self
            .sensors
            .iter()
            .map(|s| SensorPose::new(s.id, s.x, s.y))
            .collect();
        out.sort_by_key(|s| s.id);
        out
    }

    /// Initial target beliefs (unit covariance) in id order.
    pub fn target_beliefs(&self) -> Vec<TargetBelief<f64>> {
        let mut out: Vec<_> = self
            .targets
            .iter()
            .map(|t| TargetBelief::at(t.id, Point2::new(t.x, t.y), t.u_max))
            .collect();
        out.sort_by_key(|t| t.id);
        out
    }

    /// Checks the static geometry: sensors and targets well formed, `dt` and
    /// `noise_var` positive. Strategy and motion fields are ignored, so this
    /// is the right gate for one-shot assignment runs.
    pub fn validate_static(&self) -> Result<()> {
        if self.sensors.is_empty() {
            return Err(Error::Config("at least one sensor is required".into()));
        }
        let mut sensor_ids: Vec<u32> = self.sensors.iter().map(|s| s.id).collect();
        sensor_ids.sort_unstable();
        for w in sensor_ids.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateSensor(w[0]));
            }
        }
        for s in &self.sensors {
            if !(s.x.is_finite() && s.y.is_finite()) {
                return Err(Error::Config(format!(
                    "sensor {}: position must be finite",
                    s.id
                )));
            }
        }

        let mut target_ids: Vec<u32> = self.targets.iter().map(|t| t.id).collect();
        target_ids.sort_unstable();
        for w in target_ids.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Config(format!("duplicate target id {}", w[0])));
            }
        }
        for t in &self.targets {
            if !(t.x.is_finite() && t.y.is_finite()) {
                return Err(Error::Config(format!(
                    "target {}: position must be finite",
                    t.id
                )));
            }
            if !t.u_max.is_finite() || t.u_max < 0.0 {
                return Err(Error::Config(format!(
                    "target {}: u_max must be finite and non-negative",
                    t.id
                )));
            }
        }

        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::Config("dt must be finite and positive".into()));
        }
        if !self.noise_var.is_finite() || self.noise_var <= 0.0 {
            return Err(Error::Config(
                "noise_var must be finite and positive".into(),
            ));
        }
        Ok(())
    }

    /// Full simulator gate: static checks plus strategy references and
    /// per-target motion feasibility (each step's displacement must fit the
    /// `u_max * dt` control budget).
    pub fn validate(&self) -> Result<()> {
        self.validate_static()?;

        let has_sensor = |id: u32| self.sensors.iter().any(|s| s.id == id);
        match &self.strategy {
            Strategy::FlexibleBestPair => {
                if self.sensors.len() < 2 {
                    return Err(Error::Config(
                        "flexible_best_pair needs at least two sensors".into(),
                    ));
                }
            }
            Strategy::FlexiblePartnerFor { sensor } => {
                if !has_sensor(*sensor) {
                    return Err(Error::Config(format!(
                        "strategy references unknown sensor {sensor}"
                    )));
                }
                if self.sensors.len() < 2 {
                    return Err(Error::Config(
                        "flexible_partner_for needs at least two sensors".into(),
                    ));
                }
            }
            Strategy::FixedPair { first, second } => {
                if first == second {
                    return Err(Error::Config(
                        "fixed_pair sensors must be distinct".into(),
                    ));
                }
                for id in [first, second] {
                    if !has_sensor(*id) {
                        return Err(Error::Config(format!(
                            "strategy references unknown sensor {id}"
                        )));
                    }
                }
            }
            Strategy::GreedyUniquePairs => {
                if self.sensors.len() < 2 * self.targets.len() {
                    return Err(Error::TooFewSensors {
                        sensors: self.sensors.len(),
                        targets: self.targets.len(),
                    });
                }
            }
            Strategy::GreedyGeneral { .. } => {}
        }

        for t in &self.targets {
            let budget = t.u_max * self.dt;
            match &t.motion {
                None => {}
                Some(MotionModel::Circular {
                    center,
                    radius,
                    angular_rate,
                }) => {
                    if !(center[0].is_finite() && center[1].is_finite()) {
                        return Err(Error::Config(format!(
                            "target {}: circle center must be finite",
                            t.id
                        )));
                    }
                    if !radius.is_finite() || *radius <= 0.0 {
                        return Err(Error::Config(format!(
                            "target {}: circle radius must be positive",
                            t.id
                        )));
                    }
                    if !angular_rate.is_finite() {
                        return Err(Error::Config(format!(
                            "target {}: angular_rate must be finite",
                            t.id
                        )));
                    }
                    let offset = Point2::new(t.x - center[0], t.y - center[1]);
                    if offset.norm() <= COLLISION_TOL {
                        return Err(Error::Config(format!(
                            "target {}: initial position must differ from the circle center",
                            t.id
                        )));
                    }
                    let chord = 2.0 * radius * (angular_rate * self.dt / 2.0).sin().abs();
                    if chord > budget {
                        return Err(Error::Config(format!(
                            "target {}: circular step displacement {chord:.6} exceeds u_max * dt = {budget:.6}",
                            t.id
                        )));
                    }
                }
                Some(MotionModel::Waypoints { points, speed }) => {
                    if points.is_empty() {
                        return Err(Error::Config(format!(
                            "target {}: waypoint list must not be empty",
                            t.id
                        )));
                    }
                    if points.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
                        return Err(Error::Config(format!(
                            "target {}: waypoints must be finite",
                            t.id
                        )));
                    }
                    if !speed.is_finite() || *speed < 0.0 {
                        return Err(Error::Config(format!(
                            "target {}: waypoint speed must be finite and non-negative",
                            t.id
                        )));
                    }
                    if *speed > t.u_max {
                        return Err(Error::Config(format!(
                            "target {}: waypoint speed {speed} exceeds u_max {}",
                            t.id, t.u_max
                        )));
                    }
                }
                Some(MotionModel::Adversarial { sample_count }) if *sample_count == 0 => {
                    return Err(Error::Config(format!(
                        "target {}: adversarial sample_count must be at least 1",
                        t.id
                    )));
                }
                Some(MotionModel::Adversarial { .. }) => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ScenarioConfig {
        serde_json::from_str(
            r#"{
                "sensors": [
                    {"id": 1, "x": 0.0, "y": 0.0},
                    {"id": 2, "x": 4.0, "y": 0.0}
                ],
                "targets": [
                    {"id": 1, "x": 2.0, "y": 3.0, "u_max": 1.0}
                ]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = base();
        assert_eq!(cfg.strategy, Strategy::FlexibleBestPair);
        assert_eq!(cfg.distance_mode, DistanceMode::Euclidean);
        assert_eq!(cfg.dt, 1.0);
        assert_eq!(cfg.steps, 0);
        assert_eq!(cfg.noise_var, DEFAULT_NOISE_VAR);
        assert_eq!(cfg.seed, 0);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = serde_json::from_str::<ScenarioConfig>(
            r#"{"sensors": [], "targets": [], "stepz": 3}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn negative_u_max_names_the_target() {
        let mut cfg = base();
        cfg.targets[0].u_max = -1.0;
        let err = cfg.validate_static().unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.contains("target 1") && m.contains("u_max")));
    }

    #[test]
    fn duplicate_sensor_ids_are_rejected() {
        let mut cfg = base();
        cfg.sensors[1].id = 1;
        assert_eq!(cfg.validate_static().unwrap_err(), Error::DuplicateSensor(1));
    }

    #[test]
    fn unique_pair_strategy_needs_enough_sensors() {
        let mut cfg = base();
        cfg.strategy = Strategy::GreedyUniquePairs;
        cfg.targets.push(TargetScenarioConfig {
            id: 2,
            x: 1.0,
            y: 1.0,
            u_max: 1.0,
            motion: None,
        });
        let err = cfg.validate().unwrap_err();
        assert_eq!(
            err,
            Error::TooFewSensors {
                sensors: 2,
                targets: 2
            }
        );
        // The static gate does not look at the strategy.
        cfg.validate_static().unwrap();
    }

    #[test]
    fn fixed_pair_must_reference_existing_sensors() {
        let mut cfg = base();
        cfg.strategy = Strategy::FixedPair { first: 1, second: 9 };
        assert!(matches!(cfg.validate().unwrap_err(), Error::Config(_)));
    }

    #[test]
    fn circular_motion_must_fit_the_control_budget() {
        let mut cfg = base();
        cfg.targets[0].motion = Some(MotionModel::Circular {
            center: [0.0, 3.0],
            radius: 2.0,
            angular_rate: 2.0,
        });
        // Chord per step is 2 * 2 * sin(1) which is about 3.37 > 1.
        assert!(matches!(cfg.validate().unwrap_err(), Error::Config(_)));
        cfg.targets[0].u_max = 4.0;
        cfg.validate().unwrap();
    }

    #[test]
    fn waypoint_speed_is_capped_by_u_max() {
        let mut cfg = base();
        cfg.targets[0].motion = Some(MotionModel::Waypoints {
            points: vec![[10.0, 0.0]],
            speed: 1.5,
        });
        assert!(matches!(cfg.validate().unwrap_err(), Error::Config(_)));
        cfg.targets[0].u_max = 1.5;
        cfg.validate().unwrap();
    }

    #[test]
    fn strategy_round_trips_through_json() {
        let mut cfg = base();
        cfg.strategy = Strategy::GreedyGeneral {
            measure: crate::measures::MeasureKind::LogDet,
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"greedy_general\""));
        assert!(text.contains("\"log_det\""));
        let back: ScenarioConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
