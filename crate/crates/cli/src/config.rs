//! Run configuration: a JSON document with explicit units on every dimensioned value.
//!
//! Parsing checks syntax, field names and unit dimensions (errors carry line and column);
//! [`RunConfig::build`] then checks cross-field consistency and converts everything to SI.

use std::fmt;
use std::path::Path;

use pathplace::frames::PlacementVar;
use pathplace::linalg::Vec3;
use pathplace::manipulator::{Gantry, WorkspaceAnchors};
use pathplace::placement::{GridAxis, GridSpec, SimplexSettings};
use pathplace::{
    ActuatorLimits, CuttingForces, DecisionMask, FeedSpec, Model, MotorParams, Orthoglide,
    OrthoglideParams, Placement, PlacementProblem, RectPath,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{
    Acceleration, Angle, EmfConstant, Force, Inductance, Length, Mass, Quantity, Ratio,
    Resistance, Speed, Time, Torque, TorqueConstant,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error("{section}: {message}")]
    Invalid { section: String, message: String },
}

fn invalid(section: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        section: section.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manipulator: ManipulatorConfig,
    pub limits: LimitsConfig,
    /// One entry shared by all actuators, or one per actuator.
    pub motors: Vec<MotorConfig>,
    pub path: PathConfig,
    pub forces: ForcesConfig,
    pub placement: PlacementConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManipulatorConfig {
    Orthoglide(OrthoglideConfig),
    Gantry(GantryConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrthoglideConfig {
    pub leg_length: Quantity<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub foot_offset: Option<[Quantity<Length>; 3]>,
    pub slider_mass: Quantity<Mass>,
    pub platform_mass: Quantity<Mass>,
    pub leg_mass: Quantity<Mass>,
    pub gravity: Quantity<Acceleration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_condition: Option<f64>,
    /// Cube diagonal corners, given as the common coordinate of each corner.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workspace: Option<WorkspaceConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceConfig {
    pub q_plus: Quantity<Length>,
    pub q_minus: Quantity<Length>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GantryConfig {
    pub slider_mass: [Quantity<Mass>; 3],
    pub platform_mass: Quantity<Mass>,
    /// `"x"`, `"y"` or `"z"`; absent means no gravity load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gravity_axis: Option<String>,
    pub gravity: Quantity<Acceleration>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsConfig {
    pub q_min: Quantity<Length>,
    pub q_max: Quantity<Length>,
    pub v_max: Quantity<Speed>,
    pub tau_max: Quantity<Torque>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorConfig {
    pub k_t: Quantity<TorqueConstant>,
    pub k_e: Quantity<EmfConstant>,
    pub resistance: Quantity<Resistance>,
    pub inductance: Quantity<Inductance>,
    pub phases: u32,
    pub transmission_ratio: Quantity<Ratio>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    pub width: Quantity<Length>,
    pub length: Quantity<Length>,
    pub speed: Quantity<Speed>,
    pub sample_dt: Quantity<Time>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcesConfig {
    pub feed: Quantity<Force>,
    pub axial: Quantity<Force>,
    pub radial: Quantity<Force>,
    #[serde(default)]
    pub flip_feed: bool,
    #[serde(default)]
    pub flip_axial: bool,
    #[serde(default)]
    pub flip_radial: bool,
}

/// One optional entry per placement variable; lengths for the origin, angles for the
/// orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerVar<L, A> {
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub x_op: Option<L>,
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub y_op: Option<L>,
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub z_op: Option<L>,
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub phi: Option<A>,
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub theta: Option<A>,
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub psi: Option<A>,
}

fn none<T>() -> Option<T> {
    None
}

impl<L, A> Default for PerVar<L, A> {
    fn default() -> Self {
        Self {
            x_op: None,
            y_op: None,
            z_op: None,
            phi: None,
            theta: None,
            psi: None,
        }
    }
}

impl<L, A> PerVar<L, A> {
    fn with<R>(&self, var: PlacementVar, fl: impl Fn(&L) -> R, fa: impl Fn(&A) -> R) -> Option<R> {
        match var {
            PlacementVar::XOp => self.x_op.as_ref().map(fl),
            PlacementVar::YOp => self.y_op.as_ref().map(fl),
            PlacementVar::ZOp => self.z_op.as_ref().map(fl),
            PlacementVar::Phi => self.phi.as_ref().map(fa),
            PlacementVar::Theta => self.theta.as_ref().map(fa),
            PlacementVar::Psi => self.psi.as_ref().map(fa),
        }
    }

    fn is_set(&self, var: PlacementVar) -> bool {
        self.with(var, |_| (), |_| ()).is_some()
    }
}

pub type PlacementValues = PerVar<Quantity<Length>, Quantity<Angle>>;

impl PlacementValues {
    pub fn get_si(&self, var: PlacementVar) -> Option<f64> {
        self.with(var, Quantity::to_si, Quantity::to_si)
    }

    /// Sets `var` from compact text such as `-20mm` or `45deg`.
    pub fn set_compact(&mut self, var: PlacementVar, text: &str) -> Result<(), String> {
        if var.is_angle() {
            let q = Some(Quantity::parse_compact(text)?);
            match var {
                PlacementVar::Phi => self.phi = q,
                PlacementVar::Theta => self.theta = q,
                _ => self.psi = q,
            }
        } else {
            let q = Some(Quantity::parse_compact(text)?);
            match var {
                PlacementVar::XOp => self.x_op = q,
                PlacementVar::YOp => self.y_op = q,
                _ => self.z_op = q,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "D: crate::units::Dimension")]
pub struct RangeConfig<D> {
    pub min: Quantity<D>,
    pub max: Quantity<D>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "D: crate::units::Dimension")]
pub struct AxisConfig<D> {
    pub min: Quantity<D>,
    pub max: Quantity<D>,
    pub step: Quantity<D>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementConfig {
    /// Names of the free variables, in optimizer order.
    pub free: Vec<String>,
    /// Values of every variable not listed in `free` (absent means zero); also the
    /// placement used by `trace`.
    #[serde(default)]
    pub fixed: PlacementValues,
    #[serde(default)]
    pub bounds: PerVar<RangeConfig<Length>, RangeConfig<Angle>>,
    /// Missing variables take their `fixed` value.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub starts: Vec<PlacementValues>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<PerVar<AxisConfig<Length>, AxisConfig<Angle>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    /// Simplex size (in box-normalized coordinates) at which a search stops.
    pub xtol: f64,
    pub max_evaluations: usize,
    /// Initial simplex edge, box-normalized.
    pub initial_step: f64,
    pub max_restarts: usize,
    pub penalty_weight: f64,
    pub death_penalty: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let s = SimplexSettings::<f64>::default();
        Self {
            xtol: s.xtol,
            max_evaluations: s.max_evaluations,
            initial_step: s.initial_step,
            max_restarts: s.max_restarts,
            penalty_weight: 1e6,
            death_penalty: 1e30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub sizes: Vec<SizeConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeConfig {
    pub width: Quantity<Length>,
    pub length: Quantity<Length>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

/// Everything a command needs, in SI units.
#[derive(Debug, Clone)]
pub struct Setup {
    pub problem: PlacementProblem,
    pub fixed: Placement,
    pub starts: Vec<Placement>,
    pub grid: Option<GridSpec<f64>>,
    pub settings: pathplace::OptimizerSettings,
    /// `(width, length)` pairs for `compare`.
    pub sizes: Vec<(f64, f64)>,
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn mask(&self) -> Result<DecisionMask, ConfigError> {
        let vars = self
            .placement
            .free
            .iter()
            .map(|n| {
                PlacementVar::from_name(n)
                    .ok_or_else(|| invalid("placement.free", format!("unknown variable `{n}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        DecisionMask::new(vars).map_err(|e| invalid("placement.free", e))
    }

    fn model(&self) -> Result<Model, ConfigError> {
        match &self.manipulator {
            ManipulatorConfig::Orthoglide(c) => {
                let mut params = OrthoglideParams {
                    leg_length: c.leg_length.to_si(),
                    slider_mass: c.slider_mass.to_si(),
                    platform_mass: c.platform_mass.to_si(),
                    leg_mass: c.leg_mass.to_si(),
                    gravity: c.gravity.to_si(),
                    ..OrthoglideParams::default()
                };
                if let Some(o) = &c.foot_offset {
                    params.foot_offset = [o[0].to_si(), o[1].to_si(), o[2].to_si()];
                }
                if let Some(k) = c.max_condition {
                    params.max_condition = k;
                }
                if let Some(w) = &c.workspace {
                    let (hi, lo) = (w.q_plus.to_si(), w.q_minus.to_si());
                    let d = |v: f64| Vec3::new(v, v, v);
                    params.anchors = WorkspaceAnchors {
                        origin: Vec3::zeros(),
                        center: d(0.5 * (hi + lo)),
                        q_plus: d(hi),
                        q_minus: d(lo),
                        cube_side: hi - lo,
                    };
                }
                Orthoglide::new(params)
                    .map(Model::Orthoglide)
                    .map_err(|e| invalid("manipulator", e))
            }
            ManipulatorConfig::Gantry(c) => {
                let axis = match c.gravity_axis.as_deref() {
                    None => None,
                    Some("x") => Some(0),
                    Some("y") => Some(1),
                    Some("z") => Some(2),
                    Some(other) => {
                        return Err(invalid(
                            "manipulator.gravity_axis",
                            format!("`{other}` is not one of x, y, z"),
                        ))
                    }
                };
                let mut g = Gantry::new(c.slider_mass.clone().map(|m| m.to_si()), c.platform_mass.to_si(), axis)
                    .map_err(|e| invalid("manipulator", e))?;
                g.gravity = c.gravity.to_si();
                if !(g.gravity >= 0.0) {
                    return Err(invalid("manipulator.gravity", "must be >= 0"));
                }
                Ok(Model::Gantry(g))
            }
        }
    }

    fn motors(&self) -> Result<[MotorParams; 3], ConfigError> {
        let build = |m: &MotorConfig| {
            MotorParams::new(
                m.k_t.to_si(),
                m.k_e.to_si(),
                m.resistance.to_si(),
                m.inductance.to_si(),
                m.phases,
                m.transmission_ratio.to_si(),
            )
            .map_err(|e| invalid("motors", e))
        };
        match self.motors.as_slice() {
            [one] => Ok([build(one)?; 3]),
            [a, b, c] => Ok([build(a)?, build(b)?, build(c)?]),
            other => Err(invalid(
                "motors",
                format!("expected 1 or 3 entries, found {}", other.len()),
            )),
        }
    }

    fn placement_with(&self, values: &PlacementValues, section: &str) -> Result<Placement, ConfigError> {
        let fixed = &self.placement.fixed;
        let all = PlacementVar::ALL.map(|v| values.get_si(v).or_else(|| fixed.get_si(v)).unwrap_or(0.0));
        Placement::from_array(all).map_err(|e| invalid(section, e))
    }

    /// The fixed placement, with `overrides` applied.
    pub fn placement(&self, overrides: &PlacementValues) -> Result<Placement, ConfigError> {
        self.placement_with(overrides, "placement.fixed")
    }

    /// Converts to SI and checks cross-field consistency.
    pub fn build(&self) -> Result<Setup, ConfigError> {
        let mask = self.mask()?;
        let pc = &self.placement;
        let mut bounds = Vec::new();
        for v in mask.free() {
            let (lo, hi) = pc
                .bounds
                .with(*v, |r| (r.min.to_si(), r.max.to_si()), |r| (r.min.to_si(), r.max.to_si()))
                .ok_or_else(|| invalid("placement.bounds", format!("missing bounds for free variable `{}`", v.name())))?;
            bounds.push((lo, hi));
        }
        for v in PlacementVar::ALL {
            if pc.bounds.is_set(v) && !mask.free().contains(&v) {
                return Err(invalid("placement.bounds", format!("`{}` is not free", v.name())));
            }
        }

        let limits = ActuatorLimits::new(
            self.limits.q_min.to_si(),
            self.limits.q_max.to_si(),
            self.limits.v_max.to_si(),
            self.limits.tau_max.to_si(),
        )
        .map_err(|e| invalid("limits", e))?;
        let path = RectPath::new(self.path.length.to_si(), self.path.width.to_si())
            .map_err(|e| invalid("path", e))?;
        let feed = FeedSpec::new(self.path.speed.to_si(), self.path.sample_dt.to_si())
            .map_err(|e| invalid("path", e))?;
        let f = &self.forces;
        let forces = CuttingForces {
            f_feed: f.feed.to_si(),
            f_axial: f.axial.to_si(),
            f_radial: f.radial.to_si(),
            flip_feed: f.flip_feed,
            flip_axial: f.flip_axial,
            flip_radial: f.flip_radial,
        };
        let fixed = self.placement(&PlacementValues::default())?;
        let problem = PlacementProblem::new(
            self.model()?,
            limits,
            self.motors()?,
            path.to_polyline(),
            feed,
            forces,
            mask.clone(),
            fixed,
            bounds.clone(),
        )
        .map_err(|e| invalid("placement", e))?;

        let starts = pc
            .starts
            .iter()
            .enumerate()
            .map(|(i, s)| self.placement_with(s, &format!("placement.starts[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;

        let grid = match &pc.grid {
            None => None,
            Some(g) => {
                let mut axes = Vec::new();
                for v in mask.free() {
                    let (lo, hi, step) = g
                        .with(
                            *v,
                            |a| (a.min.to_si(), a.max.to_si(), a.step.to_si()),
                            |a| (a.min.to_si(), a.max.to_si(), a.step.to_si()),
                        )
                        .ok_or_else(|| invalid("placement.grid", format!("missing axis for free variable `{}`", v.name())))?;
                    axes.push(GridAxis::new(lo, hi, step).map_err(|e| invalid("placement.grid", e))?);
                }
                Some(GridSpec { axes })
            }
        };

        let o = &self.optimizer;
        let settings = pathplace::OptimizerSettings {
            simplex: SimplexSettings {
                xtol: o.xtol,
                max_evaluations: o.max_evaluations,
                initial_step: o.initial_step,
                max_restarts: o.max_restarts,
            },
            penalty_weight: o.penalty_weight,
            death_penalty: o.death_penalty,
            sense: pathplace::Sense::Minimize,
        };
        if !(o.xtol > 0.0 && o.max_evaluations > 0 && o.initial_step > 0.0 && o.penalty_weight >= 0.0) {
            return Err(invalid("optimizer", "xtol, max_evaluations and initial_step must be > 0, penalty_weight >= 0"));
        }

        let sizes = self
            .compare
            .as_ref()
            .map(|c| c.sizes.iter().map(|s| (s.width.to_si(), s.length.to_si())).collect())
            .unwrap_or_default();

        Ok(Setup {
            problem,
            fixed,
            starts,
            grid,
            settings,
            sizes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORTHOGLIDE: &str = include_str!("../configs/orthoglide.json");
    const GANTRY: &str = include_str!("../configs/gantry_demo.json");

    #[test]
    fn shipped_configs_build() {
        for text in [ORTHOGLIDE, GANTRY] {
            let c = RunConfig::from_json(text, "shipped").unwrap();
            let s = c.build().unwrap();
            assert!(!s.starts.is_empty());
            assert!(s.grid.is_some());
        }
    }

    #[test]
    fn round_trip_is_identity() {
        for text in [ORTHOGLIDE, GANTRY] {
            let c = RunConfig::from_json(text, "shipped").unwrap();
            let again = RunConfig::from_json(&c.to_json(), "serialized").unwrap();
            assert_eq!(c, again);
            assert_eq!(c.to_json(), again.to_json());
        }
    }

    #[test]
    fn converts_to_si() {
        let s = RunConfig::from_json(ORTHOGLIDE, "shipped").unwrap().build().unwrap();
        assert!((s.problem.feed().speed - 40.0 / 60.0).abs() < 1e-15);
        assert_eq!(s.problem.limits().q_max, 0.383);
        assert_eq!(s.problem.motors()[0].inductance, 8.5e-3);
    }

    #[test]
    fn unit_errors_point_at_their_line() {
        let bad = ORTHOGLIDE.replacen("\"unit\": \"m/min\"", "\"unit\": \"furlong\"", 1);
        let line = bad.lines().position(|l| l.contains("furlong")).unwrap() + 1;
        match RunConfig::from_json(&bad, "bad.json") {
            Err(ConfigError::Parse { line: l, message, .. }) => {
                assert!(l == line || l == line + 1, "reported {l}, unit on {line}");
                assert!(message.contains("not a speed unit"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_units_are_rejected() {
        let bad = ORTHOGLIDE.replacen("\"unit\": \"m/min\"", "\"unitt\": \"m/min\"", 1);
        assert!(matches!(RunConfig::from_json(&bad, "x"), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn free_variables_need_bounds() {
        let mut c = RunConfig::from_json(ORTHOGLIDE, "shipped").unwrap();
        c.placement.bounds.phi = None;
        let err = c.build().unwrap_err().to_string();
        assert!(err.contains("phi"), "{err}");
        c.placement.free.push("omega".into());
        assert!(c.build().is_err());
    }
}
