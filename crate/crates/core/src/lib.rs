//! Energy-optimal placement of machining paths in the workspace of a three-axis manipulator.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`). The aliases at the crate root
//! fix the scalar to `f64`; the `*32` aliases fix it to `f32`.

pub mod frames;
pub mod linalg;
pub mod manipulator;
pub mod motor;
pub mod path;
pub mod placement;
pub mod scalar;

pub use frames::{placement_to_transform, FrameError, PlacementVar};
pub use manipulator::{
    check_limits, idm, igm, ikm, KinematicsError, Manipulator, STANDARD_GRAVITY,
};
pub use motor::{electrify, integrate_energy, total_energy, MotorError};
pub use path::{
    attach_cutting_forces, localize_trajectory, sample_path, Frame, PathError,
};
pub use placement::{
    evaluate, optimize, percent_saving, run_pipeline, sweep, DecisionMask, FailureReason,
    PlacementError, Sense,
};
pub use scalar::{wrap_angle, Real};

pub type Vec3 = linalg::Vec3<f64>;
pub type Mat3 = linalg::Mat3<f64>;
pub type Placement = frames::Placement<f64>;
pub type Transform = frames::Transform<f64>;
pub type RectPath = path::RectPath<f64>;
pub type Polyline = path::Polyline<f64>;
pub type FeedSpec = path::FeedSpec<f64>;
pub type CuttingForces = path::CuttingForces<f64>;
pub type TrajectorySample = path::TrajectorySample<f64>;
pub type ActuatorLimits = manipulator::ActuatorLimits<f64>;
pub type ActuatorState = manipulator::ActuatorState<f64>;
pub type ConstraintReport = manipulator::ConstraintReport<f64>;
pub type Gantry = manipulator::Gantry<f64>;
pub type Orthoglide = manipulator::Orthoglide<f64>;
pub type OrthoglideParams = manipulator::OrthoglideParams<f64>;
pub type WorkspaceAnchors = manipulator::WorkspaceAnchors<f64>;
pub type Model = manipulator::Model<f64>;
pub type MotorParams = motor::MotorParams<f64>;
pub type TimeGrid = motor::TimeGrid<f64>;
pub type ElectricTrace = motor::ElectricTrace<f64>;
pub type EnergyReport = motor::EnergyReport<f64>;
pub type PlacementProblem = placement::PlacementProblem<f64, manipulator::Model<f64>>;
pub type EvaluationOutcome = placement::EvaluationOutcome<f64>;
pub type OptimizerSettings = placement::OptimizerSettings<f64>;
pub type OptimizationResult = placement::OptimizationResult<f64>;
pub type GridAxis = placement::GridAxis<f64>;
pub type GridSpec = placement::GridSpec<f64>;
pub type SweepNode = placement::SweepNode<f64>;

pub type Vec3_32 = linalg::Vec3<f32>;
pub type Placement32 = frames::Placement<f32>;
pub type Model32 = manipulator::Model<f32>;
pub type PlacementProblem32 = placement::PlacementProblem<f32, manipulator::Model<f32>>;
