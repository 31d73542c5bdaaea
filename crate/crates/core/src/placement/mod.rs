//! Energy evaluation of a path placement, constrained minimization over placements, and
//! exhaustive grid sweeps.
//!
//! The pipeline for one placement is: localize the sampled path in the base frame, attach the
//! cutting load, run the inverse geometric, kinematic and dynamic models on every sample,
//! convert actuator torques and rates to electric power, integrate, and check the actuator
//! limits.

pub mod nelder_mead;

use rayon::prelude::*;
use thiserror::Error;

use crate::frames::{FrameError, Placement, PlacementVar};
use crate::linalg::Vec3;
use crate::manipulator::{
    check_limits, idm, ActuatorLimits, ActuatorState, ConstraintReport, KinematicsError,
    Manipulator,
};
use crate::motor::{
    electrify, integrate_energy, total_energy, ElectricTrace, EnergyReport, MotorError,
    MotorParams, TimeGrid,
};
use crate::path::{
    attach_cutting_forces, localize_trajectory, sample_path, CuttingForces, FeedSpec, PathError,
    Polyline, TrajectorySample,
};
use crate::scalar::Real;

pub use nelder_mead::{SimplexSettings, Termination};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlacementError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no feasible placement found from {starts} start(s)")]
    NoFeasibleSolution { starts: usize },
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Motor(#[from] MotorError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Error raised while pushing one placement through the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Motor(#[from] MotorError),
}

/// Why an evaluated placement is not feasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    None,
    OutOfWorkspace,
    NearSingular,
    LimitViolation,
    InvalidTrajectory,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::None => "none",
            FailureReason::OutOfWorkspace => "out-of-workspace",
            FailureReason::NearSingular => "near-singular",
            FailureReason::LimitViolation => "limit-violation",
            FailureReason::InvalidTrajectory => "invalid-trajectory",
        }
    }

    fn from_error(e: &PipelineError) -> Self {
        match e {
            PipelineError::Kinematics(KinematicsError::OutOfWorkspace { .. }) => {
                FailureReason::OutOfWorkspace
            }
            PipelineError::Kinematics(KinematicsError::NearSingular { .. }) => {
                FailureReason::NearSingular
            }
            _ => FailureReason::InvalidTrajectory,
        }
    }
}

/// Which placement variables the optimizer moves, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionMask {
    free: Vec<PlacementVar>,
}

impl DecisionMask {
    pub fn new(free: Vec<PlacementVar>) -> Result<Self, PlacementError> {
        if free.is_empty() {
            return Err(PlacementError::InvalidProblem(
                "at least one placement variable must be free".into(),
            ));
        }
        let mut seen = [false; 6];
        for v in &free {
            if std::mem::replace(&mut seen[v.index()], true) {
                return Err(PlacementError::InvalidProblem(format!(
                    "{} listed twice",
                    v.name()
                )));
            }
        }
        Ok(Self { free })
    }

    /// `x_op, y_op, z_op, phi` free; `theta = psi = 0`.
    pub fn planar() -> Self {
        Self {
            free: vec![
                PlacementVar::XOp,
                PlacementVar::YOp,
                PlacementVar::ZOp,
                PlacementVar::Phi,
            ],
        }
    }

    pub fn full() -> Self {
        Self {
            free: PlacementVar::ALL.to_vec(),
        }
    }

    pub fn free(&self) -> &[PlacementVar] {
        &self.free
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }
}

/// Everything needed to score a placement.
#[derive(Debug, Clone)]
pub struct PlacementProblem<T, M> {
    model: M,
    limits: ActuatorLimits<T>,
    motors: [MotorParams<T>; 3],
    path: Polyline<T>,
    feed: FeedSpec<T>,
    forces: CuttingForces<T>,
    mask: DecisionMask,
    fixed: Placement<T>,
    bounds: Vec<(T, T)>,
    samples: Vec<TrajectorySample<T>>,
}

impl<T: Real, M: Manipulator<T>> PlacementProblem<T, M> {
    /// `fixed` supplies the values of the variables not in `mask`; `bounds` is one
    /// `(min, max)` pair per free variable.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        model: M,
        limits: ActuatorLimits<T>,
        motors: [MotorParams<T>; 3],
        path: Polyline<T>,
        feed: FeedSpec<T>,
        forces: CuttingForces<T>,
        mask: DecisionMask,
        fixed: Placement<T>,
        bounds: Vec<(T, T)>,
    ) -> Result<Self, PlacementError> {
        if bounds.len() != mask.len() {
            return Err(PlacementError::InvalidProblem(format!(
                "{} bounds for {} free variables",
                bounds.len(),
                mask.len()
            )));
        }
        for ((lo, hi), var) in bounds.iter().zip(mask.free()) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(PlacementError::InvalidProblem(format!(
                    "bounds of {} must be finite and ordered",
                    var.name()
                )));
            }
        }
        for m in &motors {
            m.validate()?;
        }
        let samples = sample_path(&path, &feed)?;
        Ok(Self {
            model,
            limits,
            motors,
            path,
            feed,
            forces,
            mask,
            fixed,
            bounds,
            samples,
        })
    }

    pub fn model(&self) -> &M {
        &self.model
    }
    pub fn limits(&self) -> &ActuatorLimits<T> {
        &self.limits
    }
    pub fn motors(&self) -> &[MotorParams<T>; 3] {
        &self.motors
    }
    pub fn path(&self) -> &Polyline<T> {
        &self.path
    }
    pub fn feed(&self) -> &FeedSpec<T> {
        &self.feed
    }
    pub fn forces(&self) -> &CuttingForces<T> {
        &self.forces
    }
    pub fn mask(&self) -> &DecisionMask {
        &self.mask
    }
    pub fn bounds(&self) -> &[(T, T)] {
        &self.bounds
    }
    pub fn fixed(&self) -> &Placement<T> {
        &self.fixed
    }
    /// Path-frame samples shared by every evaluation.
    pub fn path_samples(&self) -> &[TrajectorySample<T>] {
        &self.samples
    }

    /// Same problem with a different path.
    pub fn with_path(&self, path: Polyline<T>) -> Result<Self, PlacementError>
    where
        M: Clone,
    {
        let samples = sample_path(&path, &self.feed)?;
        Ok(Self {
            path,
            samples,
            ..self.clone()
        })
    }

    /// Same problem with different bounds.
    pub fn with_bounds(&self, bounds: Vec<(T, T)>) -> Result<Self, PlacementError>
    where
        M: Clone,
    {
        Self::new(
            self.model.clone(),
            self.limits,
            self.motors,
            self.path.clone(),
            self.feed,
            self.forces,
            self.mask.clone(),
            self.fixed,
            bounds,
        )
    }

    /// Builds a placement from free-variable values, taking the rest from the fixed values.
    pub fn placement_from(&self, free: &[T]) -> Result<Placement<T>, PlacementError> {
        if free.len() != self.mask.len() {
            return Err(PlacementError::InvalidArgument(format!(
                "expected {} free values, got {}",
                self.mask.len(),
                free.len()
            )));
        }
        let mut all = self.fixed.to_array();
        for (v, x) in self.mask.free().iter().zip(free) {
            all[v.index()] = *x;
        }
        Ok(Placement::from_array(all)?)
    }

    /// Free-variable values of a placement, in mask order.
    pub fn free_values(&self, p: &Placement<T>) -> Vec<T> {
        let all = p.to_array();
        self.mask.free().iter().map(|v| all[v.index()]).collect()
    }

    fn box_to_unit(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(&self.bounds)
            .map(|(x, (lo, hi))| {
                if hi > lo {
                    (*x - *lo) / (*hi - *lo)
                } else {
                    T::zero()
                }
            })
            .collect()
    }

    fn unit_to_box(&self, u: &[T]) -> Vec<T> {
        u.iter()
            .zip(&self.bounds)
            .map(|(u, (lo, hi))| *lo + *u * (*hi - *lo))
            .collect()
    }
}

/// Per-sample record of one placement's pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineRun<T> {
    pub placement: Placement<T>,
    /// Base-frame samples with the cutting load attached.
    pub samples: Vec<TrajectorySample<T>>,
    pub states: Vec<[ActuatorState<T>; 3]>,
    pub electric: [ElectricTrace<T>; 3],
    pub grid: TimeGrid<T>,
    pub energy: EnergyReport<T>,
    pub constraints: ConstraintReport<T>,
}

/// Runs the full pipeline; kinematic failures abort with an error.
pub fn run_pipeline<T: Real, M: Manipulator<T>>(
    problem: &PlacementProblem<T, M>,
    placement: &Placement<T>,
) -> Result<PipelineRun<T>, PipelineError> {
    let local = localize_trajectory(&problem.samples, placement)?;
    let samples = attach_cutting_forces(&local, &problem.forces)?;
    let ratios = Vec3(problem.motors.map(|m| m.transmission_ratio));
    let model = &problem.model;

    let mut states = Vec::with_capacity(samples.len());
    for s in &samples {
        let q = model.igm(&s.position)?;
        let q_dot = model.ikm(&s.position, &s.velocity)?;
        states.push(idm(model, s, &q, &q_dot, &ratios)?);
    }

    let ids: Vec<usize> = samples.iter().map(|s| s.segment).collect();
    let grid = TimeGrid::new(samples.iter().map(|s| s.t).collect(), &ids)?;
    let mut electric: [ElectricTrace<T>; 3] = Default::default();
    let mut energies = Vec::with_capacity(3);
    for (i, slot) in electric.iter_mut().enumerate() {
        let tau: Vec<T> = states.iter().map(|s| s[i].tau).collect();
        let rate: Vec<T> = states.iter().map(|s| s[i].q_dot).collect();
        *slot = electrify(&problem.motors[i], &grid, &tau, &rate)?;
        energies.push(integrate_energy(slot, &grid));
    }
    let energy = total_energy(&energies)?;
    let flat: Vec<ActuatorState<T>> = states.iter().flatten().copied().collect();
    let constraints = check_limits(&problem.limits, &flat);
    Ok(PipelineRun {
        placement: *placement,
        samples,
        states,
        electric,
        grid,
        energy,
        constraints,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationOutcome<T> {
    pub placement: Placement<T>,
    pub feasible: bool,
    /// Present whenever the trajectory could be computed, feasible or not.
    pub energy: Option<EnergyReport<T>>,
    pub constraints: Option<ConstraintReport<T>>,
    pub failure: FailureReason,
}

impl<T: Real> EvaluationOutcome<T> {
    pub fn total_energy(&self) -> Option<T> {
        self.energy.as_ref().map(|e| e.total)
    }
}

impl<T: Real> From<Result<PipelineRun<T>, (Placement<T>, PipelineError)>> for EvaluationOutcome<T> {
    fn from(r: Result<PipelineRun<T>, (Placement<T>, PipelineError)>) -> Self {
        match r {
            Ok(run) => {
                let feasible = run.constraints.feasible();
                EvaluationOutcome {
                    placement: run.placement,
                    feasible,
                    energy: Some(run.energy),
                    constraints: Some(run.constraints),
                    failure: if feasible {
                        FailureReason::None
                    } else {
                        FailureReason::LimitViolation
                    },
                }
            }
            Err((placement, e)) => EvaluationOutcome {
                placement,
                feasible: false,
                energy: None,
                constraints: None,
                failure: FailureReason::from_error(&e),
            },
        }
    }
}

/// Scores one placement. Pipeline failures are reported in the outcome, never as errors.
pub fn evaluate<T: Real, M: Manipulator<T>>(
    problem: &PlacementProblem<T, M>,
    placement: &Placement<T>,
) -> EvaluationOutcome<T> {
    run_pipeline(problem, placement)
        .map_err(|e| (*placement, e))
        .into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings<T> {
    pub simplex: SimplexSettings<T>,
    /// Weight of the squared normalized limit violations.
    pub penalty_weight: T,
    /// Objective assigned to placements the pipeline cannot evaluate.
    pub death_penalty: T,
    pub sense: Sense,
}

impl<T: Real> Default for OptimizerSettings<T> {
    fn default() -> Self {
        Self {
            simplex: SimplexSettings::default(),
            penalty_weight: T::lit(1e6),
            death_penalty: T::lit(1e30),
            sense: Sense::Minimize,
        }
    }
}

impl<T: Real> OptimizerSettings<T> {
    pub fn maximize(self) -> Self {
        Self {
            sense: Sense::Maximize,
            ..self
        }
    }

    fn validate(&self) -> Result<(), PlacementError> {
        let s = &self.simplex;
        if !(s.xtol > T::zero() && s.initial_step > T::zero() && s.max_evaluations > 0) {
            return Err(PlacementError::InvalidArgument(
                "tolerance, initial step and evaluation budget must be positive".into(),
            ));
        }
        if !(self.penalty_weight >= T::zero() && self.death_penalty.is_finite()) {
            return Err(PlacementError::InvalidArgument(
                "penalty weight must be >= 0 and the death penalty finite".into(),
            ));
        }
        Ok(())
    }
}

/// One objective evaluation as seen by the optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored<T> {
    /// Value the search minimizes (penalties included, sign flipped when maximizing).
    pub merit: T,
    /// Raw objective, present only at feasible points.
    pub feasible_value: Option<T>,
}

/// Black-box objective over the free variables, in natural units.
pub trait Objective<T: Real>: Sync {
    fn dim(&self) -> usize;
    fn bounds(&self) -> &[(T, T)];
    fn score(&self, x: &[T], settings: &OptimizerSettings<T>) -> Scored<T>;
}

struct EnergyObjective<'a, T, M> {
    problem: &'a PlacementProblem<T, M>,
}

impl<T: Real, M: Manipulator<T>> Objective<T> for EnergyObjective<'_, T, M> {
    fn dim(&self) -> usize {
        self.problem.mask.len()
    }

    fn bounds(&self) -> &[(T, T)] {
        &self.problem.bounds
    }

    fn score(&self, x: &[T], settings: &OptimizerSettings<T>) -> Scored<T> {
        let dead = Scored {
            merit: settings.death_penalty,
            feasible_value: None,
        };
        let Ok(placement) = self.problem.placement_from(x) else {
            return dead;
        };
        let outcome = evaluate(self.problem, &placement);
        let (Some(energy), Some(c)) = (outcome.total_energy(), outcome.constraints) else {
            return dead;
        };
        let signed = match settings.sense {
            Sense::Minimize => energy,
            Sense::Maximize => -energy,
        };
        Scored {
            merit: signed + settings.penalty_weight * c.normalized_violation(&self.problem.limits),
            feasible_value: outcome.feasible.then_some(energy),
        }
    }
}

/// Objective from a closure returning `(value, feasible)`.
pub struct FnObjective<T, F> {
    bounds: Vec<(T, T)>,
    f: F,
}

impl<T: Real, F: Fn(&[T]) -> (T, bool) + Sync> FnObjective<T, F> {
    pub fn new(bounds: Vec<(T, T)>, f: F) -> Self {
        Self { bounds, f }
    }
}

impl<T: Real, F: Fn(&[T]) -> (T, bool) + Sync> Objective<T> for FnObjective<T, F> {
    fn dim(&self) -> usize {
        self.bounds.len()
    }

    fn bounds(&self) -> &[(T, T)] {
        &self.bounds
    }

    fn score(&self, x: &[T], settings: &OptimizerSettings<T>) -> Scored<T> {
        let (v, feasible) = (self.f)(x);
        let signed = match settings.sense {
            Sense::Minimize => v,
            Sense::Maximize => -v,
        };
        Scored {
            merit: if feasible { signed } else { settings.death_penalty },
            feasible_value: feasible.then_some(v),
        }
    }
}

/// Summary of the search launched from one start.
#[derive(Debug, Clone, PartialEq)]
pub struct StartSummary<T> {
    pub start: Vec<T>,
    /// Best vertex of the final simplex.
    pub end: Vec<T>,
    /// Best feasible point met along this start's search.
    pub best_feasible: Option<(Vec<T>, T)>,
    pub evaluations: usize,
    pub iterations: usize,
    pub termination: Termination,
}

/// Optimum over free variables of a generic objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<T> {
    pub best: Vec<T>,
    pub best_value: T,
    pub best_start: usize,
    pub evaluations: usize,
    pub iterations: usize,
    pub starts: Vec<StartSummary<T>>,
}

fn better<T: Real>(sense: Sense, a: T, b: T) -> bool {
    match sense {
        Sense::Minimize => a < b,
        Sense::Maximize => a > b,
    }
}

fn search_from<T: Real, O: Objective<T>>(
    objective: &O,
    start: &[T],
    settings: &OptimizerSettings<T>,
) -> StartSummary<T> {
    let bounds = objective.bounds();
    let box_to_unit = |x: &[T]| -> Vec<T> {
        x.iter()
            .zip(bounds)
            .map(|(x, (lo, hi))| if hi > lo { (*x - *lo) / (*hi - *lo) } else { T::zero() })
            .collect()
    };
    let unit_to_box = |u: &[T]| -> Vec<T> {
        u.iter()
            .zip(bounds)
            .map(|(u, (lo, hi))| *lo + *u * (*hi - *lo))
            .collect()
    };
    let mut best_feasible: Option<(Vec<T>, T)> = None;
    let out = nelder_mead::minimize(
        |u: &[T]| {
            let x = unit_to_box(u);
            let s = objective.score(&x, settings);
            if let Some(v) = s.feasible_value {
                let improves = best_feasible
                    .as_ref()
                    .is_none_or(|(_, b)| better(settings.sense, v, *b));
                if improves {
                    best_feasible = Some((x, v));
                }
            }
            s.merit
        },
        &box_to_unit(start),
        &settings.simplex,
    );
    StartSummary {
        start: start.to_vec(),
        end: unit_to_box(&out.best),
        best_feasible,
        evaluations: out.evaluations,
        iterations: out.iterations,
        termination: out.termination,
    }
}

/// Multi-start simplex search. Starts run in parallel; the result depends only on the
/// starts and settings. Ties go to the lowest start index.
pub fn optimize_objective<T: Real, O: Objective<T>>(
    objective: &O,
    starts: &[Vec<T>],
    settings: &OptimizerSettings<T>,
) -> Result<SearchResult<T>, PlacementError> {
    settings.validate()?;
    if starts.is_empty() {
        return Err(PlacementError::InvalidArgument("at least one start is required".into()));
    }
    if let Some(s) = starts.iter().find(|s| s.len() != objective.dim()) {
        return Err(PlacementError::InvalidArgument(format!(
            "start has {} values, expected {}",
            s.len(),
            objective.dim()
        )));
    }
    let summaries: Vec<StartSummary<T>> = starts
        .par_iter()
        .map(|s| search_from(objective, s, settings))
        .collect();

    let mut best: Option<(usize, &Vec<T>, T)> = None;
    for (i, s) in summaries.iter().enumerate() {
        if let Some((x, v)) = &s.best_feasible {
            if best.is_none_or(|(_, _, b)| better(settings.sense, *v, b)) {
                best = Some((i, x, *v));
            }
        }
    }
    let (best_start, x, v) = best.ok_or(PlacementError::NoFeasibleSolution {
        starts: starts.len(),
    })?;
    Ok(SearchResult {
        best: x.clone(),
        best_value: v,
        best_start,
        evaluations: summaries.iter().map(|s| s.evaluations).sum(),
        iterations: summaries.iter().map(|s| s.iterations).sum(),
        starts: summaries,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub best: Placement<T>,
    /// Minimum (or maximum, when maximizing) total energy, J.
    pub best_energy: T,
    pub best_start: usize,
    pub evaluations: usize,
    pub iterations: usize,
    pub starts: Vec<StartSummary<T>>,
    pub sense: Sense,
}

/// Minimizes (or maximizes) total energy over the free placement variables.
pub fn optimize<T: Real, M: Manipulator<T>>(
    problem: &PlacementProblem<T, M>,
    starts: &[Placement<T>],
    settings: &OptimizerSettings<T>,
) -> Result<OptimizationResult<T>, PlacementError> {
    let starts: Vec<Vec<T>> = starts
        .iter()
        .map(|p| {
            let x = problem.free_values(p);
            // keep starts inside the box
            let u = problem.box_to_unit(&x);
            problem.unit_to_box(&u.iter().map(|c| c.max(T::zero()).min(T::one())).collect::<Vec<_>>())
        })
        .collect();
    let r = optimize_objective(&EnergyObjective { problem }, &starts, settings)?;
    Ok(OptimizationResult {
        best: problem.placement_from(&r.best)?,
        best_energy: r.best_value,
        best_start: r.best_start,
        evaluations: r.evaluations,
        iterations: r.iterations,
        starts: r.starts,
        sense: settings.sense,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis<T> {
    pub min: T,
    pub max: T,
    pub step: T,
}

impl<T: Real> GridAxis<T> {
    pub fn new(min: T, max: T, step: T) -> Result<Self, PlacementError> {
        if !(step > T::zero() && min <= max && min.is_finite() && max.is_finite()) {
            return Err(PlacementError::InvalidArgument(format!(
                "grid axis needs step > 0 and min <= max (got {min}..{max} step {step})"
            )));
        }
        Ok(Self { min, max, step })
    }

    /// A single node.
    pub fn fixed(value: T) -> Self {
        Self {
            min: value,
            max: value,
            step: T::one(),
        }
    }

    pub fn count(&self) -> usize {
        let span = (self.max - self.min) / self.step;
        (span + T::lit(1e-9)).floor().to_usize().unwrap_or(0) + 1
    }

    pub fn value(&self, k: usize) -> T {
        self.min + T::from_usize(k).unwrap() * self.step
    }
}

/// One axis per free variable, in mask order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    pub axes: Vec<GridAxis<T>>,
}

impl<T: Real> GridSpec<T> {
    pub fn node_count(&self) -> usize {
        self.axes.iter().map(GridAxis::count).product()
    }

    /// Per-axis indices of node `n`, last axis fastest.
    pub fn node_index(&self, mut n: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (slot, axis) in idx.iter_mut().zip(&self.axes).rev() {
            let c = axis.count();
            *slot = n % c;
            n /= c;
        }
        idx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepNode<T> {
    pub index: Vec<usize>,
    pub values: Vec<T>,
    pub outcome: EvaluationOutcome<T>,
}

/// Evaluates every grid node, row-major over the free variables in mask order.
pub fn sweep<T: Real, M: Manipulator<T>>(
    problem: &PlacementProblem<T, M>,
    grid: &GridSpec<T>,
) -> Result<Vec<SweepNode<T>>, PlacementError> {
    if grid.axes.len() != problem.mask.len() {
        return Err(PlacementError::InvalidArgument(format!(
            "grid has {} axes for {} free variables",
            grid.axes.len(),
            problem.mask.len()
        )));
    }
    (0..grid.node_count())
        .into_par_iter()
        .map(|n| {
            let index = grid.node_index(n);
            let values: Vec<T> = index
                .iter()
                .zip(&grid.axes)
                .map(|(k, a)| a.value(*k))
                .collect();
            let placement = problem.placement_from(&values)?;
            let outcome = evaluate(problem, &placement);
            Ok(SweepNode {
                index,
                values,
                outcome,
            })
        })
        .collect()
}

/// Percentage of `e_max` saved by running at `e_min`.
pub fn percent_saving<T: Real>(e_min: T, e_max: T) -> Result<T, PlacementError> {
    if !(e_max > T::zero() && e_min >= T::zero() && e_min <= e_max && e_max.is_finite()) {
        return Err(PlacementError::InvalidArgument(format!(
            "need 0 <= e_min <= e_max and e_max > 0 (got {e_min}, {e_max})"
        )));
    }
    Ok(T::lit(100.0) * (e_max - e_min) / e_max)
}
