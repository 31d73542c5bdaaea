//! The four commands. Each returns the text of its output files; writing them is left to the
//! caller so outputs can be compared byte for byte.

use pathplace::frames::PlacementVar;
use pathplace::manipulator::{ConstraintMargin, ConstraintReport};
use pathplace::motor::EnergyReport;
use pathplace::placement::{
    evaluate, optimize, percent_saving, run_pipeline, sweep, FailureReason, PlacementError,
    Sense, StartSummary, Termination,
};
use pathplace::{OptimizationResult, Placement, Polyline, RectPath};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::config::Setup;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("no feasible placement: {0}")]
    NoFeasible(PlacementError),
    #[error("{0}")]
    Failed(String),
}

impl From<PlacementError> for CommandError {
    fn from(e: PlacementError) -> Self {
        match e {
            PlacementError::NoFeasibleSolution { .. } => CommandError::NoFeasible(e),
            other => CommandError::Failed(other.to_string()),
        }
    }
}

/// Shortest decimal that parses back to the same value.
pub fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct PlacementJson {
    x_op: f64,
    y_op: f64,
    z_op: f64,
    phi: f64,
    theta: f64,
    psi: f64,
}

impl From<&Placement> for PlacementJson {
    fn from(p: &Placement) -> Self {
        Self {
            x_op: p.x_op(),
            y_op: p.y_op(),
            z_op: p.z_op(),
            phi: p.phi(),
            theta: p.theta(),
            psi: p.psi(),
        }
    }
}

#[derive(Serialize)]
struct MarginJson {
    worst_margin: f64,
    violated: bool,
}

impl From<&ConstraintMargin<f64>> for MarginJson {
    fn from(m: &ConstraintMargin<f64>) -> Self {
        Self {
            worst_margin: m.worst_margin,
            violated: m.violated,
        }
    }
}

#[derive(Serialize)]
struct ConstraintsJson {
    displacement: MarginJson,
    velocity: MarginJson,
    torque: MarginJson,
}

impl From<&ConstraintReport<f64>> for ConstraintsJson {
    fn from(c: &ConstraintReport<f64>) -> Self {
        Self {
            displacement: (&c.displacement).into(),
            velocity: (&c.velocity).into(),
            torque: (&c.torque).into(),
        }
    }
}

#[derive(Serialize)]
struct ActuatorEnergyJson {
    energy: f64,
    joule: f64,
    inductive: f64,
    emf: f64,
}

#[derive(Serialize)]
struct EnergyJson {
    total: f64,
    joule: f64,
    inductive: f64,
    emf: f64,
    duration: f64,
    actuators: Vec<ActuatorEnergyJson>,
}

impl From<&EnergyReport<f64>> for EnergyJson {
    fn from(e: &EnergyReport<f64>) -> Self {
        Self {
            total: e.total,
            joule: e.joule,
            inductive: e.inductive,
            emf: e.emf,
            duration: e.duration,
            actuators: e
                .actuators
                .iter()
                .map(|a| ActuatorEnergyJson {
                    energy: a.energy,
                    joule: a.joule,
                    inductive: a.inductive,
                    emf: a.emf,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct TraceReport {
    placement: PlacementJson,
    feasible: bool,
    failure: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    samples: usize,
    energy: Option<EnergyJson>,
    constraints: Option<ConstraintsJson>,
}

pub struct TraceOutput {
    /// Absent when the trajectory could not be computed.
    pub csv: Option<String>,
    pub json: String,
    pub feasible: bool,
}

pub const TRACE_COLUMNS: [&str; 25] = [
    "t", "px", "py", "pz", "vx", "vy", "vz", "q1", "q2", "q3", "q_dot1", "q_dot2", "q_dot3",
    "tau1", "tau2", "tau3", "i1", "i2", "i3", "ve1", "ve2", "ve3", "p_t1", "p_t2", "p_t3",
];

/// Per-sample trace and energy report at one placement.
pub fn trace(setup: &Setup, placement: &Placement) -> TraceOutput {
    match run_pipeline(&setup.problem, placement) {
        Ok(run) => {
            let rows: Vec<Vec<String>> = run
                .samples
                .iter()
                .zip(&run.states)
                .enumerate()
                .map(|(k, (s, st))| {
                    let mut r = vec![fmt_num(s.t)];
                    r.extend(s.position.0.iter().map(|x| fmt_num(*x)));
                    r.extend(s.velocity.0.iter().map(|x| fmt_num(*x)));
                    r.extend(st.iter().map(|a| fmt_num(a.q)));
                    r.extend(st.iter().map(|a| fmt_num(a.q_dot)));
                    r.extend(st.iter().map(|a| fmt_num(a.tau)));
                    r.extend(run.electric.iter().map(|e| fmt_num(e.current[k])));
                    r.extend(run.electric.iter().map(|e| fmt_num(e.voltage[k])));
                    r.extend(run.electric.iter().map(|e| fmt_num(e.p_total[k])));
                    r
                })
                .collect();
            let header: Vec<String> = TRACE_COLUMNS.iter().map(|c| c.to_string()).collect();
            let feasible = run.constraints.feasible();
            let report = TraceReport {
                placement: placement.into(),
                feasible,
                failure: if feasible {
                    FailureReason::None.as_str()
                } else {
                    FailureReason::LimitViolation.as_str()
                },
                message: None,
                samples: run.samples.len(),
                energy: Some((&run.energy).into()),
                constraints: Some((&run.constraints).into()),
            };
            TraceOutput {
                csv: Some(csv_text(&header, &rows)),
                json: json_text(&report),
                feasible,
            }
        }
        Err(e) => {
            let outcome = evaluate(&setup.problem, placement);
            let report = TraceReport {
                placement: placement.into(),
                feasible: false,
                failure: outcome.failure.as_str(),
                message: Some(e.to_string()),
                samples: setup.problem.path_samples().len(),
                energy: None,
                constraints: None,
            };
            TraceOutput {
                csv: None,
                json: json_text(&report),
                feasible: false,
            }
        }
    }
}

/// Starts shifted by up to 5% of each box width, reproducibly from `seed`.
pub fn jitter_starts(setup: &Setup, seed: u64) -> Vec<Placement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pb = &setup.problem;
    setup
        .starts
        .iter()
        .map(|s| {
            let x: Vec<f64> = pb
                .free_values(s)
                .iter()
                .zip(pb.bounds())
                .map(|(x, (lo, hi))| {
                    let w = hi - lo;
                    (x + rng.gen_range(-0.05..=0.05) * w).clamp(*lo, *hi)
                })
                .collect();
            pb.placement_from(&x).expect("jittered start stays finite")
        })
        .collect()
}

fn starts_for(setup: &Setup, seed: Option<u64>) -> Result<Vec<Placement>, CommandError> {
    if setup.starts.is_empty() {
        return Err(CommandError::Failed(
            "placement.starts: at least one start is required".into(),
        ));
    }
    Ok(match seed {
        Some(s) => jitter_starts(setup, s),
        None => setup.starts.clone(),
    })
}

#[derive(Serialize)]
struct FeasiblePointJson {
    x: Vec<f64>,
    energy: f64,
}

#[derive(Serialize)]
struct StartJson {
    start: Vec<f64>,
    end: Vec<f64>,
    best_feasible: Option<FeasiblePointJson>,
    evaluations: usize,
    iterations: usize,
    termination: &'static str,
}

impl From<&StartSummary<f64>> for StartJson {
    fn from(s: &StartSummary<f64>) -> Self {
        Self {
            start: s.start.clone(),
            end: s.end.clone(),
            best_feasible: s.best_feasible.as_ref().map(|(x, e)| FeasiblePointJson {
                x: x.clone(),
                energy: *e,
            }),
            evaluations: s.evaluations,
            iterations: s.iterations,
            termination: match s.termination {
                Termination::Converged => "converged",
                Termination::MaxEvaluations => "max-evaluations",
            },
        }
    }
}

#[derive(Serialize)]
struct OptimizeJson {
    sense: &'static str,
    free: Vec<&'static str>,
    best: PlacementJson,
    best_free: Vec<f64>,
    energy: f64,
    best_start: usize,
    evaluations: usize,
    iterations: usize,
    starts: Vec<StartJson>,
}

pub struct OptimizeOutput {
    pub result: OptimizationResult,
    pub json: String,
}

pub fn run_optimize(
    setup: &Setup,
    sense: Sense,
    seed: Option<u64>,
) -> Result<OptimizeOutput, CommandError> {
    optimize_with_path(setup, None, sense, seed)
}

fn optimize_with_path(
    setup: &Setup,
    path: Option<Polyline>,
    sense: Sense,
    seed: Option<u64>,
) -> Result<OptimizeOutput, CommandError> {
    let starts = starts_for(setup, seed)?;
    let settings = pathplace::OptimizerSettings {
        sense,
        ..setup.settings
    };
    let problem = match path {
        Some(p) => setup.problem.with_path(p)?,
        None => setup.problem.clone(),
    };
    let result = optimize(&problem, &starts, &settings)?;
    let json = OptimizeJson {
        sense: match sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        },
        free: problem.mask().free().iter().map(|v| v.name()).collect(),
        best: (&result.best).into(),
        best_free: problem.free_values(&result.best),
        energy: result.best_energy,
        best_start: result.best_start,
        evaluations: result.evaluations,
        iterations: result.iterations,
        starts: result.starts.iter().map(StartJson::from).collect(),
    };
    Ok(OptimizeOutput {
        result,
        json: json_text(&json),
    })
}

#[derive(Serialize)]
struct AxisJson {
    name: &'static str,
    min: f64,
    max: f64,
    step: f64,
    count: usize,
}

#[derive(Serialize)]
struct SweepIndexJson {
    free: Vec<&'static str>,
    axes: Vec<AxisJson>,
    node_count: usize,
    order: &'static str,
    data: &'static str,
    feasible_nodes: usize,
}

pub struct SweepOutput {
    pub csv: String,
    pub json: String,
}

pub fn run_sweep(setup: &Setup) -> Result<SweepOutput, CommandError> {
    let grid = setup
        .grid
        .as_ref()
        .ok_or_else(|| CommandError::Failed("placement.grid is required for sweep".into()))?;
    let nodes = sweep(&setup.problem, grid)?;
    let free: Vec<PlacementVar> = setup.problem.mask().free().to_vec();
    let mut header: Vec<String> = free.iter().map(|v| v.name().to_string()).collect();
    header.extend(
        [
            "feasible",
            "failure",
            "energy",
            "displacement_margin",
            "velocity_margin",
            "torque_margin",
        ]
        .map(String::from),
    );
    let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
    let rows: Vec<Vec<String>> = nodes
        .iter()
        .map(|n| {
            let mut r: Vec<String> = n.values.iter().map(|x| fmt_num(*x)).collect();
            let c = n.outcome.constraints.as_ref();
            r.push(n.outcome.feasible.to_string());
            r.push(n.outcome.failure.as_str().to_string());
            r.push(opt(n.outcome.total_energy()));
            r.push(opt(c.map(|c| c.displacement.worst_margin)));
            r.push(opt(c.map(|c| c.velocity.worst_margin)));
            r.push(opt(c.map(|c| c.torque.worst_margin)));
            r
        })
        .collect();
    let index = SweepIndexJson {
        free: free.iter().map(|v| v.name()).collect(),
        axes: free
            .iter()
            .zip(&grid.axes)
            .map(|(v, a)| AxisJson {
                name: v.name(),
                min: a.min,
                max: a.max,
                step: a.step,
                count: a.count(),
            })
            .collect(),
        node_count: grid.node_count(),
        order: "row-major, last axis fastest",
        data: "sweep.csv",
        feasible_nodes: nodes.iter().filter(|n| n.outcome.feasible).count(),
    };
    Ok(SweepOutput {
        csv: csv_text(&header, &rows),
        json: json_text(&index),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub width: f64,
    pub length: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub percent_saving: f64,
    pub argmin: Placement,
    pub argmax: Placement,
}

pub struct CompareOutput {
    pub rows: Vec<CompareRow>,
    pub csv: String,
}

/// Minimum and maximum energy for each `(width, length)` rectangle.
pub fn run_compare(
    setup: &Setup,
    sizes: &[(f64, f64)],
    seed: Option<u64>,
) -> Result<CompareOutput, CommandError> {
    if sizes.is_empty() {
        return Err(CommandError::Failed("compare needs at least one size".into()));
    }
    let mut rows = Vec::new();
    for &(w, l) in sizes {
        let path = RectPath::new(l, w)
            .map_err(|e| CommandError::Failed(format!("size {w} x {l}: {e}")))?
            .to_polyline();
        let lo = optimize_with_path(setup, Some(path.clone()), Sense::Minimize, seed)?.result;
        let hi = optimize_with_path(setup, Some(path), Sense::Maximize, seed)?.result;
        rows.push(CompareRow {
            width: w,
            length: l,
            e_min: lo.best_energy,
            e_max: hi.best_energy,
            percent_saving: percent_saving(lo.best_energy, hi.best_energy)?,
            argmin: lo.best,
            argmax: hi.best,
        });
    }
    let header = ["W", "L", "E_min", "E_max", "percent_saving"].map(String::from);
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            [r.width, r.length, r.e_min, r.e_max, r.percent_saving]
                .iter()
                .map(|x| fmt_num(*x))
                .collect()
        })
        .collect();
    Ok(CompareOutput {
        csv: csv_text(&header, &body),
        rows,
    })
}
