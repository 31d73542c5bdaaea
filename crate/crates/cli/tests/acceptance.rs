//! Acceptance run: one line per criterion, `PASS` or `FAIL`, with the measured quantity and
//! the wall time against its budget.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are evaluated exactly like the others and are
//! reported as `FAIL` when they fail; only an unexpected failure makes the run exit nonzero.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use pathplace::frames::{placement_to_transform, Placement, PlacementVar};
use pathplace::linalg::Vec3;
use pathplace::manipulator::{
    idm, ActuatorLimits, Gantry, Manipulator, Model, Orthoglide, OrthoglideParams,
};
use pathplace::motor::{electrify, integrate_energy, MotorParams, TimeGrid};
use pathplace::path::{
    attach_cutting_forces, localize_trajectory, sample_path, CuttingForces, FeedSpec, RectPath,
    TrajectorySample,
};
use pathplace::placement::{
    evaluate, optimize, optimize_objective, percent_saving, sweep, DecisionMask, FnObjective,
    GridAxis, GridSpec, OptimizerSettings, PlacementProblem, Sense,
};
use pathplace_cli::commands::{run_compare, run_optimize};
use pathplace_cli::config::{RunConfig, Setup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_UNATTAINABLE: &[&str] = &["5", "6a", "6b", "6d"];
const ORTHOGLIDE: &str = include_str!("../configs/orthoglide.json");
const G: f64 = pathplace::manipulator::STANDARD_GRAVITY;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

struct Report {
    unexpected: Vec<String>,
}

impl Report {
    fn record(&mut self, id: &str, title: &str, budget: Duration, elapsed: Duration, o: Outcome) {
        let in_time = elapsed <= budget;
        let pass = o.pass && in_time;
        let timing = format!("{:.2} s of {} s", elapsed.as_secs_f64(), budget.as_secs());
        println!(
            "criterion {id:<3} {title}: {} ({}; {timing}{})",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            if in_time { "" } else { ", over budget" }
        );
        if !pass && !KNOWN_UNATTAINABLE.contains(&id) {
            self.unexpected.push(id.to_string());
        }
    }

    fn run(&mut self, id: &str, title: &str, budget_s: u64, f: impl FnOnce() -> Outcome) {
        let t0 = Instant::now();
        let o = f();
        self.record(id, title, Duration::from_secs(budget_s), t0.elapsed(), o);
    }
}

fn orthoglide_setup() -> Setup {
    RunConfig::from_json(ORTHOGLIDE, "orthoglide.json")
        .expect("shipped config parses")
        .build()
        .expect("shipped config builds")
}

fn transform_entries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pi = std::f64::consts::PI;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let v: [f64; 6] = [
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-pi..pi),
            rng.gen_range(-pi..pi),
            rng.gen_range(-pi..pi),
        ];
        let h = placement_to_transform(&Placement::from_array(v).unwrap()).to_homogeneous();
        let (cf, sf) = (v[3].cos(), v[3].sin());
        let (ct, st) = (v[4].cos(), v[4].sin());
        let (cp, sp) = (v[5].cos(), v[5].sin());
        let expected = [
            [cf * ct, cf * st * sp - sf * cp, cf * st * cp + sf * sp, v[0]],
            [sf * ct, sf * st * sp + cf * cp, sf * st * cp - cf * sp, v[1]],
            [-st, ct * sp, ct * cp, v[2]],
            [0.0, 0.0, 0.0, 1.0],
        ];
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((h[r][c] - expected[r][c]).abs());
            }
        }
    }
    outcome(worst < 1e-12, format!("max abs error {worst:.2e}"))
}

fn jacobian_rates() -> Outcome {
    let m = Orthoglide::new(OrthoglideParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = 1e-6;
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 100 {
        let p = Vec3::new(
            rng.gen_range(-0.127..0.073),
            rng.gen_range(-0.127..0.073),
            rng.gen_range(-0.127..0.073),
        );
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (Ok(qp), Ok(qm), Ok(analytic)) = (m.igm(&(p + v * h)), m.igm(&(p - v * h)), m.ikm(&p, &v))
        else {
            continue;
        };
        let numeric = (qp - qm) * (0.5 / h);
        worst = worst.max((analytic - numeric).norm() / analytic.norm());
        checked += 1;
    }
    outcome(worst < 1e-5, format!("max relative error {worst:.2e} over {checked} points"))
}

fn gantry_work_balance() -> Outcome {
    let model = Gantry::new([1.2, 1.8, 2.5], 3.0, Some(2)).unwrap();
    let forces = CuttingForces::new(10.0, 25.0, 215.0);
    let placement = Placement::new(0.02, -0.01, 0.05, 0.4, 0.3, -0.2).unwrap();
    let ones = Vec3::new(1.0, 1.0, 1.0);
    let mut worst = 0.0f64;
    for (l, w) in [(0.04, 0.02), (0.08, 0.04), (0.16, 0.08)] {
        let path = RectPath::new(l, w).unwrap().to_polyline();
        let samples = sample_path(&path, &FeedSpec::new(0.5, 1e-3).unwrap()).unwrap();
        let base = localize_trajectory(&samples, &placement).unwrap();
        let loaded: Vec<TrajectorySample<f64>> = attach_cutting_forces(&base, &forces).unwrap();
        let power: Vec<f64> = loaded
            .iter()
            .map(|s| {
                let q_dot = model.ikm(&s.position, &s.velocity).unwrap();
                let st = idm(&model, s, &s.position, &q_dot, &ones).unwrap();
                st.iter().map(|a| a.force * a.q_dot).sum()
            })
            .collect();
        let work: f64 = (1..loaded.len())
            .filter(|&k| loaded[k].segment == loaded[k - 1].segment)
            .map(|k| 0.5 * (power[k] + power[k - 1]) * (loaded[k].t - loaded[k - 1].t))
            .sum();
        // kinetic energy is constant along each segment; gravity acts on the z stack only
        let mut expected = 0.0;
        for seg in 0..4 {
            let s: Vec<_> = loaded.iter().filter(|s| s.segment == seg).collect();
            let (first, last) = (s[0], s[s.len() - 1]);
            let kinetic: f64 = (0..3)
                .map(|i| 0.5 * model.axis_mass(i) * (last.velocity[i].powi(2) - first.velocity[i].powi(2)))
                .sum();
            expected += kinetic;
            expected += model.axis_mass(2) * G * (last.position.z() - first.position.z());
            expected -= first.external_force.dot(&first.velocity) * (last.t - first.t);
        }
        worst = worst.max((work - expected).abs() / expected.abs());
    }
    outcome(worst < 5e-3, format!("max relative mismatch {:.3}%", 100.0 * worst))
}

fn electric_identities() -> Outcome {
    let times: Vec<f64> = (0..=200).map(|k| 2.0 * k as f64 / 200.0).collect();
    let grid = TimeGrid::uniform(times.clone()).unwrap();
    let motor = MotorParams::new(1.0, 1.0, 1.0, 0.0, 3, 1.0).unwrap();
    let n = times.len();
    let e_const = integrate_energy(&electrify(&motor, &grid, &vec![1.0; n], &vec![2.0; n]).unwrap(), &grid).energy;

    // I(t) = 3 t on [0, 1] with L = 0.02 H: inductive energy L I(1)^2 / 2
    let ramp: Vec<f64> = (0..=1000).map(|k| k as f64 / 1000.0).collect();
    let grid = TimeGrid::uniform(ramp.clone()).unwrap();
    let motor = MotorParams::new(1.0, 0.0, 0.0, 0.02, 1, 1.0).unwrap();
    let torque: Vec<f64> = ramp.iter().map(|t| 3.0 * t).collect();
    let e_ramp = integrate_energy(&electrify(&motor, &grid, &torque, &vec![0.0; ramp.len()]).unwrap(), &grid).inductive;
    let exact = 0.5 * 0.02 * 9.0;
    let pass = (e_const - 18.0).abs() < 1e-12 && (e_ramp - exact).abs() < 1e-6;
    outcome(pass, format!("constant case {e_const} J, ramp {e_ramp:.9} J vs {exact} J"))
}

fn saving_table() -> Outcome {
    let rows: [(f64, f64, f64); 7] = [
        (15.26, 44.46, 65.68),
        (22.88, 61.35, 62.71),
        (30.41, 76.31, 60.15),
        (38.55, 89.80, 57.07),
        (46.83, 102.11, 54.13),
        (56.82, 113.46, 49.92),
        (65.94, 121.17, 46.89),
    ];
    let mut bad = Vec::new();
    for (k, (e_min, e_max, listed)) in rows.iter().enumerate() {
        let got = percent_saving(*e_min, *e_max).unwrap();
        if (got - listed).abs() > 0.01 {
            bad.push(format!("row {}: {got:.2} vs {listed}", k + 1));
        }
    }
    let detail = if bad.is_empty() {
        "all seven rows within 0.01".to_string()
    } else {
        format!("mismatch on {}", bad.join(", "))
    };
    outcome(bad.is_empty(), detail)
}

fn landscape(report: &mut Report) {
    let setup = orthoglide_setup();
    let deg = 180.0 / std::f64::consts::PI;

    let t0 = Instant::now();
    let best = run_optimize(&setup, Sense::Minimize, None).unwrap().result;
    let p = best.best;
    let dist = p.origin().norm();
    let a = outcome(
        dist < 0.02 && (p.phi() * deg).abs() < 10.0,
        format!(
            "x* = ({:.4}, {:.4}, {:.4}) m, {:.3} m from O_b, phi = {:.1} deg, E = {:.3} J",
            p.x_op(),
            p.y_op(),
            p.z_op(),
            dist,
            p.phi() * deg,
            best.best_energy
        ),
    );
    report.record("6a", "minimizer near the isotropic point", Duration::from_secs(300), t0.elapsed(), a);

    let t0 = Instant::now();
    let worst = run_optimize(&setup, Sense::Maximize, None).unwrap().result;
    let q = worst.best;
    let anchors = pathplace::manipulator::WorkspaceAnchors::<f64>::orthoglide();
    let in_octant = (0..3).all(|i| q.origin()[i] < anchors.center[i]);
    let b = outcome(
        in_octant && (q.phi() * deg - 45.0).abs() < 10.0,
        format!(
            "argmax = ({:.4}, {:.4}, {:.4}) m, {} the Q- octant, phi = {:.1} deg, E = {:.3} J",
            q.x_op(),
            q.y_op(),
            q.z_op(),
            if in_octant { "inside" } else { "outside" },
            q.phi() * deg,
            worst.best_energy
        ),
    );
    report.record("6b", "maximizer near Q- at 45 deg", Duration::from_secs(300), t0.elapsed(), b);

    let t0 = Instant::now();
    let sizes: Vec<(f64, f64)> = (2..=8).map(|w| (w as f64 * 0.01, w as f64 * 0.02)).collect();
    let rows = run_compare(&setup, &sizes, None).unwrap().rows;
    let savings: Vec<f64> = rows.iter().map(|r| r.percent_saving).collect();
    let decreasing = savings.windows(2).all(|w| w[1] < w[0]);
    let c = outcome(
        decreasing,
        format!(
            "savings {}",
            savings.iter().map(|s| format!("{s:.2}")).collect::<Vec<_>>().join(" > ")
        ),
    );
    report.record("6c", "saving shrinks with path size", Duration::from_secs(300), t0.elapsed(), c);

    // z and x scans of equal length, the full 0.2 m edge of the cube, at the optimum
    let t0 = Instant::now();
    let scan = |var: PlacementVar| -> (f64, usize) {
        let energies: Vec<f64> = (0..=40)
            .filter_map(|k| {
                let mut v = p.to_array();
                v[var.index()] = anchors.q_minus[var.index()] + 0.005 * k as f64;
                let e = evaluate(&setup.problem, &Placement::from_array(v).unwrap());
                e.feasible.then(|| e.total_energy()).flatten()
            })
            .collect();
        let lo = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ((hi - lo) / lo, energies.len())
    };
    let (rz, nz) = scan(PlacementVar::ZOp);
    let (rx, nx) = scan(PlacementVar::XOp);
    let d = outcome(
        nz >= 2 && nx >= 2 && rz <= 0.2 * rx,
        format!("spread along z {rz:.4} ({nz} feasible), along x {rx:.4} ({nx} feasible), ratio {:.3}", rz / rx),
    );
    report.record("6d", "energy insensitive to z_op", Duration::from_secs(300), t0.elapsed(), d);
}

fn optimizer_soundness() -> Outcome {
    let settings = OptimizerSettings::default();

    let target = [0.3, -0.7, 1.1];
    let bowl = FnObjective::new(vec![(-2.0, 2.0); 3], |x: &[f64]| {
        let v: f64 = x
            .iter()
            .zip(target)
            .enumerate()
            .map(|(i, (a, b))| (i + 1) as f64 * (a - b).powi(2))
            .sum();
        (v, true)
    });
    let r = optimize_objective(&bowl, &[vec![-1.5, 1.5, -1.5]], &settings).unwrap();
    let bowl_err = r.best.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let scan_pb = PlacementProblem::new(
        Model::Orthoglide(Orthoglide::new(OrthoglideParams::default()).unwrap()),
        ActuatorLimits::orthoglide(),
        [MotorParams::representative_servo(); 3],
        RectPath::new(0.06, 0.03).unwrap().to_polyline(),
        FeedSpec::new(40.0 / 60.0, 1e-3).unwrap(),
        CuttingForces::new(10.0, 25.0, 215.0),
        DecisionMask::new(vec![PlacementVar::XOp]).unwrap(),
        Placement::identity(),
        vec![(-0.1, 0.05)],
    )
    .unwrap();
    let step = 1e-3;
    let nodes = sweep(&scan_pb, &GridSpec { axes: vec![GridAxis::new(-0.1, 0.05, step).unwrap()] }).unwrap();
    let scan_best = nodes
        .iter()
        .filter(|n| n.outcome.feasible)
        .min_by(|a, b| a.outcome.total_energy().partial_cmp(&b.outcome.total_energy()).unwrap())
        .unwrap()
        .values[0];
    let x = optimize(&scan_pb, &[Placement::planar(-0.08, 0.0, 0.0, 0.0).unwrap()], &settings)
        .unwrap()
        .best
        .x_op();
    let scan_gap = (x - scan_best).abs();

    let lossy = MotorParams::new(0.44, 0.15, 6.0, 1e-3, 3, 209.0).unwrap();
    let clean = MotorParams::new(0.44, 0.15, 1.5, 1e-3, 3, 209.0).unwrap();
    let gantry_pb = PlacementProblem::new(
        Gantry::new([1.0, 1.0, 1.0], 2.0, Some(2)).unwrap(),
        ActuatorLimits::new(-1.0, 1.0, 2.0, 10.0).unwrap(),
        [lossy, clean, clean],
        RectPath::new(0.06, 0.03).unwrap().to_polyline(),
        FeedSpec::new(40.0 / 60.0, 1e-3).unwrap(),
        CuttingForces::new(10.0, 25.0, 215.0),
        DecisionMask::new(vec![PlacementVar::Phi]).unwrap(),
        Placement::identity(),
        vec![(-1.2, 1.2)],
    )
    .unwrap();
    let phis: Vec<f64> = [-1.1, -0.5, 0.0, 0.6, 1.15]
        .iter()
        .map(|&phi| {
            let start = Placement::planar(0.0, 0.0, 0.0, phi).unwrap();
            optimize(&gantry_pb, &[start], &settings).unwrap().best.phi()
        })
        .collect();
    let spread = phis.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - phis.iter().cloned().fold(f64::INFINITY, f64::min);

    outcome(
        bowl_err < 1e-4 && scan_gap <= step && spread < 1e-3,
        format!("bowl error {bowl_err:.1e}, scan gap {scan_gap:.1e} m, start spread {spread:.1e} rad"),
    )
}

fn run_cli(config: &Path, out: &Path, threads: usize, args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_pathplace"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .expect("binary runs");
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("orthoglide.json");
    std::fs::write(&config, ORTHOGLIDE).unwrap();
    let runs = [("a", 1), ("b", 1), ("c", 4)];
    for (name, threads) in runs {
        let out = dir.path().join(name);
        run_cli(&config, &out, threads, &["sweep"]);
        run_cli(&config, &out, threads, &["trace", "--at", "phi=30deg", "--at", "x_op=-20mm"]);
    }
    let files = ["sweep.csv", "sweep.json", "trace.csv", "energy.json"];
    let mut differing = Vec::new();
    for f in files {
        let reference = std::fs::read(dir.path().join("a").join(f)).unwrap();
        for (name, _) in &runs[1..] {
            if std::fs::read(dir.path().join(name).join(f)).unwrap() != reference {
                differing.push(format!("{name}/{f}"));
            }
        }
    }
    let detail = if differing.is_empty() {
        format!("{} files identical over 2 runs and 1 vs 4 threads", files.len())
    } else {
        format!("differs: {}", differing.join(", "))
    };
    outcome(differing.is_empty(), detail)
}

fn main() {
    let mut report = Report { unexpected: Vec::new() };
    report.run("1", "transform entries", 1, transform_entries);
    report.run("2", "rates against finite differences", 1, jacobian_rates);
    report.run("3", "gantry work balance", 5, gantry_work_balance);
    report.run("4", "electric identities", 1, electric_identities);
    report.run("5", "saving arithmetic on reference rows", 1, saving_table);
    landscape(&mut report);
    report.run("7", "optimizer soundness", 30, optimizer_soundness);
    report.run("8", "byte-identical outputs", 60, determinism);
    if report.unexpected.is_empty() {
        println!("acceptance: no unexpected failures");
    } else {
        println!("acceptance: unexpected failures in {}", report.unexpected.join(", "));
        std::process::exit(1);
    }
}
