use pathplace::frames::Placement;
use pathplace::manipulator::{
    check_limits, ActuatorLimits, ActuatorState, Model, Orthoglide, OrthoglideParams,
};
use pathplace::motor::MotorParams;
use pathplace::path::{CuttingForces, FeedSpec, RectPath};
use pathplace::placement::{evaluate, DecisionMask, PlacementProblem};
use proptest::prelude::*;

fn orthoglide_problem(
    gravity: f64,
    forces: CuttingForces<f64>,
    length: f64,
    width: f64,
) -> PlacementProblem<f64, Model<f64>> {
    let params = OrthoglideParams {
        gravity,
        ..OrthoglideParams::default()
    };
    PlacementProblem::new(
        Model::Orthoglide(Orthoglide::new(params).unwrap()),
        ActuatorLimits::orthoglide(),
        [MotorParams::representative_servo(); 3],
        RectPath::new(length, width).unwrap().to_polyline(),
        FeedSpec::new(40.0 / 60.0, 1e-3).unwrap(),
        forces,
        DecisionMask::full(),
        Placement::identity(),
        vec![(-0.2, 0.2); 3].into_iter().chain(vec![(-3.2, 3.2); 3]).collect(),
    )
    .unwrap()
}

/// ZYX Euler angles of a rotation matrix away from gimbal lock.
fn euler_zyx(r: [[f64; 3]; 3]) -> (f64, f64, f64) {
    (
        r[1][0].atan2(r[0][0]),
        -r[2][0].asin(),
        r[2][1].atan2(r[2][2]),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cyclic_axis_permutation_preserves_energy(
        x in -0.08f64..0.04,
        y in -0.08f64..0.04,
        z in -0.08f64..0.04,
        phi in -1.5f64..1.5,
    ) {
        let pb = orthoglide_problem(0.0, CuttingForces::none(), 0.06, 0.03);
        let a = Placement::planar(x, y, z, phi).unwrap();
        // P maps X to Y, Y to Z and Z to X; the rotated placement is P * Rz(phi)
        let (c, s) = (phi.cos(), phi.sin());
        let rz = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
        let r = [rz[2], rz[0], rz[1]];
        let (phi_b, theta_b, psi_b) = euler_zyx(r);
        let b = Placement::new(z, x, y, phi_b, theta_b, psi_b).unwrap();
        let ea = evaluate(&pb, &a).total_energy().unwrap();
        let eb = evaluate(&pb, &b).total_energy().unwrap();
        prop_assert!(ea.abs() > 0.0);
        prop_assert!(((ea - eb) / ea).abs() < 1e-9, "{} vs {}", ea, eb);
    }

    #[test]
    fn shrinking_the_path_keeps_displacements_feasible(
        x in -0.127f64..0.073,
        y in -0.127f64..0.073,
        z in -0.127f64..0.073,
        phi in -1.5f64..1.5,
        scale in 0.05f64..0.99,
    ) {
        let big = orthoglide_problem(9.80665, CuttingForces::new(10.0, 25.0, 215.0), 0.06, 0.03);
        let p = Placement::planar(x, y, z, phi).unwrap();
        let outcome = evaluate(&big, &p);
        let feasible = outcome.constraints.is_some_and(|c| !c.displacement.violated);
        prop_assume!(feasible);
        let small = orthoglide_problem(9.80665, CuttingForces::new(10.0, 25.0, 215.0), 0.06 * scale, 0.03 * scale);
        let shrunk = evaluate(&small, &p);
        prop_assert!(shrunk.constraints.is_some_and(|c| !c.displacement.violated));
    }

    #[test]
    fn tighter_limits_never_add_feasibility(
        q in 0.0f64..0.5, v in -2.0f64..2.0, tau in -2.0f64..2.0, shrink in 0.0f64..0.05,
    ) {
        let loose = ActuatorLimits::orthoglide();
        let tight = ActuatorLimits::new(
            loose.q_min + shrink,
            loose.q_max - shrink,
            loose.v_max - shrink,
            loose.tau_max - shrink,
        ).unwrap();
        let st = [ActuatorState { q, q_dot: v, q_ddot: 0.0, force: 0.0, tau }];
        if check_limits(&tight, &st).feasible() {
            prop_assert!(check_limits(&loose, &st).feasible());
        }
    }

    #[test]
    fn evaluation_is_bitwise_repeatable(
        x in -0.1f64..0.05, y in -0.1f64..0.05, phi in -1.5f64..1.5,
    ) {
        let pb = orthoglide_problem(9.80665, CuttingForces::new(10.0, 25.0, 215.0), 0.06, 0.03);
        let p = Placement::planar(x, y, 0.0, phi).unwrap();
        prop_assert_eq!(evaluate(&pb, &p), evaluate(&pb, &p));
    }
}
