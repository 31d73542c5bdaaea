//! Placement of the path frame inside the base frame.
//!
//! A [`Placement`] holds the origin of the path frame expressed in the base frame and
//! three Euler angles `(phi, theta, psi)`. The rotation is the Z-Y-X product
//! `Rz(phi) * Ry(theta) * Rx(psi)`, written out entry by entry in
//! [`placement_to_transform`].

use thiserror::Error;

use crate::linalg::{Mat3, Vec3};
use crate::scalar::{wrap_angle, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("invalid placement: {0}")]
    InvalidPlacement(String),
}

/// Index of each decision variable inside [`Placement::to_array`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlacementVar {
    XOp = 0,
    YOp = 1,
    ZOp = 2,
    Phi = 3,
    Theta = 4,
    Psi = 5,
}

impl PlacementVar {
    pub const ALL: [PlacementVar; 6] = [
        PlacementVar::XOp,
        PlacementVar::YOp,
        PlacementVar::ZOp,
        PlacementVar::Phi,
        PlacementVar::Theta,
        PlacementVar::Psi,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_angle(self) -> bool {
        self.index() >= 3
    }

    pub fn name(self) -> &'static str {
        match self {
            PlacementVar::XOp => "x_op",
            PlacementVar::YOp => "y_op",
            PlacementVar::ZOp => "z_op",
            PlacementVar::Phi => "phi",
            PlacementVar::Theta => "theta",
            PlacementVar::Psi => "psi",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

/// Position (meters) and Z-Y-X Euler angles (radians) of the path frame in the base frame.
///
/// Angles are wrapped to `(-pi, pi]` on construction and every field is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement<T> {
    x_op: T,
    y_op: T,
    z_op: T,
    phi: T,
    theta: T,
    psi: T,
}

impl<T: Real> Placement<T> {
    pub fn new(x_op: T, y_op: T, z_op: T, phi: T, theta: T, psi: T) -> Result<Self, FrameError> {
        Self::from_array([x_op, y_op, z_op, phi, theta, psi])
    }

    pub fn identity() -> Self {
        Self::from_array([T::zero(); 6]).expect("zero placement is valid")
    }

    /// Origin at `(x, y, z)`, rotated by `phi` about the base Z axis only.
    pub fn planar(x_op: T, y_op: T, z_op: T, phi: T) -> Result<Self, FrameError> {
        Self::new(x_op, y_op, z_op, phi, T::zero(), T::zero())
    }

    pub fn from_array(v: [T; 6]) -> Result<Self, FrameError> {
        if let Some(i) = v.iter().position(|c| !c.is_finite()) {
            return Err(FrameError::InvalidPlacement(format!(
                "{} is not finite",
                PlacementVar::ALL[i].name()
            )));
        }
        Ok(Self {
            x_op: v[0],
            y_op: v[1],
            z_op: v[2],
            phi: wrap_angle(v[3]),
            theta: wrap_angle(v[4]),
            psi: wrap_angle(v[5]),
        })
    }

    pub fn to_array(&self) -> [T; 6] {
        [self.x_op, self.y_op, self.z_op, self.phi, self.theta, self.psi]
    }

    pub fn get(&self, var: PlacementVar) -> T {
        self.to_array()[var.index()]
    }

    pub fn origin(&self) -> Vec3<T> {
        Vec3::new(self.x_op, self.y_op, self.z_op)
    }

    pub fn x_op(&self) -> T {
        self.x_op
    }
    pub fn y_op(&self) -> T {
        self.y_op
    }
    pub fn z_op(&self) -> T {
        self.z_op
    }
    pub fn phi(&self) -> T {
        self.phi
    }
    pub fn theta(&self) -> T {
        self.theta
    }
    pub fn psi(&self) -> T {
        self.psi
    }
}

/// Rigid transform `p_b = rotation * p_p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform<T> {
    pub rotation: Mat3<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> Transform<T> {
    pub fn identity() -> Self {
        Self {
            rotation: Mat3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn transform_point(&self, p: &Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(p) + self.translation
    }

    /// Rotates a free vector; the translation does not apply.
    pub fn transform_vector(&self, v: &Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(v)
    }

    /// Inverse of a rigid transform, using `R^T` for the rotation.
    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            rotation: rt,
            translation: -rt.mul_vec(&self.translation),
        }
    }

    /// 4x4 homogeneous matrix, row-major.
    pub fn to_homogeneous(&self) -> [[T; 4]; 4] {
        let r = &self.rotation.0;
        let t = &self.translation.0;
        let (z, o) = (T::zero(), T::one());
        [
            [r[0][0], r[0][1], r[0][2], t[0]],
            [r[1][0], r[1][1], r[1][2], t[1]],
            [r[2][0], r[2][1], r[2][2], t[2]],
            [z, z, z, o],
        ]
    }
}

/// Homogeneous transform from the path frame to the base frame.
pub fn placement_to_transform<T: Real>(p: &Placement<T>) -> Transform<T> {
    let (sf, cf) = p.phi.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    let (ss, cs) = p.psi.sin_cos();
    let rotation = Mat3([
        [cf * ct, cf * st * ss - sf * cs, cf * st * cs + sf * ss],
        [sf * ct, sf * st * ss + cf * cs, sf * st * cs - cf * ss],
        [-st, ct * ss, ct * cs],
    ]);
    Transform {
        rotation,
        translation: p.origin(),
    }
}

pub fn transform_point<T: Real>(t: &Transform<T>, p: &Vec3<T>) -> Vec3<T> {
    t.transform_point(p)
}

pub fn transform_vector<T: Real>(t: &Transform<T>, v: &Vec3<T>) -> Vec3<T> {
    t.transform_vector(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: &Vec3<f64>, b: &Vec3<f64>, tol: f64) -> bool {
        (*a - *b).max_abs() < tol
    }

    #[test]
    fn zero_placement_is_identity() {
        let t = placement_to_transform(&Placement::<f64>::identity());
        assert_eq!(t.rotation, Mat3::identity());
        assert_eq!(t.translation, Vec3::zeros());
    }

    #[test]
    fn quarter_turn_about_z() {
        let t = placement_to_transform(&Placement::planar(0.0, 0.0, 0.0, FRAC_PI_2).unwrap());
        let p = t.transform_point(&Vec3::new(1.0, 0.0, 0.0));
        assert!(close(&p, &Vec3::new(0.0, 1.0, 0.0), 1e-15));
    }

    #[test]
    fn rotate_then_translate() {
        let t = placement_to_transform(&Placement::planar(1.0, 0.0, 0.0, FRAC_PI_2).unwrap());
        let p = t.transform_point(&Vec3::new(1.0, 0.0, 0.0));
        assert!(close(&p, &Vec3::new(1.0, 1.0, 0.0), 1e-15));
        let v = t.transform_vector(&Vec3::new(1.0, 0.0, 0.0));
        assert!(close(&v, &Vec3::new(0.0, 1.0, 0.0), 1e-15));
    }

    #[test]
    fn translation_only() {
        let t = placement_to_transform(&Placement::planar(1.0, 1.0, 1.0, 0.0).unwrap());
        assert_eq!(t.transform_point(&Vec3::zeros()), Vec3::new(1.0, 1.0, 1.0));
        let p = Vec3::new(0.1, 0.2, 0.3);
        assert_eq!(Transform::identity().transform_point(&p), p);
    }

    #[test]
    fn euler_entries_match_zyx_product() {
        // Rz(phi) * Ry(theta) * Rx(psi) composed by matrix multiplication
        let (phi, theta, psi): (f64, f64, f64) = (0.3, 0.2, 0.1);
        let rz = Mat3([[phi.cos(), -phi.sin(), 0.0], [phi.sin(), phi.cos(), 0.0], [0.0, 0.0, 1.0]]);
        let ry = Mat3([[theta.cos(), 0.0, theta.sin()], [0.0, 1.0, 0.0], [-theta.sin(), 0.0, theta.cos()]]);
        let rx = Mat3([[1.0, 0.0, 0.0], [0.0, psi.cos(), -psi.sin()], [0.0, psi.sin(), psi.cos()]]);
        let expected = rz.mul_mat(&ry).mul_mat(&rx);
        let t = placement_to_transform(&Placement::new(0.01, -0.02, 0.03, phi, theta, psi).unwrap());
        for r in 0..3 {
            for c in 0..3 {
                assert!((t.rotation.get(r, c) - expected.get(r, c)).abs() < 1e-15);
            }
        }
        assert_eq!(t.translation, Vec3::new(0.01, -0.02, 0.03));
    }

    #[test]
    fn planar_reduces_to_rotation_about_z() {
        let phi = 0.7_f64;
        let t = placement_to_transform(&Placement::planar(0.0, 0.0, 0.0, phi).unwrap());
        let expected = [[phi.cos(), -phi.sin(), 0.0], [phi.sin(), phi.cos(), 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(t.rotation.0, expected);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Placement::new(f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(Placement::new(0.0, 0.0, 0.0, f64::INFINITY, 0.0, 0.0).is_err());
    }

    #[test]
    fn angles_are_wrapped() {
        let p = Placement::new(0.0, 0.0, 0.0, 3.0 * PI, -PI, 2.5 * PI).unwrap();
        assert!((p.phi() - PI).abs() < 1e-12);
        assert_eq!(p.theta(), PI);
        assert!((p.psi() - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn gimbal_lock_is_still_a_rotation() {
        let t = placement_to_transform(&Placement::new(0.0, 0.0, 0.0, 0.4, FRAC_PI_2, -0.3).unwrap());
        assert!((t.rotation.determinant() - 1.0).abs() < 1e-12);
    }

    fn placement_strategy() -> impl Strategy<Value = Placement<f64>> {
        (
            -1.0..1.0f64,
            -1.0..1.0f64,
            -1.0..1.0f64,
            -10.0..10.0f64,
            -10.0..10.0f64,
            -10.0..10.0f64,
        )
            .prop_map(|(x, y, z, a, b, c)| Placement::new(x, y, z, a, b, c).unwrap())
    }

    proptest! {
        #[test]
        fn rotation_is_proper_orthonormal(p in placement_strategy()) {
            let r = placement_to_transform(&p).rotation;
            let rtr = r.transpose().mul_mat(&r);
            for i in 0..3 {
                for j in 0..3 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((rtr.get(i, j) - e).abs() < 1e-12);
                }
            }
            prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn inverse_recovers_point(p in placement_strategy(), x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
            let t = placement_to_transform(&p);
            let q = Vec3::new(x, y, z);
            let back = t.inverse().transform_point(&t.transform_point(&q));
            prop_assert!((back - q).max_abs() < 1e-10);
        }

        #[test]
        fn vectors_keep_their_norm(p in placement_strategy(), x in -5.0..5.0f64, y in -5.0..5.0f64, z in -5.0..5.0f64) {
            let v = Vec3::new(x, y, z);
            let w = transform_vector(&placement_to_transform(&p), &v);
            prop_assert!((w.norm() - v.norm()).abs() < 1e-12);
        }
    }
}
