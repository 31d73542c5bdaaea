//! Inverse geometric, kinematic and dynamic models of three-actuator translational machines,
//! and actuator limit checking.
//!
//! Two models ship with the crate:
//!
//! * [`Gantry`]: three orthogonal prismatic axes, `q = p`. Its dynamics are exact and serve as
//!   an oracle for the rest of the pipeline.
//! * [`Orthoglide`]: three orthogonal prismatic actuators each driving a leg of fixed length to
//!   the platform. Leg `i` keeps `(p_i - b_i)^2 + p_j^2 + p_k^2 = leg_length^2` where the
//!   slider sits at `b_i = q_i + foot_offset_i` on axis `i`.

use thiserror::Error;

use crate::linalg::{Mat3, Vec3};
use crate::path::TrajectorySample;
use crate::scalar::Real;

pub const STANDARD_GRAVITY: f64 = 9.80665;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("point ({x:.6}, {y:.6}, {z:.6}) m is outside the reachable workspace")]
    OutOfWorkspace { x: f64, y: f64, z: f64 },
    #[error("near-singular configuration: Jacobian condition number {condition:.3e} exceeds {cap:.3e}")]
    NearSingular { condition: f64, cap: f64 },
    #[error("invalid model parameters: {0}")]
    InvalidParameters(String),
}

fn out_of_workspace<T: Real>(p: &Vec3<T>) -> KinematicsError {
    let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
    KinematicsError::OutOfWorkspace {
        x: f(p.x()),
        y: f(p.y()),
        z: f(p.z()),
    }
}

/// A translational three-actuator manipulator.
pub trait Manipulator<T: Real>: Send + Sync {
    /// Actuator displacements for platform position `p`.
    fn igm(&self, p: &Vec3<T>) -> Result<Vec3<T>, KinematicsError>;

    /// Matrix `A(p)` with `q_dot = A(p) * v`.
    fn inverse_jacobian(&self, p: &Vec3<T>) -> Result<Mat3<T>, KinematicsError>;

    /// Joint accelerations for a platform motion `(p, v, a)`.
    fn joint_accelerations(
        &self,
        p: &Vec3<T>,
        v: &Vec3<T>,
        a: &Vec3<T>,
    ) -> Result<Vec3<T>, KinematicsError>;

    /// Axial actuator forces (N) needed to produce the sample's motion against its loads.
    fn actuator_forces(
        &self,
        sample: &TrajectorySample<T>,
        q_dot: &Vec3<T>,
        q_ddot: &Vec3<T>,
    ) -> Result<Vec3<T>, KinematicsError>;

    /// Jacobian condition numbers above this are rejected.
    fn condition_cap(&self) -> T;

    fn ikm(&self, p: &Vec3<T>, v: &Vec3<T>) -> Result<Vec3<T>, KinematicsError> {
        let a = self.inverse_jacobian(p)?;
        check_condition(&a, self.condition_cap())?;
        Ok(a.mul_vec(v))
    }
}

fn check_condition<T: Real>(a: &Mat3<T>, cap: T) -> Result<(), KinematicsError> {
    let cond = a.condition_number();
    if cond > cap || cond.is_nan() {
        return Err(KinematicsError::NearSingular {
            condition: cond.to_f64().unwrap_or(f64::INFINITY),
            cap: cap.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Bounds of one prismatic actuator. All bounds are closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorLimits<T> {
    pub q_min: T,
    pub q_max: T,
    pub v_max: T,
    /// Motor-side torque bound (N m).
    pub tau_max: T,
}

impl<T: Real> ActuatorLimits<T> {
    pub fn new(q_min: T, q_max: T, v_max: T, tau_max: T) -> Result<Self, KinematicsError> {
        if !(q_min < q_max && v_max > T::zero() && tau_max > T::zero()) {
            return Err(KinematicsError::InvalidParameters(format!(
                "limits need q_min < q_max, v_max > 0, tau_max > 0 (got {q_min}, {q_max}, {v_max}, {tau_max})"
            )));
        }
        Ok(Self {
            q_min,
            q_max,
            v_max,
            tau_max,
        })
    }

    /// Orthoglide actuator bounds: 0.126 m to 0.383 m, 1 m/s, 1.274 N m.
    pub fn orthoglide() -> Self {
        Self {
            q_min: T::lit(0.126),
            q_max: T::lit(0.383),
            v_max: T::lit(1.0),
            tau_max: T::lit(1.274),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorState<T> {
    pub q: T,
    pub q_dot: T,
    pub q_ddot: T,
    /// Link-side axial force (N).
    pub force: T,
    /// Motor-side torque (N m).
    pub tau: T,
}

/// Cartesian gantry: actuator `i` moves the platform along base axis `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gantry<T> {
    pub slider_mass: [T; 3],
    pub platform_mass: T,
    /// Base axis gravity acts against, if any.
    pub gravity_axis: Option<usize>,
    pub gravity: T,
}

impl<T: Real> Gantry<T> {
    pub fn new(
        slider_mass: [T; 3],
        platform_mass: T,
        gravity_axis: Option<usize>,
    ) -> Result<Self, KinematicsError> {
        if slider_mass.iter().any(|m| !(*m >= T::zero())) || !(platform_mass >= T::zero()) {
            return Err(KinematicsError::InvalidParameters("masses must be >= 0".into()));
        }
        if gravity_axis.is_some_and(|a| a > 2) {
            return Err(KinematicsError::InvalidParameters("gravity axis must be 0, 1 or 2".into()));
        }
        Ok(Self {
            slider_mass,
            platform_mass,
            gravity_axis,
            gravity: T::lit(STANDARD_GRAVITY),
        })
    }

    /// Mass moved by actuator `i`.
    pub fn axis_mass(&self, i: usize) -> T {
        self.slider_mass[i] + self.platform_mass
    }
}

impl<T: Real> Manipulator<T> for Gantry<T> {
    fn igm(&self, p: &Vec3<T>) -> Result<Vec3<T>, KinematicsError> {
        Ok(*p)
    }

    fn inverse_jacobian(&self, _p: &Vec3<T>) -> Result<Mat3<T>, KinematicsError> {
        Ok(Mat3::identity())
    }

    fn joint_accelerations(
        &self,
        _p: &Vec3<T>,
        _v: &Vec3<T>,
        a: &Vec3<T>,
    ) -> Result<Vec3<T>, KinematicsError> {
        Ok(*a)
    }

    fn actuator_forces(
        &self,
        sample: &TrajectorySample<T>,
        _q_dot: &Vec3<T>,
        q_ddot: &Vec3<T>,
    ) -> Result<Vec3<T>, KinematicsError> {
        let mut f = [T::zero(); 3];
        for (i, fi) in f.iter_mut().enumerate() {
            let m = self.axis_mass(i);
            *fi = m * q_ddot[i] - sample.external_force[i];
            if self.gravity_axis == Some(i) {
                *fi = *fi + m * self.gravity;
            }
        }
        Ok(Vec3(f))
    }

    fn condition_cap(&self) -> T {
        T::lit(1e6)
    }
}

/// Landmarks of the prescribed cubic workspace (m, base frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkspaceAnchors<T> {
    pub origin: Vec3<T>,
    pub center: Vec3<T>,
    pub q_plus: Vec3<T>,
    pub q_minus: Vec3<T>,
    pub cube_side: T,
}

impl<T: Real> WorkspaceAnchors<T> {
    /// 0.2 m cube with diagonal Q- = (-0.127, -0.127, -0.127) to Q+ = (0.073, 0.073, 0.073).
    pub fn orthoglide() -> Self {
        let d = |v: f64| Vec3::new(T::lit(v), T::lit(v), T::lit(v));
        Self {
            origin: Vec3::zeros(),
            center: d(-0.027),
            q_plus: d(0.073),
            q_minus: d(-0.127),
            cube_side: T::lit(0.2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthoglideParams<T> {
    pub leg_length: T,
    pub foot_offset: [T; 3],
    pub slider_mass: T,
    pub platform_mass: T,
    /// Mass of one leg, lumped half on its slider and half on the platform.
    pub leg_mass: T,
    /// Gravity along `-Z_b`; `0` disables it.
    pub gravity: T,
    pub anchors: WorkspaceAnchors<T>,
    pub max_condition: T,
}

impl<T: Real> Default for OrthoglideParams<T> {
    fn default() -> Self {
        Self {
            leg_length: T::lit(0.31),
            foot_offset: [T::zero(); 3],
            slider_mass: T::lit(1.5),
            platform_mass: T::lit(0.8),
            leg_mass: T::lit(0.6),
            gravity: T::lit(STANDARD_GRAVITY),
            anchors: WorkspaceAnchors::orthoglide(),
            max_condition: T::lit(1e6),
        }
    }
}

/// Orthoglide-style translational parallel machine with orthogonal prismatic actuators.
#[derive(Debug, Clone, PartialEq)]
pub struct Orthoglide<T> {
    params: OrthoglideParams<T>,
}

impl<T: Real> Orthoglide<T> {
    pub fn new(params: OrthoglideParams<T>) -> Result<Self, KinematicsError> {
        let p = &params;
        if !(p.leg_length > T::zero() && p.leg_length.is_finite()) {
            return Err(KinematicsError::InvalidParameters("leg_length must be > 0".into()));
        }
        if ![p.slider_mass, p.platform_mass, p.leg_mass, p.gravity]
            .iter()
            .all(|m| *m >= T::zero())
        {
            return Err(KinematicsError::InvalidParameters(
                "masses and gravity must be >= 0".into(),
            ));
        }
        if p.foot_offset.iter().any(|o| !o.is_finite()) || !(p.max_condition > T::one()) {
            return Err(KinematicsError::InvalidParameters(
                "foot offsets must be finite and max_condition > 1".into(),
            ));
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &OrthoglideParams<T> {
        &self.params
    }

    /// Mass carried on each slider.
    pub fn slider_side_mass(&self) -> T {
        self.params.slider_mass + self.params.leg_mass * T::half()
    }

    /// Mass carried by the platform.
    pub fn platform_side_mass(&self) -> T {
        self.params.platform_mass + T::lit(1.5) * self.params.leg_mass
    }

    /// Distance from the platform to slider `i` along axis `i`.
    fn reach(&self, p: &Vec3<T>, i: usize) -> Result<T, KinematicsError> {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let l = self.params.leg_length;
        let radicand = l * l - p[j] * p[j] - p[k] * p[k];
        if !(radicand > T::zero()) {
            return Err(out_of_workspace(p));
        }
        Ok(radicand.sqrt())
    }
}

impl<T: Real> Manipulator<T> for Orthoglide<T> {
    fn igm(&self, p: &Vec3<T>) -> Result<Vec3<T>, KinematicsError> {
        let mut q = [T::zero(); 3];
        for (i, qi) in q.iter_mut().enumerate() {
            *qi = p[i] + self.reach(p, i)? - self.params.foot_offset[i];
        }
        Ok(Vec3(q))
    }

    fn inverse_jacobian(&self, p: &Vec3<T>) -> Result<Mat3<T>, KinematicsError> {
        let mut a = Mat3::identity();
        for i in 0..3 {
            let s = self.reach(p, i)?;
            for j in (0..3).filter(|&j| j != i) {
                a.0[i][j] = -p[j] / s;
            }
        }
        Ok(a)
    }

    fn joint_accelerations(
        &self,
        p: &Vec3<T>,
        v: &Vec3<T>,
        a: &Vec3<T>,
    ) -> Result<Vec3<T>, KinematicsError> {
        // q_i = p_i + s_i, s_i = sqrt(L^2 - p_j^2 - p_k^2)
        let mut out = [T::zero(); 3];
        for (i, qdd) in out.iter_mut().enumerate() {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let s = self.reach(p, i)?;
            let s_dot = -(p[j] * v[j] + p[k] * v[k]) / s;
            let s_ddot =
                -(v[j] * v[j] + v[k] * v[k] + p[j] * a[j] + p[k] * a[k] + s_dot * s_dot) / s;
            *qdd = a[i] + s_ddot;
        }
        Ok(Vec3(out))
    }

    fn actuator_forces(
        &self,
        sample: &TrajectorySample<T>,
        _q_dot: &Vec3<T>,
        q_ddot: &Vec3<T>,
    ) -> Result<Vec3<T>, KinematicsError> {
        let a_inv = self.inverse_jacobian(&sample.position)?;
        check_condition(&a_inv, self.params.max_condition)?;
        let g = Vec3::new(T::zero(), T::zero(), self.params.gravity);
        let platform = (sample.acceleration + g) * self.platform_side_mass() - sample.external_force;
        // power balance f . q_dot = F . v with q_dot = A v gives A^T f = F
        let at_inv = a_inv
            .transpose()
            .inverse()
            .ok_or(KinematicsError::NearSingular {
                condition: f64::INFINITY,
                cap: self.params.max_condition.to_f64().unwrap_or(f64::NAN),
            })?;
        let mut f = at_inv.mul_vec(&platform);
        let ms = self.slider_side_mass();
        for i in 0..3 {
            f.0[i] = f.0[i] + ms * q_ddot[i];
        }
        // the Z actuator slides along the vertical
        f.0[2] = f.0[2] + ms * self.params.gravity;
        Ok(f)
    }

    fn condition_cap(&self) -> T {
        self.params.max_condition
    }
}

/// Closed set of shipped models.
#[derive(Debug, Clone, PartialEq)]
pub enum Model<T> {
    Gantry(Gantry<T>),
    Orthoglide(Orthoglide<T>),
}

impl<T: Real> Model<T> {
    fn inner(&self) -> &dyn Manipulator<T> {
        match self {
            Model::Gantry(m) => m,
            Model::Orthoglide(m) => m,
        }
    }
}

impl<T: Real> Manipulator<T> for Model<T> {
    fn igm(&self, p: &Vec3<T>) -> Result<Vec3<T>, KinematicsError> {
        self.inner().igm(p)
    }
    fn inverse_jacobian(&self, p: &Vec3<T>) -> Result<Mat3<T>, KinematicsError> {
        self.inner().inverse_jacobian(p)
    }
    fn joint_accelerations(
        &self,
        p: &Vec3<T>,
        v: &Vec3<T>,
        a: &Vec3<T>,
    ) -> Result<Vec3<T>, KinematicsError> {
        self.inner().joint_accelerations(p, v, a)
    }
    fn actuator_forces(
        &self,
        sample: &TrajectorySample<T>,
        q_dot: &Vec3<T>,
        q_ddot: &Vec3<T>,
    ) -> Result<Vec3<T>, KinematicsError> {
        self.inner().actuator_forces(sample, q_dot, q_ddot)
    }
    fn condition_cap(&self) -> T {
        self.inner().condition_cap()
    }
}

pub fn igm<T: Real, M: Manipulator<T> + ?Sized>(
    model: &M,
    p: &Vec3<T>,
) -> Result<Vec3<T>, KinematicsError> {
    model.igm(p)
}

pub fn ikm<T: Real, M: Manipulator<T> + ?Sized>(
    model: &M,
    p: &Vec3<T>,
    v: &Vec3<T>,
) -> Result<Vec3<T>, KinematicsError> {
    model.ikm(p, v)
}

/// Full actuator states for one base-frame sample.
///
/// `transmission_ratio` is motor radians per meter of travel for each actuator, so
/// `tau = force / ratio`.
pub fn idm<T: Real, M: Manipulator<T> + ?Sized>(
    model: &M,
    sample: &TrajectorySample<T>,
    q: &Vec3<T>,
    q_dot: &Vec3<T>,
    transmission_ratio: &Vec3<T>,
) -> Result<[ActuatorState<T>; 3], KinematicsError> {
    let q_ddot = model.joint_accelerations(&sample.position, &sample.velocity, &sample.acceleration)?;
    let force = model.actuator_forces(sample, q_dot, &q_ddot)?;
    Ok(std::array::from_fn(|i| ActuatorState {
        q: q[i],
        q_dot: q_dot[i],
        q_ddot: q_ddot[i],
        force: force[i],
        tau: force[i] / transmission_ratio[i],
    }))
}

/// Worst slack of one constraint class over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintMargin<T> {
    /// Minimum over samples and actuators of the slack; negative when violated.
    pub worst_margin: T,
    pub violated: bool,
}

impl<T: Real> ConstraintMargin<T> {
    fn from_margin(worst_margin: T) -> Self {
        Self {
            worst_margin,
            violated: worst_margin < T::zero() || worst_margin.is_nan(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintReport<T> {
    pub displacement: ConstraintMargin<T>,
    pub velocity: ConstraintMargin<T>,
    pub torque: ConstraintMargin<T>,
}

impl<T: Real> ConstraintReport<T> {
    pub fn feasible(&self) -> bool {
        !(self.displacement.violated || self.velocity.violated || self.torque.violated)
    }

    /// Squared violations, each normalized by its bound scale.
    pub fn normalized_violation(&self, limits: &ActuatorLimits<T>) -> T {
        let sq = |margin: T, scale: T| {
            let v = (-margin).max(T::zero()) / scale;
            v * v
        };
        sq(self.displacement.worst_margin, limits.q_max - limits.q_min)
            + sq(self.velocity.worst_margin, limits.v_max)
            + sq(self.torque.worst_margin, limits.tau_max)
    }
}

/// Checks `q_min <= q <= q_max`, `|q_dot| <= v_max` and `|tau| <= tau_max` for every state.
pub fn check_limits<T: Real>(
    limits: &ActuatorLimits<T>,
    states: &[ActuatorState<T>],
) -> ConstraintReport<T> {
    let inf = T::infinity();
    let (mut dq, mut dv, mut dt) = (inf, inf, inf);
    for s in states {
        dq = dq.min((s.q - limits.q_min).min(limits.q_max - s.q));
        dv = dv.min(limits.v_max - s.q_dot.abs());
        dt = dt.min(limits.tau_max - s.tau.abs());
    }
    ConstraintReport {
        displacement: ConstraintMargin::from_margin(dq),
        velocity: ConstraintMargin::from_margin(dv),
        torque: ConstraintMargin::from_margin(dt),
    }
}
