//! Tool paths, constant-feed sampling, and localization into the base frame.

use thiserror::Error;

use crate::frames::{placement_to_transform, Placement};
use crate::linalg::Vec3;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid feed: {0}")]
    InvalidFeed(String),
    #[error("expected samples in the {expected:?} frame, found {found:?}")]
    FrameMismatch { expected: Frame, found: Frame },
    #[error("feed direction undefined at t = {t} s: {reason}")]
    UndefinedFeedDirection { t: f64, reason: &'static str },
}

/// Frame a [`TrajectorySample`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Path,
    Base,
}

/// Rectangle of length `L` along `X_p` and width `W` along `Y_p`, centered on the path
/// frame origin in the `z_p = 0` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectPath<T> {
    length: T,
    width: T,
}

impl<T: Real> RectPath<T> {
    pub fn new(length: T, width: T) -> Result<Self, PathError> {
        if !(length > T::zero() && length.is_finite() && width > T::zero() && width.is_finite()) {
            return Err(PathError::InvalidPath(format!(
                "rectangle sides must be positive and finite (L = {length}, W = {width})"
            )));
        }
        Ok(Self { length, width })
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn perimeter(&self) -> T {
        T::two() * (self.length + self.width)
    }

    /// Corners A, B, C, D.
    pub fn corners(&self) -> [Vec3<T>; 4] {
        let hl = self.length * T::half();
        let hw = self.width * T::half();
        let z = T::zero();
        [
            Vec3::new(-hl, -hw, z),
            Vec3::new(hl, -hw, z),
            Vec3::new(hl, hw, z),
            Vec3::new(-hl, hw, z),
        ]
    }

    /// Closed polyline A -> B -> C -> D -> A.
    pub fn to_polyline(&self) -> Polyline<T> {
        let c = self.corners();
        Polyline {
            waypoints: vec![c[0], c[1], c[2], c[3], c[0]],
        }
    }
}

/// Ordered waypoints in the path frame, traversed as independent straight segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<T> {
    waypoints: Vec<Vec3<T>>,
}

impl<T: Real> Polyline<T> {
    pub fn new(waypoints: Vec<Vec3<T>>) -> Result<Self, PathError> {
        if waypoints.len() < 2 {
            return Err(PathError::InvalidPath("a polyline needs at least two waypoints".into()));
        }
        if waypoints.iter().any(|w| !w.is_finite()) {
            return Err(PathError::InvalidPath("waypoints must be finite".into()));
        }
        if let Some(i) = waypoints
            .windows(2)
            .position(|w| (w[1] - w[0]).norm() <= T::zero())
        {
            return Err(PathError::InvalidPath(format!("segment {i} has zero length")));
        }
        Ok(Self { waypoints })
    }

    pub fn waypoints(&self) -> &[Vec3<T>] {
        &self.waypoints
    }

    pub fn segment_count(&self) -> usize {
        self.waypoints.len() - 1
    }

    pub fn segment_lengths(&self) -> impl Iterator<Item = T> + '_ {
        self.waypoints.windows(2).map(|w| (w[1] - w[0]).norm())
    }

    pub fn length(&self) -> T {
        self.segment_lengths().fold(T::zero(), |a, b| a + b)
    }
}

impl<T: Real> From<RectPath<T>> for Polyline<T> {
    fn from(r: RectPath<T>) -> Self {
        r.to_polyline()
    }
}

impl<T: Real> From<&RectPath<T>> for Polyline<T> {
    fn from(r: &RectPath<T>) -> Self {
        r.to_polyline()
    }
}

/// Constant feed speed (m/s) and nominal sampling period (s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedSpec<T> {
    pub speed: T,
    pub sample_dt: T,
}

impl<T: Real> FeedSpec<T> {
    pub fn new(speed: T, sample_dt: T) -> Result<Self, PathError> {
        if !(speed > T::zero() && speed.is_finite()) {
            return Err(PathError::InvalidFeed(format!("speed must be positive, got {speed}")));
        }
        if !(sample_dt > T::zero() && sample_dt.is_finite()) {
            return Err(PathError::InvalidFeed(format!(
                "sample_dt must be positive, got {sample_dt}"
            )));
        }
        Ok(Self { speed, sample_dt })
    }
}

/// Machining load magnitudes (N). Directions follow the instantaneous feed direction `v`:
/// feed opposes `v`, axial points along `-Z_b`, radial along `Z_b x v`. Each `flip_*`
/// reverses the corresponding direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CuttingForces<T> {
    pub f_feed: T,
    pub f_axial: T,
    pub f_radial: T,
    pub flip_feed: bool,
    pub flip_axial: bool,
    pub flip_radial: bool,
}

impl<T: Real> CuttingForces<T> {
    pub fn new(f_feed: T, f_axial: T, f_radial: T) -> Self {
        Self {
            f_feed,
            f_axial,
            f_radial,
            ..Self::none()
        }
    }

    pub fn none() -> Self {
        Self {
            f_feed: T::zero(),
            f_axial: T::zero(),
            f_radial: T::zero(),
            flip_feed: false,
            flip_axial: false,
            flip_radial: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.f_feed == T::zero() && self.f_axial == T::zero() && self.f_radial == T::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample<T> {
    pub t: T,
    /// Index of the straight segment this sample belongs to.
    pub segment: usize,
    pub position: Vec3<T>,
    pub velocity: Vec3<T>,
    pub acceleration: Vec3<T>,
    /// Load applied on the end-effector by the process.
    pub external_force: Vec3<T>,
    pub frame: Frame,
}

/// Number of sampling intervals covering `duration` with period `dt`, the last one possibly
/// shorter. A ratio within a few ulps of an integer counts as that integer.
fn interval_count<T: Real>(duration: T, dt: T) -> usize {
    let ratio = duration / dt;
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= T::lit(1e-9) * nearest.max(T::one()) {
        nearest
    } else {
        ratio.ceil()
    };
    n.to_usize().unwrap_or(usize::MAX).max(1)
}

/// Samples a polyline at constant speed.
///
/// Each segment starts at its first corner and ends exactly on the next one; corner
/// instants therefore appear twice, once per segment, each with that segment's velocity.
pub fn sample_path<T: Real>(
    path: &Polyline<T>,
    feed: &FeedSpec<T>,
) -> Result<Vec<TrajectorySample<T>>, PathError> {
    let mut samples = Vec::new();
    let mut t0 = T::zero();
    for (seg, w) in path.waypoints.windows(2).enumerate() {
        let delta = w[1] - w[0];
        let len = delta.norm();
        if feed.sample_dt > len / (T::two() * feed.speed) {
            return Err(PathError::InvalidFeed(format!(
                "sample_dt {} too coarse for segment {seg} of length {len} at speed {}",
                feed.sample_dt, feed.speed
            )));
        }
        let duration = len / feed.speed;
        let dir = delta * (T::one() / len);
        let velocity = dir * feed.speed;
        let n = interval_count(duration, feed.sample_dt);
        for k in 0..=n {
            let (tau, position) = if k == n {
                (duration, w[1])
            } else {
                let tau = T::from_usize(k).unwrap() * feed.sample_dt;
                (tau, w[0] + dir * (feed.speed * tau))
            };
            samples.push(TrajectorySample {
                t: t0 + tau,
                segment: seg,
                position,
                velocity,
                acceleration: Vec3::zeros(),
                external_force: Vec3::zeros(),
                frame: Frame::Path,
            });
        }
        t0 = t0 + duration;
    }
    Ok(samples)
}

/// Trajectory duration: the timestamp of the last sample.
pub fn total_time<T: Real>(samples: &[TrajectorySample<T>]) -> T {
    samples.last().map_or(T::zero(), |s| s.t)
}

/// Expresses path-frame samples in the base frame for the given placement.
pub fn localize_trajectory<T: Real>(
    samples: &[TrajectorySample<T>],
    placement: &Placement<T>,
) -> Result<Vec<TrajectorySample<T>>, PathError> {
    let tf = placement_to_transform(placement);
    samples
        .iter()
        .map(|s| {
            if s.frame != Frame::Path {
                return Err(PathError::FrameMismatch {
                    expected: Frame::Path,
                    found: s.frame,
                });
            }
            Ok(TrajectorySample {
                t: s.t,
                segment: s.segment,
                position: tf.transform_point(&s.position),
                velocity: tf.transform_vector(&s.velocity),
                acceleration: tf.transform_vector(&s.acceleration),
                external_force: tf.transform_vector(&s.external_force),
                frame: Frame::Base,
            })
        })
        .collect()
}

/// Sets each sample's external force from the cutting load and its feed direction.
pub fn attach_cutting_forces<T: Real>(
    samples: &[TrajectorySample<T>],
    forces: &CuttingForces<T>,
) -> Result<Vec<TrajectorySample<T>>, PathError> {
    let up = Vec3::unit(2);
    let sign = |flip: bool| if flip { -T::one() } else { T::one() };
    samples
        .iter()
        .map(|s| {
            if s.frame != Frame::Base {
                return Err(PathError::FrameMismatch {
                    expected: Frame::Base,
                    found: s.frame,
                });
            }
            let t = s.t.to_f64().unwrap_or(f64::NAN);
            let feed_dir = s.velocity.normalized().ok_or(PathError::UndefinedFeedDirection {
                t,
                reason: "zero velocity",
            })?;
            let mut force = Vec3::zeros();
            if forces.f_feed != T::zero() {
                force += -feed_dir * (forces.f_feed * sign(forces.flip_feed));
            }
            if forces.f_axial != T::zero() {
                force += -up * (forces.f_axial * sign(forces.flip_axial));
            }
            if forces.f_radial != T::zero() {
                let radial = up.cross(&feed_dir).normalized().ok_or(
                    PathError::UndefinedFeedDirection {
                        t,
                        reason: "feed parallel to the tool axis leaves the radial direction undefined",
                    },
                )?;
                force += radial * (forces.f_radial * sign(forces.flip_radial));
            }
            Ok(TrajectorySample {
                external_force: force,
                ..*s
            })
        })
        .collect()
}
