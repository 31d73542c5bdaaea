//! Electric model of the actuators' motors and energy integration.
//!
//! Per phase: `I = tau / K_t`, `V_e = K_e * omega`, `P_J = R I^2`, `P_L = L I dI/dt`,
//! `P_EM = V_e I`. The total drawn by the motor is `phases * (P_J + P_L + P_EM)`.

use std::ops::Range;

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MotorError {
    #[error("invalid motor parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("inconsistent traces: {0}")]
    InconsistentTrace(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotorParams<T> {
    /// Torque sensitivity (N m / A).
    pub k_t: T,
    /// Back-EMF constant (V s / rad).
    pub k_e: T,
    /// Winding resistance (ohm).
    pub resistance: T,
    /// Winding inductance (H).
    pub inductance: T,
    pub phases: u32,
    /// Motor radians per meter of actuator travel.
    pub transmission_ratio: T,
}

impl<T: Real> MotorParams<T> {
    pub fn new(
        k_t: T,
        k_e: T,
        resistance: T,
        inductance: T,
        phases: u32,
        transmission_ratio: T,
    ) -> Result<Self, MotorError> {
        let m = Self {
            k_t,
            k_e,
            resistance,
            inductance,
            phases,
            transmission_ratio,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), MotorError> {
        let z = T::zero();
        let bad = |what: &str| Err(MotorError::InvalidParameters(what.to_string()));
        if !(self.k_t > z && self.k_t.is_finite()) {
            return bad("k_t must be > 0");
        }
        if !(self.k_e >= z && self.resistance >= z && self.inductance >= z) {
            return bad("k_e, resistance and inductance must be >= 0");
        }
        if self.phases == 0 {
            return bad("phases must be >= 1");
        }
        if !(self.transmission_ratio > z && self.transmission_ratio.is_finite()) {
            return bad("transmission_ratio must be > 0");
        }
        Ok(())
    }

    /// Representative three-phase servo constants (not manufacturer data).
    pub fn representative_servo() -> Self {
        Self {
            k_t: T::lit(0.44),
            k_e: T::lit(0.15),
            resistance: T::lit(2.9),
            inductance: T::lit(8.5e-3),
            phases: 3,
            transmission_ratio: T::lit(209.0),
        }
    }

    fn phase_factor(&self) -> T {
        T::from_u32(self.phases).unwrap()
    }
}

/// Timestamps split into independent straight segments.
///
/// Within a segment timestamps strictly increase; consecutive segments may share the corner
/// instant.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    times: Vec<T>,
    segments: Vec<Range<usize>>,
}

impl<T: Real> TimeGrid<T> {
    /// `segment_ids[k]` names the segment of sample `k`; ids must be non-decreasing.
    pub fn new(times: Vec<T>, segment_ids: &[usize]) -> Result<Self, MotorError> {
        if times.len() != segment_ids.len() {
            return Err(MotorError::InvalidTrace(format!(
                "{} timestamps but {} segment ids",
                times.len(),
                segment_ids.len()
            )));
        }
        if times.len() < 2 {
            return Err(MotorError::InvalidTrace("need at least two samples".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(MotorError::InvalidTrace("timestamps must be finite".into()));
        }
        let mut segments = Vec::new();
        let mut start = 0;
        for k in 1..times.len() {
            if segment_ids[k] != segment_ids[k - 1] {
                if segment_ids[k] < segment_ids[k - 1] {
                    return Err(MotorError::InvalidTrace(format!(
                        "segment ids decrease at sample {k}"
                    )));
                }
                if times[k] < times[k - 1] {
                    return Err(MotorError::InvalidTrace(format!(
                        "time goes backwards at sample {k}"
                    )));
                }
                segments.push(start..k);
                start = k;
            } else if !(times[k] > times[k - 1]) {
                return Err(MotorError::InvalidTrace(format!(
                    "timestamps not strictly increasing at sample {k}"
                )));
            }
        }
        segments.push(start..times.len());
        Ok(Self { times, segments })
    }

    /// A single segment.
    pub fn uniform(times: Vec<T>) -> Result<Self, MotorError> {
        let ids = vec![0; times.len()];
        Self::new(times, &ids)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn segments(&self) -> &[Range<usize>] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sum of segment durations.
    pub fn duration(&self) -> T {
        self.segments.iter().fold(T::zero(), |acc, r| {
            acc + self.times[r.end - 1] - self.times[r.start]
        })
    }

    /// Trapezoidal integral of `values`, segment by segment.
    pub fn integrate(&self, values: &[T]) -> T {
        let mut total = T::zero();
        for r in &self.segments {
            for k in r.start + 1..r.end {
                let dt = self.times[k] - self.times[k - 1];
                total = total + (values[k] + values[k - 1]) * T::half() * dt;
            }
        }
        total
    }

    /// Time derivative by central differences inside each segment, one-sided at its ends.
    pub fn differentiate(&self, values: &[T]) -> Vec<T> {
        let t = &self.times;
        let mut out = vec![T::zero(); values.len()];
        for r in &self.segments {
            if r.len() < 2 {
                continue;
            }
            let (first, last) = (r.start, r.end - 1);
            out[first] = (values[first + 1] - values[first]) / (t[first + 1] - t[first]);
            out[last] = (values[last] - values[last - 1]) / (t[last] - t[last - 1]);
            for k in first + 1..last {
                out[k] = (values[k + 1] - values[k - 1]) / (t[k + 1] - t[k - 1]);
            }
        }
        out
    }
}

/// Electric quantities per sample. Power terms are per phase; `p_total` is the whole motor.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ElectricTrace<T> {
    pub current: Vec<T>,
    pub voltage: Vec<T>,
    pub p_joule: Vec<T>,
    pub p_inductive: Vec<T>,
    pub p_emf: Vec<T>,
    pub p_total: Vec<T>,
    pub phases: u32,
}

/// Converts motor torque (N m) and actuator rate (m/s) series to electric quantities.
pub fn electrify<T: Real>(
    motor: &MotorParams<T>,
    grid: &TimeGrid<T>,
    torque: &[T],
    rate: &[T],
) -> Result<ElectricTrace<T>, MotorError> {
    motor.validate()?;
    if torque.len() != grid.len() || rate.len() != grid.len() {
        return Err(MotorError::InvalidTrace(format!(
            "series lengths differ: {} timestamps, {} torques, {} rates",
            grid.len(),
            torque.len(),
            rate.len()
        )));
    }
    let current: Vec<T> = torque.iter().map(|&tau| tau / motor.k_t).collect();
    let voltage: Vec<T> = rate
        .iter()
        .map(|&v| motor.k_e * v * motor.transmission_ratio)
        .collect();
    let di_dt = grid.differentiate(&current);
    let n = grid.len();
    let phases = motor.phase_factor();
    let mut trace = ElectricTrace {
        current,
        voltage,
        p_joule: Vec::with_capacity(n),
        p_inductive: Vec::with_capacity(n),
        p_emf: Vec::with_capacity(n),
        p_total: Vec::with_capacity(n),
        phases: motor.phases,
    };
    for k in 0..n {
        let i = trace.current[k];
        let pj = motor.resistance * i * i;
        let pl = motor.inductance * i * di_dt[k];
        let pem = trace.voltage[k] * i;
        trace.p_joule.push(pj);
        trace.p_inductive.push(pl);
        trace.p_emf.push(pem);
        trace.p_total.push(phases * (pj + pl + pem));
    }
    Ok(trace)
}

/// Energy drawn by one actuator, with the contribution of each power term (phases included).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuatorEnergy<T> {
    pub energy: T,
    pub joule: T,
    pub inductive: T,
    pub emf: T,
    pub duration: T,
}

pub fn integrate_energy<T: Real>(trace: &ElectricTrace<T>, grid: &TimeGrid<T>) -> ActuatorEnergy<T> {
    let phases = T::from_u32(trace.phases).unwrap_or_else(T::one);
    ActuatorEnergy {
        energy: grid.integrate(&trace.p_total),
        joule: phases * grid.integrate(&trace.p_joule),
        inductive: phases * grid.integrate(&trace.p_inductive),
        emf: phases * grid.integrate(&trace.p_emf),
        duration: grid.duration(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport<T> {
    pub actuators: Vec<ActuatorEnergy<T>>,
    pub total: T,
    pub joule: T,
    pub inductive: T,
    pub emf: T,
    pub duration: T,
}

/// Sums per-actuator energies; all actuators must cover the same duration.
pub fn total_energy<T: Real>(
    actuators: &[ActuatorEnergy<T>],
) -> Result<EnergyReport<T>, MotorError> {
    let first = actuators
        .first()
        .ok_or_else(|| MotorError::InconsistentTrace("no actuators".into()))?;
    let tol = T::lit(1e-12) * first.duration.abs().max(T::one());
    if let Some(bad) = actuators
        .iter()
        .find(|a| (a.duration - first.duration).abs() > tol)
    {
        return Err(MotorError::InconsistentTrace(format!(
            "durations differ: {} s vs {} s",
            first.duration, bad.duration
        )));
    }
    let sum = |f: fn(&ActuatorEnergy<T>) -> T| {
        actuators.iter().map(f).fold(T::zero(), |a, b| a + b)
    };
    Ok(EnergyReport {
        actuators: actuators.to_vec(),
        total: sum(|a| a.energy),
        joule: sum(|a| a.joule),
        inductive: sum(|a| a.inductive),
        emf: sum(|a| a.emf),
        duration: first.duration,
    })
}
