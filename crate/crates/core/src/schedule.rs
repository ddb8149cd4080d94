//! Time-dependent control-field profiles Ω_σ(t) and the adiabatic storage
//! protocol built on them.
//!
//! Storage rotates the dark mode from photonic to atomic character by
//! ramping every control off while holding their ratios fixed; the ratios
//! pin the partition angles φⱼ, so only the global mixing angle θ moves.
//! The ramp shape is cos²(πt/2T): smooth, with zero derivative at both
//! endpoints to suppress diabatic excitation at switch-on and switch-off.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::system::{straight_line_roles, SystemConfig};

/// Shape of a control-field profile.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleKind {
    /// Ω(t) = omega_max for all t ≥ 0.
    Constant,
    /// Ω(t) = omega_max·cos²(πt/2T) on [0, T]; monotone ramp from
    /// omega_max to 0 with zero-derivative endpoints.
    StorageRamp,
    /// Linear interpolation between (t, Ω) samples.
    CustomSamples,
}

/// One ensemble's control field Ω(t).
#[derive(Clone, Debug, PartialEq)]
pub struct ControlSchedule {
    pub kind: ScheduleKind,
    /// Peak Rabi frequency.
    pub omega_max: f64,
    /// Total duration T; `None` for constant schedules (unbounded domain).
    pub duration: Option<f64>,
    /// Label tying the Ω-ratios of several schedules together.
    pub ratio_group: Option<String>,
    /// (t, Ω) pairs for the custom kind, sorted by t starting at 0.
    pub samples: Vec<(f64, f64)>,
}

impl ControlSchedule {
    pub fn constant(omega_max: f64) -> Self {
        Self {
            kind: ScheduleKind::Constant,
            omega_max,
            duration: None,
            ratio_group: None,
            samples: Vec::new(),
        }
    }

    pub fn storage_ramp(omega_max: f64, duration: f64) -> Self {
        Self {
            kind: ScheduleKind::StorageRamp,
            omega_max,
            duration: Some(duration),
            ratio_group: None,
            samples: Vec::new(),
        }
    }

    pub fn custom(samples: Vec<(f64, f64)>) -> Self {
        let omega_max = samples.iter().map(|&(_, w)| w).fold(0.0f64, f64::max);
        let duration = samples.last().map(|&(t, _)| t);
        Self { kind: ScheduleKind::CustomSamples, omega_max, duration, ratio_group: None, samples }
    }

    pub fn with_ratio_group(mut self, group: impl Into<String>) -> Self {
        self.ratio_group = Some(group.into());
        self
    }

    pub fn ratio_group(&self) -> Option<&str> {
        self.ratio_group.as_deref()
    }

    /// Evaluate Ω(t).
    pub fn omega(&self, t: f64) -> Result<f64> {
        let duration = self.duration.unwrap_or(f64::INFINITY);
        if !(0.0..=duration).contains(&t) {
            return Err(Error::TimeOutOfDomain { t, duration });
        }
        Ok(match self.kind {
            ScheduleKind::Constant => self.omega_max,
            ScheduleKind::StorageRamp => {
                let big_t = self.duration.expect("storage ramp has a duration");
                if t >= big_t {
                    0.0
                } else {
                    let c = (PI * t / (2.0 * big_t)).cos();
                    self.omega_max * c * c
                }
            }
            ScheduleKind::CustomSamples => {
                let i = match self.samples.iter().position(|&(ts, _)| ts >= t) {
                    Some(0) => return Ok(self.samples[0].1),
                    Some(i) => i,
                    None => return Ok(self.samples.last().expect("non-empty samples").1),
                };
                let (t0, w0) = self.samples[i - 1];
                let (t1, w1) = self.samples[i];
                let frac = (t - t0) / (t1 - t0);
                w0 + frac * (w1 - w0)
            }
        })
    }

    /// Internal consistency checks; empty when the schedule is well-formed.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if !self.omega_max.is_finite() || self.omega_max < 0.0 {
            violations.push(format!("omega_max must be finite and non-negative, got {}", self.omega_max));
        }
        match self.kind {
            ScheduleKind::Constant => {}
            ScheduleKind::StorageRamp => match self.duration {
                Some(t) if t > 0.0 && t.is_finite() => {}
                other => violations.push(format!("storage ramp needs a positive duration, got {other:?}")),
            },
            ScheduleKind::CustomSamples => {
                if self.samples.len() < 2 {
                    violations.push("custom schedule needs at least two samples".into());
                } else {
                    if self.samples[0].0 != 0.0 {
                        violations.push("custom schedule must start at t = 0".into());
                    }
                    for w in self.samples.windows(2) {
                        if w[1].0 <= w[0].0 {
                            violations.push(format!(
                                "custom sample times must be strictly increasing ({} then {})",
                                w[0].0, w[1].0
                            ));
                            break;
                        }
                    }
                    if let Some(&(t, w)) = self.samples.iter().find(|&&(t, w)| !t.is_finite() || !w.is_finite() || w < 0.0) {
                        violations.push(format!("custom sample ({t}, {w}) must be finite with Ω ≥ 0"));
                    }
                }
            }
        }
        violations
    }

    /// Structural reason two schedules cannot be ratio-locked, if any.
    /// Ratio lock means Ω_self(t)/Ω_other(t) is constant on (0, T).
    pub fn ratio_lock_violation(&self, other: &Self) -> Option<String> {
        if self.kind != other.kind {
            return Some(format!("kinds differ ({:?} vs {:?})", self.kind, other.kind));
        }
        match self.kind {
            ScheduleKind::Constant => None,
            ScheduleKind::StorageRamp => {
                if self.duration == other.duration {
                    None
                } else {
                    Some(format!("ramp durations differ ({:?} vs {:?})", self.duration, other.duration))
                }
            }
            ScheduleKind::CustomSamples => {
                if self.samples.len() != other.samples.len() {
                    return Some("sample counts differ".into());
                }
                if self
                    .samples
                    .iter()
                    .zip(&other.samples)
                    .any(|(&(ta, _), &(tb, _))| ta != tb)
                {
                    return Some("sample time grids differ".into());
                }
                // proportionality of Ω values
                let scale = self
                    .samples
                    .iter()
                    .zip(&other.samples)
                    .find(|((_, wa), (_, wb))| *wa != 0.0 && *wb != 0.0)
                    .map(|((_, wa), (_, wb))| wa / wb);
                let Some(scale) = scale else {
                    return Some("no common nonzero sample to fix the ratio".into());
                };
                let tol = 1e-12 * self.omega_max.max(scale * other.omega_max);
                for (&(t, wa), &(_, wb)) in self.samples.iter().zip(&other.samples) {
                    if (wa - scale * wb).abs() > tol {
                        return Some(format!("samples not proportional at t = {t}"));
                    }
                }
                None
            }
        }
    }

    /// Ratio Ω_self/Ω_other for structurally ratio-locked schedules.
    pub(crate) fn ratio_to(&self, other: &Self) -> f64 {
        match self.kind {
            ScheduleKind::CustomSamples => self
                .samples
                .iter()
                .zip(&other.samples)
                .find(|((_, wa), (_, wb))| *wa != 0.0 && *wb != 0.0)
                .map(|((_, wa), (_, wb))| wa / wb)
                .unwrap_or(f64::NAN),
            _ => self.omega_max / other.omega_max,
        }
    }
}

/// A ratio-locked control set: Ω_σ(t) = ratio_σ · Ω̄(t) with a common base
/// profile Ω̄. This is the storage condition that freezes the φⱼ angles.
#[derive(Clone, Debug)]
pub struct RatioLock {
    /// Per-ensemble ratios Ω_σ/Ω̄ in config order.
    pub ratios: Vec<f64>,
    /// Base profile Ω̄ (the first ensemble's schedule).
    pub base: ControlSchedule,
}

impl RatioLock {
    pub fn omega_bar(&self, t: f64) -> Result<f64> {
        self.base.omega(t)
    }
}

/// Establish that every control in the config is mutually ratio-locked and
/// return the common structure, or a protocol error describing the failure.
pub fn ratio_lock(config: &SystemConfig) -> Result<RatioLock> {
    let mut schedules = Vec::with_capacity(config.ensemble_count());
    for e in &config.ensembles {
        let sched = config
            .controls
            .get(&e.id)
            .ok_or_else(|| Error::RatioLock(format!("ensemble {:?} has no control schedule", e.id)))?;
        schedules.push(sched);
    }
    let base = schedules
        .first()
        .ok_or_else(|| Error::RatioLock("config has no ensembles".into()))?;
    if base.omega_max <= 0.0 {
        return Err(Error::RatioLock("base schedule has zero peak Rabi frequency".into()));
    }
    let mut ratios = Vec::with_capacity(schedules.len());
    for (sched, spec) in schedules.iter().zip(&config.ensembles) {
        if let Some(why) = sched.ratio_lock_violation(base) {
            return Err(Error::RatioLock(format!(
                "schedule for {:?} not ratio-locked to {:?}: {why}",
                spec.id, config.ensembles[0].id
            )));
        }
        ratios.push(sched.ratio_to(base));
    }
    Ok(RatioLock { ratios, base: (*base).clone() })
}

/// Sample the storage trajectory of the global mixing angle θ(t) for a
/// ratio-locked straight-line config.
///
/// Uses tan θ = √(Σ_σ (g_σ√N_σ/ratio_σ)²) / Ω̄(t), which is exact at
/// Ω̄ = 0 (θ = π/2) via atan2. Returns `nsamples` points spanning [0, T].
pub fn theta_trajectory(config: &SystemConfig, nsamples: usize) -> Result<Vec<(f64, f64)>> {
    let roles = straight_line_roles(config)?;
    let lock = ratio_lock(config)?;
    let k: f64 = roles
        .rates
        .iter()
        .zip(&lock.ratios)
        .map(|(&g, &r)| (g / r) * (g / r))
        .sum::<f64>()
        .sqrt();
    let span = lock.base.duration.unwrap_or(1.0);
    let nsamples = nsamples.max(2);
    let mut out = Vec::with_capacity(nsamples);
    for i in 0..nsamples {
        let t = span * i as f64 / (nsamples - 1) as f64;
        let omega_bar = lock.omega_bar(t)?;
        out.push((t, f64::atan2(k, omega_bar)));
    }
    Ok(out)
}

/// θ(t) at one time for a ratio-locked straight-line config (exact at Ω̄=0).
pub fn theta_at(config: &SystemConfig, t: f64) -> Result<f64> {
    let roles = straight_line_roles(config)?;
    let lock = ratio_lock(config)?;
    let k: f64 = roles
        .rates
        .iter()
        .zip(&lock.ratios)
        .map(|(&g, &r)| (g / r) * (g / r))
        .sum::<f64>()
        .sqrt();
    Ok(f64::atan2(k, lock.omega_bar(t)?))
}
