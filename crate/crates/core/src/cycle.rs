//! Drive cycles and moving-average smoothing.
//!
//! A cycle is a uniformly sampled target-speed trace. Smoothing replaces each
//! sample by the mean of the `2m + 1` samples centred on it; indices past
//! either end read the nearest endpoint (endpoint-hold padding).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Target speeds below this are treated as stops.
pub const STOP_SPEED_M_S: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DriveCycle {
    name: String,
    source: String,
    dt_s: f64,
    speeds_m_s: Vec<f64>,
}

impl DriveCycle {
    pub fn new(name: impl Into<String>, dt_s: f64, speeds_m_s: Vec<f64>) -> Result<Self> {
        if !(dt_s.is_finite() && dt_s > 0.0) {
            return Err(Error::InvalidCycle(format!(
                "sampling interval must be positive, got {dt_s}"
            )));
        }
        if speeds_m_s.len() < 2 {
            return Err(Error::InvalidCycle(format!(
                "need at least 2 samples, got {}",
                speeds_m_s.len()
            )));
        }
        if let Some(k) = speeds_m_s.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidCycle(format!(
                "sample {k} is negative or not finite ({})",
                speeds_m_s[k]
            )));
        }
        Ok(Self {
            name: name.into(),
            source: String::new(),
            dt_s,
            speeds_m_s,
        })
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn dt_s(&self) -> f64 {
        self.dt_s
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds_m_s
    }

    pub fn len(&self) -> usize {
        self.speeds_m_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speeds_m_s.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt_s
    }

    pub fn time_at(&self, k: usize) -> f64 {
        k as f64 * self.dt_s
    }

    pub fn has_stops(&self) -> bool {
        self.speeds_m_s.iter().any(|&v| v < STOP_SPEED_M_S)
    }

    /// Target at time `t` holding each sample until the next one.
    pub fn held_speed_at(&self, t: f64) -> f64 {
        let k = libm::floor(t / self.dt_s + 1e-9);
        let k = if k <= 0.0 { 0 } else { (k as usize).min(self.len() - 1) };
        self.speeds_m_s[k]
    }

    /// Target at time `t` by linear interpolation between samples.
    pub fn interpolated_speed_at(&self, t: f64) -> f64 {
        let x = t / self.dt_s;
        if x <= 0.0 {
            return self.speeds_m_s[0];
        }
        let last = self.len() - 1;
        let k = libm::floor(x) as usize;
        if k >= last {
            return self.speeds_m_s[last];
        }
        let frac = x - k as f64;
        let (a, b) = (self.speeds_m_s[k], self.speeds_m_s[k + 1]);
        if frac == 0.0 {
            a
        } else {
            a + (b - a) * frac
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SmoothingMode {
    /// Smooth every sample (coordination with vehicles and signals).
    Everywhere,
    /// Smooth only where the original target is non-zero; stops are kept.
    PreserveStops,
}

impl SmoothingMode {
    pub const ALL: [SmoothingMode; 2] = [SmoothingMode::Everywhere, SmoothingMode::PreserveStops];

    pub fn as_str(self) -> &'static str {
        match self {
            SmoothingMode::Everywhere => "everywhere",
            SmoothingMode::PreserveStops => "preserve-stops",
        }
    }
}

impl fmt::Display for SmoothingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SmoothingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "everywhere" | "stars" => Ok(SmoothingMode::Everywhere),
            "preserve-stops" | "circles" => Ok(SmoothingMode::PreserveStops),
            _ => Err(Error::InvalidInput(
                "smoothing mode must be `everywhere` or `preserve-stops`",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BoundaryPolicy {
    /// Indices before the start read the first sample, past the end the last.
    #[default]
    EndpointHold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmoothingSpec {
    pub half_width: usize,
    pub mode: SmoothingMode,
    pub boundary: BoundaryPolicy,
}

impl SmoothingSpec {
    pub fn new(half_width: usize, mode: SmoothingMode) -> Self {
        Self {
            half_width,
            mode,
            boundary: BoundaryPolicy::EndpointHold,
        }
    }
}

/// Centred moving average of half-width `m` over the original trace.
///
/// In [`SmoothingMode::PreserveStops`] samples whose original target is a
/// stop are copied through unchanged; the windows of the other samples still
/// read the original trace, stops included. The result is kept within the
/// window's own range so constant stretches come back bit-identical.
pub fn smooth_cycle(cycle: &DriveCycle, spec: &SmoothingSpec) -> DriveCycle {
    let m = spec.half_width;
    let src = cycle.speeds();
    let n = src.len();
    if m == 0 {
        return cycle.clone();
    }
    let width = (2 * m + 1) as f64;
    let at = |i: isize| -> f64 {
        match spec.boundary {
            BoundaryPolicy::EndpointHold => src[i.clamp(0, n as isize - 1) as usize],
        }
    };
    let speeds = (0..n)
        .map(|k| {
            if spec.mode == SmoothingMode::PreserveStops && src[k] < STOP_SPEED_M_S {
                return src[k];
            }
            let (mut sum, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
            for i in (k as isize - m as isize)..=(k as isize + m as isize) {
                let v = at(i);
                sum += v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (sum / width).clamp(lo, hi)
        })
        .collect();
    DriveCycle {
        name: cycle.name.clone(),
        source: cycle.source.clone(),
        dt_s: cycle.dt_s,
        speeds_m_s: speeds,
    }
}

/// Cumulative distance at every sample, trapezoidal rule, starting at 0.
pub fn position_trace(cycle: &DriveCycle) -> Vec<f64> {
    let dt = cycle.dt_s();
    let mut x = 0.0;
    let mut out = Vec::with_capacity(cycle.len());
    out.push(0.0);
    for w in cycle.speeds().windows(2) {
        x += 0.5 * (w[0] + w[1]) * dt;
        out.push(x);
    }
    out
}

/// Distance covered by the target trace, trapezoidal rule.
pub fn cycle_distance(cycle: &DriveCycle) -> f64 {
    position_trace(cycle).last().copied().unwrap_or(0.0)
}

/// Linear interpolation onto a uniform grid of spacing `new_dt` starting at
/// 0 and not extending past the original duration.
pub fn resample_cycle(cycle: &DriveCycle, new_dt: f64) -> Result<DriveCycle> {
    if !(new_dt.is_finite() && new_dt > 0.0) {
        return Err(Error::InvalidInput("resampling interval must be positive"));
    }
    if new_dt == cycle.dt_s() {
        return Ok(cycle.clone());
    }
    let steps = libm::floor(cycle.duration_s() / new_dt + 1e-9) as usize;
    let speeds = (0..=steps)
        .map(|j| cycle.interpolated_speed_at(j as f64 * new_dt))
        .collect();
    DriveCycle::new(cycle.name().to_string(), new_dt, speeds).map(|c| c.with_source(cycle.source()))
}
