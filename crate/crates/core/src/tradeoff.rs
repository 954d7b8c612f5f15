//! Fuel savings versus inter-vehicle spacing as the smoothing half-width grows.
//!
//! Spacing is measured on the target traces, not the closed-loop ones: it is
//! the largest gap that opens between the smoothed and the original position
//! trajectories, which is what surrounding traffic following the original
//! cycle would have to concede.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cycle::{position_trace, smooth_cycle, DriveCycle, SmoothingMode, SmoothingSpec};
use crate::error::{Error, Result};
use crate::sim::{fuel_per_100km, Model, TrajectoryLog};

/// Positional deviation of a smoothed trace from its original.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpacingReport {
    /// max |x_smoothed - x_original|
    pub max_abs_m: f64,
    /// Largest lead of the smoothed vehicle over its nominal position (>= 0).
    pub max_ahead_m: f64,
    /// Largest lag behind the nominal position (>= 0).
    pub max_behind_m: f64,
}

/// Extra spacing needed for `smoothed` to be driven among traffic that
/// follows `original`.
pub fn spacing_requirement(original: &DriveCycle, smoothed: &DriveCycle) -> Result<SpacingReport> {
    if original.len() != smoothed.len() || original.dt_s() != smoothed.dt_s() {
        return Err(Error::InvalidPair(format!(
            "original has {} samples at {} s, smoothed has {} at {} s",
            original.len(),
            original.dt_s(),
            smoothed.len(),
            smoothed.dt_s()
        )));
    }
    let xo = position_trace(original);
    let xs = position_trace(smoothed);
    let mut report = SpacingReport::default();
    for (o, s) in xo.iter().zip(&xs) {
        let d = s - o;
        report.max_ahead_m = report.max_ahead_m.max(d);
        report.max_behind_m = report.max_behind_m.max(-d);
    }
    report.max_abs_m = report.max_ahead_m.max(report.max_behind_m);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TradeoffPoint {
    pub half_width: usize,
    pub mode: SmoothingMode,
    pub fuel_per_100km: f64,
    /// Relative to the unsmoothed run of the same cycle.
    pub fuel_savings_pct: f64,
    pub spacing_m: f64,
    pub spacing_ahead_m: f64,
    pub spacing_behind_m: f64,
    pub trip_time_s: f64,
    pub fuel_g: f64,
    pub distance_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeSeries {
    pub mode: SmoothingMode,
    /// Ascending in half-width, starting at 0.
    pub points: Vec<TradeoffPoint>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TradeoffFront {
    pub cycle: String,
    pub baseline_fuel_per_100km: f64,
    pub series: Vec<ModeSeries>,
}

impl TradeoffFront {
    pub fn series(&self, mode: SmoothingMode) -> Option<&ModeSeries> {
        self.series.iter().find(|s| s.mode == mode)
    }

    pub fn points(&self) -> impl Iterator<Item = &TradeoffPoint> {
        self.series.iter().flat_map(|s| s.points.iter())
    }

    /// Point with the largest savings across all modes.
    pub fn best_savings(&self) -> Option<&TradeoffPoint> {
        self.points()
            .max_by(|a, b| a.fuel_savings_pct.total_cmp(&b.fuel_savings_pct))
    }

    pub fn largest_spacing(&self) -> Option<&TradeoffPoint> {
        self.points().max_by(|a, b| a.spacing_m.total_cmp(&b.spacing_m))
    }

    /// Points whose spacing dropped by more than `tolerance_m` from the
    /// previous half-width of the same mode.
    pub fn spacing_decreases(&self, tolerance_m: f64) -> Vec<(SmoothingMode, usize, f64)> {
        let mut out = Vec::new();
        for s in &self.series {
            for w in s.points.windows(2) {
                let drop = w[0].spacing_m - w[1].spacing_m;
                if drop > tolerance_m {
                    out.push((s.mode, w[1].half_width, drop));
                }
            }
        }
        out
    }
}

/// Runs independent jobs and returns their results in job order.
///
/// Implementations may evaluate jobs concurrently; the ordering of the
/// returned vector must match `jobs` regardless.
pub trait Executor {
    fn map_ordered<J, R, F>(&self, jobs: &[J], f: F) -> Vec<R>
    where
        J: Sync,
        R: Send,
        F: Fn(&J) -> R + Sync + Send;
}

/// Evaluates jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map_ordered<J, R, F>(&self, jobs: &[J], f: F) -> Vec<R>
    where
        J: Sync,
        R: Send,
        F: Fn(&J) -> R + Sync + Send,
    {
        jobs.iter().map(f).collect()
    }
}

struct RunSummary {
    fuel_per_100km: f64,
    fuel_g: f64,
    distance_m: f64,
    trip_time_s: f64,
}

fn summarize(log: &TrajectoryLog) -> Result<RunSummary> {
    Ok(RunSummary {
        fuel_per_100km: fuel_per_100km(log)?,
        fuel_g: log.cumulative_fuel_g(),
        distance_m: log.final_position_m(),
        trip_time_s: log.trip_time_s(),
    })
}

fn evaluate(
    cycle: &DriveCycle,
    spec: SmoothingSpec,
    model: &Model,
) -> Result<(RunSummary, SpacingReport)> {
    let smoothed = smooth_cycle(cycle, &spec);
    let spacing = spacing_requirement(cycle, &smoothed)?;
    let log = model.simulate(&smoothed)?;
    Ok((summarize(&log)?, spacing))
}

fn point(
    spec: SmoothingSpec,
    baseline: f64,
    run: &RunSummary,
    spacing: SpacingReport,
) -> TradeoffPoint {
    TradeoffPoint {
        half_width: spec.half_width,
        mode: spec.mode,
        fuel_per_100km: run.fuel_per_100km,
        fuel_savings_pct: 100.0 * (baseline - run.fuel_per_100km) / baseline,
        spacing_m: spacing.max_abs_m,
        spacing_ahead_m: spacing.max_ahead_m,
        spacing_behind_m: spacing.max_behind_m,
        trip_time_s: run.trip_time_s,
        fuel_g: run.fuel_g,
        distance_m: run.distance_m,
    }
}

/// Smooths `cycle` at every `(m, mode)` pair, simulates each result and
/// reports fuel savings against the unsmoothed run alongside the spacing
/// requirement.
///
/// The unsmoothed baseline is always computed and anchors every mode at
/// `m = 0`. Half-widths are sorted and deduplicated; modes keep the order
/// given. Non-baseline points are evaluated through `exec`, so the result is
/// identical for serial and concurrent executors.
pub fn sweep_tradeoff<E: Executor>(
    cycle: &DriveCycle,
    half_widths: &[usize],
    modes: &[SmoothingMode],
    model: &Model,
    exec: &E,
) -> Result<TradeoffFront> {
    if half_widths.is_empty() {
        return Err(Error::InvalidInput("at least one half-width is required"));
    }
    if modes.is_empty() {
        return Err(Error::InvalidInput("at least one smoothing mode is required"));
    }
    model.validate()?;
    let mut widths: Vec<usize> = half_widths.to_vec();
    widths.push(0);
    widths.sort_unstable();
    widths.dedup();
    let mut mode_list: Vec<SmoothingMode> = Vec::new();
    for &m in modes {
        if !mode_list.contains(&m) {
            mode_list.push(m);
        }
    }

    let baseline_log = model.simulate(cycle).map_err(|e| Error::SweepPoint {
        half_width: 0,
        mode: mode_list[0],
        source: Box::new(e),
    })?;
    let baseline = summarize(&baseline_log)?;
    let anchor = spacing_requirement(cycle, cycle)?;

    let jobs: Vec<SmoothingSpec> = mode_list
        .iter()
        .flat_map(|&mode| {
            widths
                .iter()
                .filter(|&&m| m > 0)
                .map(move |&m| SmoothingSpec::new(m, mode))
        })
        .collect();
    let results = exec.map_ordered(&jobs, |spec| evaluate(cycle, *spec, model));

    let mut results = jobs.iter().zip(results);
    let mut series = Vec::with_capacity(mode_list.len());
    for &mode in &mode_list {
        let mut points = Vec::with_capacity(widths.len());
        points.push(point(
            SmoothingSpec::new(0, mode),
            baseline.fuel_per_100km,
            &baseline,
            anchor,
        ));
        for _ in widths.iter().filter(|&&m| m > 0) {
            let (spec, result) = results.next().expect("one result per job");
            let (run, spacing) = result.map_err(|e| Error::SweepPoint {
                half_width: spec.half_width,
                mode: spec.mode,
                source: Box::new(e),
            })?;
            points.push(point(*spec, baseline.fuel_per_100km, &run, spacing));
        }
        series.push(ModeSeries { mode, points });
    }

    let front = TradeoffFront {
        cycle: String::from(cycle.name()),
        baseline_fuel_per_100km: baseline.fuel_per_100km,
        series,
    };
    for (mode, m, drop) in front.spacing_decreases(0.0) {
        log::warn!(
            "{}: spacing decreased by {drop} m at m = {m} ({mode})",
            front.cycle
        );
    }
    Ok(front)
}
