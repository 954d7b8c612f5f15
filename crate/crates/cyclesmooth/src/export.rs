//! Trajectory and tradeoff-front exports, plus their parsers.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use cyclesmooth_core::{fuel_per_100km, LogRow, SmoothingMode, TradeoffFront, TrajectoryLog};

use crate::error::{io_err, Error, Result};

/// Rows of a trajectory log as CSV, header in [`LogRow::COLUMNS`] order.
pub fn trajectory_csv(rows: &[LogRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    if rows.is_empty() {
        w.write_record(LogRow::COLUMNS).map_err(csv_err)?;
    }
    into_string(w)
}

pub fn parse_trajectory_csv(text: &str) -> Result<Vec<LogRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != LogRow::COLUMNS {
        return Err(Error::Parse {
            path: None,
            line: Some(1),
            message: format!("trajectory header must be {}", LogRow::COLUMNS.join(",")),
        });
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// The text summary written next to a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub cycle: String,
    pub fuel_g: f64,
    pub fuel_per_100km: Option<f64>,
    pub distance_m: f64,
    pub trip_time_s: f64,
    pub rms_tracking_error_m_s: f64,
    pub energy_ratio: f64,
    pub clamped_bsfc_lookups: usize,
}

/// Seconds at the start of a run left out of the RMS tracking error.
pub const RMS_SKIP_S: f64 = 5.0;

impl RunSummary {
    pub fn from_log(cycle: &str, log: &TrajectoryLog, lhv_j_per_g: f64) -> Self {
        Self {
            cycle: cycle.to_string(),
            fuel_g: log.cumulative_fuel_g(),
            fuel_per_100km: fuel_per_100km(log).ok(),
            distance_m: log.final_position_m(),
            trip_time_s: log.trip_time_s(),
            rms_tracking_error_m_s: log.rms_tracking_error(RMS_SKIP_S),
            energy_ratio: log.energy_ratio(lhv_j_per_g),
            clamped_bsfc_lookups: log.totals.clamped_bsfc_lookups,
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "cycle: {}", self.cycle);
        let _ = writeln!(s, "fuel_g: {:.3}", self.fuel_g);
        match self.fuel_per_100km {
            Some(v) => {
                let _ = writeln!(s, "fuel_g_per_100km: {v:.3}");
            }
            None => {
                let _ = writeln!(s, "fuel_g_per_100km: undefined (no distance)");
            }
        }
        let _ = writeln!(s, "distance_m: {:.3}", self.distance_m);
        let _ = writeln!(s, "trip_time_s: {:.3}", self.trip_time_s);
        let _ = writeln!(
            s,
            "rms_tracking_error_m_s: {:.6} (after the first {RMS_SKIP_S} s)",
            self.rms_tracking_error_m_s
        );
        let _ = writeln!(s, "fuel_energy_over_tractive_work: {:.4}", self.energy_ratio);
        let _ = writeln!(s, "clamped_bsfc_lookups: {}", self.clamped_bsfc_lookups);
        s
    }
}

/// One row of the front table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRow {
    pub cycle: String,
    pub mode: SmoothingMode,
    pub m: usize,
    pub fuel_per_100km: f64,
    pub fuel_savings_pct: f64,
    pub spacing_m: f64,
    pub trip_time_s: f64,
}

pub const FRONT_COLUMNS: [&str; 7] = [
    "cycle",
    "mode",
    "m",
    "fuel_per_100km",
    "fuel_savings_pct",
    "spacing_m",
    "trip_time_s",
];

pub fn front_rows(front: &TradeoffFront) -> Vec<FrontRow> {
    front
        .points()
        .map(|p| FrontRow {
            cycle: front.cycle.clone(),
            mode: p.mode,
            m: p.half_width,
            fuel_per_100km: p.fuel_per_100km,
            fuel_savings_pct: p.fuel_savings_pct,
            spacing_m: p.spacing_m,
            trip_time_s: p.trip_time_s,
        })
        .collect()
}

pub fn front_csv(front: &TradeoffFront) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in front_rows(front) {
        w.serialize(row).map_err(csv_err)?;
    }
    into_string(w)
}

pub fn parse_front_csv(text: &str) -> Result<Vec<FrontRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != FRONT_COLUMNS {
        return Err(Error::Parse {
            path: None,
            line: Some(1),
            message: format!("front header must be {}", FRONT_COLUMNS.join(",")),
        });
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

pub fn front_json(front: &TradeoffFront) -> Result<String> {
    serde_json::to_string_pretty(front)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Parse {
            path: None,
            line: None,
            message: e.to_string(),
        })
}

pub fn parse_front_json(text: &str) -> Result<TradeoffFront> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: None,
        line: Some(e.line()),
        message: e.to_string(),
    })
}

/// A gnuplot script plotting savings against spacing from `csv_name`, one
/// series per mode.
pub fn gnuplot_script(front: &TradeoffFront, csv_name: &str, png_name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 800,600");
    let _ = writeln!(s, "set output '{png_name}'");
    let _ = writeln!(s, "set title 'Fuel savings vs. additional spacing: {}'", front.cycle);
    let _ = writeln!(s, "set xlabel 'additional inter-vehicle spacing (m)'");
    let _ = writeln!(s, "set ylabel 'fuel savings (%)'");
    let _ = writeln!(s, "set key bottom right");
    let plots: Vec<String> = front
        .series
        .iter()
        .map(|series| {
            let (point, label) = match series.mode {
                SmoothingMode::Everywhere => (3, "everywhere"),
                SmoothingMode::PreserveStops => (6, "preserve-stops"),
            };
            format!(
                "'{csv_name}' using (strcol(2) eq '{label}' ? $6 : NaN):5 skip 1 with linespoints pt {point} title '{label}'"
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(io_err(path))
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize);
    Error::Parse {
        path: None,
        line,
        message: e.to_string(),
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Parse {
        path: None,
        line: None,
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
